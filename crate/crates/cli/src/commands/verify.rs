//! Runs the library's property suite and reports per-property outcomes.

use std::path::Path;

use anyhow::Result;
use serde::Serialize;

use displace::suite::{run_all, PropertyOutcome};

use crate::config::{config_hash, VerifyConfig};
use crate::report::write_json;

#[derive(Debug, Clone, Serialize)]
pub struct VerifySummary {
    pub config_hash: String,
    pub total: usize,
    pub failed: Vec<String>,
}

#[derive(Debug, Serialize)]
struct VerifyReport<'a> {
    config_hash: &'a str,
    seed: u64,
    outcomes: &'a [PropertyOutcome],
}

pub fn run(cfg: &VerifyConfig, out: &Path) -> Result<VerifySummary> {
    let hash = config_hash(cfg);
    let outcomes = run_all(cfg.seed);
    for o in &outcomes {
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("{status} {} ({})", o.id, o.details);
    }
    write_json(
        &out.join("verify.json"),
        &VerifyReport { config_hash: &hash, seed: cfg.seed, outcomes: &outcomes },
    )?;
    Ok(VerifySummary {
        config_hash: hash,
        total: outcomes.len(),
        failed: outcomes.iter().filter(|o| !o.pass).map(|o| o.id.to_string()).collect(),
    })
}
