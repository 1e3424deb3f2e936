use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

use displace_cli::commands;
use displace_cli::config::{load_or_default, CommandConfig};

#[derive(Parser)]
#[command(
    name = "displace",
    version,
    about = "Particle descent experiments over sparse measures"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Averaged stochastic descent onto a random target, with suboptimality slope
    Fig1(CommonArgs),
    /// Approximation error of n particles against a uniform interval
    Fig2(CommonArgs),
    /// Hidden orthonormal basis recovery on the sphere
    Tensor(CommonArgs),
    /// Neuron angles against a uniform arc on the circle
    CircleNet(CommonArgs),
    /// Run the library's property suite
    Verify(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// TOML config; defaults to the shipped preset values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the config's seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: out)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config's logging interval, where the command has one
    #[arg(long)]
    log_every: Option<usize>,
}

const EXIT_RUNTIME: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn effective_config<T>(args: &CommonArgs) -> Result<(T, PathBuf), u8>
where
    T: CommandConfig + DeserializeOwned + Default,
{
    let mut cfg: T = load_or_default(args.config.as_deref()).map_err(|e| {
        eprintln!("config error: {e}");
        EXIT_CONFIG
    })?;
    if let Some(seed) = args.seed {
        cfg.set_seed(seed);
    }
    if let Some(log_every) = args.log_every {
        cfg.set_log_every(log_every);
    }
    cfg.validate().map_err(|e| {
        eprintln!("config error: {e}");
        EXIT_CONFIG
    })?;
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    Ok((cfg, out))
}

fn run(cmd: &Command) -> u8 {
    match cmd {
        Command::Fig1(args) => {
            let (cfg, out) = match effective_config(args) {
                Ok(v) => v,
                Err(code) => return code,
            };
            match commands::fig1::run(&cfg, &out) {
                Ok(s) => {
                    println!(
                        "fig1 [{}]: slope {}, reference value {:.6e}",
                        s.config_hash,
                        s.slope.map_or("n/a".to_string(), |v| format!("{v:.4}")),
                        s.reference_value
                    );
                    0
                }
                Err(e) => {
                    eprintln!("fig1 failed: {e:#}");
                    EXIT_RUNTIME
                }
            }
        }
        Command::Fig2(args) => {
            let (cfg, out) = match effective_config(args) {
                Ok(v) => v,
                Err(code) => return code,
            };
            match commands::fig2::run(&cfg, &out) {
                Ok(s) => {
                    println!(
                        "fig2 [{}]: slope {}, error {:.3e} -> {:.3e}",
                        s.config_hash,
                        s.slope.map_or("n/a".to_string(), |v| format!("{v:.4}")),
                        s.first_error,
                        s.last_error
                    );
                    0
                }
                Err(e) => {
                    eprintln!("fig2 failed: {e:#}");
                    EXIT_RUNTIME
                }
            }
        }
        Command::Tensor(args) => {
            let (cfg, out) = match effective_config(args) {
                Ok(v) => v,
                Err(code) => return code,
            };
            match commands::tensor::run(&cfg, &out) {
                Ok(s) => {
                    println!(
                        "tensor [{}]: success rate {:.2}, mean value {:.4}, mean recovery {:.2e}",
                        s.config_hash, s.success_rate, s.mean_value, s.mean_recovery
                    );
                    0
                }
                Err(e) => {
                    eprintln!("tensor failed: {e:#}");
                    EXIT_RUNTIME
                }
            }
        }
        Command::CircleNet(args) => {
            let (cfg, out) = match effective_config(args) {
                Ok(v) => v,
                Err(code) => return code,
            };
            match commands::circle_net::run(&cfg, &out) {
                Ok(s) => {
                    println!(
                        "circle-net [{}]: loss {:.4e} -> {:.4e} ({:.1}x), MC gap {:.2} sigma",
                        s.config_hash,
                        s.initial_loss,
                        s.best_loss,
                        s.reduction_factor,
                        s.mc_sigma_gap
                    );
                    0
                }
                Err(e) => {
                    eprintln!("circle-net failed: {e:#}");
                    EXIT_RUNTIME
                }
            }
        }
        Command::Verify(args) => {
            let (cfg, out) = match effective_config(args) {
                Ok(v) => v,
                Err(code) => return code,
            };
            match commands::verify::run(&cfg, &out) {
                Ok(s) if s.failed.is_empty() => {
                    println!("verify [{}]: all {} properties pass", s.config_hash, s.total);
                    0
                }
                Ok(s) => {
                    eprintln!(
                        "verify [{}]: {}/{} properties FAILED: {:?}",
                        s.config_hash,
                        s.failed.len(),
                        s.total,
                        s.failed
                    );
                    EXIT_RUNTIME
                }
                Err(e) => {
                    eprintln!("verify failed: {e:#}");
                    EXIT_RUNTIME
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(run(&cli.cmd))
}
