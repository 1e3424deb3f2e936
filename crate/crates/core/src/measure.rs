//! Sparse measures: uniform mixtures of n point masses in R^d.
//!
//! Particles are stored densely, row-major, n x d. Duplicate particles are
//! permitted (transport between measures with repeated atoms is still well
//! defined); only the seeded initializers reject coincident draws.

use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exec;

/// Law for seeded particle initialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitLaw {
    UniformBox { lo: f64, hi: f64 },
    Gaussian { mean: f64, std: f64 },
    UniformSphere,
}

impl InitLaw {
    fn validate(&self) -> Result<()> {
        match *self {
            InitLaw::UniformBox { lo, hi } => {
                if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                    return Err(Error::invalid(format!(
                        "uniform_box requires finite lo < hi, got [{lo}, {hi}]"
                    )));
                }
            }
            InitLaw::Gaussian { mean, std } => {
                if !(std > 0.0) || !mean.is_finite() || !std.is_finite() {
                    return Err(Error::invalid(format!(
                        "gaussian requires finite mean and std > 0, got mean={mean}, std={std}"
                    )));
                }
            }
            InitLaw::UniformSphere => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMeasure {
    n: usize,
    d: usize,
    data: Vec<f64>,
}

impl SparseMeasure {
    /// Build from one row per particle. All rows must share a dimension and
    /// every entry must be finite.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        let d = rows[0].len();
        if d == 0 {
            return Err(Error::invalid("particles must have dimension >= 1"));
        }
        let mut data = Vec::with_capacity(rows.len() * d);
        for row in &rows {
            if row.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: row.len() });
            }
            data.extend_from_slice(row);
        }
        Self::from_flat(rows.len(), d, data)
    }

    /// Build from a row-major buffer of length n*d.
    pub fn from_flat(n: usize, d: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyMeasure);
        }
        if d == 0 || data.len() != n * d {
            return Err(Error::invalid(format!(
                "flat buffer of length {} does not match {n} x {d}",
                data.len()
            )));
        }
        if !data.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite { context: "particle coordinates" });
        }
        Ok(SparseMeasure { n, d, data })
    }

    /// Draw n particles i.i.d. from `law`. Deterministic in `seed`. Coincident
    /// particles (a probability-zero event for continuous laws) trigger a
    /// bounded redraw; exhausting the retries is an error, which is reachable
    /// only for laws with atoms such as the 1-D sphere.
    pub fn random_init(n: usize, d: usize, law: &InitLaw, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyMeasure);
        }
        if d == 0 {
            return Err(Error::invalid("particles must have dimension >= 1"));
        }
        law.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(0);
        for _ in 0..16 {
            let mut data = vec![0.0; n * d];
            match *law {
                InitLaw::UniformBox { lo, hi } => {
                    for x in data.iter_mut() {
                        *x = rng.gen_range(lo..hi);
                    }
                }
                InitLaw::Gaussian { mean, std } => {
                    for x in data.iter_mut() {
                        *x = mean + std * standard_normal(&mut rng);
                    }
                }
                InitLaw::UniformSphere => {
                    for row in data.chunks_exact_mut(d) {
                        loop {
                            let mut norm_sq = 0.0;
                            for x in row.iter_mut() {
                                *x = standard_normal(&mut rng);
                                norm_sq += *x * *x;
                            }
                            if norm_sq > 1e-24 {
                                // Divide, don't multiply by the reciprocal: x / |x|
                                // is exactly +-1 in one dimension, so duplicate
                                // detection sees true collisions.
                                let norm = norm_sq.sqrt();
                                row.iter_mut().for_each(|x| *x /= norm);
                                break;
                            }
                        }
                    }
                }
            }
            let m = SparseMeasure { n, d, data };
            if m.n == 1 || m.min_pairwise_distance() > 0.0 {
                return Ok(m);
            }
        }
        Err(Error::DistinctnessFailed { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn particle(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.d)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Callers mutating in place own the finiteness re-check.
    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(|r| r.to_vec()).collect()
    }

    /// Smallest Euclidean distance between two particles; +inf for n = 1.
    pub fn min_pairwise_distance(&self) -> f64 {
        if self.n == 1 {
            return f64::INFINITY;
        }
        let row_min = exec::map_indexed(self.n - 1, |i| {
            let wi = self.particle(i);
            let mut best = f64::INFINITY;
            for j in (i + 1)..self.n {
                let d2 = sq_dist(wi, self.particle(j));
                if d2 < best {
                    best = d2;
                }
            }
            best
        });
        row_min.into_iter().fold(f64::INFINITY, f64::min).sqrt()
    }

    /// One particle per row. A `#` comment line and a coordinate header
    /// precede the data; floats are written in round-trip form.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# measure n={} d={}", self.n, self.d)?;
        let mut wtr = csv::Writer::from_writer(w);
        let header: Vec<String> = (0..self.d).map(|j| format!("x{j}")).collect();
        wtr.write_record(&header)?;
        for row in self.rows() {
            wtr.write_record(row.iter().map(|x| x.to_string()))?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
        let mut rows = Vec::new();
        for record in rdr.records() {
            let record = record?;
            let row: std::result::Result<Vec<f64>, _> =
                record.iter().map(|f| f.trim().parse::<f64>()).collect();
            rows.push(row.map_err(|e| Error::Parse(format!("bad float in measure csv: {e}")))?);
        }
        SparseMeasure::new(rows)
    }

    pub fn save_csv(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    pub fn load_csv(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// JSON form is an array of particle rows.
impl Serialize for SparseMeasure {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.rows())
    }
}

impl<'de> Deserialize<'de> for SparseMeasure {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(deserializer)?;
        SparseMeasure::new(rows).map_err(D::Error::custom)
    }
}

fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(rand_distr::StandardNormal)
}

/// Random orthonormal n-frame in R^d, n <= d: gaussian draws made orthogonal
/// by Gram-Schmidt run twice (the second pass scrubs the rounding the first
/// leaves behind). Redraws on near-dependence.
pub fn random_orthonormal_frame(n: usize, d: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if n == 0 || d == 0 || n > d {
        return Err(Error::invalid(format!(
            "frame needs 1 <= n <= d, got n = {n}, d = {d}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    'retry: loop {
        let mut vs: Vec<Vec<f64>> =
            (0..n).map(|_| (0..d).map(|_| standard_normal(&mut rng)).collect()).collect();
        for i in 0..n {
            for _ in 0..2 {
                for j in 0..i {
                    let dot: f64 = vs[i].iter().zip(&vs[j]).map(|(a, b)| a * b).sum();
                    let prev = vs[j].clone();
                    for (x, p) in vs[i].iter_mut().zip(&prev) {
                        *x -= dot * p;
                    }
                }
            }
            let norm: f64 = vs[i].iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-6 {
                continue 'retry;
            }
            for x in vs[i].iter_mut() {
                *x /= norm;
            }
        }
        return Ok(vs);
    }
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let diff = x - y;
        acc += diff * diff;
    }
    acc
}

/// Indices of particles in lexicographic coordinate order (stable within
/// ties). Evaluations that accumulate in this order are bitwise invariant
/// under particle permutation.
pub(crate) fn lex_order(m: &SparseMeasure) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..m.n()).collect();
    idx.sort_by(|&a, &b| {
        m.particle(a)
            .iter()
            .zip(m.particle(b))
            .find_map(|(x, y)| {
                let ord = x.partial_cmp(y).expect("finite coordinates");
                if ord == std::cmp::Ordering::Equal {
                    None
                } else {
                    Some(ord)
                }
            })
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    idx
}
