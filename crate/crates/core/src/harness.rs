//! Formula-versus-oracle verification and batch sweeps.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::mpsc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::FatPointSystem;
use crate::dimension::dimension;
use crate::error::{Error, Result};
use crate::oracle::{oracle_dimension, OracleConfig, DEFAULT_PRIMES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    Exhaustive,
    Random,
}

fn default_primes() -> Vec<u64> {
    vec![DEFAULT_PRIMES[0]]
}

fn default_trials() -> usize {
    3
}

fn default_workers() -> usize {
    1
}

fn default_m_min() -> i64 {
    1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub d_max: i64,
    pub r_max: usize,
    pub m_max: i64,
    #[serde(default = "default_m_min")]
    pub m_min: i64,
    pub mode: SweepMode,
    #[serde(default)]
    pub samples: usize,
    #[serde(default = "default_primes")]
    pub primes: Vec<u64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_workers")]
    pub workers: usize,
}

fn is_prime(n: u64) -> bool {
    n >= 2
        && (2..)
            .take_while(|k| k * k <= n)
            .all(|k| !n.is_multiple_of(k))
}

impl SweepConfig {
    pub fn exhaustive(d_max: i64, r_max: usize, m_max: i64) -> Self {
        Self {
            d_max,
            r_max,
            m_max,
            m_min: 1,
            mode: SweepMode::Exhaustive,
            samples: 0,
            primes: default_primes(),
            seed: 1,
            trials: 3,
            workers: 1,
        }
    }

    pub fn random(d_max: i64, r_max: usize, m_max: i64, samples: usize, seed: u64) -> Self {
        Self {
            mode: SweepMode::Random,
            samples,
            seed,
            ..Self::exhaustive(d_max, r_max, m_max)
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.d_max < 0 || self.m_max < 1 || self.m_min < 1 || self.m_min > self.m_max {
            return fail(format!(
                "bounds must satisfy d_max >= 0 and 1 <= m_min <= m_max (got d_max = {}, m = {}..={})",
                self.d_max, self.m_min, self.m_max
            ));
        }
        if self.primes.is_empty() {
            return fail("at least one prime is required".into());
        }
        for &p in &self.primes {
            if !is_prime(p) || p >= 1 << 32 {
                return fail(format!("{p} is not a prime below 2^32"));
            }
            if p <= 2 * self.d_max as u64 {
                return fail(format!(
                    "prime {p} must exceed 2 * d_max = {}",
                    2 * self.d_max
                ));
            }
        }
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        if self.workers == 0 {
            return fail("workers must be at least 1".into());
        }
        if self.mode == SweepMode::Random && self.samples == 0 {
            return fail("random mode needs samples >= 1".into());
        }
        Ok(())
    }

    pub fn oracle_config(&self) -> OracleConfig {
        OracleConfig::new(
            self.primes.clone(),
            (0..self.trials as u64)
                .map(|i| self.seed.wrapping_add(i))
                .collect(),
        )
    }

    /// Instances in submission order.
    pub fn instances(&self) -> Vec<FatPointSystem> {
        match self.mode {
            SweepMode::Exhaustive => {
                let mut out = Vec::new();
                for d in 0..=self.d_max {
                    for r in 0..=self.r_max {
                        for m in non_increasing(r, self.m_min, self.m_max) {
                            out.push(FatPointSystem::new(d, m));
                        }
                    }
                }
                out
            }
            SweepMode::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                (0..self.samples)
                    .map(|_| {
                        let d = rng.gen_range(0..=self.d_max);
                        let r = rng.gen_range(0..=self.r_max);
                        let mut m: Vec<i64> = (0..r)
                            .map(|_| rng.gen_range(self.m_min..=self.m_max))
                            .collect();
                        m.sort_unstable_by(|a, b| b.cmp(a));
                        FatPointSystem::new(d, m)
                    })
                    .collect()
            }
        }
    }
}

/// Non-increasing sequences of length `len` with entries in `[lo, hi]`,
/// lexicographically increasing.
pub fn non_increasing(len: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    fn go(len: usize, lo: i64, cap: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if prefix.len() == len {
            out.push(prefix.clone());
            return;
        }
        for m in lo..=cap {
            prefix.push(m);
            go(len, lo, m, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(len, lo, hi, &mut Vec::with_capacity(len), &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub d: i64,
    pub m: Vec<i64>,
    pub formula_dim: Option<i64>,
    pub oracle_dim: Option<i64>,
    pub case_path: Vec<String>,
    pub vdim: Option<i64>,
    pub edim: Option<i64>,
    #[serde(rename = "match")]
    pub matches: bool,
    pub stable: bool,
    pub seeds: Vec<u64>,
    pub primes: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

impl VerificationRecord {
    pub fn system(&self) -> FatPointSystem {
        FatPointSystem::new(self.d, self.m.clone())
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    pub fn to_csv_row(&self) -> Vec<String> {
        let opt = |v: Option<i64>| v.map(|x| x.to_string()).unwrap_or_default();
        let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
        vec![
            self.d.to_string(),
            crate::combinatorics::format_multiplicities(&self.m),
            opt(self.formula_dim),
            opt(self.oracle_dim),
            self.case_path.join(" "),
            opt(self.vdim),
            opt(self.edim),
            self.matches.to_string(),
            self.stable.to_string(),
            join(&self.seeds),
            join(&self.primes),
            self.error.clone().unwrap_or_default(),
        ]
    }

    pub const CSV_HEADER: [&'static str; 12] = [
        "d",
        "m",
        "formula_dim",
        "oracle_dim",
        "case_path",
        "vdim",
        "edim",
        "match",
        "stable",
        "seeds",
        "primes",
        "error",
    ];
}

/// Runs the formula and the oracle on one system. Failures on either route
/// are stored in the record rather than returned.
pub fn verify(sys: &FatPointSystem, oracle: &OracleConfig) -> VerificationRecord {
    let mut record = VerificationRecord {
        d: sys.degree,
        m: sys.multiplicities.clone(),
        formula_dim: None,
        oracle_dim: None,
        case_path: Vec::new(),
        vdim: None,
        edim: None,
        matches: false,
        stable: false,
        seeds: oracle.seeds.clone(),
        primes: oracle.primes.clone(),
        error: None,
    };
    let mut errors = Vec::new();
    match dimension(sys) {
        Ok(report) => {
            record.formula_dim = Some(report.dim);
            record.case_path = report.case_path;
            record.vdim = Some(report.vdim);
            record.edim = Some(report.edim);
        }
        Err(e) => errors.push(format!("formula: {e}")),
    }
    match oracle_dimension(sys, oracle) {
        Ok(report) => {
            record.oracle_dim = Some(report.dim);
            record.stable = report.stable;
        }
        Err(e) => errors.push(format!("oracle: {e}")),
    }
    record.matches = errors.is_empty() && record.formula_dim == record.oracle_dim;
    if !errors.is_empty() {
        record.error = Some(errors.join("; "));
    }
    record
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub total: usize,
    pub matches: usize,
    pub mismatches: usize,
    pub unstable: usize,
    pub errors: usize,
}

impl SweepSummary {
    pub fn tally(&mut self, record: &VerificationRecord) {
        self.total += 1;
        if record.error.is_some() {
            self.errors += 1;
        } else if record.matches {
            self.matches += 1;
        } else {
            self.mismatches += 1;
        }
        if record.error.is_none() && !record.stable {
            self.unstable += 1;
        }
    }

    pub fn is_clean(&self) -> bool {
        self.mismatches == 0 && self.errors == 0
    }
}

/// Verifies every instance of the grid on `config.workers` threads and
/// streams one JSON line per record to `out`, in instance order.
///
/// Records are handed to the writer (the calling thread) through a
/// reorder buffer, so the output does not depend on scheduling.
pub fn run_sweep<W: Write>(
    config: &SweepConfig,
    out: &mut W,
    mut on_record: impl FnMut(&VerificationRecord),
) -> Result<SweepSummary> {
    config.validate()?;
    let instances = config.instances();
    let oracle = config.oracle_config();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;

    let (tx, rx) = mpsc::channel::<(usize, VerificationRecord)>();
    let mut summary = SweepSummary::default();
    std::thread::scope(|scope| -> Result<()> {
        let instances = &instances;
        let oracle = &oracle;
        let pool = &pool;
        scope.spawn(move || {
            pool.install(|| {
                instances
                    .par_iter()
                    .enumerate()
                    .for_each_with(tx, |tx, (i, sys)| {
                        // the receiver only disappears after an I/O failure
                        let _ = tx.send((i, verify(sys, oracle)));
                    });
            });
        });

        let mut pending = BTreeMap::new();
        let mut next = 0;
        for (i, record) in rx {
            pending.insert(i, record);
            while let Some(record) = pending.remove(&next) {
                writeln!(out, "{}", record.to_json_line())
                    .map_err(|e| Error::Config(format!("write failed: {e}")))?;
                summary.tally(&record);
                on_record(&record);
                next += 1;
            }
        }
        out.flush()
            .map_err(|e| Error::Config(format!("write failed: {e}")))?;
        Ok(())
    })?;
    Ok(summary)
}
