//! Monte Carlo and combinatorial oracles for occupation-time laws.
//!
//! Every path draws from its own ChaCha8 stream, keyed by the seed and the
//! path index, so a sample depends only on `(seed, n_steps, n_paths)` and
//! not on how paths are spread over worker threads.

mod ks;
mod paths;
mod stable;
mod walk;

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::fmt17;

pub use ks::{ks_statistic, ks_statistic_law, ks_two_sample};
pub use paths::{simulate_bm_occupation, simulate_bridge_occupation, simulate_skew_bridge_occupation};
pub use stable::{positivity_parameter, simulate_stable_occupation, stable_variate, StableRun};
pub use walk::{walk_bridge_exact, WalkLaw, MAX_WALK_HALF_LENGTH};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathConfig {
    pub n_steps: usize,
    pub n_paths: usize,
    pub seed: u64,
    pub workers: usize,
}

impl PathConfig {
    pub fn new(n_steps: usize, n_paths: usize, seed: u64, workers: usize) -> Result<Self> {
        let c = Self {
            n_steps,
            n_paths,
            seed,
            workers,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_steps < 2 || !self.n_steps.is_power_of_two() {
            return Err(Error::InvalidParameter {
                name: "n_steps",
                value: self.n_steps as f64,
                range: "powers of two >= 2",
            });
        }
        if self.n_paths < 1 {
            return Err(Error::InvalidParameter {
                name: "n_paths",
                value: 0.0,
                range: "[1, inf)",
            });
        }
        if self.workers < 1 {
            return Err(Error::InvalidParameter {
                name: "workers",
                value: 0.0,
                range: "[1, inf)",
            });
        }
        Ok(())
    }
}

/// Generator for path `index`.
pub(crate) fn path_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Runs `sim` for every path index on a pool of `config.workers` threads and
/// returns the results in index order.
pub(crate) fn run_paths<T, S, F>(config: &PathConfig, init: impl Fn() -> S + Send + Sync, sim: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut S, &mut ChaCha8Rng) -> T + Send + Sync,
{
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Precondition(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| {
        (0..config.n_paths)
            .into_par_iter()
            .map_init(&init, |state, i| {
                let mut rng = path_rng(config.seed, i);
                sim(state, &mut rng)
            })
            .collect()
    }))
}

/// Sorted occupation fractions with the configuration that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCDF {
    pub samples: Vec<f64>,
    pub config: PathConfig,
    /// Paths whose excursion segmentation found fewer than two excursions.
    #[serde(default)]
    pub degenerate_paths: usize,
}

impl EmpiricalCDF {
    pub fn new(mut samples: Vec<f64>, config: PathConfig) -> Self {
        samples.sort_by(f64::total_cmp);
        Self {
            samples,
            config,
            degenerate_paths: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// Fraction of samples `<= x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.samples.partition_point(|&s| s <= x) as f64 / self.samples.len() as f64
    }

    pub fn to_csv(&self) -> String {
        let c = &self.config;
        let mut s = String::new();
        writeln!(
            s,
            "# n_steps={} n_paths={} seed={} workers={} degenerate_paths={}",
            c.n_steps, c.n_paths, c.seed, c.workers, self.degenerate_paths
        )
        .expect("write to string");
        s.push_str("fraction\n");
        for &v in &self.samples {
            s.push_str(&fmt17(v));
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .and_then(|l| l.strip_prefix("# "))
            .ok_or_else(|| Error::Parse("missing configuration line".into()))?;
        let mut fields = std::collections::HashMap::new();
        for kv in header.split_whitespace() {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad field {kv}")))?;
            let v: u64 = v.parse().map_err(|e| Error::Parse(format!("{k}: {e}")))?;
            fields.insert(k.to_string(), v);
        }
        let get = |k: &str| {
            fields
                .get(k)
                .copied()
                .ok_or_else(|| Error::Parse(format!("missing field {k}")))
        };
        let config = PathConfig {
            n_steps: get("n_steps")? as usize,
            n_paths: get("n_paths")? as usize,
            seed: get("seed")?,
            workers: get("workers")? as usize,
        };
        if lines.next() != Some("fraction") {
            return Err(Error::Parse("missing column header".into()));
        }
        let samples = lines
            .map(|l| l.parse::<f64>().map_err(|e| Error::Parse(e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            samples,
            config,
            degenerate_paths: get("degenerate_paths")? as usize,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn config_validation() {
        assert!(PathConfig::new(1024, 10, 1, 1).is_ok());
        assert!(PathConfig::new(1000, 10, 1, 1).is_err());
        assert!(PathConfig::new(1, 10, 1, 1).is_err());
        assert!(PathConfig::new(1024, 0, 1, 1).is_err());
        assert!(PathConfig::new(1024, 10, 1, 0).is_err());
    }

    #[test]
    fn streams_are_independent_of_order() {
        let a: u64 = path_rng(5, 3).random();
        let _skip: u64 = path_rng(5, 2).random();
        let b: u64 = path_rng(5, 3).random();
        assert_eq!(a, b);
        assert_ne!(a, path_rng(5, 4).random::<u64>());
        assert_ne!(a, path_rng(6, 3).random::<u64>());
    }

    #[test]
    fn empirical_cdf_basics() {
        let c = PathConfig::new(4, 4, 0, 1).unwrap();
        let e = EmpiricalCDF::new(vec![0.75, 0.25, 0.5, 0.5], c);
        assert_eq!(e.samples, vec![0.25, 0.5, 0.5, 0.75]);
        assert_eq!(e.eval(0.5), 0.75);
        assert_eq!(e.eval(0.1), 0.0);
        assert_eq!(e.mean(), 0.5);
    }

    #[test]
    fn csv_and_json_round_trip() {
        let c = PathConfig::new(8, 3, 42, 2).unwrap();
        let mut e = EmpiricalCDF::new(vec![0.1 + 0.2, 1.0 / 3.0, 0.0], c);
        e.degenerate_paths = 1;
        assert_eq!(EmpiricalCDF::from_csv(&e.to_csv()).unwrap(), e);
        assert_eq!(EmpiricalCDF::from_json(&e.to_json().unwrap()).unwrap(), e);
        assert!(EmpiricalCDF::from_csv("fraction\n0.5\n").is_err());
    }
}
