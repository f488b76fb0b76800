//! Strictly stable Levy paths from the Chambers-Mallows-Stuck sampler.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use super::{run_paths, EmpiricalCDF, PathConfig};
use crate::error::{Error, Result};

/// Output of [`simulate_stable_occupation`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StableRun {
    pub occupation: EmpiricalCDF,
    /// Closed-form `P(X(t) > 0)`.
    pub c: f64,
    /// Fraction of paths with `X(1) > 0`.
    pub c_empirical: f64,
}

fn check(index: f64, skew: f64) -> Result<()> {
    if !(index > 0.0 && index <= 2.0 && index != 1.0) {
        return Err(Error::InvalidParameter {
            name: "stable index",
            value: index,
            range: "(0, 1) or (1, 2]",
        });
    }
    if !(-1.0..=1.0).contains(&skew) {
        return Err(Error::InvalidParameter {
            name: "skew",
            value: skew,
            range: "[-1, 1]",
        });
    }
    Ok(())
}

/// `c = 1/2 + atan(beta tan(pi a / 2)) / (pi a)` for a strictly stable law.
pub fn positivity_parameter(index: f64, skew: f64) -> Result<f64> {
    check(index, skew)?;
    Ok(0.5 + (skew * (PI * index / 2.0).tan()).atan() / (PI * index))
}

/// One standard stable variate with index `a != 1` and skewness `beta`,
/// from a uniform angle `v` in `(-pi/2, pi/2)` and a unit exponential `w`.
pub fn stable_variate(index: f64, skew: f64, v: f64, w: f64) -> f64 {
    let t = skew * (PI * index / 2.0).tan();
    let b = t.atan() / index;
    let s = (1.0 + t * t).powf(1.0 / (2.0 * index));
    let av = index * (v + b);
    s * av.sin() / v.cos().powf(1.0 / index) * ((v - av).cos() / w).powf((1.0 - index) / index)
}

/// Occupation fraction of a strictly stable process on `[0, 1]`.
///
/// Increments over a step of length `1/n` are `n^(-1/a)` times standard
/// stable variates.
pub fn simulate_stable_occupation(index: f64, skew: f64, config: &PathConfig) -> Result<StableRun> {
    check(index, skew)?;
    let n = config.n_steps;
    let scale = (n as f64).powf(-1.0 / index);
    let results = run_paths(config, || (), |_, rng| {
        let mut x = 0.0;
        let mut count = 0usize;
        for _ in 0..n {
            let v = (rng.random::<f64>() - 0.5) * PI;
            let v = v.clamp(-FRAC_PI_2 + 1e-15, FRAC_PI_2 - 1e-15);
            let w: f64 = rng.sample(Exp1);
            x += scale * stable_variate(index, skew, v, w);
            if x > 0.0 {
                count += 1;
            }
        }
        (count as f64 / n as f64, x > 0.0)
    })?;
    let positive_end = results.iter().filter(|r| r.1).count();
    Ok(StableRun {
        c: positivity_parameter(index, skew)?,
        c_empirical: positive_end as f64 / config.n_paths as f64,
        occupation: EmpiricalCDF::new(results.into_iter().map(|r| r.0).collect(), *config),
    })
}
