//! Brownian motion, Brownian bridge and skew Brownian bridge paths.
//!
//! The occupation fraction of a path on the grid `k / n` is
//! `#{1 <= k <= n : X_k > 0} / n`; exact zeros are not positive.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{run_paths, EmpiricalCDF, PathConfig};
use crate::error::{Error, Result};

fn positive_points(path: &[f64]) -> usize {
    path[1..].iter().filter(|&&x| x > 0.0).count()
}

/// Occupation fraction of standard Brownian motion on `[0, 1]`.
pub fn simulate_bm_occupation(config: &PathConfig) -> Result<EmpiricalCDF> {
    let n = config.n_steps;
    let sd = (1.0 / n as f64).sqrt();
    let samples = run_paths(config, || (), |_, rng| {
        let mut x = 0.0;
        let mut count = 0usize;
        for _ in 0..n {
            let z: f64 = rng.sample(StandardNormal);
            x += sd * z;
            if x > 0.0 {
                count += 1;
            }
        }
        count as f64 / n as f64
    })?;
    Ok(EmpiricalCDF::new(samples, *config))
}

/// Brownian bridge from 0 to 0 on the grid `k / n`, by dyadic bisection:
/// the midpoint of an interval of length `L` has variance `L / 4` around the
/// mean of its ends.
pub(crate) fn fill_bridge(path: &mut [f64], rng: &mut ChaCha8Rng) {
    let n = path.len() - 1;
    path[0] = 0.0;
    path[n] = 0.0;
    let mut h = n / 2;
    while h >= 1 {
        let sd = (h as f64 / (2.0 * n as f64)).sqrt();
        let mut i = 0;
        while i < n {
            let z: f64 = rng.sample(StandardNormal);
            path[i + h] = 0.5 * (path[i] + path[i + 2 * h]) + sd * z;
            i += 2 * h;
        }
        h /= 2;
    }
}

/// Occupation fraction of the standard Brownian bridge.
pub fn simulate_bridge_occupation(config: &PathConfig) -> Result<EmpiricalCDF> {
    let n = config.n_steps;
    let samples = run_paths(config, || vec![0.0; n + 1], |path, rng| {
        fill_bridge(path, rng);
        positive_points(path) as f64 / n as f64
    })?;
    Ok(EmpiricalCDF::new(samples, *config))
}

/// Excursion boundaries of a bridge path: grid points where the path is
/// exactly zero or changes sign before the next point, plus the final point.
pub(crate) fn excursion_boundaries(path: &[f64], out: &mut Vec<usize>) {
    out.clear();
    let n = path.len() - 1;
    for k in 0..n {
        if path[k] == 0.0 || path[k] * path[k + 1] < 0.0 {
            out.push(k);
        }
    }
    out.push(n);
}

/// Occupation fraction of the skew Brownian bridge with skewness `p`: the
/// excursions of a reflected Brownian bridge are made positive independently
/// with probability `p`.
pub fn simulate_skew_bridge_occupation(p: f64, config: &PathConfig) -> Result<EmpiricalCDF> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            range: "(0, 1)",
        });
    }
    let n = config.n_steps;
    let results = run_paths(
        config,
        || (vec![0.0; n + 1], Vec::new()),
        |(path, bounds), rng| {
            fill_bridge(path, rng);
            excursion_boundaries(path, bounds);
            let mut positive = 0usize;
            for w in bounds.windows(2) {
                if rng.random::<f64>() < p {
                    positive += w[1] - w[0];
                }
            }
            (positive as f64 / n as f64, bounds.len() < 3)
        },
    )?;
    let degenerate = results.iter().filter(|r| r.1).count();
    if degenerate > 0 {
        log::warn!(
            "{degenerate} of {} paths had fewer than 2 excursions; increase n_steps",
            config.n_paths
        );
    }
    let mut emp = EmpiricalCDF::new(results.into_iter().map(|r| r.0).collect(), *config);
    emp.degenerate_paths = degenerate;
    Ok(emp)
}
