use rayon::prelude::*;

use super::EmpiricalCDF;
use crate::error::Result;
use crate::laws::Law;
use crate::point::UnitPoint;
use crate::quadrature::QuadratureSpec;

/// Runs of equal values in a sorted sample: `(value, first index, one past last)`.
fn runs(samples: &[f64]) -> Vec<(f64, usize, usize)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < samples.len() {
        let mut j = i + 1;
        while j < samples.len() && samples[j] == samples[i] {
            j += 1;
        }
        out.push((samples[i], i, j));
        i = j;
    }
    out
}

fn sup_distance(n: usize, runs: &[(f64, usize, usize)], model: &[f64]) -> f64 {
    let n = n as f64;
    runs.iter()
        .zip(model)
        .map(|(&(_, i, j), &f)| (j as f64 / n - f).max(f - i as f64 / n))
        .fold(0.0, f64::max)
}

/// One-sample two-sided Kolmogorov-Smirnov distance between the sample and
/// the model cdf, evaluated once per distinct sample value.
pub fn ks_statistic(emp: &EmpiricalCDF, cdf: impl Fn(f64) -> f64) -> f64 {
    let r = runs(&emp.samples);
    let model: Vec<f64> = r.iter().map(|&(x, _, _)| cdf(x)).collect();
    sup_distance(emp.len(), &r, &model)
}

/// [`ks_statistic`] against one of the crate's laws, with the model cdf
/// evaluated in parallel. The values 0 and 1 map to 0 and 1.
pub fn ks_statistic_law(emp: &EmpiricalCDF, law: &Law, spec: &QuadratureSpec) -> Result<f64> {
    let r = runs(&emp.samples);
    let model: Vec<f64> = r
        .par_iter()
        .map(|&(x, _, _)| {
            if x <= 0.0 {
                Ok(0.0)
            } else if x >= 1.0 {
                Ok(1.0)
            } else {
                law.cdf(UnitPoint::new(x)?, spec)
            }
        })
        .collect::<Result<_>>()?;
    Ok(sup_distance(emp.len(), &r, &model))
}

/// Two-sample Kolmogorov-Smirnov distance `sup |F_a - F_b|`.
pub fn ks_two_sample(a: &EmpiricalCDF, b: &EmpiricalCDF) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (xs, ys) = (&a.samples, &b.samples);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::PathConfig;
    use approx::assert_relative_eq;

    fn emp(v: Vec<f64>) -> EmpiricalCDF {
        let n = v.len();
        EmpiricalCDF::new(v, PathConfig::new(2, n, 0, 1).unwrap())
    }

    #[test]
    fn three_uniform_points() {
        let e = emp(vec![0.25, 0.5, 0.75]);
        assert_relative_eq!(ks_statistic(&e, |x| x), 0.25);
    }

    #[test]
    fn degenerate_model() {
        let e = emp(vec![0.1, 0.7]);
        assert_relative_eq!(ks_statistic(&e, |_| 0.0), 1.0);
    }

    #[test]
    fn quantile_sample_is_close() {
        let n = 999;
        let e = emp((1..=n).map(|i| i as f64 / (n + 1) as f64).collect());
        assert!(ks_statistic(&e, |x| x) <= 1.0 / (n + 1) as f64 + 1e-12);
    }

    #[test]
    fn ties_are_handled_as_one_jump() {
        // half the mass at 0: the empirical cdf jumps to 1/2 at 0
        let e = emp(vec![0.0, 0.0, 0.5, 1.0]);
        assert_relative_eq!(ks_statistic(&e, |x| x), 0.5);
    }

    #[test]
    fn two_sample_distance() {
        let a = emp(vec![0.1, 0.2, 0.3, 0.4]);
        let b = emp(vec![0.25, 0.35, 0.45, 0.55]);
        assert_relative_eq!(ks_two_sample(&a, &b), 0.5);
        assert_eq!(ks_two_sample(&a, &a), 0.0);
    }
}
