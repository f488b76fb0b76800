//! Stieltjes and generalized Stieltjes transforms computed by quadrature and
//! compared with their closed forms.
//!
//! | transform | integrand | closed form |
//! |---|---|---|
//! | Lamperti | `f_{a,p}(x) / (l + x)` | `(p (l+1)^(a-1) + (1-p) l^(a-1)) / (p (l+1)^a + (1-p) l^a)` |
//! | BFRY | `f_J(x) / (l + x)` | `a/(1-a) (l^(a-1) - (1+l)^(a-1)) / ((1+l)^a - l^a)` |
//! | bridge | `(l + x)^-a G'(x)` | `1 / (p (1+l)^a + (1-p) l^a)` |
//! | excursion | `(l + x)^(1-c) H'(x)` | `c / ((l+1)^c - l^c)` |

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{bfry_density_at, lamperti_density_at, ExcursionParams, LampertiParams};
use crate::laws::{bridge_pdf_at, excursion_cdf_at, bridge_cdf_at, excursion_pdf_at, Law};
use crate::point::UnitPoint;
use crate::quadrature::{integrate, EndBehaviour, Interval, QuadratureSpec};

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "lambda",
            value: lambda,
            range: "(0, inf)",
        })
    }
}

/// `int_0^1 w(x) pdf(x) dx` where `(lambda + x)` in `w` is singular at `-lambda`.
fn transform_integral(
    lambda: f64,
    exps: (f64, f64),
    spec: &QuadratureSpec,
    op: &'static str,
    f: impl Fn(UnitPoint) -> Result<f64>,
) -> Result<f64> {
    let ends = EndBehaviour::new(exps.0, exps.1).with_gaps(lambda, f64::INFINITY);
    integrate(&Interval::unit(), &ends, spec, op, lambda, |node| f(node.t).unwrap_or(f64::NAN))
}

/// `E[1 / (lambda + Y)]` for `Y` with density `f_{alpha,p}`: `(numeric, closed form)`.
pub fn stieltjes_lamperti(params: &LampertiParams, lambda: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    check_lambda(lambda)?;
    let (a, p) = (params.alpha(), params.p());
    let numeric = transform_integral(lambda, (a - 1.0, a - 1.0), spec, "stieltjes_lamperti", |x| {
        Ok(lamperti_density_at(params, x) / (lambda + x.x()))
    })?;
    let num = p * (lambda + 1.0).powf(a - 1.0) + (1.0 - p) * lambda.powf(a - 1.0);
    let den = p * (lambda + 1.0).powf(a) + (1.0 - p) * lambda.powf(a);
    Ok((numeric, num / den))
}

/// `E[1 / (lambda + J_alpha)]`: `(numeric, closed form)`.
pub fn stieltjes_bfry(alpha: f64, lambda: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    check_lambda(lambda)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            range: "(0, 1)",
        });
    }
    let numeric = transform_integral(lambda, (alpha - 1.0, alpha - 1.0), spec, "stieltjes_bfry", |x| {
        Ok(bfry_density_at(alpha, x) / (lambda + x.x()))
    })?;
    // both differences cancel for large lambda; factor out the powers of lambda
    let l = (1.0 / lambda).ln_1p();
    let closed = alpha / (1.0 - alpha) * -((alpha - 1.0) * l).exp_m1() / (lambda * (alpha * l).exp_m1());
    Ok((numeric, closed))
}

/// `int (lambda + x)^-alpha dG_{alpha,p}(x)`: `(numeric, closed form)`.
pub fn gst_bridge(params: &LampertiParams, lambda: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    check_lambda(lambda)?;
    let (a, p) = (params.alpha(), params.p());
    let e = 2.0 * a - 1.0;
    let numeric = transform_integral(lambda, (e, e), spec, "gst_bridge", |x| {
        Ok((-a * (lambda + x.x()).ln()).exp() * bridge_pdf_at(params, x, spec)?)
    })?;
    let closed = 1.0 / (p * (1.0 + lambda).powf(a) + (1.0 - p) * lambda.powf(a));
    Ok((numeric, closed))
}

/// `int (lambda + x)^(1-gamma) dH_gamma(x)`: `(numeric, closed form)`.
pub fn gst_excursion(params: &ExcursionParams, lambda: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    check_lambda(lambda)?;
    let c = params.gamma();
    let e = 2.0 * c - 2.0;
    let numeric = transform_integral(lambda, (e, e), spec, "gst_excursion", |x| {
        Ok(((1.0 - c) * (lambda + x.x()).ln()).exp() * excursion_pdf_at(params, x, spec)?)
    })?;
    let l = (1.0 / lambda).ln_1p();
    let closed = c / (lambda.powf(c) * (c * l).exp_m1());
    Ok((numeric, closed))
}

/// One of the four transform identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "transform", rename_all = "snake_case")]
pub enum Transform {
    StieltjesLamperti(LampertiParams),
    StieltjesBfry { alpha: f64 },
    GstBridge(LampertiParams),
    GstExcursion(ExcursionParams),
}

impl Transform {
    pub fn name(&self) -> &'static str {
        match self {
            Transform::StieltjesLamperti(_) => "stieltjes_lamperti",
            Transform::StieltjesBfry { .. } => "stieltjes_bfry",
            Transform::GstBridge(_) => "gst_bridge",
            Transform::GstExcursion(_) => "gst_excursion",
        }
    }

    pub fn evaluate(&self, lambda: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
        match self {
            Transform::StieltjesLamperti(p) => stieltjes_lamperti(p, lambda, spec),
            Transform::StieltjesBfry { alpha } => stieltjes_bfry(*alpha, lambda, spec),
            Transform::GstBridge(p) => gst_bridge(p, lambda, spec),
            Transform::GstExcursion(e) => gst_excursion(e, lambda, spec),
        }
    }

    /// Residual bound: tight for analytic densities, looser when the density
    /// itself comes out of a fractional integral.
    pub fn threshold(&self) -> f64 {
        match self {
            Transform::StieltjesLamperti(_) | Transform::StieltjesBfry { .. } => 1e-8,
            Transform::GstBridge(_) | Transform::GstExcursion(_) => 1e-5,
        }
    }

    /// Power `s` with `lambda^s * transform -> 1` as `lambda -> inf`.
    pub fn mass_power(&self) -> f64 {
        match self {
            Transform::StieltjesLamperti(_) | Transform::StieltjesBfry { .. } => 1.0,
            Transform::GstBridge(p) => p.alpha(),
            Transform::GstExcursion(e) => e.gamma() - 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformResidual {
    pub transform: Transform,
    pub lambda_grid: Vec<f64>,
    pub numeric: Vec<f64>,
    pub closed_form: Vec<f64>,
    pub max_rel_err: f64,
}

impl TransformResidual {
    pub fn compute(transform: Transform, lambda_grid: Vec<f64>, spec: &QuadratureSpec) -> Result<Self> {
        let pairs: Vec<(f64, f64)> = lambda_grid
            .par_iter()
            .map(|&l| transform.evaluate(l, spec))
            .collect::<Result<_>>()?;
        let (numeric, closed_form): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let max_rel_err = numeric
            .iter()
            .zip(&closed_form)
            .map(|(n, c)| ((n - c) / c).abs())
            .fold(0.0, f64::max);
        Ok(Self {
            transform,
            lambda_grid,
            numeric,
            closed_form,
            max_rel_err,
        })
    }

    pub fn passes(&self) -> bool {
        self.max_rel_err < self.transform.threshold()
    }

    /// Rows `lambda,numeric,closed_form,rel_err` with a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("lambda,numeric,closed_form,rel_err\n");
        for i in 0..self.lambda_grid.len() {
            let (n, c) = (self.numeric[i], self.closed_form[i]);
            s.push_str(&format!(
                "{},{},{},{}\n",
                crate::table::fmt17(self.lambda_grid[i]),
                crate::table::fmt17(n),
                crate::table::fmt17(c),
                crate::table::fmt17(((n - c) / c).abs())
            ));
        }
        s
    }
}

/// `2^k` for `k` in `kmin..=kmax`.
pub fn lambda_grid(kmin: i32, kmax: i32) -> Vec<f64> {
    (kmin..=kmax).map(|k| 2f64.powi(k)).collect()
}

/// `sup |G_{a,1/2}(x) - H_a(x)|` over `grid`: a diagnostic for the closeness
/// of the two laws, not a test of equality.
pub fn resemblance(index: f64, grid: &[f64], spec: &QuadratureSpec) -> Result<f64> {
    let bridge = LampertiParams::new(index, 0.5)?;
    let excursion = ExcursionParams::new(index)?;
    grid.par_iter()
        .map(|&x| {
            let p = UnitPoint::new(x)?;
            Ok((bridge_cdf_at(&bridge, p, spec)? - excursion_cdf_at(&excursion, p, spec)?).abs())
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// Laws whose transform identities are checked together.
pub fn transform_for(law: &Law) -> Option<Transform> {
    match *law {
        Law::Lamperti(p) => Some(Transform::StieltjesLamperti(p)),
        Law::Bfry { alpha } => Some(Transform::StieltjesBfry { alpha }),
        Law::Bridge(p) => Some(Transform::GstBridge(p)),
        Law::Excursion(e) => Some(Transform::GstExcursion(e)),
        Law::Arcsine(_) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn arcsine_stieltjes_at_one() {
        let (n, c) = stieltjes_lamperti(&LampertiParams::new(0.5, 0.5).unwrap(), 1.0, &spec()).unwrap();
        assert_relative_eq!(c, 0.5f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(n, c, max_relative = 1e-10);
        let (n, c) = stieltjes_bfry(0.5, 1.0, &spec()).unwrap();
        assert_relative_eq!(c, 0.5f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(n, c, max_relative = 1e-10);
    }

    #[test]
    fn analytic_transforms_agree() {
        let (n, c) = stieltjes_lamperti(&LampertiParams::new(0.75, 1.0 / 3.0).unwrap(), 0.5, &spec()).unwrap();
        assert_relative_eq!(n, c, max_relative = 1e-8);
        let (n, c) = stieltjes_bfry(2.0 / 3.0, 2.0, &spec()).unwrap();
        assert_relative_eq!(n, c, max_relative = 1e-8);
    }

    #[test]
    fn bridge_transform() {
        let (n, c) = gst_bridge(&LampertiParams::new(0.5, 0.5).unwrap(), 1.0, &spec()).unwrap();
        assert_relative_eq!(c, 2.0 * (2f64.sqrt() - 1.0), max_relative = 1e-14);
        assert_relative_eq!(n, c, max_relative = 1e-9);
        let (n, c) = gst_bridge(&LampertiParams::new(0.75, 1.0 / 3.0).unwrap(), 0.7, &spec()).unwrap();
        assert_relative_eq!(n, c, max_relative = 1e-6);
    }

    #[test]
    fn excursion_transform() {
        let (n, c) = gst_excursion(&ExcursionParams::new(0.75).unwrap(), 1.0, &spec()).unwrap();
        assert_relative_eq!(c, 0.75 / (2f64.powf(0.75) - 1.0), max_relative = 1e-14);
        assert_relative_eq!(c, 1.100_03, max_relative = 1e-5);
        assert_relative_eq!(n, c, max_relative = 1e-5);
        let (n, c) = gst_excursion(&ExcursionParams::new(0.6).unwrap(), 0.25, &spec()).unwrap();
        assert_relative_eq!(n, c, max_relative = 1e-5);
    }

    #[test]
    fn mass_recovery_in_the_tail() {
        let t = Transform::StieltjesLamperti(LampertiParams::new(0.4, 0.3).unwrap());
        let mut prev = f64::INFINITY;
        for k in 4..12 {
            let l = 2f64.powi(k);
            let (n, _) = t.evaluate(l, &spec()).unwrap();
            let gap = (l.powf(t.mass_power()) * n - 1.0).abs();
            assert!(gap < prev);
            prev = gap;
        }
        assert!(prev < 1e-3);
        let t = Transform::GstBridge(LampertiParams::new(0.6, 0.4).unwrap());
        let (n, _) = t.evaluate(1e6, &QuadratureSpec::cli_default()).unwrap();
        assert_relative_eq!(1e6f64.powf(0.6) * n, 1.0, max_relative = 1e-5);
    }

    #[test]
    fn residual_report() {
        let r = TransformResidual::compute(Transform::StieltjesBfry { alpha: 0.3 }, lambda_grid(-4, 6), &spec()).unwrap();
        assert_eq!(r.lambda_grid.len(), 11);
        assert!(r.passes(), "{}", r.max_rel_err);
        assert_eq!(r.to_csv().lines().count(), 12);
    }

    #[test]
    fn resemblance_distance_is_a_proper_distance() {
        let grid: Vec<f64> = (1..10).map(|i| i as f64 / 10.0).collect();
        let d = resemblance(0.75, &grid, &QuadratureSpec::cli_default()).unwrap();
        assert!(d > 0.0 && d < 1.0, "{d}");
        // both laws are symmetric about 1/2
        assert!(resemblance(0.75, &[0.5], &QuadratureSpec::cli_default()).unwrap() < 1e-7);
    }

    #[test]
    fn rejects_bad_lambda() {
        assert!(stieltjes_bfry(0.5, 0.0, &spec()).is_err());
        assert!(stieltjes_bfry(1.5, 1.0, &spec()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn bfry_closed_form_matches_direct(a in 0.05f64..0.95, k in -6i32..6) {
            let l = 2f64.powi(k);
            let direct = a / (1.0 - a) * (l.powf(a - 1.0) - (1.0 + l).powf(a - 1.0)) / ((1.0 + l).powf(a) - l.powf(a));
            let (_, c) = stieltjes_bfry(a, l, &QuadratureSpec::cli_default()).unwrap();
            prop_assert!(((c - direct) / direct).abs() < 1e-11);
        }
    }
}
