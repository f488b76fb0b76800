//! Occupation-time laws of skew Bessel bridges (`G_{alpha,p}`) and normalized
//! stable excursions (`H_gamma`), plus a common [`Law`] view that also covers
//! the closed-form densities.
//!
//! ```text
//! G  = Gamma(a) I^a[g]            G' = Gamma(a) I^a[g']
//! H  = Gamma(c) I^c[h']           H' = Gamma(c) I^c[c h' + t h''] / x
//! ```

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;
use statrs::function::gamma::gamma;

use crate::error::{check_open_unit, Error, Result};
use crate::fracint::{euler_polynomial, rl_integral_at, rl_nth_derivative, PowerLaw};
use crate::kernels::{
    bfry_density_at, g_function, g_prime_function, generalized_arcsine_density_at, h_prime_function,
    lamperti_density_at, ExcursionParams, LampertiParams, StableParams,
};
use crate::point::UnitPoint;
use crate::quadrature::{integrate, EndBehaviour, Interval, QuadratureSpec};

/// `G_{alpha,p}(x)`.
pub fn bridge_cdf(params: &LampertiParams, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_open_unit("bridge_cdf", x)?;
    bridge_cdf_at(params, UnitPoint::new(x)?, spec)
}

pub fn bridge_cdf_at(params: &LampertiParams, x: UnitPoint, spec: &QuadratureSpec) -> Result<f64> {
    let a = params.alpha();
    Ok(gamma(a) * rl_integral_at(&g_function(params), a, x, spec)?)
}

/// `G'_{alpha,p}(x)`, the density of the occupation time of the bridge.
pub fn bridge_pdf(params: &LampertiParams, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_open_unit("bridge_pdf", x)?;
    bridge_pdf_at(params, UnitPoint::new(x)?, spec)
}

pub fn bridge_pdf_at(params: &LampertiParams, x: UnitPoint, spec: &QuadratureSpec) -> Result<f64> {
    let a = params.alpha();
    Ok(gamma(a) * rl_integral_at(&g_prime_function(params), a, x, spec)?)
}

/// `G'_{alpha,p}(x) ~ C x^(2 alpha - 1)` as `x -> 0+`.
pub fn bridge_pdf_asymptote(params: &LampertiParams) -> PowerLaw {
    let (a, p) = (params.alpha(), params.p());
    PowerLaw {
        exponent: 2.0 * a - 1.0,
        constant: (a * PI).sin() / PI * (1.0 - p) / (p * p) * a * gamma(a).powi(2) / gamma(2.0 * a),
    }
}

/// `d^n/dx^n G_{alpha,p}(x)` through the Euler-operator recursion; `n = 0` is the cdf.
pub fn bridge_nth_derivative(params: &LampertiParams, n: usize, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    let a = params.alpha();
    Ok(gamma(a) * rl_nth_derivative(&g_function(params), a, n, x, spec)?)
}

/// `H_gamma(x)`.
pub fn excursion_cdf(params: &ExcursionParams, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_open_unit("excursion_cdf", x)?;
    excursion_cdf_at(params, UnitPoint::new(x)?, spec)
}

pub fn excursion_cdf_at(params: &ExcursionParams, x: UnitPoint, spec: &QuadratureSpec) -> Result<f64> {
    let c = params.gamma();
    Ok(gamma(c) * rl_integral_at(&h_prime_function(params), c, x, spec)?)
}

/// `H'_gamma(x)`.
pub fn excursion_pdf(params: &ExcursionParams, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_open_unit("excursion_pdf", x)?;
    excursion_pdf_at(params, UnitPoint::new(x)?, spec)
}

pub fn excursion_pdf_at(params: &ExcursionParams, x: UnitPoint, spec: &QuadratureSpec) -> Result<f64> {
    let c = params.gamma();
    let f = euler_polynomial(&h_prime_function(params), c, 1)?;
    Ok(gamma(c) * rl_integral_at(&f, c, x, spec)? / x.x())
}

/// `H'_gamma(x) ~ C x^(2 gamma - 2)` as `x -> 0+`.
pub fn excursion_pdf_asymptote(params: &ExcursionParams) -> PowerLaw {
    let c = params.gamma();
    PowerLaw {
        exponent: 2.0 * c - 2.0,
        constant: (c * PI).sin() / PI * gamma(c + 1.0).powi(2) / gamma(2.0 * c) * (2.0 * c - 1.0) / (1.0 - c),
    }
}

/// `d^n/dx^n H_gamma(x)`; `n = 0` is the cdf.
pub fn excursion_nth_derivative(params: &ExcursionParams, n: usize, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    let c = params.gamma();
    Ok(gamma(c) * rl_nth_derivative(&h_prime_function(params), c, n, x, spec)?)
}

/// Any of the occupation-time laws handled by the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum Law {
    /// Occupation time of a skew Bessel process, density `f_{alpha,p}`.
    Lamperti(LampertiParams),
    /// `J_alpha`.
    Bfry { alpha: f64 },
    /// Generalized arcsine law `Z_c` of a Levy process.
    Arcsine(StableParams),
    /// Skew Bessel bridge, `G_{alpha,p}`.
    Bridge(LampertiParams),
    /// Normalized stable excursion, `H_gamma`.
    Excursion(ExcursionParams),
}

impl Law {
    pub fn name(&self) -> &'static str {
        match self {
            Law::Lamperti(_) => "lamperti",
            Law::Bfry { .. } => "bfry",
            Law::Arcsine(_) => "arcsine",
            Law::Bridge(_) => "bridge",
            Law::Excursion(_) => "excursion",
        }
    }

    /// Endpoint exponents `(at 0, at 1)` of the density, in the `t^e` convention.
    pub fn density_exponents(&self) -> (f64, f64) {
        match *self {
            Law::Lamperti(p) => (p.alpha() - 1.0, p.alpha() - 1.0),
            Law::Bfry { alpha } => (alpha - 1.0, alpha - 1.0),
            Law::Arcsine(s) => (s.c() - 1.0, -s.c()),
            Law::Bridge(p) => (2.0 * p.alpha() - 1.0, 2.0 * p.alpha() - 1.0),
            // H(x) + H(1 - x) = 1 numerically, so the density has the same exponent at 1
            Law::Excursion(e) => (2.0 * e.gamma() - 2.0, 2.0 * e.gamma() - 2.0),
        }
    }

    pub fn pdf(&self, x: UnitPoint, spec: &QuadratureSpec) -> Result<f64> {
        match self {
            Law::Lamperti(p) => Ok(lamperti_density_at(p, x)),
            Law::Bfry { alpha } => Ok(bfry_density_at(*alpha, x)),
            Law::Arcsine(s) => Ok(generalized_arcsine_density_at(s, x)),
            Law::Bridge(p) => bridge_pdf_at(p, x, spec),
            Law::Excursion(e) => excursion_pdf_at(e, x, spec),
        }
    }

    pub fn cdf(&self, x: UnitPoint, spec: &QuadratureSpec) -> Result<f64> {
        match self {
            Law::Arcsine(s) => Ok(beta_reg(s.c(), 1.0 - s.c(), x.x())),
            Law::Bridge(p) => bridge_cdf_at(p, x, spec),
            Law::Excursion(e) => excursion_cdf_at(e, x, spec),
            Law::Lamperti(_) | Law::Bfry { .. } => {
                let e0 = self.density_exponents().0;
                let ends = EndBehaviour::new(e0, 0.0).with_gaps(f64::INFINITY, x.complement());
                integrate(&Interval::up_to(x), &ends, spec, "cdf", x.x(), |node| {
                    self.pdf(node.t, spec).unwrap_or(f64::NAN)
                })
            }
        }
    }

    /// `int_0^1 pdf`, with the endpoint exponents declared to the quadrature.
    pub fn total_mass(&self, spec: &QuadratureSpec) -> Result<f64> {
        let (e0, e1) = self.density_exponents();
        integrate(&Interval::unit(), &EndBehaviour::new(e0, e1), spec, "total_mass", 1.0, |node| {
            self.pdf(node.t, spec).unwrap_or(f64::NAN)
        })
    }

    /// `int_0^1 x pdf(x) dx`.
    pub fn mean(&self, spec: &QuadratureSpec) -> Result<f64> {
        let (e0, e1) = self.density_exponents();
        integrate(&Interval::unit(), &EndBehaviour::new(e0 + 1.0, e1), spec, "mean", 1.0, |node| {
            node.t.x() * self.pdf(node.t, spec).unwrap_or(f64::NAN)
        })
    }
}

/// Absolute tolerance on the quantile abscissa.
pub const QUANTILE_TOL: f64 = 1e-9;

/// `x` with `cdf(x) = q`, by bisection on the monotone cdf.
pub fn quantile(law: &Law, q: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParameter {
            name: "q",
            value: q,
            range: "(0, 1)",
        });
    }
    let cdf = |x: UnitPoint| law.cdf(x, spec);
    // widen towards the ends until q is bracketed
    let mut lo = UnitPoint::new(0.5)?;
    let mut flo = cdf(lo)?;
    while flo > q {
        let next = lo.x() * 1e-2;
        if next < 1e-300 {
            return Err(Error::Bracket(format!("cdf stays above {q} down to x = {}", lo.x())));
        }
        lo = UnitPoint::new(next)?;
        flo = cdf(lo)?;
    }
    let mut hi = UnitPoint::new(0.5)?;
    let mut fhi = flo;
    while fhi < q {
        let next = hi.complement() * 1e-2;
        if next < 1e-300 {
            return Err(Error::Bracket(format!(
                "cdf stays below {q} up to 1 - x = {}",
                hi.complement()
            )));
        }
        hi = UnitPoint::from_complement(next)?;
        fhi = cdf(hi)?;
    }
    if lo == hi {
        return Ok(lo.x());
    }
    bisect(lo, flo, hi, fhi, q, cdf)
}

/// Bisection on `[lo, hi]` with `f(lo) <= q <= f(hi)`.
pub(crate) fn bisect(
    mut lo: UnitPoint,
    mut flo: f64,
    mut hi: UnitPoint,
    mut fhi: f64,
    q: f64,
    f: impl Fn(UnitPoint) -> Result<f64>,
) -> Result<f64> {
    let slack = 1e-9;
    while hi.x() - lo.x() > QUANTILE_TOL {
        let mid = if lo.x() >= 0.5 {
            UnitPoint::from_complement(0.5 * (lo.complement() + hi.complement()))?
        } else {
            UnitPoint::new(0.5 * (lo.x() + hi.x()))?
        };
        let fm = f(mid)?;
        if fm < flo - slack || fm > fhi + slack {
            return Err(Error::Bracket(format!(
                "cdf is not monotone: F({}) = {fm} outside [{flo}, {fhi}]",
                mid.x()
            )));
        }
        if fm < q {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    Ok(0.5 * (lo.x() + hi.x()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn lp(a: f64, p: f64) -> LampertiParams {
        LampertiParams::new(a, p).unwrap()
    }

    fn ep(g: f64) -> ExcursionParams {
        ExcursionParams::new(g).unwrap()
    }

    #[test]
    fn brownian_bridge_is_uniform() {
        let p = lp(0.5, 0.5);
        for &x in &[0.3, 0.5, 0.001, 0.999] {
            assert_relative_eq!(bridge_cdf(&p, x, &spec()).unwrap(), x, max_relative = 1e-9);
            assert_relative_eq!(bridge_pdf(&p, x, &spec()).unwrap(), 1.0, max_relative = 1e-9);
        }
    }

    #[test]
    fn symmetric_bridge_has_median_half() {
        assert_relative_eq!(bridge_cdf(&lp(0.75, 0.5), 0.5, &spec()).unwrap(), 0.5, max_relative = 1e-9);
    }

    #[test]
    fn bridge_asymptote_values() {
        let a = bridge_pdf_asymptote(&lp(0.5, 0.5));
        assert_relative_eq!(a.exponent, 0.0);
        assert_relative_eq!(a.constant, 1.0, max_relative = 1e-14);
        let a = bridge_pdf_asymptote(&lp(0.5, 2.0 / 3.0));
        assert_relative_eq!(a.constant, 0.375, max_relative = 1e-14);
        let a = bridge_pdf_asymptote(&lp(0.5, 1.0 / 3.0));
        assert_relative_eq!(a.constant, 3.0, max_relative = 1e-14);
        let a = bridge_pdf_asymptote(&lp(0.75, 0.5));
        assert_relative_eq!(a.exponent, 0.5);
        assert_relative_eq!(a.constant, 0.572_07, max_relative = 1e-4);
    }

    #[test]
    fn bridge_pdf_approaches_asymptote() {
        let p = lp(0.5, 1.0 / 3.0);
        let v = bridge_pdf(&p, 1e-4, &spec()).unwrap();
        assert_relative_eq!(v, 3.0, max_relative = 0.01);
    }

    #[test]
    fn excursion_asymptote_values() {
        let a = excursion_pdf_asymptote(&ep(0.75));
        assert_relative_eq!(a.exponent, -0.5);
        assert_relative_eq!(a.constant, 0.429_05, max_relative = 1e-4);
        let a = excursion_pdf_asymptote(&ep(0.5 + 1e-9));
        assert!(a.constant.abs() < 1e-8);
        let a = excursion_pdf_asymptote(&ep(0.9));
        assert_relative_eq!(a.exponent, -0.2, max_relative = 1e-12);
        assert_relative_eq!(a.constant, 0.781_51, max_relative = 1e-4);
    }

    #[test]
    fn excursion_cdf_is_monotone_and_symmetric() {
        for &g in &[0.55, 0.75, 0.95] {
            let e = ep(g);
            let v: Vec<f64> = [0.2, 0.5, 0.8].iter().map(|&x| excursion_cdf(&e, x, &spec()).unwrap()).collect();
            assert!(v[0] < v[1] && v[1] < v[2]);
            assert_relative_eq!(v[1], 0.5, max_relative = 1e-8);
            assert_relative_eq!(v[0] + v[2], 1.0, max_relative = 1e-8);
        }
    }

    #[test]
    fn excursion_small_x() {
        let e = ep(0.75);
        let x: f64 = 1e-3;
        let a = excursion_pdf_asymptote(&e);
        let expected = a.constant / (2.0 * 0.75 - 1.0) * x.sqrt();
        assert_relative_eq!(excursion_cdf(&e, x, &spec()).unwrap(), expected, max_relative = 0.02);
        let x: f64 = 1e-4;
        assert_relative_eq!(excursion_pdf(&e, x, &spec()).unwrap(), a.eval(x), max_relative = 0.02);
    }

    #[test]
    fn excursion_pdf_matches_cdf_differences() {
        let e = ep(0.75);
        let (x, h) = (0.4, 1e-5);
        let fd = (excursion_cdf(&e, x + h, &spec()).unwrap() - excursion_cdf(&e, x - h, &spec()).unwrap()) / (2.0 * h);
        assert_relative_eq!(excursion_pdf(&e, x, &spec()).unwrap(), fd, max_relative = 1e-5);
        assert_relative_eq!(excursion_nth_derivative(&e, 1, x, &spec()).unwrap(), fd, max_relative = 1e-5);
    }

    #[test]
    fn bridge_derivative_routes() {
        let p = lp(2.0 / 3.0, 2.0 / 3.0);
        let x = 0.35;
        let d = bridge_pdf(&p, x, &spec()).unwrap();
        assert_relative_eq!(bridge_nth_derivative(&p, 1, x, &spec()).unwrap(), d, max_relative = 1e-8);
        assert_relative_eq!(
            bridge_nth_derivative(&p, 0, x, &spec()).unwrap(),
            bridge_cdf(&p, x, &spec()).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn bridge_skew_symmetry() {
        let (p, q) = (lp(0.6, 0.3), lp(0.6, 0.7));
        for &x in &[0.1, 0.4, 0.8] {
            assert_relative_eq!(
                bridge_pdf(&p, x, &spec()).unwrap(),
                bridge_pdf(&q, 1.0 - x, &spec()).unwrap(),
                max_relative = 1e-8
            );
        }
    }

    #[test]
    fn closed_form_laws_normalized() {
        let spec = QuadratureSpec::default().with_tol(1e-10);
        for law in [
            Law::Lamperti(lp(0.3, 0.8)),
            Law::Bfry { alpha: 0.7 },
            Law::Arcsine(StableParams::new(0.25).unwrap()),
        ] {
            assert_relative_eq!(law.total_mass(&spec).unwrap(), 1.0, max_relative = 1e-8);
        }
    }

    #[test]
    fn closed_form_cdfs() {
        let s = spec();
        let x = UnitPoint::new(0.25).unwrap();
        let arcsine = (2.0 / PI) * 0.25f64.sqrt().asin();
        assert_relative_eq!(Law::Arcsine(StableParams::new(0.5).unwrap()).cdf(x, &s).unwrap(), arcsine, max_relative = 1e-12);
        assert_relative_eq!(Law::Lamperti(lp(0.5, 0.5)).cdf(x, &s).unwrap(), arcsine, max_relative = 1e-9);
        assert_relative_eq!(Law::Bfry { alpha: 0.5 }.cdf(x, &s).unwrap(), arcsine, max_relative = 1e-9);
    }

    #[test]
    fn quantiles() {
        let s = QuadratureSpec::cli_default();
        assert!((quantile(&Law::Bridge(lp(0.5, 0.5)), 0.25, &s).unwrap() - 0.25).abs() < 1e-8);
        assert!((quantile(&Law::Bridge(lp(0.7, 0.5)), 0.5, &s).unwrap() - 0.5).abs() < 1e-8);
        let arcsine = Law::Arcsine(StableParams::new(0.5).unwrap());
        let x = quantile(&arcsine, 0.9, &s).unwrap();
        assert!(((PI * 0.45).sin().powi(2) - x).abs() < 1e-8);
        // extreme quantile of a law with heavy mass near 0
        let tiny = quantile(&Law::Bridge(lp(0.1, 0.5)), 1e-4, &s).unwrap();
        assert!(tiny > 0.0 && tiny < 1e-6);
        assert!(quantile(&arcsine, 1.0, &s).is_err());
    }

    #[test]
    fn bisection_detects_non_monotone_cdf() {
        let lo = UnitPoint::new(0.1).unwrap();
        let hi = UnitPoint::new(0.9).unwrap();
        let r = bisect(lo, 0.0, hi, 1.0, 0.5, |x| Ok(if x.x() > 0.4 { -1.0 } else { 0.0 }));
        assert!(matches!(r, Err(Error::Bracket(_))));
    }
}
