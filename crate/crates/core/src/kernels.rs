//! Closed-form occupation densities and the integral kernels `g` and `h`.
//!
//! All four densities and both kernels are rational functions of
//! `u = t^e` and `v = (1 - t)^e`. They are evaluated through the
//! logarithms of `t` and `1 - t`, taken from whichever side of the interval
//! is closer, and the quadratic denominators are summed with compensation.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{check_open_unit, Error, Result};
use crate::fracint::{PowerLaw, SingularFunction, CHAIN_LEN};
use crate::jet::Jet;
use crate::point::UnitPoint;

/// Skewness and index of a skew Bessel process: `alpha = 1 - d/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LampertiParams {
    alpha: f64,
    p: f64,
}

impl LampertiParams {
    pub fn new(alpha: f64, p: f64) -> Result<Self> {
        open_unit_param("alpha", alpha)?;
        open_unit_param("p", p)?;
        Ok(Self { alpha, p })
    }

    /// Parameters of a skew Bessel process of dimension `d` in `(0, 2)`.
    pub fn from_dimension(d: f64, p: f64) -> Result<Self> {
        Self::new(dim_to_alpha(d)?, p)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn dimension(&self) -> f64 {
        2.0 * (1.0 - self.alpha)
    }

    /// The same index with `p` replaced by `1 - p`.
    pub fn mirrored(&self) -> Self {
        Self {
            alpha: self.alpha,
            p: 1.0 - self.p,
        }
    }
}

/// `alpha = 1 - d/2`, a bijection from `(0, 2)` onto `(0, 1)`.
pub fn dim_to_alpha(d: f64) -> Result<f64> {
    if d > 0.0 && d < 2.0 {
        Ok(1.0 - 0.5 * d)
    } else {
        Err(Error::InvalidParameter {
            name: "dimension",
            value: d,
            range: "(0, 2)",
        })
    }
}

/// Index `gamma` in `(1/2, 1)` of the excursion law; `gamma = 1 / stable index`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExcursionParams {
    gamma: f64,
}

impl ExcursionParams {
    pub fn new(gamma: f64) -> Result<Self> {
        if gamma > 0.5 && gamma < 1.0 {
            Ok(Self { gamma })
        } else {
            Err(Error::InvalidParameter {
                name: "gamma",
                value: gamma,
                range: "(1/2, 1)",
            })
        }
    }

    pub fn from_stable_index(index: f64) -> Result<Self> {
        Self::new(stable_index_to_gamma(index)?)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn stable_index(&self) -> f64 {
        1.0 / self.gamma
    }
}

pub fn stable_index_to_gamma(index: f64) -> Result<f64> {
    if index > 1.0 && index < 2.0 {
        Ok(1.0 / index)
    } else {
        Err(Error::InvalidParameter {
            name: "stable index",
            value: index,
            range: "(1, 2)",
        })
    }
}

/// Positivity parameter `c = P(X(t) > 0)` of a Levy process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    c: f64,
}

impl StableParams {
    pub fn new(c: f64) -> Result<Self> {
        open_unit_param("c", c)?;
        Ok(Self { c })
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

fn open_unit_param(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            range: "(0, 1)",
        })
    }
}

/// Neumaier summation of three terms.
fn sum3(a: f64, b: f64, c: f64) -> f64 {
    let mut s = 0.0;
    let mut comp = 0.0;
    for v in [a, b, c] {
        let t = s + v;
        if s.abs() >= v.abs() {
            comp += (s - t) + v;
        } else {
            comp += (v - t) + s;
        }
        s = t;
    }
    s + comp
}

/// `k u / (a v^2 + b u^2 + c u v)` with `u = t^e`, `v = (1 - t)^e`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PowerRatio {
    k: f64,
    e: f64,
    a: f64,
    b: f64,
    c: f64,
}

impl PowerRatio {
    fn bridge(params: &LampertiParams) -> Self {
        let (al, p) = (params.alpha, params.p);
        Self {
            k: (al * PI).sin() / PI * (1.0 - p),
            e: al,
            a: p * p,
            b: (1.0 - p) * (1.0 - p),
            c: 2.0 * p * (1.0 - p) * (al * PI).cos(),
        }
    }

    fn excursion(params: &ExcursionParams) -> Self {
        let g = params.gamma;
        Self {
            k: (g * PI).sin() / PI * g / (1.0 - g),
            e: g,
            a: 1.0,
            b: 1.0,
            c: -2.0 * (g * PI).cos(),
        }
    }

    fn denominator(&self, u: f64, v: f64) -> f64 {
        sum3(self.a * v * v, self.b * u * u, self.c * u * v)
    }

    /// Value and first two derivatives by the quotient rule.
    fn closed_form(&self, t: UnitPoint) -> [f64; 3] {
        let e = self.e;
        let u = (e * t.ln()).exp();
        let v = (e * t.ln_complement()).exp();
        let ti = 1.0 / t.x();
        let ci = 1.0 / t.complement();
        let u1 = e * u * ti;
        let u2 = e * (e - 1.0) * u * ti * ti;
        let v1 = -e * v * ci;
        let v2 = e * (e - 1.0) * v * ci * ci;
        let (a, b, c) = (self.a, self.b, self.c);
        let d0 = self.denominator(u, v);
        let d1 = 2.0 * a * v * v1 + 2.0 * b * u * u1 + c * (u1 * v + u * v1);
        let d2 = 2.0 * a * (v1 * v1 + v * v2)
            + 2.0 * b * (u1 * u1 + u * u2)
            + c * (u2 * v + 2.0 * u1 * v1 + u * v2);
        let g0 = self.k * u / d0;
        let g1 = (self.k * u1 - g0 * d1) / d0;
        let g2 = (self.k * u2 - 2.0 * g1 * d1 - g0 * d2) / d0;
        [g0, g1, g2]
    }

    fn jet(&self, t: UnitPoint, order: usize) -> [f64; CHAIN_LEN] {
        let u = Jet::power(t.x(), t.ln(), self.e, order);
        let v = Jet::reflected_power(t.complement(), t.ln_complement(), self.e, order);
        let den = v
            .mul(&v)
            .scale(self.a)
            .add(&u.mul(&u).scale(self.b))
            .add(&u.mul(&v).scale(self.c));
        let mut d = u.scale(self.k).div(&den).derivatives();
        // The jet's leading coefficient misses the compensated denominator.
        d[0] = self.k * u.c[0] / self.denominator(u.c[0], v.c[0]);
        d
    }

    /// Derivatives `0..=order`; orders above two come from Taylor jets.
    pub(crate) fn derivatives(&self, t: UnitPoint, order: usize) -> [f64; CHAIN_LEN] {
        if order <= 2 {
            let cf = self.closed_form(t);
            let mut out = [0.0; CHAIN_LEN];
            out[..=order].copy_from_slice(&cf[..=order]);
            out
        } else {
            self.jet(t, order)
        }
    }

    /// Singular-function view with the derivative chain starting at derivative `skip`.
    fn singular(self, skip: usize) -> SingularFunction {
        let top = CHAIN_LEN - 1 - skip;
        let exponents: Vec<f64> = (0..=top).map(|k| self.e + 1.0 - (k + skip) as f64).collect();
        SingularFunction::from_chain(exponents, move |t, order| {
            let d = self.derivatives(t, order + skip);
            let mut out = [0.0; CHAIN_LEN];
            out[..=order].copy_from_slice(&d[skip..=order + skip]);
            out
        })
    }
}

fn check_order(order: usize) -> Result<()> {
    if order <= 2 {
        Ok(())
    } else {
        Err(Error::Order(order))
    }
}

/// Lamperti density `f_{alpha,p}` of the occupation time of a skew Bessel process.
pub fn lamperti_density(params: &LampertiParams, x: f64) -> Result<f64> {
    check_open_unit("lamperti_density", x)?;
    Ok(lamperti_density_at(params, UnitPoint::new(x)?))
}

pub fn lamperti_density_at(params: &LampertiParams, x: UnitPoint) -> f64 {
    let r = PowerRatio::bridge(params);
    let al = params.alpha;
    let (lx, lc) = (x.ln(), x.ln_complement());
    let u = (al * lx).exp();
    let v = (al * lc).exp();
    let pref = (al * PI).sin() / PI * params.p * (1.0 - params.p);
    pref * ((al - 1.0) * (lx + lc)).exp() / r.denominator(u, v)
}

/// Density of `J_alpha`.
pub fn bfry_density(alpha: f64, x: f64) -> Result<f64> {
    open_unit_param("alpha", alpha)?;
    check_open_unit("bfry_density", x)?;
    Ok(bfry_density_at(alpha, UnitPoint::new(x)?))
}

pub fn bfry_density_at(alpha: f64, x: UnitPoint) -> f64 {
    let (lx, lc) = (x.ln(), x.ln_complement());
    let u = (alpha * lx).exp();
    let v = (alpha * lc).exp();
    let den = sum3(u * u, v * v, -2.0 * u * v * (alpha * PI).cos());
    let pref = (alpha * PI).sin() / PI * alpha / (1.0 - alpha);
    pref * ((alpha - 1.0) * (lx + lc)).exp() / den
}

/// Generalized arcsine density `f_{Z_c}`.
pub fn generalized_arcsine_density(params: &StableParams, x: f64) -> Result<f64> {
    check_open_unit("generalized_arcsine_density", x)?;
    Ok(generalized_arcsine_density_at(params, UnitPoint::new(x)?))
}

pub fn generalized_arcsine_density_at(params: &StableParams, x: UnitPoint) -> f64 {
    let c = params.c;
    (c * PI).sin() / PI * ((c - 1.0) * x.ln() - c * x.ln_complement()).exp()
}

/// Kernel `g_{alpha,p}` of the bridge law and its first two derivatives.
pub fn g_kernel(params: &LampertiParams, t: f64, order: usize) -> Result<f64> {
    check_order(order)?;
    check_open_unit("g_kernel", t)?;
    Ok(PowerRatio::bridge(params).closed_form(UnitPoint::new(t)?)[order])
}

/// Kernel `h_gamma` of the excursion law and its first two derivatives.
pub fn h_kernel(params: &ExcursionParams, t: f64, order: usize) -> Result<f64> {
    check_order(order)?;
    check_open_unit("h_kernel", t)?;
    Ok(PowerRatio::excursion(params).closed_form(UnitPoint::new(t)?)[order])
}

/// Derivatives of `g_{alpha,p}` of every order up to `order` (at most 7).
pub fn g_derivatives(params: &LampertiParams, t: UnitPoint, order: usize) -> [f64; CHAIN_LEN] {
    PowerRatio::bridge(params).derivatives(t, order.min(CHAIN_LEN - 1))
}

/// Derivatives of `h_gamma` of every order up to `order` (at most 7).
pub fn h_derivatives(params: &ExcursionParams, t: UnitPoint, order: usize) -> [f64; CHAIN_LEN] {
    PowerRatio::excursion(params).derivatives(t, order.min(CHAIN_LEN - 1))
}

/// `g_{alpha,p}` with its derivative chain, behaving like `t^alpha` at 0.
pub fn g_function(params: &LampertiParams) -> SingularFunction {
    PowerRatio::bridge(params).singular(0)
}

/// `g'_{alpha,p}`, behaving like `t^(alpha-1)` at 0.
pub fn g_prime_function(params: &LampertiParams) -> SingularFunction {
    PowerRatio::bridge(params).singular(1)
}

/// `h_gamma` with its derivative chain.
pub fn h_function(params: &ExcursionParams) -> SingularFunction {
    PowerRatio::excursion(params).singular(0)
}

/// `h'_gamma`, behaving like `t^(gamma-1)` at 0.
pub fn h_prime_function(params: &ExcursionParams) -> SingularFunction {
    PowerRatio::excursion(params).singular(1)
}

/// Leading behaviour `f_{alpha,p}(x) ~ C x^(alpha-1)` as `x -> 0+`.
pub fn lamperti_asymptote(params: &LampertiParams) -> PowerLaw {
    let al = params.alpha;
    PowerLaw {
        exponent: al - 1.0,
        constant: (al * PI).sin() / PI * (1.0 - params.p) / params.p,
    }
}

/// Richardson limit of `t^(2-e) f''(t)` along `t = 2^-k`, where the leading
/// correction decays like `t^e`.
fn second_derivative_limit(op: &'static str, e: f64, second: impl Fn(UnitPoint) -> f64) -> Result<f64> {
    let r = 2f64.powf(e);
    let mut prev_raw: Option<f64> = None;
    let mut last = Vec::new();
    for k in 8..=120 {
        let t = UnitPoint::new(2f64.powi(-k))?;
        let raw = second(t) * ((2.0 - e) * t.ln()).exp();
        if let Some(p) = prev_raw {
            let extrapolated = (r * raw - p) / (r - 1.0);
            last.push(extrapolated);
            let n = last.len();
            if n >= 3 {
                let scale = extrapolated.abs().max(f64::MIN_POSITIVE);
                if (last[n - 1] - last[n - 2]).abs() <= 1e-10 * scale
                    && (last[n - 2] - last[n - 3]).abs() <= 1e-10 * scale
                {
                    return Ok(extrapolated);
                }
            }
        }
        prev_raw = Some(raw);
    }
    let n = last.len();
    Err(Error::NonConvergence {
        op,
        at: 0.0,
        achieved: (last[n - 1] - last[n - 2]).abs(),
        tol: 1e-10,
    })
}

/// Numerical estimate of `C` in `g''_{alpha,p}(t) ~ C t^(alpha-2)` as `t -> 0+`.
pub fn g_second_derivative_constant(params: &LampertiParams) -> Result<f64> {
    let ratio = PowerRatio::bridge(params);
    second_derivative_limit("g'' constant", params.alpha, |t| ratio.closed_form(t)[2])
}

/// Numerical estimate of `C` in `h''_gamma(t) ~ C t^(gamma-2)` as `t -> 0+`.
pub fn h_second_derivative_constant(params: &ExcursionParams) -> Result<f64> {
    let ratio = PowerRatio::excursion(params);
    second_derivative_limit("h'' constant", params.gamma, |t| ratio.closed_form(t)[2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const ARCSINE_QUARTER: f64 = 0.735_105_193_895_722_8; // 4 / (pi sqrt 3)

    fn lp(a: f64, p: f64) -> LampertiParams {
        LampertiParams::new(a, p).unwrap()
    }

    #[test]
    fn construction_rejects_boundaries() {
        assert!(LampertiParams::new(0.0, 0.5).is_err());
        assert!(LampertiParams::new(1.0, 0.5).is_err());
        assert!(LampertiParams::new(0.5, 0.0).is_err());
        assert!(LampertiParams::new(0.5, 1.0).is_err());
        assert!(ExcursionParams::new(0.5).is_err());
        assert!(ExcursionParams::new(1.0).is_err());
        assert!(StableParams::new(0.0).is_err());
        assert!(dim_to_alpha(2.0).is_err());
        assert!(stable_index_to_gamma(1.0).is_err());
    }

    #[test]
    fn parameter_conversions() {
        assert_relative_eq!(dim_to_alpha(1.0).unwrap(), 0.5);
        assert_relative_eq!(dim_to_alpha(0.5).unwrap(), 0.75);
        assert_relative_eq!(LampertiParams::from_dimension(1.0, 0.3).unwrap().alpha(), 0.5);
        assert_relative_eq!(ExcursionParams::from_stable_index(1.5).unwrap().gamma(), 2.0 / 3.0);
    }

    #[test]
    fn lamperti_reduces_to_arcsine() {
        let p = lp(0.5, 0.5);
        assert_relative_eq!(lamperti_density(&p, 0.25).unwrap(), ARCSINE_QUARTER, max_relative = 1e-14);
        assert_relative_eq!(lamperti_density(&p, 0.5).unwrap(), 2.0 / PI, max_relative = 1e-14);
    }

    #[test]
    fn lamperti_direct_value() {
        // alpha = 3/4, p = 1/3, x = 1/2: (1-x)^a = x^a, so
        // f = (sin(3pi/4)/pi) p(1-p) 2^{1/2} / (p^2 + (1-p)^2 + 2p(1-p)cos(3pi/4)) * 2^{-3/2}... evaluated below
        let (a, p, x) = (0.75f64, 1.0f64 / 3.0, 0.5f64);
        let s = (a * PI).sin() / PI;
        let w = x.powf(a);
        let den = p * p * w * w + (1.0 - p).powi(2) * w * w + 2.0 * p * (1.0 - p) * w * w * (a * PI).cos();
        let expected = s * p * (1.0 - p) * x.powf(2.0 * (a - 1.0)) / den;
        assert_relative_eq!(lamperti_density(&lp(a, p), x).unwrap(), expected, max_relative = 1e-14);
    }

    #[test]
    fn bfry_reduces_to_arcsine() {
        assert_relative_eq!(bfry_density(0.5, 0.5).unwrap(), 2.0 / PI, max_relative = 1e-14);
        assert_relative_eq!(bfry_density(0.5, 0.25).unwrap(), ARCSINE_QUARTER, max_relative = 1e-14);
    }

    #[test]
    fn generalized_arcsine_values() {
        let half = StableParams::new(0.5).unwrap();
        assert_relative_eq!(generalized_arcsine_density(&half, 0.25).unwrap(), ARCSINE_QUARTER, max_relative = 1e-14);
        assert_relative_eq!(generalized_arcsine_density(&half, 0.75).unwrap(), ARCSINE_QUARTER, max_relative = 1e-14);
        let two_thirds = StableParams::new(2.0 / 3.0).unwrap();
        assert_relative_eq!(
            generalized_arcsine_density(&two_thirds, 0.5).unwrap(),
            3f64.sqrt() / PI,
            max_relative = 1e-14
        );
    }

    #[test]
    fn domain_errors() {
        let p = lp(0.5, 0.5);
        assert!(matches!(lamperti_density(&p, 0.0), Err(Error::Domain { .. })));
        assert!(matches!(lamperti_density(&p, 1.0), Err(Error::Domain { .. })));
        assert!(bfry_density(0.5, -0.1).is_err());
        assert!(bfry_density(1.2, 0.5).is_err());
        assert!(g_kernel(&p, 1.0, 0).is_err());
        assert!(matches!(g_kernel(&p, 0.5, 3), Err(Error::Order(3))));
        assert!(matches!(
            h_kernel(&ExcursionParams::new(0.75).unwrap(), 0.5, 5),
            Err(Error::Order(5))
        ));
    }

    #[test]
    fn g_kernel_values() {
        let p = lp(0.5, 0.5);
        assert_relative_eq!(g_kernel(&p, 0.5, 0).unwrap(), 2f64.sqrt() / PI, max_relative = 1e-14);
        // g' ~ (1/pi) t^{-1/2} as t -> 0
        let t = 1e-10;
        assert_relative_eq!(g_kernel(&p, t, 1).unwrap() * t.sqrt(), 1.0 / PI, max_relative = 1e-4);
    }

    #[test]
    fn h_kernel_value_at_half() {
        // prefactor (sin(3pi/4)/pi) * 3, denominator 2 (1/2)^{3/2} + 1/2, numerator (1/2)^{3/4}
        let g = ExcursionParams::new(0.75).unwrap();
        let expected = (0.75 * PI).sin() / PI * 3.0 * 0.5f64.powf(0.75) / (2.0 * 0.5f64.powf(1.5) + 0.5);
        assert_relative_eq!(h_kernel(&g, 0.5, 0).unwrap(), expected, max_relative = 1e-14);
        assert_relative_eq!(h_kernel(&g, 0.5, 0).unwrap(), 0.332_612, max_relative = 1e-5);
        let t: f64 = 1e-9;
        assert_relative_eq!(
            h_kernel(&g, t, 0).unwrap() / t.powf(0.75),
            (0.75 * PI).sin() / PI * 3.0,
            max_relative = 1e-5
        );
    }

    fn central_diff(f: impl Fn(f64) -> f64, t: f64, h: f64) -> f64 {
        (f(t + h) - f(t - h)) / (2.0 * h)
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let g = lp(0.75, 1.0 / 3.0);
        let e = ExcursionParams::new(0.6).unwrap();
        for i in 1..20 {
            let t = i as f64 / 20.0;
            for order in 1..=2 {
                let fd = central_diff(|s| g_kernel(&g, s, order - 1).unwrap(), t, 1e-6);
                assert_relative_eq!(g_kernel(&g, t, order).unwrap(), fd, max_relative = 1e-6, epsilon = 1e-9);
                let fd = central_diff(|s| h_kernel(&e, s, order - 1).unwrap(), t, 1e-6);
                assert_relative_eq!(h_kernel(&e, t, order).unwrap(), fd, max_relative = 1e-6, epsilon = 1e-9);
            }
        }
        let fd = central_diff(|s| g_kernel(&g, s, 0).unwrap(), 0.3, 1e-6);
        assert_relative_eq!(g_kernel(&g, 0.3, 1).unwrap(), fd, max_relative = 1e-6);
        let fd = central_diff(|s| h_kernel(&e, s, 1).unwrap(), 0.2, 1e-6);
        assert_relative_eq!(h_kernel(&e, 0.2, 2).unwrap(), fd, max_relative = 1e-6);
    }

    #[test]
    fn jets_agree_with_closed_form() {
        let g = PowerRatio::bridge(&lp(0.6, 0.3));
        let h = PowerRatio::excursion(&ExcursionParams::new(0.8).unwrap());
        for &t in &[1e-6, 0.01, 0.3, 0.5, 0.9, 1.0 - 1e-7] {
            let t = UnitPoint::new(t).unwrap();
            for r in [g, h] {
                let cf = r.closed_form(t);
                let jet = r.jet(t, 4);
                for k in 0..3 {
                    assert_relative_eq!(jet[k], cf[k], max_relative = 1e-11);
                }
            }
        }
    }

    #[test]
    fn higher_jet_orders_match_finite_differences() {
        let r = PowerRatio::excursion(&ExcursionParams::new(0.7).unwrap());
        let t = 0.35;
        let d = |s: f64, k: usize| r.jet(UnitPoint::new(s).unwrap(), 5)[k];
        for k in 3..=5 {
            let fd = central_diff(|s| d(s, k - 1), t, 1e-5);
            assert_relative_eq!(d(t, k), fd, max_relative = 1e-6);
        }
    }

    #[test]
    fn endpoint_exponents() {
        let g = lp(0.75, 1.0 / 3.0);
        let e = ExcursionParams::new(0.6).unwrap();
        let rg = |t: f64| g_kernel(&g, t, 0).unwrap() * t.powf(-0.75);
        let rh = |t: f64| h_kernel(&e, t, 0).unwrap() * t.powf(-0.6);
        assert_relative_eq!(rg(1e-4), rg(1e-6), max_relative = 0.01);
        assert_relative_eq!(rh(1e-4), rh(1e-6), max_relative = 0.01);
        assert!(rg(1e-6) > 0.0 && rh(1e-6) > 0.0);
    }

    #[test]
    fn asymptote_values() {
        let a = lamperti_asymptote(&lp(0.5, 0.5));
        assert_relative_eq!(a.exponent, -0.5);
        assert_relative_eq!(a.constant, 1.0 / PI, max_relative = 1e-15);
        let a = lamperti_asymptote(&lp(0.5, 1.0 / 3.0));
        assert_relative_eq!(a.constant, 2.0 / PI, max_relative = 1e-15);
        let a = lamperti_asymptote(&lp(0.75, 0.5));
        assert_relative_eq!(a.exponent, -0.25);
        assert_relative_eq!(a.constant, 0.225_079, max_relative = 1e-5);
        // the density approaches its asymptote
        let p = lp(0.75, 0.5);
        let x: f64 = 1e-12;
        let ratio = lamperti_density(&p, x).unwrap() / (a.constant * x.powf(a.exponent));
        assert_relative_eq!(ratio, 1.0, max_relative = 1e-6);
    }

    #[test]
    fn near_one_uses_complement() {
        // 1 - x below f64 resolution of x itself
        let p = lp(0.3, 0.5);
        let xc = 1e-20;
        let v = lamperti_density_at(&p, UnitPoint::from_complement(xc).unwrap());
        let mirrored = lamperti_density_at(&p.mirrored(), UnitPoint::new(xc).unwrap());
        assert_relative_eq!(v, mirrored, max_relative = 1e-12);
    }

    #[test]
    fn second_derivative_constants() {
        // leading terms: g ~ sin(a pi)/pi (1-p)/p^2 t^a, h ~ sin(c pi)/pi c/(1-c) t^c
        for (a, p) in [(1.0 / 3.0, 0.5), (0.5, 1.0 / 3.0), (0.8, 0.7)] {
            let expected = (a * PI).sin() / PI * (1.0 - p) / (p * p) * a * (a - 1.0);
            assert_relative_eq!(g_second_derivative_constant(&lp(a, p)).unwrap(), expected, max_relative = 1e-8);
        }
        for c in [0.6, 0.75, 0.9] {
            let expected = (c * PI).sin() / PI * c / (1.0 - c) * c * (c - 1.0);
            let e = ExcursionParams::new(c).unwrap();
            assert_relative_eq!(h_second_derivative_constant(&e).unwrap(), expected, max_relative = 1e-8);
        }
    }

    proptest! {
        #[test]
        fn lamperti_symmetry(a in 0.05f64..0.95, p in 0.05f64..0.95, x in 0.001f64..0.999) {
            let lhs = lamperti_density(&lp(a, p), x).unwrap();
            let rhs = lamperti_density(&lp(a, 1.0 - p), 1.0 - x).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
        }

        #[test]
        fn densities_positive(a in 0.05f64..0.95, p in 0.05f64..0.95, x in 1e-6f64..0.999999) {
            prop_assert!(lamperti_density(&lp(a, p), x).unwrap() > 0.0);
            prop_assert!(bfry_density(a, x).unwrap() > 0.0);
            prop_assert!(generalized_arcsine_density(&StableParams::new(p).unwrap(), x).unwrap() > 0.0);
        }
    }
}
