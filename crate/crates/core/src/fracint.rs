//! Riemann-Liouville fractional integrals
//! `I^a[f](x) = int_0^x (x - t)^(a-1) f(t) dt / Gamma(a)`
//! and the derivative identities built on the Euler operator `(delta f)(t) = t f'(t)`.
//!
//! Functions are carried as [`SingularFunction`] values: a closure returning a
//! chain of derivatives together with the endpoint exponent of each link. A
//! link with exponent `b` behaves like `t^(b-1)` times a bounded factor near 0,
//! so it is integrable on `(0, r)` exactly when `b > 0`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{check_open_unit, Error, Result};
use crate::jet::JET_LEN;
use crate::point::UnitPoint;
use crate::quadrature::{integrate, EndBehaviour, Interval, QuadratureSpec};

/// Longest derivative chain a [`SingularFunction`] can carry (orders `0..CHAIN_LEN`).
pub const CHAIN_LEN: usize = JET_LEN;

type Chain = dyn Fn(UnitPoint, usize) -> [f64; CHAIN_LEN] + Send + Sync;

/// Leading power law `constant * x^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    pub exponent: f64,
    pub constant: f64,
}

impl PowerLaw {
    pub fn eval(&self, x: f64) -> f64 {
        self.constant * x.powf(self.exponent)
    }
}

/// A real function on `(0, 1)` with declared endpoint exponents for itself
/// and each available derivative.
#[derive(Clone)]
pub struct SingularFunction {
    chain: Arc<Chain>,
    exponents: Vec<f64>,
}

impl fmt::Debug for SingularFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SingularFunction")
            .field("exponents", &self.exponents)
            .finish_non_exhaustive()
    }
}

/// Ratio test behind the construction spot check: `|f(t)| t^(1-beta)` must
/// not grow by more than this factor between `t = 1e-3` and `t = 1e-7`.
const SPOT_GROWTH: f64 = 10.0;

impl SingularFunction {
    /// A function without derivative information, behaving like `t^(beta-1)` at 0.
    pub fn new<F>(beta: f64, f: F) -> Result<Self>
    where
        F: Fn(UnitPoint) -> f64 + Send + Sync + 'static,
    {
        Self::with_derivatives(vec![beta], move |t, _| {
            let mut out = [0.0; CHAIN_LEN];
            out[0] = f(t);
            out
        })
    }

    /// A function with derivatives up to `exponents.len() - 1`.
    ///
    /// `chain(t, k)` must fill entries `0..=k` with `f(t), f'(t), ..., f^(k)(t)`;
    /// `exponents[k]` is the endpoint exponent of `f^(k)`.
    pub fn with_derivatives<F>(exponents: Vec<f64>, chain: F) -> Result<Self>
    where
        F: Fn(UnitPoint, usize) -> [f64; CHAIN_LEN] + Send + Sync + 'static,
    {
        if exponents.is_empty() || exponents.len() > CHAIN_LEN {
            return Err(Error::Precondition(format!(
                "derivative chain must have between 1 and {CHAIN_LEN} entries"
            )));
        }
        let beta = exponents[0];
        if !(beta > 0.0) {
            return Err(Error::InvalidParameter {
                name: "beta",
                value: beta,
                range: "(0, inf)",
            });
        }
        let f = Self {
            chain: Arc::new(chain),
            exponents,
        };
        if cfg!(debug_assertions) {
            f.spot_check()?;
        }
        Ok(f)
    }

    /// Trusted constructor for chains built inside the crate.
    pub(crate) fn from_chain<F>(exponents: Vec<f64>, chain: F) -> Self
    where
        F: Fn(UnitPoint, usize) -> [f64; CHAIN_LEN] + Send + Sync + 'static,
    {
        debug_assert!(!exponents.is_empty() && exponents.len() <= CHAIN_LEN);
        Self {
            chain: Arc::new(chain),
            exponents,
        }
    }

    fn spot_check(&self) -> Result<()> {
        let beta = self.exponents[0];
        let r = |t: f64| {
            let p = UnitPoint::from_parts(t, 1.0 - t);
            self.value(p).abs() * t.powf(1.0 - beta)
        };
        let (r3, r5, r7) = (r(1e-3), r(1e-5), r(1e-7));
        let ok = r3.is_finite() && r5.is_finite() && r7.is_finite() && r7 <= SPOT_GROWTH * r3.max(r5) + 1e-300;
        if ok {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "function is not O(t^{}) near 0: |f| t^(1-beta) = {r3:e}, {r5:e}, {r7:e} at 1e-3, 1e-5, 1e-7",
                beta - 1.0
            )))
        }
    }

    /// The constant function `c`.
    pub fn constant(c: f64) -> Self {
        Self::from_chain(vec![1.0; CHAIN_LEN], move |_, _| {
            let mut out = [0.0; CHAIN_LEN];
            out[0] = c;
            out
        })
    }

    /// `t^p` for `p > -1`, with its full derivative chain.
    pub fn monomial(p: f64) -> Result<Self> {
        if !(p > -1.0 && p.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "power",
                value: p,
                range: "(-1, inf)",
            });
        }
        let mut coefs = [0.0; CHAIN_LEN];
        let mut exps = vec![0.0; CHAIN_LEN];
        let mut c = 1.0;
        for k in 0..CHAIN_LEN {
            coefs[k] = c;
            // a vanishing derivative is bounded, exponent 1
            exps[k] = if c == 0.0 { 1.0 } else { p + 1.0 - k as f64 };
            c *= p - k as f64;
        }
        Ok(Self::from_chain(exps, move |t, order| {
            let lt = t.ln();
            let mut out = [0.0; CHAIN_LEN];
            for k in 0..=order {
                if coefs[k] != 0.0 {
                    out[k] = coefs[k] * ((p - k as f64) * lt).exp();
                }
            }
            out
        }))
    }

    /// Highest derivative order available.
    pub fn max_order(&self) -> usize {
        self.exponents.len() - 1
    }

    /// Endpoint exponent `beta` of the function itself.
    pub fn beta(&self) -> f64 {
        self.exponents[0]
    }

    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    pub fn has_derivative(&self) -> bool {
        self.max_order() >= 1
    }

    #[inline]
    pub fn value(&self, t: UnitPoint) -> f64 {
        (self.chain)(t, 0)[0]
    }

    /// `f^(k)(t)`.
    pub fn derivative_value(&self, t: UnitPoint, k: usize) -> Result<f64> {
        if k > self.max_order() {
            return Err(self.missing(k));
        }
        Ok((self.chain)(t, k)[k])
    }

    fn missing(&self, k: usize) -> Error {
        Error::Capability(format!(
            "derivative of order {k} requested, chain has order {}",
            self.max_order()
        ))
    }

    pub fn scaled(&self, s: f64) -> Self {
        let inner = Arc::clone(&self.chain);
        Self::from_chain(self.exponents.clone(), move |t, order| {
            let mut d = inner(t, order);
            for v in d.iter_mut().take(order + 1) {
                *v *= s;
            }
            d
        })
    }

    /// `a f + b g`; the chain is as long as the shorter of the two.
    pub fn linear_combination(a: f64, f: &Self, b: f64, g: &Self) -> Self {
        let n = f.exponents.len().min(g.exponents.len());
        let exps = (0..n).map(|k| f.exponents[k].min(g.exponents[k])).collect();
        let (fc, gc) = (Arc::clone(&f.chain), Arc::clone(&g.chain));
        Self::from_chain(exps, move |t, order| {
            let (x, y) = (fc(t, order), gc(t, order));
            let mut out = [0.0; CHAIN_LEN];
            for k in 0..=order {
                out[k] = a * x[k] + b * y[k];
            }
            out
        })
    }

    /// `f'` with the remaining chain.
    pub fn derivative(&self) -> Result<Self> {
        if !self.has_derivative() {
            return Err(self.missing(1));
        }
        let inner = Arc::clone(&self.chain);
        Ok(Self::from_chain(self.exponents[1..].to_vec(), move |t, order| {
            let d = inner(t, order + 1);
            let mut out = [0.0; CHAIN_LEN];
            out[..=order].copy_from_slice(&d[1..=order + 1]);
            out
        }))
    }

    /// `(c + delta) f = c f + t f'`, one order shorter than `f`.
    ///
    /// Its `k`-th derivative is `(c + k) f^(k) + t f^(k+1)`.
    pub fn shifted_euler(&self, c: f64) -> Result<Self> {
        if !self.has_derivative() {
            return Err(self.missing(1));
        }
        let e = &self.exponents;
        let exps = (0..e.len() - 1).map(|k| e[k].min(e[k + 1] + 1.0)).collect();
        let inner = Arc::clone(&self.chain);
        Ok(Self::from_chain(exps, move |t, order| {
            let d = inner(t, order + 1);
            let x = t.x();
            let mut out = [0.0; CHAIN_LEN];
            for k in 0..=order {
                out[k] = (c + k as f64) * d[k] + x * d[k + 1];
            }
            out
        }))
    }

    /// `delta f = t f'`.
    pub fn delta(&self) -> Result<Self> {
        self.shifted_euler(0.0)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            range: "(0, inf)",
        })
    }
}

/// `I^alpha[f](x)`.
pub fn rl_integral(f: &SingularFunction, alpha: f64, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_open_unit("rl_integral", x)?;
    rl_integral_at(f, alpha, UnitPoint::new(x)?, spec)
}

/// `I^alpha[f](x)` at a point given with its complement.
///
/// Both endpoint singularities, `t^(beta-1)` at 0 and `(x-t)^(alpha-1)` at
/// `x`, are carried by the quadrature weights. The distance `1 - x` to a
/// possible singularity of `f` at 1 grades the right end.
pub fn rl_integral_at(f: &SingularFunction, alpha: f64, x: UnitPoint, spec: &QuadratureSpec) -> Result<f64> {
    check_alpha(alpha)?;
    let iv = Interval::up_to(x);
    let ends = EndBehaviour::new(f.beta() - 1.0, alpha - 1.0).with_gaps(f64::INFINITY, x.complement());
    let inv_gamma = 1.0 / gamma(alpha);
    let am1 = alpha - 1.0;
    integrate(&iv, &ends, spec, "rl_integral", x.x(), |node| {
        let w = if am1 == 0.0 { 1.0 } else { (am1 * node.dr.ln()).exp() };
        f.value(node.t) * w * inv_gamma
    })
}

/// `(delta f)(t) = t f'(t)`.
pub fn delta_apply(f: &SingularFunction, t: f64) -> Result<f64> {
    check_open_unit("delta_apply", t)?;
    Ok(t * f.derivative_value(UnitPoint::new(t)?, 1)?)
}

const LIMIT_MAX_HALVINGS: i32 = 60;

/// `f(0+)`, by Richardson extrapolation along `t = 2^-k`.
///
/// The error of `f(t)` is `O(t^b)` with `b` the exponent of `f'`, which
/// fixes the first elimination step; a second step uses the observed ratio.
pub fn limit_at_zero(f: &SingularFunction, spec: &QuadratureSpec) -> Result<f64> {
    if f.beta() > 1.0 {
        return Ok(0.0);
    }
    let rate = f.exponents.get(1).copied().unwrap_or(1.0).max(1e-3);
    let factor = 2f64.powf(rate);
    let sample = |k: i32| {
        let t = 2f64.powi(-k);
        f.value(UnitPoint::from_parts(t, 1.0 - t))
    };
    let mut prev = sample(2);
    let mut extrapolants: Vec<f64> = Vec::new();
    for k in 3..=LIMIT_MAX_HALVINGS {
        let cur = sample(k);
        if !cur.is_finite() {
            break;
        }
        extrapolants.push((factor * cur - prev) / (factor - 1.0));
        prev = cur;
        let n = extrapolants.len();
        if n >= 3 {
            let (a, b, c) = (extrapolants[n - 3], extrapolants[n - 2], extrapolants[n - 1]);
            let scale = c.abs().max(f64::MIN_POSITIVE);
            let tol = spec.rel_tol * scale + 4.0 * f64::EPSILON * cur.abs();
            if (c - b).abs() <= tol && (b - a).abs() <= tol {
                return Ok(c);
            }
        }
    }
    let n = extrapolants.len();
    Err(Error::NonConvergence {
        op: "limit at 0+",
        at: 0.0,
        achieved: if n >= 2 {
            (extrapolants[n - 1] - extrapolants[n - 2]).abs()
        } else {
            f64::NAN
        },
        tol: spec.rel_tol,
    })
}

/// `d/dx I^alpha[f](x) = f(0+) x^(alpha-1) / Gamma(alpha) + I^alpha[f'](x)`.
pub fn rl_derivative(f: &SingularFunction, alpha: f64, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_alpha(alpha)?;
    check_open_unit("rl_derivative", x)?;
    let df = f.derivative()?;
    if !(df.beta() > 0.0) {
        return Err(Error::Precondition(format!(
            "f' has endpoint exponent {} and is not integrable at 0; use the delta route",
            df.beta()
        )));
    }
    let f0 = limit_at_zero(f, spec)?;
    let boundary = if f0 == 0.0 {
        0.0
    } else {
        f0 * x.powf(alpha - 1.0) / gamma(alpha)
    };
    Ok(boundary + rl_integral(&df, alpha, x, spec)?)
}

/// `d/dx I^alpha[f](x) = I^alpha[alpha f + delta f](x) / x`.
pub fn rl_derivative_via_delta(f: &SingularFunction, alpha: f64, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    rl_nth_derivative(f, alpha, 1, x, spec)
}

/// `d^n/dx^n I^alpha[f](x) = x^-n I^alpha[p_n(alpha + delta) f](x)` with
/// `p_n(s) = s (s - 1) ... (s - n + 1)` applied as `n` first-order factors.
pub fn rl_nth_derivative(
    f: &SingularFunction,
    alpha: f64,
    n: usize,
    x: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    check_alpha(alpha)?;
    check_open_unit("rl_nth_derivative", x)?;
    if n == 0 {
        return rl_integral(f, alpha, x, spec);
    }
    let g = euler_polynomial(f, alpha, n)?;
    Ok(rl_integral(&g, alpha, x, spec)? / x.powi(n as i32))
}

/// `p_n(alpha + delta) f`, checked to be integrable at 0.
pub fn euler_polynomial(f: &SingularFunction, alpha: f64, n: usize) -> Result<SingularFunction> {
    if n > f.max_order() {
        return Err(f.missing(n));
    }
    let mut g = f.clone();
    for k in 0..n {
        g = g.shifted_euler(alpha - k as f64)?;
    }
    if !(g.beta() > 0.0) {
        return Err(Error::Precondition(format!(
            "p_{n}(alpha + delta) f has endpoint exponent {} and is not integrable at 0",
            g.beta()
        )));
    }
    Ok(g)
}

/// Least-squares fit of `log|v| = exponent log x + log constant`.
///
/// The abscissae must form a geometric sequence; the values must be nonzero
/// and share one sign, which the returned constant carries.
pub fn asymptotic_fit(samples: &[(f64, f64)]) -> Result<PowerLaw> {
    if samples.len() < 4 {
        return Err(Error::DegenerateFit(format!(
            "need at least 4 samples, got {}",
            samples.len()
        )));
    }
    let sign = samples[0].1.signum();
    for &(x, v) in samples {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::DegenerateFit(format!("abscissa {x} is not positive")));
        }
        if !(v != 0.0 && v.is_finite() && v.signum() == sign) {
            return Err(Error::DegenerateFit(format!(
                "value {v} at x = {x} is zero or changes sign"
            )));
        }
    }
    let logs: Vec<(f64, f64)> = samples.iter().map(|&(x, v)| (x.ln(), v.abs().ln())).collect();
    let step = logs[1].0 - logs[0].0;
    let geometric = step != 0.0
        && logs
            .windows(2)
            .all(|w| ((w[1].0 - w[0].0) - step).abs() <= 1e-6 * step.abs());
    if !geometric {
        return Err(Error::DegenerateFit("abscissae are not geometric".into()));
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    Ok(PowerLaw {
        exponent: slope,
        constant: sign * (my - slope * mx).exp(),
    })
}
