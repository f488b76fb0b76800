//! Gauss-Jacobi rules and graded composite quadrature for integrands with
//! algebraic endpoint singularities.
//!
//! An integral over `[a, b]` whose integrand behaves like `(t - a)^p` near `a`
//! and `(b - t)^q` near `b` is split into two halves, each cut into panels
//! shrinking geometrically towards its endpoint. The two innermost panels
//! use Gauss-Jacobi nodes carrying the singular power in the weight, every
//! other panel uses Gauss-Legendre nodes. The node count per panel is raised
//! until two successive estimates agree.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::point::UnitPoint;

/// Ratio between consecutive panels of the geometric grading.
const GRADING: f64 = 0.25;
const MAX_LEVELS: usize = 320;
/// Levels needed to resolve a singularity just outside the interval; enough
/// to reach distances near the bottom of the `f64` range.
const MAX_GAP_LEVELS: usize = 520;
/// Node counts per panel tried in turn by the adaptive rule.
const PANEL_NODES: [usize; 11] = [8, 12, 16, 24, 32, 48, 64, 96, 128, 192, 256];
const MAX_GLOBAL_NODES: usize = 512;
/// When an integral cancels down to this fraction of its L1 norm the
/// convergence test switches from relative to absolute (scaled by the L1 norm).
const CANCELLATION_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NodeRule {
    /// One Gauss-Jacobi panel over the whole interval, node count doubled on refinement.
    JacobiWeighted,
    /// Geometrically graded panels with Gauss-Jacobi end panels.
    #[default]
    AdaptiveSubdivision,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub max_refinements: usize,
    pub node_rule: NodeRule,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_refinements: 20,
            node_rule: NodeRule::AdaptiveSubdivision,
        }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, max_refinements: usize, node_rule: NodeRule) -> Result<Self> {
        let spec = Self {
            rel_tol,
            max_refinements,
            node_rule,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Looser default used by the command line front end.
    pub fn cli_default() -> Self {
        Self {
            rel_tol: 1e-8,
            ..Self::default()
        }
    }

    pub fn with_tol(self, rel_tol: f64) -> Self {
        Self { rel_tol, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "rel_tol",
                value: self.rel_tol,
                range: "(0, inf)",
            });
        }
        if self.max_refinements < 1 {
            return Err(Error::InvalidParameter {
                name: "max_refinements",
                value: self.max_refinements as f64,
                range: "[1, inf)",
            });
        }
        Ok(())
    }
}

/// Gauss-Jacobi rule on `[0, 1]` for the weight `(1 - y)^a y^b`.
#[derive(Debug, Clone)]
pub struct JacobiRule {
    pub nodes: Vec<f64>,
    /// `1 - nodes[i]`, computed without cancellation.
    pub complements: Vec<f64>,
    pub weights: Vec<f64>,
}

type RuleKey = (usize, u64, u64);

fn rule_cache() -> &'static RwLock<HashMap<RuleKey, Arc<JacobiRule>>> {
    static CACHE: OnceLock<RwLock<HashMap<RuleKey, Arc<JacobiRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Cached Gauss-Jacobi rule with `n` nodes for the weight `(1 - y)^a y^b` on `[0, 1]`.
pub fn jacobi_rule(n: usize, a: f64, b: f64) -> Result<Arc<JacobiRule>> {
    if n == 0 {
        return Err(Error::Precondition("Gauss-Jacobi rule needs at least one node".into()));
    }
    if !(a > -1.0 && b > -1.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::Precondition(format!(
            "Gauss-Jacobi exponents must exceed -1, got ({a}, {b})"
        )));
    }
    let key = (n, a.to_bits(), b.to_bits());
    if let Some(rule) = rule_cache().read().expect("rule cache poisoned").get(&key) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(compute_rule(n, a, b));
    let mut cache = rule_cache().write().expect("rule cache poisoned");
    Ok(Arc::clone(cache.entry(key).or_insert(rule)))
}

/// Jacobi polynomial `P_n^{(a,b)}(x)` and `P_{n-1}^{(a,b)}(x)` by the three-term recurrence.
fn jacobi_pair(n: usize, a: f64, b: f64, x: f64) -> (f64, f64) {
    let mut prev = 1.0;
    if n == 0 {
        return (prev, 0.0);
    }
    let mut cur = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x;
    for k in 2..=n {
        let k = k as f64;
        let c = 2.0 * k + a + b;
        let a1 = 2.0 * k * (k + a + b) * (c - 2.0);
        let a2 = (c - 1.0) * (a * a - b * b);
        let a3 = (c - 2.0) * (c - 1.0) * c;
        let a4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c;
        let next = ((a2 + a3 * x) * cur - a4 * prev) / a1;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// `(1 - x^2) P_n'(x)` from the differentiation identity.
fn jacobi_derivative_scaled(n: usize, a: f64, b: f64, x: f64, pn: f64, pn1: f64) -> f64 {
    let nf = n as f64;
    let c = 2.0 * nf + a + b;
    (nf * ((a - b) - c * x) * pn + 2.0 * (nf + a) * (nf + b) * pn1) / c
}

fn compute_rule(n: usize, a: f64, b: f64) -> JacobiRule {
    // Golub-Welsch on [-1, 1] for the weight (1 - x)^a (1 + x)^b.
    let mut jm = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let diag = if k == 0 {
            (b - a) / (a + b + 2.0)
        } else {
            let c = 2.0 * kf + a + b;
            (b * b - a * a) / (c * (c + 2.0))
        };
        jm[(k, k)] = diag;
        if k + 1 < n {
            let j = kf + 1.0;
            let c = 2.0 * j + a + b;
            let off2 = if k == 0 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b).powi(2) * (3.0 + a + b))
            } else {
                4.0 * j * (j + a) * (j + b) * (j + a + b) / (c * c * (c + 1.0) * (c - 1.0))
            };
            let off = off2.sqrt();
            jm[(k, k + 1)] = off;
            jm[(k + 1, k)] = off;
        }
    }
    let mut xs: Vec<f64> = jm.symmetric_eigenvalues().iter().copied().collect();
    xs.sort_by(|p, q| p.total_cmp(q));

    let ln_const = ln_gamma(n as f64 + a + 1.0) + ln_gamma(n as f64 + b + 1.0)
        - ln_gamma(n as f64 + a + b + 1.0)
        - ln_gamma(n as f64 + 1.0);

    let mut nodes = Vec::with_capacity(n);
    let mut complements = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for mut x in xs {
        for _ in 0..3 {
            let (pn, pn1) = jacobi_pair(n, a, b, x);
            let dp = jacobi_derivative_scaled(n, a, b, x, pn, pn1) / (1.0 - x * x);
            let step = pn / dp;
            let polished = (x - step).clamp(-1.0 + f64::EPSILON, 1.0 - f64::EPSILON);
            if !polished.is_finite() {
                break;
            }
            x = polished;
            if step.abs() < 4.0 * f64::EPSILON {
                break;
            }
        }
        let (pn, pn1) = jacobi_pair(n, a, b, x);
        let scaled = jacobi_derivative_scaled(n, a, b, x, pn, pn1);
        let y = 0.5 * (1.0 + x);
        let yc = 0.5 * (1.0 - x);
        // (1 - x^2) P'^2 = scaled^2 / (4 y yc) on the unit interval.
        let w = (ln_const + (4.0 * y * yc).ln() - 2.0 * scaled.abs().ln()).exp();
        nodes.push(y);
        complements.push(yc);
        weights.push(w);
    }
    JacobiRule {
        nodes,
        complements,
        weights,
    }
}

/// Closed interval `[a, b]` of `[0, 1]`, each end stored with its complement.
#[derive(Debug, Clone, Copy)]
pub struct Interval {
    a: f64,
    b: f64,
    bc: f64,
    len: f64,
}

impl Interval {
    /// `[0, x]`.
    pub fn up_to(x: UnitPoint) -> Self {
        Self {
            a: 0.0,
            b: x.x(),
            bc: x.complement(),
            len: x.x(),
        }
    }

    pub fn unit() -> Self {
        Self {
            a: 0.0,
            b: 1.0,
            bc: 0.0,
            len: 1.0,
        }
    }

    /// `[a, b]` with `0 <= a < b <= 1`.
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(0.0 <= a && a < b && b <= 1.0) {
            return Err(Error::Precondition(format!("invalid interval [{a}, {b}]")));
        }
        Ok(Self {
            a,
            b,
            bc: 1.0 - b,
            len: b - a,
        })
    }

    pub fn len(&self) -> f64 {
        self.len
    }

    fn left_node(&self, dl: f64) -> Node {
        let dr = self.len - dl;
        Node {
            t: UnitPoint::from_parts(self.a + dl, self.bc + dr),
            dl,
            dr,
        }
    }

    fn right_node(&self, dr: f64) -> Node {
        Node {
            t: UnitPoint::from_parts(self.b - dr, self.bc + dr),
            dl: self.len - dr,
            dr,
        }
    }
}

/// A quadrature abscissa with its distances to both ends of the interval.
#[derive(Debug, Clone, Copy)]
pub struct Node {
    pub t: UnitPoint,
    pub dl: f64,
    pub dr: f64,
}

/// Endpoint behaviour of an integrand: `(t - a)^left_exp` and `(b - t)^right_exp`.
///
/// `left_gap`/`right_gap` give the distance from the endpoint to the nearest
/// singularity lying outside the interval (infinite when there is none).
#[derive(Debug, Clone, Copy)]
pub struct EndBehaviour {
    pub left_exp: f64,
    pub right_exp: f64,
    pub left_gap: f64,
    pub right_gap: f64,
}

impl EndBehaviour {
    pub fn new(left_exp: f64, right_exp: f64) -> Self {
        Self {
            left_exp,
            right_exp,
            left_gap: f64::INFINITY,
            right_gap: f64::INFINITY,
        }
    }

    pub fn with_gaps(self, left_gap: f64, right_gap: f64) -> Self {
        Self {
            left_gap,
            right_gap,
            ..self
        }
    }

    fn validate(&self) -> Result<()> {
        if self.left_exp > -1.0 && self.right_exp > -1.0 {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "endpoint exponents ({}, {}) are not integrable",
                self.left_exp, self.right_exp
            )))
        }
    }
}

fn grading_levels(exp: f64, gap: f64, half: f64, tol: f64) -> usize {
    let decay = (exp + 1.0).min(1.0);
    let by_tol = ((tol.ln() / (decay * GRADING.ln())).ceil() as usize).min(MAX_LEVELS);
    let by_gap = if gap > 0.0 && gap < half {
        ((((gap / half).ln() / GRADING.ln()).ceil() + 1.0) as usize).min(MAX_GAP_LEVELS)
    } else {
        0
    };
    by_tol.max(by_gap).max(1)
}

/// One half of the graded rule: `sum w F` and `sum |w F|`.
fn graded_half<F>(
    half: f64,
    exp: f64,
    levels: usize,
    n: usize,
    node_at: impl Fn(f64) -> Node,
    f: &F,
) -> Result<(f64, f64)>
where
    F: Fn(Node) -> f64,
{
    let legendre = jacobi_rule(n, 0.0, 0.0)?;
    let end = jacobi_rule(n, 0.0, exp)?;
    let mut sum = 0.0;
    let mut l1 = 0.0;
    let mut hi = half;
    for _ in 0..levels {
        let lo = hi * GRADING;
        let width = hi - lo;
        for (y, w) in legendre.nodes.iter().zip(&legendre.weights) {
            let v = w * width * f(node_at(lo + width * y));
            sum += v;
            l1 += v.abs();
        }
        hi = lo;
    }
    // Innermost panel [0, hi]: weight s^exp carried by the rule.
    for (y, w) in end.nodes.iter().zip(&end.weights) {
        let s = hi * y;
        let weight = w * hi * (-exp * y.ln()).exp();
        let v = weight * f(node_at(s));
        sum += v;
        l1 += v.abs();
    }
    Ok((sum, l1))
}

fn graded_sum<F>(iv: &Interval, ends: &EndBehaviour, n: usize, tol: f64, f: &F) -> Result<(f64, f64)>
where
    F: Fn(Node) -> f64,
{
    let half = 0.5 * iv.len;
    let kl = grading_levels(ends.left_exp, ends.left_gap, half, tol);
    let kr = grading_levels(ends.right_exp, ends.right_gap, half, tol);
    let (sl, al) = graded_half(half, ends.left_exp, kl, n, |s| iv.left_node(s), f)?;
    let (sr, ar) = graded_half(half, ends.right_exp, kr, n, |s| iv.right_node(s), f)?;
    Ok((sl + sr, al + ar))
}

fn global_jacobi_sum<F>(iv: &Interval, ends: &EndBehaviour, n: usize, f: &F) -> Result<(f64, f64)>
where
    F: Fn(Node) -> f64,
{
    let rule = jacobi_rule(n, ends.right_exp, ends.left_exp)?;
    let scale = iv.len;
    let mut sum = 0.0;
    let mut l1 = 0.0;
    for ((y, yc), w) in rule.nodes.iter().zip(&rule.complements).zip(&rule.weights) {
        let node = if y <= yc {
            iv.left_node(iv.len * y)
        } else {
            iv.right_node(iv.len * yc)
        };
        let strip = y.powf(-ends.left_exp) * yc.powf(-ends.right_exp);
        let v = scale * w * strip * f(node);
        sum += v;
        l1 += v.abs();
    }
    Ok((sum, l1))
}

fn converged(cur: f64, prev: f64, l1: f64, tol: f64) -> bool {
    (cur - prev).abs() <= tol * cur.abs().max(CANCELLATION_FLOOR * l1)
}

/// Integrates `f` over `iv`, where `f` has the declared endpoint behaviour.
///
/// `op` and `at` only label a non-convergence error.
pub fn integrate<F>(
    iv: &Interval,
    ends: &EndBehaviour,
    spec: &QuadratureSpec,
    op: &'static str,
    at: f64,
    f: F,
) -> Result<f64>
where
    F: Fn(Node) -> f64,
{
    spec.validate()?;
    ends.validate()?;
    let counts: Vec<usize> = match spec.node_rule {
        NodeRule::AdaptiveSubdivision => PANEL_NODES.to_vec(),
        NodeRule::JacobiWeighted => (3..)
            .map(|k| 1usize << k)
            .take_while(|&n| n <= MAX_GLOBAL_NODES)
            .collect(),
    };
    let mut prev: Option<f64> = None;
    let mut last_change = f64::INFINITY;
    for &n in counts.iter().take(spec.max_refinements + 1) {
        let (cur, l1) = match spec.node_rule {
            NodeRule::AdaptiveSubdivision => graded_sum(iv, ends, n, spec.rel_tol, &f)?,
            NodeRule::JacobiWeighted => global_jacobi_sum(iv, ends, n, &f)?,
        };
        if !cur.is_finite() {
            return Err(Error::NonConvergence {
                op,
                at,
                achieved: f64::NAN,
                tol: spec.rel_tol,
            });
        }
        if let Some(p) = prev {
            last_change = (cur - p).abs();
            if converged(cur, p, l1, spec.rel_tol) {
                return Ok(cur);
            }
        }
        prev = Some(cur);
    }
    Err(Error::NonConvergence {
        op,
        at,
        achieved: last_change,
        tol: spec.rel_tol,
    })
}

/// Convenience wrapper: integrates a function of the abscissa over `[a, b]`.
pub fn integrate_on<F>(
    a: f64,
    b: f64,
    ends: EndBehaviour,
    spec: &QuadratureSpec,
    f: F,
) -> Result<f64>
where
    F: Fn(UnitPoint) -> f64,
{
    let iv = Interval::new(a, b)?;
    integrate(&iv, &ends, spec, "integrate", b, |node| f(node.t))
}
