//! Verification suites behind `occtime check`.

use std::fmt::Write as _;

use occtime::fracint::{asymptotic_fit, rl_integral, rl_integral_at};
use occtime::kernels::g_function;
use occtime::laws::{bridge_pdf, bridge_pdf_asymptote, excursion_pdf, excursion_pdf_asymptote};
use occtime::table::fmt17;
use occtime::transforms::{lambda_grid, Transform, TransformResidual};
use occtime::{ExcursionParams, LampertiParams, PowerLaw, QuadratureSpec, Result, SingularFunction};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub suite: &'static str,
    pub name: String,
    pub value: f64,
    pub expected: f64,
    pub error: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CheckRecord {
    fn new(suite: &'static str, name: String, value: f64, expected: f64, error: f64, threshold: f64) -> Self {
        Self {
            suite,
            name,
            value,
            expected,
            error,
            threshold,
            // NaN never passes
            pass: error < threshold,
        }
    }
}

pub fn to_csv(records: &[CheckRecord]) -> String {
    let mut s = String::from("suite,name,value,expected,error,threshold,pass\n");
    for r in records {
        writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.suite,
            r.name,
            fmt17(r.value),
            fmt17(r.expected),
            fmt17(r.error),
            fmt17(r.threshold),
            r.pass
        )
        .expect("write to string");
    }
    s
}

/// Parameter grid shared by the transform and normalization checks.
pub const ALPHAS: [f64; 3] = [1.0 / 3.0, 0.5, 0.75];
pub const SKEWS: [f64; 3] = [1.0 / 3.0, 0.5, 2.0 / 3.0];
pub const BFRY_ALPHAS: [f64; 3] = [1.0 / 3.0, 0.5, 2.0 / 3.0];
pub const GAMMAS: [f64; 3] = [0.6, 0.75, 0.9];

/// Bridge parameters of the asymptotics suite.
pub const ASYMPTOTIC_BRIDGES: [(f64, f64); 3] = [(0.5, 1.0 / 3.0), (0.75, 0.5), (2.0 / 3.0, 2.0 / 3.0)];

pub const FIT_TOL: f64 = 0.02;
pub const SEMIGROUP_TOL: f64 = 1e-7;

pub fn default_lambdas() -> Vec<f64> {
    lambda_grid(-4, 6)
}

/// Optional restrictions of the default parameter grids.
#[derive(Debug, Clone, Copy, Default)]
pub struct Filter {
    pub alpha: Option<f64>,
    pub p: Option<f64>,
    pub gamma: Option<f64>,
}

fn pick(default: &[f64], chosen: Option<f64>) -> Vec<f64> {
    chosen.map_or_else(|| default.to_vec(), |v| vec![v])
}

pub fn default_transforms(filter: &Filter) -> Result<Vec<Transform>> {
    let mut out = Vec::new();
    let alphas = pick(&ALPHAS, filter.alpha);
    let skews = pick(&SKEWS, filter.p);
    for &a in &alphas {
        for &p in &skews {
            out.push(Transform::StieltjesLamperti(LampertiParams::new(a, p)?));
        }
    }
    for &a in &pick(&BFRY_ALPHAS, filter.alpha) {
        out.push(Transform::StieltjesBfry { alpha: a });
    }
    for &a in &alphas {
        for &p in &skews {
            out.push(Transform::GstBridge(LampertiParams::new(a, p)?));
        }
    }
    for &g in &pick(&GAMMAS, filter.gamma) {
        out.push(Transform::GstExcursion(ExcursionParams::new(g)?));
    }
    Ok(out)
}

fn describe(t: &Transform) -> String {
    match t {
        Transform::StieltjesLamperti(p) | Transform::GstBridge(p) => {
            format!("{} alpha={} p={}", t.name(), p.alpha(), p.p())
        }
        Transform::StieltjesBfry { alpha } => format!("{} alpha={alpha}", t.name()),
        Transform::GstExcursion(e) => format!("{} gamma={}", t.name(), e.gamma()),
    }
}

pub fn transforms(list: &[Transform], lambdas: &[f64], spec: &QuadratureSpec) -> Result<Vec<CheckRecord>> {
    list.iter()
        .map(|t| {
            let r = TransformResidual::compute(*t, lambdas.to_vec(), spec)?;
            Ok(CheckRecord::new("transforms", describe(t), r.max_rel_err, 0.0, r.max_rel_err, t.threshold()))
        })
        .collect()
}

/// Samples `(2^-k, f(2^-k))` for `k = 8..=16`.
pub fn dyadic_samples(f: impl Fn(f64) -> Result<f64> + Sync) -> Result<Vec<(f64, f64)>> {
    (8..=16)
        .into_par_iter()
        .map(|k| {
            let x = 2f64.powi(-k);
            Ok((x, f(x)?))
        })
        .collect()
}

fn fit_records(name: String, fit: PowerLaw, expected: PowerLaw) -> [CheckRecord; 2] {
    [
        CheckRecord::new(
            "asymptotics",
            format!("{name} exponent"),
            fit.exponent,
            expected.exponent,
            (fit.exponent - expected.exponent).abs(),
            FIT_TOL,
        ),
        CheckRecord::new(
            "asymptotics",
            format!("{name} constant"),
            fit.constant,
            expected.constant,
            ((fit.constant - expected.constant) / expected.constant).abs(),
            FIT_TOL,
        ),
    ]
}

pub fn asymptotics(filter: &Filter, spec: &QuadratureSpec) -> Result<Vec<CheckRecord>> {
    let bridge_chosen = filter.alpha.is_some() || filter.p.is_some();
    let bridges: Vec<LampertiParams> = if bridge_chosen {
        vec![LampertiParams::new(filter.alpha.unwrap_or(0.5), filter.p.unwrap_or(0.5))?]
    } else if filter.gamma.is_none() {
        ASYMPTOTIC_BRIDGES
            .iter()
            .map(|&(a, p)| LampertiParams::new(a, p))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let gammas = match filter.gamma {
        Some(g) => vec![g],
        None if bridge_chosen => Vec::new(),
        None => GAMMAS.to_vec(),
    };
    let mut out = Vec::new();
    for b in &bridges {
        let fit = asymptotic_fit(&dyadic_samples(|x| bridge_pdf(b, x, spec))?)?;
        let name = format!("bridge alpha={} p={}", b.alpha(), b.p());
        out.extend(fit_records(name, fit, bridge_pdf_asymptote(b)));
    }
    for &g in &gammas {
        let e = ExcursionParams::new(g)?;
        let fit = asymptotic_fit(&dyadic_samples(|x| excursion_pdf(&e, x, spec))?)?;
        out.extend(fit_records(format!("excursion gamma={g}"), fit, excursion_pdf_asymptote(&e)));
    }
    Ok(out)
}

pub const SEMIGROUP_ORDERS: [(f64, f64); 3] = [(0.5, 0.5), (1.0 / 3.0, 2.0 / 3.0), (0.75, 0.75)];

/// `max |I^b I^a f - I^{a+b} f| / |I^{a+b} f|` over `x = 0.1, ..., 0.9`.
pub fn semigroup_error(f: &SingularFunction, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    let inner = f.clone();
    let s = *spec;
    let ia = SingularFunction::new(f.beta() + a, move |t| rl_integral_at(&inner, a, t, &s).unwrap_or(f64::NAN))?;
    (1..=9)
        .into_par_iter()
        .map(|i| {
            let x = i as f64 / 10.0;
            let lhs = rl_integral(&ia, b, x, spec)?;
            let rhs = rl_integral(f, a + b, x, spec)?;
            Ok(((lhs - rhs) / rhs).abs())
        })
        .try_reduce(|| 0.0, |u, v| Ok(u.max(v)))
}

pub fn semigroup(filter: &Filter, spec: &QuadratureSpec) -> Result<Vec<CheckRecord>> {
    let g = LampertiParams::new(filter.alpha.unwrap_or(0.5), filter.p.unwrap_or(1.0 / 3.0))?;
    let functions = [
        ("1".to_string(), SingularFunction::constant(1.0)),
        ("t^0.5".to_string(), SingularFunction::monomial(0.5)?),
        (format!("g alpha={} p={}", g.alpha(), g.p()), g_function(&g)),
    ];
    let mut out = Vec::new();
    for (fname, f) in &functions {
        for &(a, b) in &SEMIGROUP_ORDERS {
            let err = semigroup_error(f, a, b, spec)?;
            out.push(CheckRecord::new(
                "semigroup",
                format!("{fname} a={a:.4} b={b:.4}"),
                err,
                0.0,
                err,
                SEMIGROUP_TOL,
            ));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_errors_fail() {
        let r = CheckRecord::new("s", "n".into(), f64::NAN, 0.0, f64::NAN, 1.0);
        assert!(!r.pass);
    }

    #[test]
    fn csv_report() {
        let r = CheckRecord::new("semigroup", "1 a=0.5".into(), 1e-12, 0.0, 1e-12, 1e-7);
        let text = to_csv(&[r]);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("suite,name,value,expected,error,threshold,pass"));
        assert!(lines.next().unwrap().ends_with(",true"));
    }

    #[test]
    fn filters_select_parameters() {
        let all = default_transforms(&Filter::default()).unwrap();
        assert_eq!(all.len(), 9 + 3 + 9 + 3);
        let some = default_transforms(&Filter {
            alpha: Some(0.5),
            p: None,
            gamma: Some(0.75),
        })
        .unwrap();
        assert_eq!(some.len(), 3 + 1 + 3 + 1);
    }
}
