use std::fs;
use std::io::Write as _;
use std::path::Path;

use num_rational::Ratio;
use occtime::laws::{self, Law};
use occtime::mc::{self, EmpiricalCDF, PathConfig};
use occtime::table::{default_grid, fmt17, LawTable};
use occtime::transforms::lambda_grid;
use occtime::{Error, ExcursionParams, LampertiParams, QuadratureSpec, StableParams};
use serde::Serialize;

use crate::args::{CheckArgs, Cli, Command, DensityArgs, Format, LawKind, LawParams, QuantileArgs, SimulateArgs, Suite, Target};
use crate::checks::{self, CheckRecord, Filter};

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Failed(_) => 1,
            Failure::Core(e) if e.is_non_convergence() => 3,
            Failure::Core(Error::DegenerateFit(_) | Error::Capability(_)) => 3,
            Failure::Core(_) | Failure::Usage(_) | Failure::Io { .. } => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

pub fn run(cli: &Cli) -> CliResult<()> {
    let spec = match cli.tol {
        Some(t) => QuadratureSpec::cli_default().with_tol(t),
        None => QuadratureSpec::cli_default(),
    };
    spec.validate()?;
    if cli.workers == Some(0) {
        return Err(Failure::Usage("--workers must be at least 1".into()));
    }
    if let Some(w) = cli.workers {
        // only fails if a pool already exists, in which case it is reused
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    match &cli.command {
        Command::Density(a) => density(cli, a, &spec),
        Command::Check(a) => check(cli, a, &spec),
        Command::Simulate(a) => simulate(cli, a, &spec),
        Command::Quantile(a) => quantile(cli, a, &spec),
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| Failure::Io {
            path: path.display().to_string(),
            source,
        }),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|source| Failure::Io {
            path: "stdout".into(),
            source,
        }),
    }
}

fn json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(Error::from)?;
    s.push('\n');
    Ok(s)
}

fn law_name(kind: LawKind) -> &'static str {
    match kind {
        LawKind::Lamperti => "lamperti",
        LawKind::Bfry => "bfry",
        LawKind::Arcsine => "arcsine",
        LawKind::Bridge => "bridge",
        LawKind::Excursion => "excursion",
    }
}

/// The law named on the command line, rejecting missing or foreign parameters.
pub fn build_law(kind: LawKind, params: &LawParams) -> CliResult<Law> {
    let name = law_name(kind);
    let given = [
        ("alpha", params.alpha),
        ("p", params.p),
        ("gamma", params.gamma),
        ("c", params.c),
    ];
    let allowed: &[&str] = match kind {
        LawKind::Lamperti | LawKind::Bridge => &["alpha", "p"],
        LawKind::Bfry => &["alpha"],
        LawKind::Arcsine => &["c"],
        LawKind::Excursion => &["gamma"],
    };
    for (flag, value) in given {
        if value.is_some() && !allowed.contains(&flag) {
            return Err(Failure::Usage(format!("--{flag} does not apply to the {name} law")));
        }
    }
    let need = |flag: &str, v: Option<f64>| v.ok_or_else(|| Failure::Usage(format!("the {name} law needs --{flag}")));
    Ok(match kind {
        LawKind::Lamperti => Law::Lamperti(LampertiParams::new(need("alpha", params.alpha)?, need("p", params.p)?)?),
        LawKind::Bridge => Law::Bridge(LampertiParams::new(need("alpha", params.alpha)?, need("p", params.p)?)?),
        LawKind::Bfry => {
            let alpha = need("alpha", params.alpha)?;
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::InvalidParameter {
                    name: "alpha",
                    value: alpha,
                    range: "(0, 1)",
                }
                .into());
            }
            Law::Bfry { alpha }
        }
        LawKind::Arcsine => Law::Arcsine(StableParams::new(need("c", params.c)?)?),
        LawKind::Excursion => Law::Excursion(ExcursionParams::new(need("gamma", params.gamma)?)?),
    })
}

fn density(cli: &Cli, a: &DensityArgs, spec: &QuadratureSpec) -> CliResult<()> {
    let law = build_law(a.law, &a.params)?;
    let grid = match a.x {
        Some(x) => vec![x],
        None if a.grid == 0 => return Err(Failure::Usage("--grid must be at least 1".into())),
        None => default_grid(a.grid),
    };
    let table = LawTable::build(law, grid, spec)?;
    let text = match cli.format {
        Format::Csv => table.to_csv()?,
        Format::Json => table.to_json()?,
    };
    emit(cli.out.as_deref(), &text)
}

fn parse_lambdas(text: &str) -> CliResult<Vec<f64>> {
    let bad = |e: &dyn std::fmt::Display| Failure::Usage(format!("--lambda-grid {text}: {e}"));
    let values = if let Some((lo, hi)) = text.split_once(':') {
        let lo: i32 = lo.trim().parse().map_err(|e| bad(&e))?;
        let hi: i32 = hi.trim().parse().map_err(|e| bad(&e))?;
        lambda_grid(lo, hi)
    } else {
        text.split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|e| bad(&e)))
            .collect::<CliResult<_>>()?
    };
    if values.is_empty() || values.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
        return Err(bad(&"values must be positive and finite"));
    }
    Ok(values)
}

fn check(cli: &Cli, a: &CheckArgs, spec: &QuadratureSpec) -> CliResult<()> {
    if a.params.c.is_some() {
        return Err(Failure::Usage("--c does not apply to check".into()));
    }
    let filter = Filter {
        alpha: a.params.alpha,
        p: a.params.p,
        gamma: a.params.gamma,
    };
    let lambdas = match &a.lambda_grid {
        Some(t) => parse_lambdas(t)?,
        None => checks::default_lambdas(),
    };
    let mut records: Vec<CheckRecord> = Vec::new();
    if matches!(a.suite, Suite::Transforms | Suite::All) {
        records.extend(checks::transforms(&checks::default_transforms(&filter)?, &lambdas, spec)?);
    }
    if matches!(a.suite, Suite::Asymptotics | Suite::All) {
        records.extend(checks::asymptotics(&filter, spec)?);
    }
    if matches!(a.suite, Suite::Semigroup | Suite::All) {
        records.extend(checks::semigroup(&filter, spec)?);
    }
    let text = match cli.format {
        Format::Csv => checks::to_csv(&records),
        Format::Json => json(&records)?,
    };
    emit(cli.out.as_deref(), &text)?;
    let failed: Vec<&CheckRecord> = records.iter().filter(|r| !r.pass).collect();
    for r in &failed {
        eprintln!("FAIL {} {}: error {:e} >= {:e}", r.suite, r.name, r.error, r.threshold);
    }
    eprintln!("{} checks, {} failed", records.len(), failed.len());
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Failed(format!("{} of {} checks failed", failed.len(), records.len())))
    }
}

#[derive(Debug, Serialize)]
struct SimulationReport {
    target: &'static str,
    model: Law,
    ks: f64,
    threshold: f64,
    pass: bool,
    mean: f64,
    config: PathConfig,
    degenerate_paths: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    c_empirical: Option<f64>,
}

fn report(cli: &Cli, r: &impl Serialize) -> CliResult<()> {
    let line = serde_json::to_string(r).map_err(Error::from)?;
    eprintln!("{line}");
    if let Some(out) = &cli.out {
        let mut path = out.clone().into_os_string();
        path.push(".report.json");
        emit(Some(Path::new(&path)), &format!("{line}\n"))?;
    }
    Ok(())
}

fn simulate(cli: &Cli, a: &SimulateArgs, spec: &QuadratureSpec) -> CliResult<()> {
    if a.target == Target::WalkExact {
        return walk_exact(cli, a);
    }
    let workers = cli
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let config = PathConfig::new(a.steps, a.paths, a.seed, workers)?;
    let uniform = Law::Bridge(LampertiParams::new(0.5, 0.5)?);
    let (target, emp, model, threshold, c_empirical) = match a.target {
        Target::Bm => {
            let arcsine = Law::Arcsine(StableParams::new(0.5)?);
            ("bm", mc::simulate_bm_occupation(&config)?, arcsine, 0.01, None)
        }
        Target::Bridge => ("bridge", mc::simulate_bridge_occupation(&config)?, uniform, 0.01, None),
        Target::SkewBridge => {
            let p = a.p.ok_or_else(|| Failure::Usage("skew-bridge needs --p".into()))?;
            let model = Law::Bridge(LampertiParams::new(0.5, p)?);
            ("skew-bridge", mc::simulate_skew_bridge_occupation(p, &config)?, model, 0.015, None)
        }
        Target::Stable => {
            let index = a.alpha.unwrap_or(1.5);
            if !(index > 1.0 && index < 2.0) {
                return Err(Error::InvalidParameter {
                    name: "stable index",
                    value: index,
                    range: "(1, 2)",
                }
                .into());
            }
            let run = mc::simulate_stable_occupation(index, a.skew, &config)?;
            let model = Law::Arcsine(StableParams::new(run.c)?);
            let threshold = if a.skew == 0.0 { 0.01 } else { 0.015 };
            ("stable", run.occupation, model, threshold, Some(run.c_empirical))
        }
        Target::WalkExact => unreachable!("handled above"),
    };
    let ks = mc::ks_statistic_law(&emp, &model, spec)?;
    let text = match cli.format {
        Format::Csv => emp.to_csv(),
        Format::Json => emp.to_json()?,
    };
    emit(cli.out.as_deref(), &text)?;
    let summary = SimulationReport {
        target,
        model,
        ks,
        threshold,
        pass: ks < threshold,
        mean: emp.mean(),
        config,
        degenerate_paths: emp.degenerate_paths,
        c_empirical,
    };
    report(cli, &summary)?;
    ks_verdict(&emp, ks, threshold)
}

fn ks_verdict(emp: &EmpiricalCDF, ks: f64, threshold: f64) -> CliResult<()> {
    if ks < threshold {
        Ok(())
    } else {
        Err(Failure::Failed(format!(
            "KS distance {ks:.5} is not below {threshold} ({} paths)",
            emp.len()
        )))
    }
}

#[derive(Debug, Serialize)]
struct Atom {
    fraction: String,
    probability: String,
    fraction_value: f64,
    probability_value: f64,
}

#[derive(Debug, Serialize)]
struct WalkReport {
    target: &'static str,
    n: usize,
    atoms: usize,
    uniform: bool,
}

fn walk_exact(cli: &Cli, a: &SimulateArgs) -> CliResult<()> {
    let n = a.n.ok_or_else(|| Failure::Usage("walk-exact needs --n".into()))?;
    let law = mc::walk_bridge_exact(n)?;
    let to_f = |r: &Ratio<u64>| *r.numer() as f64 / *r.denom() as f64;
    let atoms: Vec<Atom> = law
        .iter()
        .map(|(x, p)| Atom {
            fraction: x.to_string(),
            probability: p.to_string(),
            fraction_value: to_f(x),
            probability_value: to_f(p),
        })
        .collect();
    let expected = Ratio::<u64>::new(1, n as u64 + 1);
    let uniform = law.len() == n + 1 && law.values().all(|&p| p == expected);
    let text = match cli.format {
        Format::Csv => {
            let mut s = String::from("fraction,probability,fraction_value,probability_value\n");
            for at in &atoms {
                s.push_str(&format!(
                    "{},{},{},{}\n",
                    at.fraction,
                    at.probability,
                    fmt17(at.fraction_value),
                    fmt17(at.probability_value)
                ));
            }
            s
        }
        Format::Json => json(&atoms)?,
    };
    emit(cli.out.as_deref(), &text)?;
    report(
        cli,
        &WalkReport {
            target: "walk-exact",
            n,
            atoms: law.len(),
            uniform,
        },
    )?;
    if uniform {
        Ok(())
    } else {
        Err(Failure::Failed(format!("walk bridge law for n = {n} is not uniform")))
    }
}

fn quantile(cli: &Cli, a: &QuantileArgs, spec: &QuadratureSpec) -> CliResult<()> {
    let law = build_law(a.law, &a.params)?;
    let x = match &a.table {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| Failure::Io {
                path: path.display().to_string(),
                source,
            })?;
            let table = if path.extension().is_some_and(|e| e == "json") {
                LawTable::from_json(&text)?
            } else {
                LawTable::from_csv(&text)?
            };
            if table.law != law {
                return Err(Failure::Usage(format!(
                    "table holds {:?}, not the requested {:?}",
                    table.law, law
                )));
            }
            table.quantile(a.q)?
        }
        None => laws::quantile(&law, a.q, spec)?,
    };
    let text = match cli.format {
        Format::Csv => format!("q,x\n{},{}\n", fmt17(a.q), fmt17(x)),
        Format::Json => json(&serde_json::json!({ "q": a.q, "x": x }))?,
    };
    emit(cli.out.as_deref(), &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_grids() {
        assert_eq!(parse_lambdas("-1:1").unwrap(), vec![0.5, 1.0, 2.0]);
        assert_eq!(parse_lambdas("0.25, 4").unwrap(), vec![0.25, 4.0]);
        assert!(parse_lambdas("1:x").is_err());
        assert!(parse_lambdas("0,1").is_err());
        assert!(parse_lambdas("2:1").is_err());
    }

    #[test]
    fn laws_from_flags() {
        let params = LawParams {
            alpha: Some(0.5),
            p: Some(0.25),
            ..LawParams::default()
        };
        assert_eq!(
            build_law(LawKind::Bridge, &params).unwrap(),
            Law::Bridge(LampertiParams::new(0.5, 0.25).unwrap())
        );
        assert!(matches!(build_law(LawKind::Bfry, &params), Err(Failure::Usage(_))));
        assert!(matches!(build_law(LawKind::Excursion, &LawParams::default()), Err(Failure::Usage(_))));
        let bad = LawParams {
            alpha: Some(1.0),
            ..LawParams::default()
        };
        assert_eq!(build_law(LawKind::Bfry, &bad).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn exit_codes() {
        let nc = Failure::Core(Error::NonConvergence {
            op: "cdf",
            at: 0.5,
            achieved: 1.0,
            tol: 1e-8,
        });
        assert_eq!(nc.exit_code(), 3);
        assert_eq!(Failure::Core(Error::Bracket("x".into())).exit_code(), 3);
        assert_eq!(Failure::Core(Error::Domain { what: "x", value: 2.0 }).exit_code(), 2);
        assert_eq!(Failure::Failed("ks".into()).exit_code(), 1);
        assert_eq!(Failure::Usage("flag".into()).exit_code(), 2);
    }
}
