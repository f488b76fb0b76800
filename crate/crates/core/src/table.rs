//! Tabulated laws: `(x, cdf, pdf)` on a grid with the parameters and
//! quadrature settings that produced them.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fracint::asymptotic_fit;
use crate::laws::{bisect, Law};
use crate::point::UnitPoint;
use crate::quadrature::QuadratureSpec;

/// Excursion values closer than this to 1 are flagged as low confidence.
pub const EXCURSION_CONFIDENCE_EDGE: f64 = 1e-4;

/// Full round-trip text form of an `f64` (17 significant digits).
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub quadrature: QuadratureSpec,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawTable {
    pub law: Law,
    pub grid: Vec<f64>,
    pub cdf: Vec<f64>,
    pub pdf: Vec<f64>,
    pub tolerance: f64,
    pub provenance: Provenance,
    /// Grid points whose values rest on unverified behaviour near `x = 1`.
    #[serde(default)]
    pub low_confidence: Vec<bool>,
    /// Observed exponent `e` of `pdf ~ (1 - x)^e` near 1, excursion laws only.
    #[serde(default)]
    pub right_tail_exponent: Option<f64>,
}

/// `n` equispaced interior points `i / (n + 1)`.
pub fn default_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|i| i as f64 / (n + 1) as f64).collect()
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Precondition("grid is empty".into()));
    }
    for &x in grid {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::domain("grid", x));
        }
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("grid is not strictly increasing".into()));
    }
    Ok(())
}

impl LawTable {
    /// Evaluates `law` on `grid`, in parallel, keeping grid order.
    pub fn build(law: Law, grid: Vec<f64>, spec: &QuadratureSpec) -> Result<Self> {
        spec.validate()?;
        check_grid(&grid)?;
        let rows: Vec<(f64, f64)> = grid
            .par_iter()
            .map(|&x| {
                let p = UnitPoint::new(x)?;
                Ok((law.cdf(p, spec)?, law.pdf(p, spec)?))
            })
            .collect::<Result<_>>()?;
        let (cdf, pdf) = rows.into_iter().unzip();
        let excursion = matches!(law, Law::Excursion(_));
        let low_confidence = grid
            .iter()
            .map(|&x| excursion && x > 1.0 - EXCURSION_CONFIDENCE_EDGE)
            .collect();
        let right_tail_exponent = if excursion {
            Some(observed_right_exponent(&law, spec)?)
        } else {
            None
        };
        Ok(Self {
            law,
            grid,
            cdf,
            pdf,
            tolerance: spec.rel_tol,
            provenance: Provenance {
                quadrature: *spec,
                version: format!("occtime {}", crate::VERSION),
            },
            low_confidence,
            right_tail_exponent,
        })
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Violations of `0 <= cdf <= 1`, monotone cdf and `pdf >= 0`, allowing
    /// a slack of `slack` for quadrature error.
    pub fn invariant_violations(&self, slack: f64) -> Vec<String> {
        let mut out = Vec::new();
        for (i, (&x, (&c, &d))) in self.grid.iter().zip(self.cdf.iter().zip(&self.pdf)).enumerate() {
            if !(c >= -slack && c <= 1.0 + slack) {
                out.push(format!("cdf({x}) = {c} outside [0, 1]"));
            }
            if !(d >= -slack) {
                out.push(format!("pdf({x}) = {d} is negative"));
            }
            if i > 0 && c < self.cdf[i - 1] - slack {
                out.push(format!("cdf decreases at x = {x}"));
            }
        }
        out
    }

    /// Cdf values extrapolated to `x = 0` and `x = 1` from the end rows,
    /// assuming the density follows its endpoint power law there.
    pub fn extrapolated_endpoints(&self) -> (f64, f64) {
        let (e0, e1) = self.law.density_exponents();
        let n = self.len() - 1;
        let (x0, xn) = (self.grid[0], self.grid[n]);
        let at0 = self.cdf[0] - x0 * self.pdf[0] / (e0 + 1.0);
        let at1 = self.cdf[n] + (1.0 - xn) * self.pdf[n] / (e1 + 1.0);
        (at0, at1)
    }

    /// True when the extrapolated end values are 0 and 1 up to half the
    /// mass carried by the end cells.
    pub fn endpoints_consistent(&self) -> bool {
        let (at0, at1) = self.extrapolated_endpoints();
        let n = self.len() - 1;
        at0.abs() <= 0.5 * self.cdf[0].abs() + 1e-6 && (at1 - 1.0).abs() <= 0.5 * (1.0 - self.cdf[n]).abs() + 1e-6
    }

    /// `x` with `cdf(x) = q`: the table brackets the root, bisection on the
    /// law itself refines it.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidParameter {
                name: "q",
                value: q,
                range: "(0, 1)",
            });
        }
        let spec = self.provenance.quadrature;
        let i = self.cdf.partition_point(|&c| c < q);
        if i == 0 || i == self.len() {
            return crate::laws::quantile(&self.law, q, &spec);
        }
        let lo = UnitPoint::new(self.grid[i - 1])?;
        let hi = UnitPoint::new(self.grid[i])?;
        bisect(lo, self.cdf[i - 1], hi, self.cdf[i], q, |x| self.law.cdf(x, &spec))
    }

    pub fn to_csv(&self) -> Result<String> {
        let meta = serde_json::json!({
            "law": self.law,
            "tolerance": self.tolerance,
            "provenance": self.provenance,
            "right_tail_exponent": self.right_tail_exponent,
        });
        let mut s = String::new();
        writeln!(s, "# {}", serde_json::to_string(&meta)?).expect("write to string");
        s.push_str("x,cdf,pdf,low_confidence\n");
        for i in 0..self.len() {
            writeln!(
                s,
                "{},{},{},{}",
                fmt17(self.grid[i]),
                fmt17(self.cdf[i]),
                fmt17(self.pdf[i]),
                u8::from(self.low_confidence.get(i).copied().unwrap_or(false))
            )
            .expect("write to string");
        }
        Ok(s)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let meta_line = lines
            .next()
            .and_then(|l| l.strip_prefix("# "))
            .ok_or_else(|| Error::Parse("missing metadata line".into()))?;
        let meta: serde_json::Value = serde_json::from_str(meta_line)?;
        match lines.next() {
            Some("x,cdf,pdf,low_confidence") => {}
            other => return Err(Error::Parse(format!("unexpected header {other:?}"))),
        }
        let mut t = Self {
            law: serde_json::from_value(meta["law"].clone())?,
            grid: Vec::new(),
            cdf: Vec::new(),
            pdf: Vec::new(),
            tolerance: serde_json::from_value(meta["tolerance"].clone())?,
            provenance: serde_json::from_value(meta["provenance"].clone())?,
            low_confidence: Vec::new(),
            right_tail_exponent: serde_json::from_value(meta["right_tail_exponent"].clone())?,
        };
        for (n, line) in lines.enumerate() {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 4 {
                return Err(Error::Parse(format!("row {n}: expected 4 columns")));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {n}: {e}")))
            };
            t.grid.push(num(cols[0])?);
            t.cdf.push(num(cols[1])?);
            t.pdf.push(num(cols[2])?);
            t.low_confidence.push(cols[3] == "1");
        }
        Ok(t)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Log-log slope of the density against `1 - x` at `1 - x = 10^-3 .. 10^-6`.
fn observed_right_exponent(law: &Law, spec: &QuadratureSpec) -> Result<f64> {
    let samples = (3..=6)
        .map(|k| {
            let xc = 10f64.powi(-k);
            Ok((xc, law.pdf(UnitPoint::from_complement(xc)?, spec)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(asymptotic_fit(&samples)?.exponent)
}
