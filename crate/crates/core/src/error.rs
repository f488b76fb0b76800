use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} = {value} is outside {range}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("{what}: argument {value} is outside the open unit interval")]
    Domain { what: &'static str, value: f64 },

    #[error("derivative order {0} is not available (supported: 0, 1, 2)")]
    Order(usize),

    #[error("{op} did not converge at x = {at} (last change {achieved:e}, tolerance {tol:e})")]
    NonConvergence {
        op: &'static str,
        at: f64,
        achieved: f64,
        tol: f64,
    },

    #[error("capability missing: {0}")]
    Capability(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("quantile bracket failure: {0}")]
    Bracket(String),

    #[error("size limit exceeded: {0}")]
    Size(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64) -> Self {
        Error::Domain { what, value }
    }

    /// True for errors caused by invalid user input rather than numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::Domain { .. }
                | Error::Order(_)
                | Error::Precondition(_)
                | Error::Size(_)
        )
    }

    pub fn is_non_convergence(&self) -> bool {
        matches!(self, Error::NonConvergence { .. } | Error::Bracket(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_open_unit(what: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(what, x))
    }
}
