//! Laws of the occupation time of the positive half-line.
//!
//! The crate evaluates the closed-form occupation densities of Brownian
//! motion, skew Bessel processes and Levy processes, and the fractional
//! integral representations of the occupation laws of skew Bessel bridges
//! and normalized stable excursions, together with their derivatives and
//! small-`x` asymptotics. Transform identities and Monte Carlo simulation
//! provide independent checks.
//!
//! | module | contents |
//! |---|---|
//! | [`kernels`] | closed-form densities and the integral kernels `g`, `h` |
//! | [`fracint`] | Riemann-Liouville fractional integrals and the Euler-operator derivative identities |
//! | [`laws`] | bridge and excursion distribution functions, densities, quantiles |
//! | [`transforms`] | Stieltjes and generalized Stieltjes transform checks |
//! | [`mc`] | path simulation and exact enumeration oracles |
//! | [`table`] | tabulated laws and their CSV/JSON forms |

pub mod error;
pub mod fracint;
pub(crate) mod jet;
pub mod kernels;
pub mod laws;
pub mod mc;
pub mod point;
pub mod quadrature;
pub mod table;
pub mod transforms;

pub use error::{Error, Result};
pub use fracint::{PowerLaw, SingularFunction};
pub use kernels::{ExcursionParams, LampertiParams, StableParams};
pub use point::UnitPoint;
pub use quadrature::{NodeRule, QuadratureSpec};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
