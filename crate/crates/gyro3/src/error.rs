//! Crate-wide error type.

use std::fmt;

/// Errors reported by the library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two bodies are closer than the configured collision epsilon.
    /// Carries the offending pair and the separation that triggered it.
    Collision { pair: &'static str, separation: f64 },
    /// Parameter validation failed (non-positive mass, inertia, ...).
    InvalidParams(String),
    /// An operation required exactly spherical bodies (C_i = A_i).
    NonSpherical { body: usize, c_minus_a: f64 },
    /// The collinear parameter sits on a pole of h1/h2 (rho = 0 or -1).
    RhoAtPole(f64),
    /// A candidate equilibrium has non-positive squared angular velocity.
    OmegaSquaredNegative(f64),
    /// Two routes to the same quantity disagree beyond tolerance.
    RouteMismatch { what: &'static str, a: f64, b: f64 },
    /// The zero polynomial was passed where a nonzero one is required.
    ZeroPolynomial,
    /// Root refinement hit its iteration cap; the isolating interval is reported.
    IterationCap { interval: (f64, f64) },
    /// The oblateness ratio k = beta1/beta2 is undefined (beta2 = 0, beta1 != 0).
    UndefinedK,
    /// A triangle solution is degenerate (zero height); no planar state exists.
    DegenerateTriangle,
    /// The state is not an equilibrium to the required residual.
    NotEquilibrium { residual: f64, tol: f64 },
    /// The restricted limit m0 = 0 cannot feed operations needing g2 > 0.
    RestrictedLimit(&'static str),
    /// Time integration failed (collision hit or adaptive step underflow).
    Integration(String),
    /// A body record is missing the shape data needed for C - A.
    MissingShape(String),
    /// Catalog lookup or parse failure.
    Catalog(String),
    /// Matrix input contained non-finite entries.
    NonFinite(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Collision { pair, separation } => {
                write!(f, "collision: |{}| = {:e} below epsilon", pair, separation)
            }
            Error::InvalidParams(msg) => write!(f, "invalid parameters: {}", msg),
            Error::NonSpherical { body, c_minus_a } => write!(
                f,
                "body {} is not spherical (C - A = {:e})",
                body, c_minus_a
            ),
            Error::RhoAtPole(rho) => write!(f, "rho = {} is at a pole of h1/h2", rho),
            Error::OmegaSquaredNegative(w2) => {
                write!(f, "candidate has omega0^2 = {:e} <= 0", w2)
            }
            Error::RouteMismatch { what, a, b } => {
                write!(f, "{}: independent routes disagree ({:e} vs {:e})", what, a, b)
            }
            Error::ZeroPolynomial => write!(f, "zero polynomial"),
            Error::IterationCap { interval } => write!(
                f,
                "refinement iteration cap; root in ({:e}, {:e}]",
                interval.0, interval.1
            ),
            Error::UndefinedK => write!(f, "k = beta1/beta2 undefined: beta2 = 0, beta1 != 0"),
            Error::DegenerateTriangle => write!(f, "degenerate triangle (zero height)"),
            Error::NotEquilibrium { residual, tol } => write!(
                f,
                "state is not an equilibrium: residual {:e} > tol {:e}",
                residual, tol
            ),
            Error::RestrictedLimit(op) => {
                write!(f, "{} requires m0 > 0 (restricted limit has g2 = 0)", op)
            }
            Error::Integration(msg) => write!(f, "integration: {}", msg),
            Error::MissingShape(name) => write!(f, "body '{}' lacks shape data", name),
            Error::Catalog(msg) => write!(f, "catalog: {}", msg),
            Error::NonFinite(what) => write!(f, "non-finite entries in {}", what),
        }
    }
}

impl std::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
