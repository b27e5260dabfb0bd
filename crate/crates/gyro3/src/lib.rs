//! Relative equilibria of a gyrostat in Newtonian interaction with two
//! axisymmetric rigid bodies: reduced Poisson dynamics, Eulerian and
//! Lagrangian equilibrium construction, bifurcation classification, and
//! characteristic-polynomial stability analysis.
//!
//! The crate is organized around the reduced 21-dimensional state
//! `z = (Pi1, Pi2, Pi0, lambda, p_lambda, mu, p_mu)`:
//!
//! - [`model`] - domain types, the approximate potential and its
//!   derivatives, the Hamiltonian, the Poisson tensor and the vector field;
//! - [`integrator`] - RK4 / adaptive RKF7(8) integration with
//!   conservation diagnostics;
//! - [`polyroot`] - Sturm-sequence root counting and isolation,
//!   resultants, discriminants;
//! - [`euler`] - collinear (Eulerian) equilibria: quintic and degree-9
//!   conditions, bifurcation regimes, state construction;
//! - [`lagrange`] - triangular (Lagrangian) equilibria: the decoupled
//!   quintic system, bifurcation thresholds, near-sphere expansions;
//! - [`stability`] - tangent-flow assembly, characteristic polynomials,
//!   eigenvalue classification;
//! - [`bodies`] - physical body catalog and nondimensionalization;
//! - [`report`] - the tables and sweeps behind the `gyro3` binary.
//!
//! Start from the `examples/` directory: each file exercises one major
//! capability end to end.

pub mod bodies;
pub mod error;
pub mod euler;
pub mod integrator;
pub mod lagrange;
pub mod model;
pub mod polyroot;
pub mod report;
pub mod solution;
pub mod stability;

pub use error::{Error, Result};
pub use model::{ReducedState, SystemParams};
pub use solution::{EquilibriumSolution, SolutionKind};
