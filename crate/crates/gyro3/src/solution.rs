//! A constructed relative equilibrium plus its classification tag and
//! the residuals that certify it.

use serde::{Deserialize, Serialize};

use crate::euler::EulerConfig;
use crate::lagrange::TriangleShape;
use crate::model::ReducedState;

/// Which family a constructed equilibrium belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SolutionKind {
    Euler {
        config: EulerConfig,
        rho: f64,
    },
    Lagrange {
        shape: TriangleShape,
        x: f64,
        y: f64,
        /// +1 or -1: which of the two mirror states was built.
        sign: i8,
    },
}

/// A fully populated relative equilibrium.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSolution {
    pub state: ReducedState,
    pub kind: SolutionKind,
    /// Angular rate of the steady rotation.
    pub omega0: f64,
    /// Infinity norm of the reduced vector field at the state.
    pub field_residual: f64,
    /// |lambda x grad_lambda V + mu x grad_mu V| at the state.
    pub torque_residual: f64,
}
