//! Minimizing-movement time discretization of fractional semilinear wave
//! equations
//!
//! ```text
//! u_tt + (−Δ)^s u + ∇W(u) = 0
//! ```
//!
//! on a 1D (or radially reduced) domain, with an optional lower obstacle.
//! Every time step minimizes
//!
//! ```text
//! J(u) = ∫ |u − 2u_{i−1} + u_{i−2}|² / 2τ² + ½[u]_s² + ∫ W(u)
//! ```
//!
//! over nodal vectors (or over `{u ≥ g}`) by projected gradient descent.
//!
//! * [`operators`]: mesh, mass/stiffness forms, spectral fractional stiffness.
//! * [`potentials`]: zero, quadratic, rational double well, ε-scaling.
//! * [`stepper`]: the time loop, interpolants, energies and residuals.
//! * [`diagnostics`]: oracles, drift and convergence studies, interface
//!   tracking, Ginzburg–Landau accounting.

pub mod diagnostics;
pub mod error;
pub mod operators;
pub mod potentials;
pub mod stepper;

pub use error::{Error, Result};
pub use operators::{Dirichlet, Geometry, Mesh1D, OperatorSet};
pub use potentials::{PotentialKind, PotentialSpec};
pub use stepper::{
    minimize_step, run, Energy, InitMode, Preconditioner, SchemeConfig, SolverParams,
    Tolerance, Trajectory,
};
