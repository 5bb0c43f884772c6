use nalgebra::DVector;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Inputs that violate a documented precondition.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("argument outside the valid range: {0}")]
    Domain(String),

    /// The inner descent hit its iteration cap (or stagnated) above tolerance.
    /// `best` is the last accepted iterate.
    #[error(
        "solver failure{}: residual {residual:.3e} > tol {tol:.3e} after {iterations} iterations",
        step_suffix(*step)
    )]
    SolverFailure {
        step: Option<usize>,
        residual: f64,
        tol: f64,
        iterations: usize,
        best: DVector<f64>,
    },

    #[error("numerical blowup{}: non-finite functional or gradient", step_suffix(*step))]
    Blowup { step: Option<usize> },

    #[error("Gronwall hypothesis violated at index {index}")]
    HypothesisViolated { index: usize },

    /// A convergence study aborted part-way; rows completed so far are kept.
    #[error("convergence study stopped at n = {n}: {source}")]
    Study {
        n: usize,
        partial: Box<crate::diagnostics::ConvergenceReport>,
        #[source]
        source: Box<Error>,
    },
}

fn step_suffix(step: Option<usize>) -> String {
    match step {
        Some(i) => format!(" at step {i}"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn at_step(self, i: usize) -> Self {
        match self {
            Error::SolverFailure {
                residual,
                tol,
                iterations,
                best,
                ..
            } => Error::SolverFailure {
                step: Some(i),
                residual,
                tol,
                iterations,
                best,
            },
            Error::Blowup { .. } => Error::Blowup { step: Some(i) },
            other => other,
        }
    }
}
