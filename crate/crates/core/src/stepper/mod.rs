//! Minimizing-movement time stepping.
//!
//! Each step minimizes the functional of [`StepFunctional`] starting from the
//! previous state; the minimizer reached from that warm start is the selected
//! branch when `J` is not convex.

mod functional;
mod trajectory;

use std::sync::Arc;

use log::warn;
use nalgebra::DVector;

pub use functional::{minimize_step, StepFunctional, StepOutcome};
pub use trajectory::{Energy, Interpolants, StepRecord, Trajectory, ViResiduals};

pub(crate) use functional::blockwise;

use crate::error::{Error, Result};
use crate::operators::OperatorSet;
use crate::potentials::{PotentialSpec, CERTIFIED_RANGE};

/// Stopping threshold `abs + rel · ‖projected gradient at warm start‖`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-9,
            rel: 1e-9,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Preconditioner {
    #[default]
    Off,
    /// Descent along `(M/τ² + A_s)⁻¹ ∇J`. Obstacle-free runs only.
    Spectral,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverParams {
    pub tol: Tolerance,
    /// Cap on trial evaluations per step.
    pub max_iter: usize,
    /// Initial step size; `None` means τ² without preconditioning and 1 with it.
    pub step0: Option<f64>,
    pub grow: f64,
    pub shrink: f64,
    pub precondition: Preconditioner,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            tol: Tolerance::default(),
            max_iter: 50_000,
            step0: None,
            grow: 1.2,
            shrink: 0.5,
            precondition: Preconditioner::Off,
        }
    }
}

impl SolverParams {
    pub fn spectral() -> Self {
        Self {
            precondition: Preconditioner::Spectral,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let Tolerance { abs, rel } = self.tol;
        if !(abs >= 0.0 && rel >= 0.0 && abs + rel > 0.0 && abs.is_finite() && rel.is_finite()) {
            return Err(Error::Config(format!(
                "tolerance must be positive, got abs = {abs}, rel = {rel}"
            )));
        }
        if self.max_iter < 1 {
            return Err(Error::Config("max_iter must be >= 1".into()));
        }
        if !(self.grow > 1.0 && self.grow.is_finite()) {
            return Err(Error::Config(format!("grow must be > 1, got {}", self.grow)));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::Config(format!(
                "shrink must lie in (0, 1), got {}",
                self.shrink
            )));
        }
        if let Some(a) = self.step0 {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::Config(format!("step0 must be > 0, got {a}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum InitMode {
    /// `u₋₁ = u₀ − τ v₀`.
    #[default]
    Standard,
    /// `v₀` is first projected onto the lowest `k_max` eigenmodes; `None`
    /// picks the smallest `k` holding 99.9% of its M-norm.
    Smoothed { k_max: Option<usize> },
}

/// Everything needed to run the scheme.
#[derive(Clone, Debug)]
pub struct SchemeConfig {
    pub horizon: f64,
    pub n_steps: usize,
    pub ops: Arc<OperatorSet>,
    pub potential: PotentialSpec,
    /// Lower obstacle at the free nodes.
    pub obstacle: Option<DVector<f64>>,
    pub u0: DVector<f64>,
    pub v0: DVector<f64>,
    pub init_mode: InitMode,
    pub solver: SolverParams,
}

impl SchemeConfig {
    /// Unconstrained run with standard initialization and default solver.
    pub fn new(
        ops: Arc<OperatorSet>,
        potential: PotentialSpec,
        horizon: f64,
        n_steps: usize,
        u0: DVector<f64>,
        v0: DVector<f64>,
    ) -> Self {
        Self {
            horizon,
            n_steps,
            ops,
            potential,
            obstacle: None,
            u0,
            v0,
            init_mode: InitMode::Standard,
            solver: SolverParams::default(),
        }
    }

    pub fn tau(&self) -> f64 {
        self.horizon / self.n_steps as f64
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Config(format!(
                "horizon must be > 0, got {}",
                self.horizon
            )));
        }
        if self.n_steps < 2 {
            return Err(Error::Config(format!(
                "n_steps must be >= 2, got {}",
                self.n_steps
            )));
        }
        let len = self.ops.n_free() * self.potential.components();
        if self.u0.len() != len || self.v0.len() != len {
            return Err(Error::Config(format!(
                "initial data must have {len} entries (free nodes × components)"
            )));
        }
        if self.u0.iter().chain(self.v0.iter()).any(|x| !x.is_finite()) {
            return Err(Error::Config("initial data must be finite".into()));
        }
        self.solver.validate()?;
        if let Some(g) = &self.obstacle {
            if self.potential.components() != 1 {
                return Err(Error::Config("obstacle runs require m = 1".into()));
            }
            if g.len() != self.ops.n_free() {
                return Err(Error::Config(format!(
                    "obstacle must have {} entries",
                    self.ops.n_free()
                )));
            }
            if let Some(j) = (0..g.len()).find(|&j| self.u0[j] < g[j]) {
                return Err(Error::Config(format!(
                    "u0 lies below the obstacle at free node {j}"
                )));
            }
            if self.solver.precondition == Preconditioner::Spectral {
                return Err(Error::Config(
                    "spectral preconditioning is not available with an obstacle".into(),
                ));
            }
        }
        if let InitMode::Smoothed { k_max: Some(0) } = self.init_mode {
            return Err(Error::Config("smoothing cutoff must be >= 1".into()));
        }
        Ok(())
    }

    /// The initial velocity actually used by the scheme.
    pub fn effective_velocity(&self) -> DVector<f64> {
        match self.init_mode {
            InitMode::Standard => self.v0.clone(),
            InitMode::Smoothed { k_max } => {
                let n = self.ops.n_free();
                let k = k_max.unwrap_or_else(|| smoothing_cutoff(&self.ops, &self.v0));
                blockwise(&self.v0, n, |b| self.ops.project_modes(b, k))
            }
        }
    }
}

/// Smallest `k` whose leading modal coefficients hold 99.9% of the M-norm of
/// `v`, maximized over component blocks.
pub fn smoothing_cutoff(ops: &OperatorSet, v: &DVector<f64>) -> usize {
    let n = ops.n_free();
    let mut k_max = 1;
    for c in 0..v.len() / n {
        let coeffs = ops.modal_coefficients(&v.rows(c * n, n).into_owned());
        let total = coeffs.norm_squared();
        if total == 0.0 {
            continue;
        }
        let mut acc = 0.0;
        for (k, ck) in coeffs.iter().enumerate() {
            acc += ck * ck;
            if acc.sqrt() >= 0.999 * total.sqrt() {
                k_max = k_max.max(k + 1);
                break;
            }
        }
    }
    k_max
}

/// Runs the scheme for `n_steps` steps.
pub fn run(config: &SchemeConfig) -> Result<Trajectory> {
    config.validate()?;
    let tau = config.tau();
    let ops = &config.ops;
    let v0 = config.effective_velocity();
    let u_prev = &config.u0 - &v0 * tau;

    let mut states = Vec::with_capacity(config.n_steps + 2);
    states.push(u_prev);
    states.push(config.u0.clone());
    let mut records = Vec::with_capacity(config.n_steps + 1);
    records.push(StepRecord::initial(&config.u0));

    let mut solver = config.solver.clone();
    let mut warned = false;
    for i in 1..=config.n_steps {
        let u1 = &states[i];
        let u2 = &states[i - 1];
        let outcome = minimize_step(
            ops,
            &config.potential,
            u1,
            u2,
            tau,
            config.obstacle.as_ref(),
            &solver,
            u1,
        )
        .map_err(|e| e.at_step(i))?;
        let out_of_range = outcome.u.amax() > CERTIFIED_RANGE;
        if out_of_range && !warned && !config.potential.is_zero() {
            warn!(
                "step {i}: nodal values leave [-{r}, {r}], outside the certified Lipschitz range",
                r = CERTIFIED_RANGE
            );
            warned = true;
        }
        // the last step size is a good scale for the next step
        solver.step0 = Some(outcome.step_size);
        records.push(StepRecord {
            iterations: outcome.iterations,
            residual: outcome.residual,
            tol: outcome.tol,
            out_of_range,
        });
        states.push(outcome.u);
    }

    Ok(Trajectory::new(
        tau,
        config.horizon,
        Arc::clone(ops),
        config.potential.clone(),
        config.obstacle.clone(),
        states,
        records,
    ))
}
