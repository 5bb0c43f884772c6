use std::sync::Arc;

use nalgebra::DVector;

use super::functional::{dual_norm, potential_integral, StepFunctional};
use crate::error::{Error, Result};
use crate::operators::OperatorSet;
use crate::potentials::PotentialSpec;

/// Solver statistics for one step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub iterations: usize,
    pub residual: f64,
    pub tol: f64,
    /// Some nodal value left the range on which the Lipschitz constant is certified.
    pub out_of_range: bool,
}

impl StepRecord {
    pub(crate) fn initial(u0: &DVector<f64>) -> Self {
        Self {
            iterations: 0,
            residual: 0.0,
            tol: 0.0,
            out_of_range: u0.amax() > crate::potentials::CERTIFIED_RANGE,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Energy {
    pub kinetic: f64,
    pub fractional: f64,
    pub potential: f64,
    pub total: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Interpolants {
    /// Piecewise constant in time.
    pub u_bar: DVector<f64>,
    /// Piecewise linear in time.
    pub u_lin: DVector<f64>,
    /// Time derivative of `u_lin`.
    pub u_t: DVector<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ViResiduals {
    /// `min_j r_j / m_j`; non-negative at an exact minimizer over `{u ≥ g}`.
    pub min_dual: f64,
    /// `|rᵀ(u − g)|`.
    pub complementarity: f64,
}

/// The discrete solution `u₋₁, u₀, …, u_n` with per-step statistics.
#[derive(Clone, Debug)]
pub struct Trajectory {
    tau: f64,
    horizon: f64,
    ops: Arc<OperatorSet>,
    potential: PotentialSpec,
    obstacle: Option<DVector<f64>>,
    /// `states[j]` is `u_{j−1}`.
    states: Vec<DVector<f64>>,
    /// `records[i]` belongs to step `i`; `records[0]` describes the initial state.
    records: Vec<StepRecord>,
}

impl Trajectory {
    pub(crate) fn new(
        tau: f64,
        horizon: f64,
        ops: Arc<OperatorSet>,
        potential: PotentialSpec,
        obstacle: Option<DVector<f64>>,
        states: Vec<DVector<f64>>,
        records: Vec<StepRecord>,
    ) -> Self {
        debug_assert_eq!(states.len(), records.len() + 1);
        Self {
            tau,
            horizon,
            ops,
            potential,
            obstacle,
            states,
            records,
        }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn n_steps(&self) -> usize {
        self.records.len() - 1
    }

    pub fn ops(&self) -> &OperatorSet {
        &self.ops
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    pub fn obstacle(&self) -> Option<&DVector<f64>> {
        self.obstacle.as_ref()
    }

    pub fn records(&self) -> &[StepRecord] {
        &self.records
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.tau
    }

    /// `u_i` for `i ∈ {−1, …, n}`.
    pub fn state(&self, i: isize) -> &DVector<f64> {
        assert!(i >= -1 && i <= self.n_steps() as isize, "state index {i} out of range");
        &self.states[(i + 1) as usize]
    }

    /// `v_i = (u_i − u_{i−1}) / τ` for `i ∈ {0, …, n}`.
    pub fn velocity(&self, i: usize) -> DVector<f64> {
        let i = i as isize;
        (self.state(i) - self.state(i - 1)) / self.tau
    }

    /// Nodal values of `u_i` over all mesh nodes including constrained ends,
    /// concatenated by component.
    pub fn full_state(&self, i: isize) -> Vec<f64> {
        let mesh = self.ops.mesh();
        let n = self.ops.n_free();
        let u = self.state(i);
        let mut out = Vec::with_capacity(mesh.n_nodes() * self.potential.components());
        for c in 0..self.potential.components() {
            out.extend(mesh.extend(u.rows(c * n, n).as_slice()));
        }
        out
    }

    pub fn energy(&self, i: usize) -> Energy {
        let n = self.ops.n_free();
        let u = self.state(i as isize);
        let v = self.velocity(i);
        let mut kinetic = 0.0;
        let mut fractional = 0.0;
        for c in 0..self.potential.components() {
            kinetic += 0.5 * self.ops.mass().quad_form(v.rows(c * n, n).as_slice());
            fractional += self.ops.fractional_energy(&u.rows(c * n, n).into_owned());
        }
        let potential = potential_integral(&self.ops, &self.potential, u);
        Energy {
            kinetic,
            fractional,
            potential,
            total: kinetic + fractional + potential,
        }
    }

    pub fn energies(&self) -> Vec<Energy> {
        (0..=self.n_steps()).map(|i| self.energy(i)).collect()
    }

    /// Evaluates `ū`, `u` and `u_t` at `t ∈ [−τ, T]`.
    pub fn eval_interpolants(&self, t: f64) -> Result<Interpolants> {
        let slack = 1e-12 * self.horizon.max(1.0);
        if !(t >= -self.tau - slack && t <= self.horizon + slack) {
            return Err(Error::Domain(format!(
                "t = {t} outside [{}, {}]",
                -self.tau, self.horizon
            )));
        }
        let k = t / self.tau;
        if k <= -1.0 + 1e-9 {
            let u = self.state(-1).clone();
            return Ok(Interpolants {
                u_bar: u.clone(),
                u_lin: u,
                u_t: self.velocity(0),
            });
        }
        // t ∈ (t_{i−1}, t_i]
        let nearest = k.round();
        let i = if (k - nearest).abs() < 1e-9 { nearest } else { k.ceil() };
        let i = (i.max(0.0) as usize).min(self.n_steps());
        let ui = self.state(i as isize);
        let uprev = self.state(i as isize - 1);
        let w = ((t - self.time(i)) / self.tau + 1.0).clamp(0.0, 1.0);
        let u_lin = if w == 1.0 {
            ui.clone()
        } else {
            ui * w + uprev * (1.0 - w)
        };
        Ok(Interpolants {
            u_bar: ui.clone(),
            u_lin,
            u_t: self.velocity(i),
        })
    }

    /// Discrete Euler–Lagrange residual of step `i`,
    /// `M(u_i − 2u_{i−1} + u_{i−2})/τ² + A_s u_i + ∇W(u_i)` (lumped).
    pub fn residual_vector(&self, i: usize) -> DVector<f64> {
        assert!(i >= 1 && i <= self.n_steps(), "residual needs 1 <= i <= n");
        let i = i as isize;
        StepFunctional::new(
            &self.ops,
            &self.potential,
            self.state(i - 1),
            self.state(i - 2),
            self.tau,
        )
        .gradient(self.state(i))
    }

    /// Lumped dual norm of [`Self::residual_vector`].
    pub fn el_residual(&self, i: usize) -> f64 {
        dual_norm(&self.ops, &self.residual_vector(i))
    }

    /// Discrete variational-inequality residuals of step `i` against `g`.
    pub fn vi_residuals(&self, i: usize, g: &DVector<f64>) -> ViResiduals {
        let r = self.residual_vector(i);
        let u = self.state(i as isize);
        let lumps = self.ops.lumped();
        let min_dual = r
            .iter()
            .zip(lumps.iter())
            .map(|(r, m)| r / m)
            .fold(f64::INFINITY, f64::min);
        let complementarity = r.dot(&(u - g)).abs();
        ViResiduals {
            min_dual,
            complementarity,
        }
    }

    /// ‖u_i − g‖_M, the scale of the complementarity threshold.
    pub fn clearance_norm(&self, i: usize, g: &DVector<f64>) -> f64 {
        self.ops.mass_norm(&(self.state(i as isize) - g))
    }

    /// Modal coefficients of `u_i`, component 0.
    pub fn modal_coefficients(&self, i: isize) -> DVector<f64> {
        let n = self.ops.n_free();
        self.ops
            .modal_coefficients(&self.state(i).rows(0, n).into_owned())
    }
}
