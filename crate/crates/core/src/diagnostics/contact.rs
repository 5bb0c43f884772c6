use nalgebra::DVector;

use crate::stepper::Trajectory;

#[derive(Clone, Debug, PartialEq)]
pub struct NoContact {
    /// Free nodes whose clearance `u_i − g` exceeds `delta` at every step.
    pub mask: Vec<bool>,
    /// Max over steps of the lumped dual norm of the Euler–Lagrange residual
    /// restricted to the mask; 0 for an empty mask.
    pub max_residual: f64,
}

impl NoContact {
    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&m| m)
    }
}

/// Checks that the unconstrained equation holds where the run stays clear of
/// the obstacle by more than `delta`.
pub fn no_contact_check(traj: &Trajectory, g: &DVector<f64>, delta: f64) -> NoContact {
    let nf = traj.ops().n_free();
    let mut clearance = vec![f64::INFINITY; nf];
    for i in 0..=traj.n_steps() {
        let u = traj.state(i as isize);
        for j in 0..nf {
            clearance[j] = clearance[j].min(u[j] - g[j]);
        }
    }
    let mask: Vec<bool> = clearance.iter().map(|&c| c > delta).collect();
    let lumps = traj.ops().lumped();
    let mut max_residual: f64 = 0.0;
    if mask.iter().any(|&m| m) {
        for i in 1..=traj.n_steps() {
            let r = traj.residual_vector(i);
            let norm = (0..nf)
                .filter(|&j| mask[j])
                .map(|j| r[j] * r[j] / lumps[j])
                .sum::<f64>()
                .sqrt();
            max_residual = max_residual.max(norm);
        }
    }
    NoContact { mask, max_residual }
}
