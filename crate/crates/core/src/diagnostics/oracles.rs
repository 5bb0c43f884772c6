use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::operators::OperatorSet;
use crate::potentials::PotentialSpec;
use crate::stepper::SchemeConfig;

/// Exact scheme iterates on a single eigenmode of the linear problem,
/// `a_i = (2a_{i−1} − a_{i−2}) / (1 + τ² λ^s)`.
///
/// Returns `n + 2` values: `a0`, `a1`, then `n` iterates. For a run this is
/// `u₋₁, u₀, …, u_n`.
pub fn oracle_recurrence(lambda_s: f64, a0: f64, a1: f64, tau: f64, n: usize) -> Vec<f64> {
    assert!(lambda_s >= 0.0, "lambda_s must be >= 0");
    let denom = 1.0 + tau * tau * lambda_s;
    let mut a = Vec::with_capacity(n + 2);
    a.push(a0);
    a.push(a1);
    for i in 2..n + 2 {
        let next = (2.0 * a[i - 1] - a[i - 2]) / denom;
        a.push(next);
    }
    a
}

/// Reference solution of the semi-discrete system sampled at the scheme's
/// grid times `t_0, …, t_n`.
#[derive(Clone, Debug)]
pub struct MolReference {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
}

/// Substeps of the reference integrator per scheme step.
pub const MOL_SUBSTEPS: usize = 50;

/// Integrates `M u'' = −(A_s u + b + ∇W(u))` (lumped ∇W) with classical RK4
/// at step `τ/50` from `u(0) = u₀`, `u'(0) = v₀`.
pub fn oracle_mol(config: &SchemeConfig) -> Result<MolReference> {
    config.validate()?;
    if config.obstacle.is_some() {
        return Err(Error::Config(
            "the semi-discrete oracle does not handle obstacles".into(),
        ));
    }
    let ops = &*config.ops;
    let potential = &config.potential;
    let tau = config.tau();
    let dt = tau / MOL_SUBSTEPS as f64;

    let mut u = config.u0.clone();
    let mut v = config.v0.clone();
    let mut times = vec![0.0];
    let mut states = vec![u.clone()];
    for i in 1..=config.n_steps {
        for _ in 0..MOL_SUBSTEPS {
            let (k1u, k1v) = (v.clone(), acceleration(ops, potential, &u));
            let u2 = &u + &k1u * (0.5 * dt);
            let v2 = &v + &k1v * (0.5 * dt);
            let (k2u, k2v) = (v2.clone(), acceleration(ops, potential, &u2));
            let u3 = &u + &k2u * (0.5 * dt);
            let v3 = &v + &k2v * (0.5 * dt);
            let (k3u, k3v) = (v3.clone(), acceleration(ops, potential, &u3));
            let u4 = &u + &k3u * dt;
            let v4 = &v + &k3v * dt;
            let (k4u, k4v) = (v4.clone(), acceleration(ops, potential, &u4));
            u += (k1u + &k2u * 2.0 + &k3u * 2.0 + k4u) * (dt / 6.0);
            v += (k1v + &k2v * 2.0 + &k3v * 2.0 + k4v) * (dt / 6.0);
        }
        if u.iter().chain(v.iter()).any(|x| !x.is_finite()) {
            return Err(Error::Blowup { step: Some(i) });
        }
        times.push(i as f64 * tau);
        states.push(u.clone());
    }
    Ok(MolReference { times, states })
}

fn acceleration(ops: &OperatorSet, potential: &PotentialSpec, u: &DVector<f64>) -> DVector<f64> {
    let n = ops.n_free();
    let m = potential.components();
    let lumps = ops.lumped();
    let mut force = DVector::zeros(u.len());
    for c in 0..m {
        let block = u.rows(c * n, n).into_owned();
        let f = ops.fractional_apply(&block) + &ops.forms().stiffness_offset;
        force.rows_mut(c * n, n).copy_from(&f);
    }
    if !potential.is_zero() {
        let mut p = vec![0.0; m];
        for j in 0..n {
            for (c, slot) in p.iter_mut().enumerate() {
                *slot = u[c * n + j];
            }
            for (c, g) in potential.gradient(&p).into_iter().enumerate() {
                force[c * n + j] += lumps[j] * g;
            }
        }
    }
    let mut acc = DVector::zeros(u.len());
    for c in 0..m {
        let f = force.rows(c * n, n).into_owned();
        acc.rows_mut(c * n, n).copy_from(&(-ops.mass_solve(&f)));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recurrence_special_cases() {
        let free = oracle_recurrence(0.0, 0.5, 0.8, 0.1, 6);
        for (i, a) in free.iter().enumerate() {
            assert!((a - (0.5 + i as f64 * 0.3)).abs() < 1e-14);
        }
        assert!(oracle_recurrence(3.0, 0.0, 0.0, 0.1, 5).iter().all(|&a| a == 0.0));
        let a = oracle_recurrence(1.0, 1.0, 1.0, 0.1, 1);
        assert_eq!(a.len(), 3);
        assert!((a[2] - 1.0 / 1.01).abs() < 1e-15);
        assert!((a[2] - 0.990_099_009_900_990_1).abs() < 1e-15);
    }
}
