use nalgebra::DVector;

use super::{Preconditioner, SolverParams};
use crate::error::{Error, Result};
use crate::operators::OperatorSet;
use crate::potentials::PotentialSpec;

/// Consecutive rejected trial steps after which the descent is declared stalled.
const MAX_REJECTIONS: usize = 60;

/// Applies `f` to each component block of a component-major state vector.
pub(crate) fn blockwise<F>(u: &DVector<f64>, n: usize, mut f: F) -> DVector<f64>
where
    F: FnMut(&DVector<f64>) -> DVector<f64>,
{
    let m = u.len() / n;
    let mut out = DVector::zeros(u.len());
    for c in 0..m {
        let block = u.rows(c * n, n).into_owned();
        out.rows_mut(c * n, n).copy_from(&f(&block));
    }
    out
}

fn point_at(u: &DVector<f64>, n: usize, j: usize, buf: &mut [f64]) {
    for (c, slot) in buf.iter_mut().enumerate() {
        *slot = u[c * n + j];
    }
}

/// `Σ_j m_j W(u_j)` over free nodes.
pub(crate) fn potential_integral(
    ops: &OperatorSet,
    potential: &PotentialSpec,
    u: &DVector<f64>,
) -> f64 {
    let lumps = ops.lumped();
    let n = lumps.len();
    if potential.is_zero() {
        return 0.0;
    }
    if potential.components() == 1 {
        return lumps
            .iter()
            .zip(u.iter())
            .map(|(m, &x)| m * potential.value1(x))
            .sum();
    }
    let mut p = vec![0.0; potential.components()];
    (0..n)
        .map(|j| {
            point_at(u, n, j, &mut p);
            lumps[j] * potential.value(&p)
        })
        .sum()
}

fn potential_gradient(ops: &OperatorSet, potential: &PotentialSpec, u: &DVector<f64>) -> DVector<f64> {
    let lumps = ops.lumped();
    let n = lumps.len();
    let mut g = DVector::zeros(u.len());
    if potential.is_zero() {
        return g;
    }
    if potential.components() == 1 {
        for j in 0..n {
            g[j] = lumps[j] * potential.derivative1(u[j]);
        }
        return g;
    }
    let mut p = vec![0.0; potential.components()];
    for j in 0..n {
        point_at(u, n, j, &mut p);
        for (c, gc) in potential.gradient(&p).into_iter().enumerate() {
            g[c * n + j] = lumps[j] * gc;
        }
    }
    g
}

/// Lumped dual norm `√(Σ r_j² / m_j)` over all component blocks.
pub(crate) fn dual_norm(ops: &OperatorSet, r: &DVector<f64>) -> f64 {
    let lumps = ops.lumped();
    let n = lumps.len();
    r.iter()
        .enumerate()
        .map(|(k, x)| x * x / lumps[k % n])
        .sum::<f64>()
        .sqrt()
}

/// The per-step functional
///
/// ```text
/// J(u) = ‖u − 2u₁ + u₂‖²_M / (2τ²) + ½[u]_s² + Σ_j m_j W(u_j)
/// ```
///
/// where `u₁ = u_{i−1}`, `u₂ = u_{i−2}` and `m_j` are the lumped weights.
/// States are component-major: block `c` holds component `c` at the free nodes.
pub struct StepFunctional<'a> {
    ops: &'a OperatorSet,
    potential: &'a PotentialSpec,
    /// 2u₁ − u₂
    inertia: DVector<f64>,
    inv_tau2: f64,
}

impl<'a> StepFunctional<'a> {
    pub fn new(
        ops: &'a OperatorSet,
        potential: &'a PotentialSpec,
        u1: &DVector<f64>,
        u2: &DVector<f64>,
        tau: f64,
    ) -> Self {
        let expected = ops.n_free() * potential.components();
        assert_eq!(u1.len(), expected, "u1 has wrong length");
        assert_eq!(u2.len(), expected, "u2 has wrong length");
        Self {
            ops,
            potential,
            inertia: u1 * 2.0 - u2,
            inv_tau2: 1.0 / (tau * tau),
        }
    }

    fn n(&self) -> usize {
        self.ops.n_free()
    }

    pub fn value(&self, u: &DVector<f64>) -> f64 {
        let n = self.n();
        let d = u - &self.inertia;
        let mut acc = 0.0;
        for c in 0..self.potential.components() {
            let dc = d.rows(c * n, n);
            acc += 0.5 * self.inv_tau2 * self.ops.mass().quad_form(dc.as_slice());
            acc += self.ops.fractional_energy(&u.rows(c * n, n).into_owned());
        }
        acc + potential_integral(self.ops, self.potential, u)
    }

    fn quadratic_gradient(&self, u: &DVector<f64>) -> DVector<f64> {
        let n = self.n();
        let d = u - &self.inertia;
        let mut g = blockwise(&d, n, |b| self.ops.mass().mul_vec(b.as_slice()) * self.inv_tau2);
        g += blockwise(u, n, |b| {
            self.ops.fractional_apply(b) + &self.ops.forms().stiffness_offset
        });
        g
    }

    pub fn gradient(&self, u: &DVector<f64>) -> DVector<f64> {
        self.quadratic_gradient(u) + potential_gradient(self.ops, self.potential, u)
    }

    /// `J(u + δ) − J(u)` evaluated term by term, so that decreases far below
    /// the round-off of `J` itself remain resolvable.
    fn change(&self, u: &DVector<f64>, quad_grad: &DVector<f64>, delta: &DVector<f64>) -> f64 {
        let n = self.n();
        let mut acc = delta.dot(quad_grad);
        let hd = blockwise(delta, n, |b| {
            self.ops.mass().mul_vec(b.as_slice()) * self.inv_tau2 + self.ops.fractional_apply(b)
        });
        acc += 0.5 * delta.dot(&hd);
        if self.potential.is_zero() {
            return acc;
        }
        let lumps = self.ops.lumped();
        let m = self.potential.components();
        if m == 1 {
            for j in 0..n {
                let (a, b) = (u[j] + delta[j], u[j]);
                acc += lumps[j] * self.potential.difference(&[a], &[b]);
            }
        } else {
            let mut a = vec![0.0; m];
            let mut b = vec![0.0; m];
            for j in 0..n {
                point_at(u, n, j, &mut b);
                for c in 0..m {
                    a[c] = b[c] + delta[c * n + j];
                }
                acc += lumps[j] * self.potential.difference(&a, &b);
            }
        }
        acc
    }
}

/// Result of one inner minimization.
#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub u: DVector<f64>,
    /// Trial evaluations, accepted or not.
    pub iterations: usize,
    /// Lumped dual norm of the projected gradient at `u`.
    pub residual: f64,
    /// Effective stopping threshold for this step.
    pub tol: f64,
    /// Step size at exit, usable as the next warm step size.
    pub step_size: f64,
    /// Largest `J` change among accepted iterates; negative when any were accepted.
    pub max_accepted_change: f64,
}

/// Nodal max projection onto `{u ≥ g}`.
fn project(u: &mut DVector<f64>, lower: Option<&DVector<f64>>) {
    if let Some(g) = lower {
        for (x, lo) in u.iter_mut().zip(g.iter()) {
            if *x < *lo {
                *x = *lo;
            }
        }
    }
}

fn projected_gradient(
    grad: &DVector<f64>,
    u: &DVector<f64>,
    lower: Option<&DVector<f64>>,
) -> DVector<f64> {
    match lower {
        None => grad.clone(),
        Some(g) => DVector::from_iterator(
            grad.len(),
            grad.iter()
                .zip(u.iter().zip(g.iter()))
                .map(|(&d, (&x, &lo))| if x <= lo && d > 0.0 { 0.0 } else { d }),
        ),
    }
}

/// Minimizes `J` over free states (or over `{u ≥ g}`) by projected gradient
/// descent with an accept/grow, reject/shrink step size.
#[allow(clippy::too_many_arguments)]
pub fn minimize_step(
    ops: &OperatorSet,
    potential: &PotentialSpec,
    u1: &DVector<f64>,
    u2: &DVector<f64>,
    tau: f64,
    obstacle: Option<&DVector<f64>>,
    solver: &SolverParams,
    warm_start: &DVector<f64>,
) -> Result<StepOutcome> {
    solver.validate()?;
    if obstacle.is_some() && solver.precondition == Preconditioner::Spectral {
        return Err(Error::Config(
            "spectral preconditioning is not available with an obstacle".into(),
        ));
    }
    if let Some(g) = obstacle {
        if potential.components() != 1 || g.len() != ops.n_free() {
            return Err(Error::Config(
                "obstacle needs a one-component state and one value per free node".into(),
            ));
        }
    }
    let n = ops.n_free();
    let inv_tau2 = 1.0 / (tau * tau);
    let functional = StepFunctional::new(ops, potential, u1, u2, tau);

    let mut u = warm_start.clone();
    project(&mut u, obstacle);
    let mut quad = functional.quadratic_gradient(&u);
    let mut grad = &quad + potential_gradient(ops, potential, &u);
    let mut residual = dual_norm(ops, &projected_gradient(&grad, &u, obstacle));
    if !residual.is_finite() {
        return Err(Error::Blowup { step: None });
    }
    let tol = solver.tol.abs + solver.tol.rel * residual;
    let mut alpha = solver.step0.unwrap_or(match solver.precondition {
        Preconditioner::Off => tau * tau,
        Preconditioner::Spectral => 1.0,
    });
    let mut iterations = 0;
    let mut rejections = 0;
    let mut max_accepted_change = f64::NEG_INFINITY;

    while residual > tol {
        if iterations >= solver.max_iter || rejections >= MAX_REJECTIONS {
            return Err(Error::SolverFailure {
                step: None,
                residual,
                tol,
                iterations,
                best: u,
            });
        }
        iterations += 1;
        let direction = match solver.precondition {
            Preconditioner::Off => grad.clone(),
            Preconditioner::Spectral => blockwise(&grad, n, |b| ops.shifted_inverse(b, inv_tau2)),
        };
        let mut trial = &u - &direction * alpha;
        project(&mut trial, obstacle);
        let delta = &trial - &u;
        let change = functional.change(&u, &quad, &delta);
        if !change.is_finite() {
            return Err(Error::Blowup { step: None });
        }
        if change < 0.0 {
            u = trial;
            quad = functional.quadratic_gradient(&u);
            grad = &quad + potential_gradient(ops, potential, &u);
            residual = dual_norm(ops, &projected_gradient(&grad, &u, obstacle));
            if !residual.is_finite() {
                return Err(Error::Blowup { step: None });
            }
            max_accepted_change = max_accepted_change.max(change);
            alpha *= solver.grow;
            rejections = 0;
        } else {
            alpha *= solver.shrink;
            rejections += 1;
        }
    }

    Ok(StepOutcome {
        u,
        iterations,
        residual,
        tol,
        step_size: alpha,
        max_accepted_change,
    })
}
