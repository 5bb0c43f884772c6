use crate::error::{Error, Result};
use crate::potentials::PotentialSpec;
use crate::stepper::Trajectory;

#[derive(Clone, Debug, PartialEq)]
pub struct GlAccounting {
    pub eps: f64,
    /// `ε · E_ε(u_i)` for `i = 0, …, n`.
    pub scaled_energy: Vec<f64>,
    /// `τ Σ_{i=1}^n ∫ ε(|v_i|² + |∇u_i|²) + W(u_i)/ε`, evaluated on the
    /// piecewise-constant interpolant.
    pub modica_mortola: f64,
}

fn gl_inner(traj: &Trajectory) -> Result<(f64, PotentialSpec)> {
    let parts = traj.potential().gl_parts().ok_or_else(|| {
        Error::Config("Ginzburg–Landau accounting needs an ε-scaled potential".into())
    })?;
    if traj.potential().components() != 1 {
        return Err(Error::Config(
            "Ginzburg–Landau accounting supports m = 1 only".into(),
        ));
    }
    if traj.ops().order() != 1.0 {
        return Err(Error::Config(
            "Ginzburg–Landau accounting needs s = 1".into(),
        ));
    }
    Ok(parts)
}

/// Energy per unit `k_ε = 1/ε` along the run and the spacetime
/// Modica–Mortola sum.
pub fn gl_energy_accounting(traj: &Trajectory) -> Result<GlAccounting> {
    let (eps, _) = gl_inner(traj)?;
    let energies = traj.energies();
    let scaled_energy = energies.iter().map(|e| eps * e.total).collect();
    // ε(|v|² + |∇u|²) + W/ε = ε(2·kinetic + 2·fractional + ε⁻²W)
    let modica_mortola = traj.tau()
        * energies[1..]
            .iter()
            .map(|e| eps * (2.0 * e.kinetic + 2.0 * e.fractional + e.potential))
            .sum::<f64>();
    Ok(GlAccounting {
        eps,
        scaled_energy,
        modica_mortola,
    })
}

/// Nodal `ε[(−|v_i|² + |∇u_i|²)/2 + W(u_i)/ε²]` over all mesh nodes, with
/// `|∇u|²` averaged from the adjacent cells.
pub fn lagrangian_density(traj: &Trajectory, i: usize) -> Result<Vec<f64>> {
    let (eps, inner) = gl_inner(traj)?;
    let mesh = traj.ops().mesh();
    let r = mesh.nodes();
    let u = traj.full_state(i as isize);
    let v_free = traj.velocity(i);
    let mut v = vec![0.0; r.len()];
    for (j, vj) in mesh.free_range().zip(v_free.iter()) {
        v[j] = *vj;
    }
    let grad2: Vec<f64> = r
        .windows(2)
        .zip(u.windows(2))
        .map(|(x, y)| ((y[1] - y[0]) / (x[1] - x[0])).powi(2))
        .collect();
    let last = r.len() - 1;
    Ok((0..r.len())
        .map(|j| {
            let g2 = if j == 0 {
                grad2[0]
            } else if j == last {
                grad2[last - 1]
            } else {
                0.5 * (grad2[j - 1] + grad2[j])
            };
            eps * (0.5 * (g2 - v[j] * v[j]) + inner.value1(u[j]) / (eps * eps))
        })
        .collect())
}

/// Fraction of `Σ_j w_j |ℓ_j|` (nodal quadrature weights `w_j`) carried by
/// nodes within `width` of `center`.
pub fn concentration_fraction(traj: &Trajectory, density: &[f64], center: f64, width: f64) -> f64 {
    let mesh = traj.ops().mesh();
    let weights = traj.ops().forms().full_mass.row_sums();
    let mut near = 0.0;
    let mut total = 0.0;
    for ((x, l), w) in mesh.nodes().iter().zip(density).zip(&weights) {
        let part = w * l.abs();
        total += part;
        if (x - center).abs() <= width {
            near += part;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        near / total
    }
}
