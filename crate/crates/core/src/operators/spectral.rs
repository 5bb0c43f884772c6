use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::assembly::SymTridiag;
use crate::error::{Error, Result};

/// Generalized eigenpairs of `K φ = λ M φ`, ascending, with `ΦᵀMΦ = I`.
#[derive(Clone, Debug)]
pub struct Eigenpairs {
    pub values: DVector<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: DMatrix<f64>,
}

/// Dense generalized symmetric eigendecomposition via the Cholesky factor of `M`.
///
/// Eigenvectors are sign-normalized so their first significant entry is positive.
pub fn spectral_decompose(mass: &SymTridiag, stiffness: &SymTridiag) -> Result<Eigenpairs> {
    let n = mass.len();
    let chol = mass
        .to_dense()
        .cholesky()
        .ok_or_else(|| Error::Numeric("mass form is not positive definite".into()))?;
    let l = chol.l();
    let k = stiffness.to_dense();
    // C = L⁻¹ K L⁻ᵀ
    let x = l
        .solve_lower_triangular(&k)
        .ok_or_else(|| Error::Numeric("singular Cholesky factor".into()))?;
    let c = l
        .solve_lower_triangular(&x.transpose())
        .ok_or_else(|| Error::Numeric("singular Cholesky factor".into()))?;
    let c = (&c + c.transpose()) * 0.5;

    let eig = SymmetricEigen::try_new(c, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numeric("symmetric eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let values = DVector::from_iterator(n, order.iter().map(|&j| eig.eigenvalues[j]));
    let mut q = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        q.set_column(dst, &eig.eigenvectors.column(src));
    }
    let mut vectors = l
        .transpose()
        .solve_upper_triangular(&q)
        .ok_or_else(|| Error::Numeric("singular Cholesky factor".into()))?;

    for mut col in vectors.column_iter_mut() {
        let peak = col.amax();
        if let Some(first) = col.iter().copied().find(|v| v.abs() > 1e-8 * peak) {
            if first < 0.0 {
                col.neg_mut();
            }
        }
    }

    let pairs = Eigenpairs { values, vectors };
    // Near-null modes have ‖Kφ‖ at round-off level; measure them against ‖K‖.
    let k_scale = stiffness.diag.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
    for (k, col) in pairs.vectors.column_iter().enumerate() {
        let phi: Vec<f64> = col.iter().copied().collect();
        let kphi = stiffness.mul_vec(&phi);
        let r = (&kphi - mass.mul_vec(&phi) * pairs.values[k]).norm();
        let scale = kphi.norm().max(1e-6 * k_scale * col.norm());
        if r.is_nan() || r > 1e-8 * scale {
            return Err(Error::Numeric(format!(
                "generalized eigenpair {k} has residual {r:.3e} (scale {scale:.3e})"
            )));
        }
    }
    Ok(pairs)
}

impl Eigenpairs {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// max_k ‖Kφ_k − λ_k Mφ_k‖ / max(‖Kφ_k‖, λ_k‖Mφ_k‖, tiny)
    pub fn max_relative_residual(&self, mass: &SymTridiag, stiffness: &SymTridiag) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, col) in self.vectors.column_iter().enumerate() {
            let phi: Vec<f64> = col.iter().copied().collect();
            let kphi = stiffness.mul_vec(&phi);
            let mphi = mass.mul_vec(&phi);
            let lam = self.values[k];
            let r = (&kphi - &mphi * lam).norm();
            let scale = kphi.norm().max(lam.abs() * mphi.norm()).max(f64::MIN_POSITIVE);
            worst = worst.max(r / scale);
        }
        worst
    }
}
