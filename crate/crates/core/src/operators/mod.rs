//! Piecewise-linear finite elements on a 1D (optionally radially weighted)
//! mesh and the spectral fractional stiffness built from them.
//!
//! The fractional operator of order `s` is the `s`-th spectral power of the
//! discrete Dirichlet pair `(K, M)`:
//!
//! ```text
//! A_s = (MΦ) Λ^s (MΦ)ᵀ,   KΦ = MΦΛ,   ΦᵀMΦ = I
//! ```
//!
//! This is the spectral fractional Laplacian of the discrete problem, not the
//! zero-extension (integral) operator on ℝᵈ. The two differ on bounded
//! domains. Both are symmetric and positive, reduce to `M` at `s = 0` and to
//! `K` at `s = 1`, and satisfy the Poincaré inequality with constant
//! `λ₁^{-s/2}`.

mod assembly;
mod mesh;
mod spectral;

pub use assembly::{assemble_forms, Forms, SymTridiag};
pub use mesh::{Dirichlet, Geometry, Mesh1D};
pub use spectral::{spectral_decompose, Eigenpairs};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Immutable spatial operators for one mesh and one fractional order.
#[derive(Clone, Debug)]
pub struct OperatorSet {
    mesh: Mesh1D,
    forms: Forms,
    eigen: Eigenpairs,
    order: f64,
    /// λ_k^s, with round-off negatives clamped to zero.
    powered: DVector<f64>,
    /// MΦ
    mass_modes: DMatrix<f64>,
    fractional: DMatrix<f64>,
}

impl OperatorSet {
    pub fn new(mesh: Mesh1D, order: f64) -> Result<Self> {
        let forms = assemble_forms(&mesh);
        let eigen = spectral_decompose(&forms.mass, &forms.stiffness)?;
        Self::from_parts(mesh, forms, eigen, order)
    }

    /// Same mesh and eigenpairs, different fractional order.
    pub fn with_order(&self, order: f64) -> Result<Self> {
        Self::from_parts(
            self.mesh.clone(),
            self.forms.clone(),
            self.eigen.clone(),
            order,
        )
    }

    fn from_parts(mesh: Mesh1D, forms: Forms, eigen: Eigenpairs, order: f64) -> Result<Self> {
        if !(order.is_finite() && order >= 0.0) {
            return Err(Error::Config(format!(
                "fractional order must be >= 0, got {order}"
            )));
        }
        if order != 1.0 && !mesh.dirichlet().is_homogeneous() {
            return Err(Error::Config(format!(
                "inhomogeneous Dirichlet data requires s = 1, got s = {order}"
            )));
        }
        let powered = eigen.values.map(|l| l.max(0.0).powf(order));
        let n = eigen.len();
        let mut mass_modes = DMatrix::zeros(n, n);
        for (k, col) in eigen.vectors.column_iter().enumerate() {
            let phi: Vec<f64> = col.iter().copied().collect();
            mass_modes.set_column(k, &forms.mass.mul_vec(&phi));
        }
        let mut scaled = mass_modes.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= powered[k];
        }
        let fractional = &scaled * mass_modes.transpose();
        let fractional = (&fractional + fractional.transpose()) * 0.5;
        Ok(Self {
            mesh,
            forms,
            eigen,
            order,
            powered,
            mass_modes,
            fractional,
        })
    }

    pub fn mesh(&self) -> &Mesh1D {
        &self.mesh
    }

    pub fn forms(&self) -> &Forms {
        &self.forms
    }

    pub fn eigenpairs(&self) -> &Eigenpairs {
        &self.eigen
    }

    /// Fractional order `s`.
    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn n_free(&self) -> usize {
        self.forms.mass.len()
    }

    pub fn mass(&self) -> &SymTridiag {
        &self.forms.mass
    }

    pub fn stiffness(&self) -> &SymTridiag {
        &self.forms.stiffness
    }

    /// Nodal quadrature weights of the free nodes.
    pub fn lumped(&self) -> &DVector<f64> {
        &self.forms.lumped
    }

    /// Dense `A_s` as built from the eigenpairs.
    pub fn fractional_matrix(&self) -> &DMatrix<f64> {
        &self.fractional
    }

    /// λ_k^s in ascending λ order.
    pub fn powered_eigenvalues(&self) -> &DVector<f64> {
        &self.powered
    }

    /// The M-orthonormal eigenvector φ_{k+1} (zero-based `k`).
    pub fn mode(&self, k: usize) -> DVector<f64> {
        self.eigen.vectors.column(k).into_owned()
    }

    /// `A_s u`. Uses the tridiagonal forms at `s = 0` and `s = 1`, where they
    /// coincide with the spectral construction.
    pub fn fractional_apply(&self, u: &DVector<f64>) -> DVector<f64> {
        if self.order == 1.0 {
            self.forms.stiffness.mul_vec(u.as_slice())
        } else if self.order == 0.0 {
            self.forms.mass.mul_vec(u.as_slice())
        } else {
            &self.fractional * u
        }
    }

    /// `[u]_s = √(uᵀ A_s u)`.
    pub fn seminorm(&self, u: &DVector<f64>) -> Result<f64> {
        let q = u.dot(&self.fractional_apply(u));
        if q < -1e-12 {
            return Err(Error::Numeric(format!(
                "fractional quadratic form is negative: {q:.3e}"
            )));
        }
        Ok(q.max(0.0).sqrt())
    }

    /// Sharp discrete Poincaré constant `λ₁^{-s/2}`.
    pub fn poincare_constant(&self) -> Result<f64> {
        let l1 = self.eigen.values[0];
        if !self.mesh.dirichlet().is_active() || l1 <= 0.0 {
            return Err(Error::Config(format!(
                "Poincaré constant needs a Dirichlet constraint (λ₁ = {l1:.3e})"
            )));
        }
        Ok(l1.powf(-0.5 * self.order))
    }

    /// `√(uᵀ M u)` with the consistent mass.
    pub fn mass_norm(&self, u: &DVector<f64>) -> f64 {
        self.forms.mass.quad_form(u.as_slice()).max(0.0).sqrt()
    }

    /// Dual norm of a residual in the lumped metric, `√(Σ r_j² / m_j)`.
    pub fn dual_norm(&self, r: &DVector<f64>) -> f64 {
        r.iter()
            .zip(self.forms.lumped.iter())
            .map(|(r, m)| r * r / m)
            .sum::<f64>()
            .sqrt()
    }

    /// `M⁻¹ r` with the consistent mass.
    pub fn mass_solve(&self, r: &DVector<f64>) -> DVector<f64> {
        self.forms.mass.solve(r.as_slice())
    }

    /// Eigen-coefficients `ΦᵀM u`.
    pub fn modal_coefficients(&self, u: &DVector<f64>) -> DVector<f64> {
        self.mass_modes.tr_mul(u)
    }

    /// Reconstruction from eigen-coefficients, `Φ c`.
    pub fn synthesize(&self, coeffs: &DVector<f64>) -> DVector<f64> {
        &self.eigen.vectors * coeffs
    }

    /// M-orthogonal projection onto the first `k` eigenmodes.
    pub fn project_modes(&self, u: &DVector<f64>, k: usize) -> DVector<f64> {
        let k = k.min(self.n_free());
        let mut c = self.modal_coefficients(u);
        c.rows_mut(k, self.n_free() - k).fill(0.0);
        self.synthesize(&c)
    }

    /// `(M/τ² + A_s)⁻¹ g`. At `s = 1` this is a tridiagonal solve, otherwise a
    /// diagonal scaling in the eigenbasis; both are the same operator.
    pub fn shifted_inverse(&self, g: &DVector<f64>, inv_tau2: f64) -> DVector<f64> {
        if self.order == 1.0 {
            self.forms
                .mass
                .combine(inv_tau2, &self.forms.stiffness, 1.0)
                .solve(g.as_slice())
        } else {
            let mut c = self.eigen.vectors.tr_mul(g);
            for (ck, pk) in c.iter_mut().zip(self.powered.iter()) {
                *ck /= inv_tau2 + pk;
            }
            self.synthesize(&c)
        }
    }

    /// `½uᵀA_s u` plus the Dirichlet lift terms, i.e. the energy of the full
    /// nodal function.
    pub fn fractional_energy(&self, u: &DVector<f64>) -> f64 {
        0.5 * u.dot(&self.fractional_apply(u))
            + self.forms.stiffness_offset.dot(u)
            + self.forms.offset_energy
    }
}
