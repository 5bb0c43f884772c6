use nalgebra::{DMatrix, DVector};

use super::mesh::Mesh1D;

/// Symmetric tridiagonal matrix; `off[j]` couples rows `j` and `j + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn zeros(n: usize) -> Self {
        Self {
            diag: vec![0.0; n],
            off: vec![0.0; n.saturating_sub(1)],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn mul_into(&self, x: &[f64], y: &mut [f64]) {
        let n = self.len();
        debug_assert!(x.len() == n && y.len() == n);
        for j in 0..n {
            let mut acc = self.diag[j] * x[j];
            if j > 0 {
                acc += self.off[j - 1] * x[j - 1];
            }
            if j + 1 < n {
                acc += self.off[j] * x[j + 1];
            }
            y[j] = acc;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> DVector<f64> {
        let mut y = DVector::zeros(self.len());
        self.mul_into(x, y.as_mut_slice());
        y
    }

    pub fn quad_form(&self, x: &[f64]) -> f64 {
        let n = self.len();
        let mut acc = 0.0;
        for j in 0..n {
            acc += self.diag[j] * x[j] * x[j];
            if j + 1 < n {
                acc += 2.0 * self.off[j] * x[j] * x[j + 1];
            }
        }
        acc
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|j| {
                let mut s = self.diag[j];
                if j > 0 {
                    s += self.off[j - 1];
                }
                if j + 1 < n {
                    s += self.off[j];
                }
                s
            })
            .collect()
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: f64, other: &SymTridiag, beta: f64) -> SymTridiag {
        assert_eq!(self.len(), other.len());
        SymTridiag {
            diag: self
                .diag
                .iter()
                .zip(&other.diag)
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
            off: self
                .off
                .iter()
                .zip(&other.off)
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
        }
    }

    /// Principal sub-block on `range`.
    pub fn block(&self, range: std::ops::Range<usize>) -> SymTridiag {
        let off_end = range.end.saturating_sub(1).max(range.start);
        SymTridiag {
            diag: self.diag[range.clone()].to_vec(),
            off: self.off[range.start..off_end].to_vec(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            m[(j, j)] = self.diag[j];
            if j + 1 < n {
                m[(j, j + 1)] = self.off[j];
                m[(j + 1, j)] = self.off[j];
            }
        }
        m
    }

    /// Solves `self * x = rhs` by the Thomas algorithm. Assumes no pivoting is
    /// needed, which holds for the SPD matrices built here.
    pub fn solve(&self, rhs: &[f64]) -> DVector<f64> {
        let n = self.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut denom = self.diag[0];
        d[0] = rhs[0] / denom;
        for j in 1..n {
            c[j - 1] = self.off[j - 1] / denom;
            denom = self.diag[j] - self.off[j - 1] * c[j - 1];
            d[j] = (rhs[j] - self.off[j - 1] * d[j - 1]) / denom;
        }
        for j in (0..n.saturating_sub(1)).rev() {
            d[j] -= c[j] * d[j + 1];
        }
        DVector::from_vec(d)
    }
}

/// Mass and stiffness forms of piecewise-linear elements with the geometry
/// weight, split into the free block and the Dirichlet lift.
#[derive(Clone, Debug)]
pub struct Forms {
    /// Over all nodes.
    pub full_mass: SymTridiag,
    pub full_stiffness: SymTridiag,
    /// Free-free blocks.
    pub mass: SymTridiag,
    pub stiffness: SymTridiag,
    /// Row sums of the full mass over free rows (nodal quadrature weights).
    pub lumped: DVector<f64>,
    /// K_{fc} u_c: linear coupling of free nodes to the fixed endpoint values.
    pub stiffness_offset: DVector<f64>,
    /// ½ u_cᵀ K_{cc} u_c.
    pub offset_energy: f64,
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Element forms on `[a, a + h]` with weight r^p, exact.
///
/// Expanding r^p = Σ C(p,k) a^(p-k) (hξ)^k in the local coordinate ξ keeps every
/// term non-negative, so there is no cancellation for cells far from the
/// origin.
pub(crate) fn element_forms(a: f64, h: f64, p: u32) -> ([f64; 3], f64) {
    let (mut mll, mut mlr, mut mrr, mut kk) = (0.0, 0.0, 0.0, 0.0);
    for k in 0..=p {
        let w = binomial(p, k) * a.powi((p - k) as i32) * h.powi(k as i32);
        let kf = f64::from(k);
        mll += w * 2.0 / ((kf + 1.0) * (kf + 2.0) * (kf + 3.0));
        mlr += w / ((kf + 2.0) * (kf + 3.0));
        mrr += w / (kf + 3.0);
        kk += w / (kf + 1.0);
    }
    ([h * mll, h * mlr, h * mrr], kk / h)
}

pub fn assemble_forms(mesh: &Mesh1D) -> Forms {
    let nodes = mesh.nodes();
    let n = nodes.len();
    let p = mesh.geometry().weight_power();
    let mut mass = SymTridiag::zeros(n);
    let mut stiff = SymTridiag::zeros(n);
    for j in 0..n - 1 {
        let h = nodes[j + 1] - nodes[j];
        let ([mll, mlr, mrr], k) = element_forms(nodes[j], h, p);
        mass.diag[j] += mll;
        mass.diag[j + 1] += mrr;
        mass.off[j] += mlr;
        stiff.diag[j] += k;
        stiff.diag[j + 1] += k;
        stiff.off[j] -= k;
    }

    let free = mesh.free_range();
    let sums = mass.row_sums();
    let lumped = DVector::from_column_slice(&sums[free.clone()]);

    let dirichlet = mesh.dirichlet();
    let nf = free.len();
    let mut offset = DVector::zeros(nf);
    let mut offset_energy = 0.0;
    if let Some(v) = dirichlet.left {
        offset[0] += stiff.off[0] * v;
        offset_energy += 0.5 * stiff.diag[0] * v * v;
    }
    if let Some(v) = dirichlet.right {
        offset[nf - 1] += stiff.off[n - 2] * v;
        offset_energy += 0.5 * stiff.diag[n - 1] * v * v;
    }

    Forms {
        mass: mass.block(free.clone()),
        stiffness: stiff.block(free),
        full_mass: mass,
        full_stiffness: stiff,
        lumped,
        stiffness_offset: offset,
        offset_energy,
    }
}
