use std::ops::Range;

use nalgebra::DVector;

use crate::error::{Error, Result};

/// Integration weight of the 1D reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Geometry {
    /// Plain interval, weight 1.
    Line,
    /// Radially symmetric functions on a ball in `dim` dimensions, weight r^(dim-1).
    /// The constant angular factor is dropped.
    Radial { dim: u32 },
}

impl Geometry {
    /// Exponent p of the weight r^p.
    pub fn weight_power(self) -> u32 {
        match self {
            Geometry::Line => 0,
            Geometry::Radial { dim } => dim.saturating_sub(1),
        }
    }
}

/// Optional fixed values at the two endpoints; `None` leaves the endpoint free.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dirichlet {
    pub left: Option<f64>,
    pub right: Option<f64>,
}

impl Dirichlet {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn zero() -> Self {
        Self {
            left: Some(0.0),
            right: Some(0.0),
        }
    }

    pub fn right(value: f64) -> Self {
        Self {
            left: None,
            right: Some(value),
        }
    }

    pub fn is_active(&self) -> bool {
        self.left.is_some() || self.right.is_some()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.left.unwrap_or(0.0) == 0.0 && self.right.unwrap_or(0.0) == 0.0
    }
}

/// Node layout of a 1D piecewise-linear discretization.
///
/// Only the endpoints can carry Dirichlet data, so the free nodes always form
/// one contiguous index range.
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh1D {
    nodes: Vec<f64>,
    geometry: Geometry,
    dirichlet: Dirichlet,
}

impl Mesh1D {
    /// Uniform mesh of `n_cells` cells on `[a, b]`.
    pub fn uniform(
        a: f64,
        b: f64,
        n_cells: usize,
        geometry: Geometry,
        dirichlet: Dirichlet,
    ) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(Error::Config(format!(
                "mesh interval must satisfy a < b, got [{a}, {b}]"
            )));
        }
        if n_cells < 2 {
            return Err(Error::Config(format!(
                "mesh needs at least 2 cells, got {n_cells}"
            )));
        }
        let h = (b - a) / n_cells as f64;
        let mut nodes: Vec<f64> = (0..=n_cells).map(|j| a + j as f64 * h).collect();
        nodes[n_cells] = b;
        Self::from_nodes(nodes, geometry, dirichlet)
    }

    pub fn from_nodes(nodes: Vec<f64>, geometry: Geometry, dirichlet: Dirichlet) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::Config(format!(
                "mesh needs at least 2 cells, got {}",
                nodes.len().saturating_sub(1)
            )));
        }
        if nodes.iter().any(|x| !x.is_finite()) || nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(
                "mesh nodes must be finite and strictly increasing".into(),
            ));
        }
        for v in [dirichlet.left, dirichlet.right].into_iter().flatten() {
            if !v.is_finite() {
                return Err(Error::Config(format!("non-finite Dirichlet value {v}")));
            }
        }
        if let Geometry::Radial { dim } = geometry {
            if dim == 0 {
                return Err(Error::Config("radial geometry needs dimension >= 1".into()));
            }
            if nodes[0] != 0.0 {
                return Err(Error::Config(format!(
                    "radial geometry must start at r = 0, got {}",
                    nodes[0]
                )));
            }
            if dirichlet.left.is_some() {
                return Err(Error::Config(
                    "radial geometry cannot constrain the symmetry node r = 0".into(),
                ));
            }
        }
        Ok(Self {
            nodes,
            geometry,
            dirichlet,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn n_cells(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Largest cell width.
    pub fn max_spacing(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn dirichlet(&self) -> Dirichlet {
        self.dirichlet
    }

    pub fn start(&self) -> f64 {
        self.nodes[0]
    }

    pub fn end(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Indices (into `nodes`) of the unconstrained nodes.
    pub fn free_range(&self) -> Range<usize> {
        let lo = usize::from(self.dirichlet.left.is_some());
        let hi = self.nodes.len() - usize::from(self.dirichlet.right.is_some());
        lo..hi
    }

    pub fn n_free(&self) -> usize {
        self.free_range().len()
    }

    pub fn free_nodes(&self) -> &[f64] {
        &self.nodes[self.free_range()]
    }

    /// Samples `f` at the free nodes.
    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> DVector<f64> {
        DVector::from_iterator(self.n_free(), self.free_nodes().iter().map(|&x| f(x)))
    }

    /// Full nodal vector from free values, filling constrained endpoints.
    pub fn extend(&self, free: &[f64]) -> Vec<f64> {
        assert_eq!(free.len(), self.n_free(), "free vector has wrong length");
        let mut full = Vec::with_capacity(self.nodes.len());
        if let Some(v) = self.dirichlet.left {
            full.push(v);
        }
        full.extend_from_slice(free);
        if let Some(v) = self.dirichlet.right {
            full.push(v);
        }
        full
    }

    pub fn restrict(&self, full: &[f64]) -> DVector<f64> {
        assert_eq!(full.len(), self.nodes.len(), "full vector has wrong length");
        DVector::from_column_slice(&full[self.free_range()])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_line_with_zero_ends() {
        let mesh = Mesh1D::uniform(0.0, 1.0, 4, Geometry::Line, Dirichlet::zero()).unwrap();
        assert_eq!(mesh.nodes(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(mesh.n_free(), 3);
        assert_eq!(mesh.free_nodes(), &[0.25, 0.5, 0.75]);
    }

    #[test]
    fn radial_keeps_center_free() {
        let mesh = Mesh1D::uniform(
            0.0,
            1.0,
            4,
            Geometry::Radial { dim: 2 },
            Dirichlet::right(-1.0),
        )
        .unwrap();
        assert_eq!(mesh.n_free(), 4);
        assert_eq!(mesh.free_nodes()[0], 0.0);
        assert_eq!(mesh.extend(&[1.0, 2.0, 3.0, 4.0]), vec![1.0, 2.0, 3.0, 4.0, -1.0]);
    }

    #[test]
    fn rejects_bad_layouts() {
        assert!(Mesh1D::uniform(1.0, 0.0, 4, Geometry::Line, Dirichlet::zero()).is_err());
        assert!(Mesh1D::uniform(0.0, 1.0, 1, Geometry::Line, Dirichlet::zero()).is_err());
        assert!(Mesh1D::uniform(
            0.5,
            1.0,
            4,
            Geometry::Radial { dim: 2 },
            Dirichlet::none()
        )
        .is_err());
        assert!(Mesh1D::uniform(
            0.0,
            1.0,
            4,
            Geometry::Radial { dim: 2 },
            Dirichlet::zero()
        )
        .is_err());
        assert!(Mesh1D::from_nodes(vec![0.0, 0.5, 0.5, 1.0], Geometry::Line, Dirichlet::none())
            .is_err());
    }
}
