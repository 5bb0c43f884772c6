//! Fixtures shared by the criterion benchmarks.

use std::sync::Arc;

use minmove_core::{Dirichlet, Geometry, Mesh1D, OperatorSet, PotentialSpec, SchemeConfig};
use nalgebra::DVector;

/// Radial Ginzburg–Landau front on `n_cells` cells, `n_steps` steps.
pub fn radial_front(n_cells: usize, n_steps: usize) -> SchemeConfig {
    let mesh = Mesh1D::uniform(
        0.0,
        1.0,
        n_cells,
        Geometry::Radial { dim: 2 },
        Dirichlet::right(-1.0),
    )
    .expect("mesh");
    let ops = Arc::new(OperatorSet::new(mesh, 1.0).expect("operators"));
    let eps = 0.05;
    let u0 = ops.mesh().sample(|r| ((0.4 - r) / (2.0 * eps)).tanh());
    let v0 = DVector::zeros(u0.len());
    let potential = PotentialSpec::double_well(1).scaled(eps).expect("potential");
    let mut config = SchemeConfig::new(ops, potential, 0.05, n_steps, u0, v0);
    config.solver = minmove_core::SolverParams::spectral();
    config
}

/// Line mesh with zero Dirichlet ends.
pub fn line_mesh(n_cells: usize) -> Mesh1D {
    Mesh1D::uniform(0.0, 1.0, n_cells, Geometry::Line, Dirichlet::zero()).expect("mesh")
}
