use minmove_core::operators::{assemble_forms, spectral_decompose};
use minmove_core::{Dirichlet, Geometry, Mesh1D, OperatorSet};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use std::f64::consts::PI;

fn line_ops(n_cells: usize, s: f64) -> OperatorSet {
    let mesh = Mesh1D::uniform(0.0, 1.0, n_cells, Geometry::Line, Dirichlet::zero()).unwrap();
    OperatorSet::new(mesh, s).unwrap()
}

fn rel_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax() / b.amax()
}

/// Generalized eigenpairs by an independent route: symmetric eigen of
/// M^{-1/2} K M^{-1/2} with M^{-1/2} from the eigendecomposition of M.
fn brute_force_fractional(m: &DMatrix<f64>, k: &DMatrix<f64>, s: f64) -> DMatrix<f64> {
    let em = m.clone().symmetric_eigen();
    let inv_sqrt = &em.eigenvectors
        * DMatrix::from_diagonal(&em.eigenvalues.map(|x| 1.0 / x.sqrt()))
        * em.eigenvectors.transpose();
    let c = &inv_sqrt * k * &inv_sqrt;
    let ec = c.symmetric_eigen();
    let n = m.nrows();
    let mut a = DMatrix::zeros(n, n);
    for kk in 0..n {
        let phi = &inv_sqrt * ec.eigenvectors.column(kk);
        let mphi = m * &phi;
        let lam = ec.eigenvalues[kk].max(0.0).powf(s);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] += lam * mphi[i] * mphi[j];
            }
        }
    }
    a
}

#[test]
fn uniform_dispersion_relation() {
    let n = 8;
    let h = 1.0 / n as f64;
    let ops = line_ops(n, 1.0);
    for (k, lam) in ops.eigenpairs().values.iter().enumerate() {
        let kk = (k + 1) as f64;
        let c = (kk * PI * h).cos();
        let closed = 6.0 / (h * h) * (1.0 - c) / (2.0 + c);
        assert!((lam - closed).abs() < 1e-10 * closed, "k={k}: {lam} vs {closed}");
    }
}

#[test]
fn first_eigenvalue_converges_to_continuum() {
    let ops = line_ops(64, 1.0);
    let l1 = ops.eigenpairs().values[0];
    assert!((l1 - PI * PI).abs() / (PI * PI) < 0.01);
}

#[test]
fn eigen_residuals_and_orthonormality() {
    for geometry in [Geometry::Line, Geometry::Radial { dim: 2 }] {
        let dirichlet = match geometry {
            Geometry::Line => Dirichlet::zero(),
            _ => Dirichlet::right(0.0),
        };
        let mesh = Mesh1D::uniform(0.0, 1.0, 40, geometry, dirichlet).unwrap();
        let ops = OperatorSet::new(mesh, 0.5).unwrap();
        let m = ops.mass().to_dense();
        let phi = &ops.eigenpairs().vectors;
        let gram = phi.transpose() * &m * phi;
        let eye = DMatrix::identity(gram.nrows(), gram.ncols());
        assert!((gram - eye).amax() < 1e-10);
        let k = ops.stiffness().to_dense();
        for (j, col) in phi.column_iter().enumerate() {
            let kphi = &k * col;
            let r = &kphi - &m * col * ops.eigenpairs().values[j];
            assert!(r.norm() <= 1e-10 * kphi.norm());
        }
        let vals = &ops.eigenpairs().values;
        assert!(vals[0] > 0.0);
        assert!(vals.as_slice().windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn endpoint_orders_reproduce_forms() {
    let ops = line_ops(16, 1.0);
    let k = ops.stiffness().to_dense();
    assert!(rel_diff(ops.fractional_matrix(), &k) < 1e-10);
    let ops0 = ops.with_order(0.0).unwrap();
    let m = ops.mass().to_dense();
    assert!(rel_diff(ops0.fractional_matrix(), &m) < 1e-10);
}

#[test]
fn half_order_semigroup() {
    let ops = line_ops(8, 0.5);
    let a = ops.fractional_matrix();
    let m = ops.mass().to_dense();
    let k = ops.stiffness().to_dense();
    let minv = m.clone().try_inverse().unwrap();
    let composed = a * minv * a;
    assert!(rel_diff(&composed, &k) < 1e-10);
}

#[test]
fn brute_force_equivalence_small_meshes() {
    for n in [3, 5, 8] {
        for s in [0.0, 0.3, 0.5, 1.0, 1.7] {
            let mesh =
                Mesh1D::uniform(0.0, 1.0, n, Geometry::Radial { dim: 3 }, Dirichlet::right(0.0))
                    .unwrap();
            let ops = OperatorSet::new(mesh, s).unwrap();
            let m = ops.mass().to_dense();
            let k = ops.stiffness().to_dense();
            let brute = brute_force_fractional(&m, &k, s);
            assert!(rel_diff(ops.fractional_matrix(), &brute) < 1e-10, "n={n} s={s}");
        }
    }
}

#[test]
fn seminorm_of_eigenmodes() {
    let ops = line_ops(20, 0.7);
    for k in [0, 3, 10] {
        let phi = ops.mode(k);
        let expect = ops.eigenpairs().values[k].powf(0.35);
        assert!((ops.seminorm(&phi).unwrap() - expect).abs() < 1e-10 * expect);
    }
    assert_eq!(ops.seminorm(&DVector::zeros(ops.n_free())).unwrap(), 0.0);
}

#[test]
fn poincare_constant_values() {
    let ops = line_ops(24, 0.0);
    assert_eq!(ops.poincare_constant().unwrap(), 1.0);
    let u = DVector::from_fn(ops.n_free(), |j, _| (j as f64 * 0.37).sin());
    assert!((ops.mass_norm(&u) - ops.seminorm(&u).unwrap()).abs() < 1e-12);

    let ops = ops.with_order(0.8).unwrap();
    let phi = ops.mode(0);
    let c = ops.poincare_constant().unwrap();
    assert!((ops.mass_norm(&phi) - c * ops.seminorm(&phi).unwrap()).abs() < 1e-12);

    let free = Mesh1D::uniform(0.0, 1.0, 8, Geometry::Line, Dirichlet::none()).unwrap();
    let ops = OperatorSet::new(free, 1.0).unwrap();
    assert!(ops.poincare_constant().is_err());
}

#[test]
fn inhomogeneous_dirichlet_requires_unit_order() {
    let mesh =
        Mesh1D::uniform(0.0, 1.0, 8, Geometry::Radial { dim: 2 }, Dirichlet::right(-1.0)).unwrap();
    assert!(OperatorSet::new(mesh.clone(), 0.5).is_err());
    assert!(OperatorSet::new(mesh, 1.0).is_ok());
}

#[test]
fn shifted_inverse_agrees_across_routes() {
    let ops = line_ops(30, 1.0);
    let g = DVector::from_fn(ops.n_free(), |j, _| ((j * j) as f64 * 0.1).cos());
    let inv_tau2 = 400.0;
    let tri = ops.shifted_inverse(&g, inv_tau2);
    let half = ops.with_order(1.0 - 1e-15).unwrap();
    // spectral route at (numerically) the same order
    let spec = half.shifted_inverse(&g, inv_tau2);
    assert!((&tri - &spec).amax() < 1e-9 * tri.amax());
}

#[test]
fn assembled_blocks_match_full() {
    let mesh = Mesh1D::uniform(0.0, 2.0, 10, Geometry::Line, Dirichlet::zero()).unwrap();
    let forms = assemble_forms(&mesh);
    let full = forms.full_mass.to_dense();
    let block = full.view((1, 1), (9, 9)).into_owned();
    assert_eq!(block, forms.mass.to_dense());
    let pairs = spectral_decompose(&forms.mass, &forms.stiffness).unwrap();
    assert_eq!(pairs.len(), 9);
}

fn random_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-3.0..3.0f64, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn quadratic_form_properties(u in random_vec(15), s in 0.0..2.0f64) {
        let ops = line_ops(16, s);
        let u = DVector::from_vec(u);
        let au = ops.fractional_apply(&u);
        let q = u.dot(&au);
        prop_assert!(q >= -1e-12);
        // eigenbasis summation
        let c = ops.modal_coefficients(&u);
        let direct: f64 = c.iter().zip(ops.powered_eigenvalues().iter()).map(|(c, l)| l * c * c).sum();
        prop_assert!((q - direct).abs() <= 1e-12 * direct.abs().max(1.0));
        // discrete Poincaré
        let l1 = ops.eigenpairs().values[0];
        prop_assert!(ops.mass().quad_form(u.as_slice()) <= l1.powf(-s) * q + 1e-12);
    }

    #[test]
    fn unit_order_seminorm_is_energy_norm(u in random_vec(15)) {
        let ops = line_ops(16, 1.0);
        let u = DVector::from_vec(u);
        let direct = ops.stiffness().quad_form(u.as_slice()).sqrt();
        prop_assert!((ops.seminorm(&u).unwrap() - direct).abs() <= 1e-12 * direct.max(1.0));
    }
}

#[test]
fn fractional_matrix_is_symmetric() {
    let ops = line_ops(25, 0.3);
    let a = ops.fractional_matrix();
    assert!((a - a.transpose()).amax() <= 1e-10 * a.amax());
}
