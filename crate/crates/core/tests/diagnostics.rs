use std::sync::Arc;

use minmove_core::diagnostics::*;
use minmove_core::{
    run, Dirichlet, Error, Geometry, Mesh1D, OperatorSet, PotentialKind, PotentialSpec,
    SchemeConfig, SolverParams,
};
use nalgebra::DVector;
use proptest::prelude::*;

fn line_ops(n_cells: usize, s: f64) -> Arc<OperatorSet> {
    let mesh = Mesh1D::uniform(0.0, 1.0, n_cells, Geometry::Line, Dirichlet::zero()).unwrap();
    Arc::new(OperatorSet::new(mesh, s).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn gronwall_holds_for_hypothesis_sequences(
        a in 0.0..10.0f64,
        b in 0.0..10.0f64,
        slack in proptest::collection::vec(0.0..1.0f64, 1..=100),
    ) {
        let n = slack.len();
        let mut seq = Vec::with_capacity(n);
        let mut sum = 0.0;
        for s in &slack {
            let rhs = a + b / n as f64 * sum;
            let y = rhs - s * (1.0 + rhs.abs());
            seq.push(y);
            sum += y;
        }
        let chk = check_gronwall(&seq, a, b).unwrap();
        prop_assert!(chk.max_value <= a * b.exp() * (1.0 + 1e-12));
        let env = gronwall_envelope(a, b, n);
        prop_assert!(env.iter().all(|y| *y <= a * b.exp() * (1.0 + 1e-12)));
    }
}

#[test]
fn gronwall_zero_constant_forces_zero() {
    let seq = [0.0, -1.0, -2.0, -4.0];
    let chk = check_gronwall(&seq, 0.0, 3.0).unwrap();
    assert_eq!(chk.bound, 0.0);
}

#[test]
fn mol_matches_exact_mode_motion() {
    let ops = line_ops(16, 1.0);
    let l1 = ops.eigenpairs().values[0];
    let s = 10f64.ln() / l1.ln();
    let ops = Arc::new(ops.with_order(s).unwrap());
    assert!((ops.powered_eigenvalues()[0] - 10.0).abs() < 1e-10);
    let cfg = SchemeConfig::new(
        Arc::clone(&ops),
        PotentialSpec::zero(1),
        1.0,
        20,
        ops.mode(0),
        DVector::zeros(ops.n_free()),
    );
    let mol = oracle_mol(&cfg).unwrap();
    for (t, u) in mol.times.iter().zip(&mol.states) {
        let a = ops.modal_coefficients(u)[0];
        assert!((a - (10f64.sqrt() * t).cos()).abs() < 1e-8, "t={t}");
    }
}

#[test]
fn mol_stationary_cases() {
    let ops = line_ops(16, 1.0);
    let z = DVector::zeros(ops.n_free());
    for potential in [PotentialSpec::zero(1), PotentialSpec::double_well(1)] {
        let cfg = SchemeConfig::new(Arc::clone(&ops), potential, 1.0, 10, z.clone(), z.clone());
        let mol = oracle_mol(&cfg).unwrap();
        assert!(mol.states.iter().all(|u| u.amax() == 0.0));
    }
}

#[test]
fn recurrence_cross_validation() {
    for s in [0.5, 1.0] {
        let ops = line_ops(32, s);
        for k in [0, 1, 4] {
            let mut cfg = SchemeConfig::new(
                Arc::clone(&ops),
                PotentialSpec::zero(1),
                1.0,
                64,
                ops.mode(k),
                DVector::zeros(ops.n_free()),
            );
            cfg.solver = SolverParams::default();
            let traj = run(&cfg).unwrap();
            let lam = ops.powered_eigenvalues()[k];
            let oracle = oracle_recurrence(lam, 1.0, 1.0, cfg.tau(), 64);
            for i in 1..=64usize {
                let a = traj.modal_coefficients(i as isize)[k];
                assert!((a - oracle[i + 1]).abs() <= 10.0 * traj.records()[i].tol);
            }
        }
    }
}

#[test]
fn convergence_linear_eigenmode() {
    let ops = line_ops(32, 1.0);
    let cfg = SchemeConfig::new(
        Arc::clone(&ops),
        PotentialSpec::zero(1),
        1.0,
        128,
        ops.mode(0),
        DVector::zeros(ops.n_free()),
    );
    let report = convergence_study(&cfg, &[128, 256, 512]).unwrap();
    assert_eq!(report.rows.len(), 3);
    assert!(report.error_slope.unwrap() >= 0.8);
    // the scheme only dissipates in the linear case
    assert!(report.rows.iter().all(|r| r.max_drift == 0.0));

    let zero = SchemeConfig {
        u0: DVector::zeros(ops.n_free()),
        ..cfg.clone()
    };
    let report = convergence_study(&zero, &[4, 8, 16]).unwrap();
    assert!(report.rows.iter().all(|r| r.error == Some(0.0)));
    assert!(report.error_slope.is_none());

    assert!(convergence_study(&cfg, &[128, 64, 256]).is_err());
}

#[test]
fn convergence_semilinear_gap_shrinks() {
    let ops = line_ops(32, 1.0);
    let u0 = ops.mode(0) * 0.5 + ops.mode(1) * 0.2;
    let cfg = SchemeConfig::new(
        Arc::clone(&ops),
        PotentialSpec::double_well(1),
        1.0,
        128,
        u0,
        DVector::zeros(ops.n_free()),
    );
    let report = convergence_study(&cfg, &[128, 256, 512]).unwrap();
    let errs: Vec<f64> = report.rows.iter().map(|r| r.error.unwrap()).collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]));
    assert!(report.error_slope.unwrap() >= 0.8);
}

#[test]
fn convergence_reports_partial_failure() {
    let ops = line_ops(16, 1.0);
    let mut cfg = SchemeConfig::new(
        Arc::clone(&ops),
        PotentialSpec::double_well(1),
        1.0,
        8,
        ops.mode(0) * 0.5,
        DVector::zeros(ops.n_free()),
    );
    cfg.solver.max_iter = 1;
    match convergence_study(&cfg, &[4, 8, 16]) {
        Err(Error::Study { n, partial, .. }) => {
            assert_eq!(n, 4);
            assert!(partial.rows.is_empty());
        }
        other => panic!("expected study error, got {other:?}"),
    }
}

fn gl_radial(n_cells: usize, eps: f64, r0: f64, horizon: f64, n_steps: usize) -> SchemeConfig {
    let mesh = Mesh1D::uniform(
        0.0,
        1.0,
        n_cells,
        Geometry::Radial { dim: 2 },
        Dirichlet::right(-1.0),
    )
    .unwrap();
    let ops = Arc::new(OperatorSet::new(mesh, 1.0).unwrap());
    let u0 = ops.mesh().sample(|r| ((r0 - r) / (2.0 * eps)).tanh());
    let mut cfg = SchemeConfig::new(
        Arc::clone(&ops),
        PotentialSpec::double_well(1).scaled(eps).unwrap(),
        horizon,
        n_steps,
        u0,
        DVector::zeros(ops.n_free()),
    );
    cfg.solver = SolverParams::spectral();
    cfg
}

#[test]
fn gl_accounting_algebra() {
    let eps = 0.1;
    let ops = line_ops(20, 1.0);
    let z = DVector::zeros(ops.n_free());
    let cfg = SchemeConfig::new(
        Arc::clone(&ops),
        PotentialSpec::double_well(1).scaled(eps).unwrap(),
        0.2,
        4,
        z.clone(),
        z.clone(),
    );
    let traj = run(&cfg).unwrap();
    let acc = gl_energy_accounting(&traj).unwrap();
    let measure: f64 = ops.lumped().iter().sum();
    assert!((acc.scaled_energy[0] - measure / eps).abs() < 1e-12);
    assert!((acc.modica_mortola - 0.2 * measure / eps).abs() < 1e-12);

    // u ≡ 1 sits in a well: no energy at all
    let mesh = Mesh1D::uniform(
        0.0,
        1.0,
        20,
        Geometry::Line,
        Dirichlet {
            left: Some(1.0),
            right: Some(1.0),
        },
    )
    .unwrap();
    let ops = Arc::new(OperatorSet::new(mesh, 1.0).unwrap());
    let ones = DVector::from_element(ops.n_free(), 1.0);
    let cfg = SchemeConfig::new(
        Arc::clone(&ops),
        PotentialSpec::double_well(1).scaled(eps).unwrap(),
        0.2,
        4,
        ones.clone(),
        DVector::zeros(ops.n_free()),
    );
    let traj = run(&cfg).unwrap();
    let acc = gl_energy_accounting(&traj).unwrap();
    assert!(acc.scaled_energy.iter().all(|e| e.abs() < 1e-10));
    let density = lagrangian_density(&traj, 2).unwrap();
    assert!(density.iter().all(|l| l.abs() < 1e-10));

    let plain = SchemeConfig {
        potential: PotentialSpec::double_well(1),
        ..cfg
    };
    let traj = run(&plain).unwrap();
    assert!(matches!(gl_energy_accounting(&traj), Err(Error::Config(_))));
}

#[test]
fn lagrangian_density_of_static_ramp() {
    let mesh = Mesh1D::uniform(
        0.0,
        1.0,
        10,
        Geometry::Line,
        Dirichlet {
            left: Some(0.0),
            right: Some(1.0),
        },
    )
    .unwrap();
    let ops = Arc::new(OperatorSet::new(mesh, 1.0).unwrap());
    let eps = 0.25;
    let potential = PotentialSpec::new(
        PotentialKind::GlScaled {
            inner: Box::new(PotentialKind::Zero),
            eps,
        },
        1,
    )
    .unwrap();
    let u0 = ops.mesh().sample(|x| x);
    let cfg = SchemeConfig::new(
        Arc::clone(&ops),
        potential,
        0.1,
        2,
        u0,
        DVector::zeros(ops.n_free()),
    );
    let traj = run(&cfg).unwrap();
    let density = lagrangian_density(&traj, 0).unwrap();
    for l in density {
        assert!((l - eps * 0.5).abs() < 1e-12);
    }
}

#[test]
fn moving_front_density_concentrates() {
    let eps = 0.05;
    let cfg = gl_radial(200, eps, 0.5, 0.1, 200);
    let traj = run(&cfg).unwrap();
    let n = traj.n_steps();
    let full = traj.full_state(n as isize);
    let radius = interface_radius(traj.ops().mesh(), &full).unwrap().radius;
    let density = lagrangian_density(&traj, n).unwrap();
    let frac = concentration_fraction(&traj, &density, radius, 5.0 * eps);
    assert!(frac >= 0.8, "fraction {frac}");
}

#[test]
fn radial_front_tracks_cosine_at_coarse_resolution() {
    let cfg = gl_radial(200, 0.05, 0.4, 0.3, 300);
    let traj = run(&cfg).unwrap();
    let trace = trace_interface(&traj, 0.4, 10);
    assert!(trace.times.len() > 10);
    assert!(trace.measured.iter().all(|m| m.is_some_and(|r| (0.0..=1.0).contains(&r))));
    assert!(trace.max_rel_error_until(0.3) <= 0.1);
}

#[test]
fn no_contact_cases() {
    let ops = line_ops(32, 1.0);
    let v0 = ops.mesh().sample(|x| -4.0 * (std::f64::consts::PI * x).sin());
    let mut cfg = SchemeConfig::new(
        Arc::clone(&ops),
        PotentialSpec::zero(1),
        1.0,
        64,
        DVector::zeros(ops.n_free()),
        v0,
    );
    // never touched
    let far = DVector::from_element(ops.n_free(), -10.0);
    cfg.obstacle = Some(far.clone());
    let traj = run(&cfg).unwrap();
    let tol = traj.records().iter().map(|r| r.tol).fold(0.0, f64::max);
    let nc = no_contact_check(&traj, &far, 0.1);
    assert!(nc.mask.iter().all(|&m| m));
    assert!(nc.max_residual <= tol);
    assert!(no_contact_check(&traj, &far, 100.0).is_empty());

    let g = DVector::from_element(ops.n_free(), -0.5);
    cfg.obstacle = Some(g.clone());
    let traj = run(&cfg).unwrap();
    let tol = traj.records().iter().map(|r| r.tol).fold(0.0, f64::max);
    let nc = no_contact_check(&traj, &g, 0.1);
    let n = nc.mask.len();
    assert!(nc.mask[0] && nc.mask[n - 1]);
    assert!(!nc.mask[n / 2]);
    assert!(nc.max_residual <= 10.0 * tol);
    // contact dissipates
    assert!(energy_drift(&traj).max_drift <= 0.0);
    assert!(energy_drift(&traj).series.last().unwrap() < &0.0);
}
