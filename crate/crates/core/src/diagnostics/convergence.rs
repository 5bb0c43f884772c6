use std::thread;

use super::{energy_drift, oracle_mol};
use crate::error::{Error, Result};
use crate::stepper::{run, SchemeConfig};

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub tau: f64,
    /// M-norm distance to the semi-discrete reference at `T`; `None` for
    /// obstacle runs, which have no reference.
    pub error: Option<f64>,
    pub max_drift: f64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ConvergenceReport {
    /// Sorted by `n` ascending.
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of log(error) against log(τ).
    pub error_slope: Option<f64>,
    /// Same for positive drifts.
    pub drift_slope: Option<f64>,
}

impl ConvergenceReport {
    fn from_rows(rows: Vec<ConvergenceRow>) -> Self {
        let errors: Vec<(f64, f64)> = rows
            .iter()
            .filter_map(|r| r.error.filter(|e| *e > 0.0).map(|e| (r.tau, e)))
            .collect();
        let drifts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.max_drift > 0.0)
            .map(|r| (r.tau, r.max_drift))
            .collect();
        Self {
            error_slope: (errors.len() == rows.len()).then(|| loglog_slope(&errors)).flatten(),
            drift_slope: (drifts.len() == rows.len()).then(|| loglog_slope(&drifts)).flatten(),
            rows,
        }
    }

    /// `max_drift / τ` at the finest refinement, clamped at zero.
    pub fn drift_constant(&self) -> Option<f64> {
        self.rows.last().map(|r| r.max_drift.max(0.0) / r.tau)
    }
}

/// Least-squares slope of `log y` against `log x`; `None` with fewer than two points.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    slope.is_finite().then_some(slope)
}

fn study_row(base: &SchemeConfig, n: usize) -> Result<ConvergenceRow> {
    let mut config = base.clone();
    config.n_steps = n;
    let traj = run(&config)?;
    let error = if config.obstacle.is_none() {
        let reference = oracle_mol(&config)?;
        let diff = traj.state(n as isize) - &reference.states[n];
        let nf = config.ops.n_free();
        let mut sq = 0.0;
        for c in 0..config.potential.components() {
            sq += config.ops.mass_norm(&diff.rows(c * nf, nf).into_owned()).powi(2);
        }
        Some(sq.sqrt())
    } else {
        None
    };
    Ok(ConvergenceRow {
        n,
        tau: config.tau(),
        error,
        max_drift: energy_drift(&traj).max_drift,
    })
}

/// Runs `base` at each step count in `n_list` (concurrently) and compares the
/// terminal state with [`oracle_mol`].
pub fn convergence_study(base: &SchemeConfig, n_list: &[usize]) -> Result<ConvergenceReport> {
    if n_list.len() < 3 || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config(
            "convergence study needs at least 3 strictly ascending step counts".into(),
        ));
    }
    let results: Vec<Result<ConvergenceRow>> = thread::scope(|scope| {
        let handles: Vec<_> = n_list
            .iter()
            .map(|&n| scope.spawn(move || study_row(base, n)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("refinement thread panicked"))
            .collect()
    });

    let mut rows = Vec::with_capacity(results.len());
    for (result, &n) in results.into_iter().zip(n_list) {
        match result {
            Ok(row) => rows.push(row),
            Err(e) => {
                return Err(Error::Study {
                    n,
                    partial: Box::new(ConvergenceReport::from_rows(rows)),
                    source: Box::new(e),
                })
            }
        }
    }
    Ok(ConvergenceReport::from_rows(rows))
}
