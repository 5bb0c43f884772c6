use std::path::Path;
use std::thread;

use log::{info, warn};
use minmove_core::diagnostics::{
    convergence_study, gl_energy_accounting, interface_radius, trace_interface,
    ConvergenceReport,
};
use minmove_core::{run, Trajectory};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{float, io_err, opt_float, write_text, CsvWriter};

pub const EFFECTIVE_CONFIG: &str = "effective_config.toml";

/// Factor applied to the finest-level `max_drift / τ` when echoing the
/// obstacle drift constant.
pub const DRIFT_CONSTANT_SAFETY: f64 = 2.0;

fn prepare(config: &RunConfig, out: &Path) -> Result<(), CliError> {
    for w in config.warnings() {
        warn!("{w}");
    }
    std::fs::create_dir_all(out).map_err(|e| io_err(out, e))?;
    write_text(&out.join(EFFECTIVE_CONFIG), &config.to_toml())
}

/// Runs one trajectory and writes `energy.csv`, `snapshots.csv` and, for
/// radial fronts, `interface.csv`.
pub fn cmd_run(config: &RunConfig, out: &Path) -> Result<Trajectory, CliError> {
    prepare(config, out)?;
    let scheme = config.scheme()?;
    let traj = run(&scheme)?;
    info!(
        "finished {} steps, {} descent iterations",
        traj.n_steps(),
        traj.records().iter().map(|r| r.iterations).sum::<usize>()
    );
    write_energy(&traj, &out.join("energy.csv"))?;
    write_snapshots(&traj, config.snapshot_stride, &out.join("snapshots.csv"))?;
    if config.tracks_interface() {
        let r0 = config.front_radius.expect("validated");
        write_interface(&traj, r0, config.snapshot_stride, &out.join("interface.csv"))?;
    }
    Ok(traj)
}

pub fn write_energy(traj: &Trajectory, path: &Path) -> Result<(), CliError> {
    let mut w = CsvWriter::create(
        path,
        &["step", "t", "kinetic", "fractional", "potential", "total", "residual", "pg_iters"],
    )?;
    for (i, (e, rec)) in traj.energies().iter().zip(traj.records()).enumerate() {
        w.row([
            i.to_string(),
            float(traj.time(i)),
            float(e.kinetic),
            float(e.fractional),
            float(e.potential),
            float(e.total),
            float(rec.residual),
            rec.iterations.to_string(),
        ])?;
    }
    w.finish()
}

pub fn write_snapshots(traj: &Trajectory, stride: usize, path: &Path) -> Result<(), CliError> {
    let nodes = traj.ops().mesh().nodes();
    let m = traj.potential().components();
    let mut header = vec!["x".to_string()];
    for _ in 0..m {
        header.extend(nodes.iter().map(|x| float(*x)));
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut w = CsvWriter::create(path, &header_refs)?;
    for i in (0..=traj.n_steps()).step_by(stride.max(1)) {
        let full = traj.full_state(i as isize);
        w.row(std::iter::once(float(traj.time(i))).chain(full.iter().map(|u| float(*u))))?;
    }
    w.finish()
}

pub fn write_interface(
    traj: &Trajectory,
    r0: f64,
    stride: usize,
    path: &Path,
) -> Result<(), CliError> {
    let trace = trace_interface(traj, r0, stride);
    let mut w = CsvWriter::create(path, &["t", "measured_radius", "reference_radius", "rel_error"])?;
    for k in 0..trace.times.len() {
        w.row([
            float(trace.times[k]),
            float(trace.measured[k].unwrap_or(f64::NAN)),
            float(trace.reference[k]),
            float(trace.rel_errors[k].unwrap_or(f64::NAN)),
        ])?;
    }
    w.finish()
}

/// Runs the convergence study and writes `convergence.csv`.
pub fn cmd_converge(
    config: &RunConfig,
    n_list: &[usize],
    out: &Path,
) -> Result<ConvergenceReport, CliError> {
    prepare(config, out)?;
    let scheme = config.scheme()?;
    let report = convergence_study(&scheme, n_list)?;
    let mut w = CsvWriter::create(&out.join("convergence.csv"), &["n", "tau", "error_T", "max_drift"])?;
    for row in &report.rows {
        w.row([
            row.n.to_string(),
            float(row.tau),
            float(row.error.unwrap_or(f64::NAN)),
            float(row.max_drift),
        ])?;
    }
    w.row([
        "slope".to_string(),
        String::new(),
        opt_float(report.error_slope),
        opt_float(report.drift_slope),
    ])?;
    if config.obstacle.is_some() {
        let c = report.drift_constant().unwrap_or(0.0) * DRIFT_CONSTANT_SAFETY;
        w.row(["C".to_string(), String::new(), String::new(), float(c)])?;
        for row in &report.rows {
            if row.max_drift > c * row.tau {
                warn!("n = {}: drift {} exceeds C·τ = {}", row.n, row.max_drift, c * row.tau);
            }
        }
    }
    w.finish()?;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub eps: f64,
    pub scaled_energy_0: f64,
    pub mm_integral: f64,
    /// NaN when no interface remains.
    pub terminal_radius: f64,
}

/// Ginzburg–Landau accounting for a single run.
pub fn sweep_row(config: &RunConfig) -> Result<SweepRow, CliError> {
    let traj = run(&config.scheme()?)?;
    let acc = gl_energy_accounting(&traj)?;
    let n = traj.n_steps();
    let n_nodes = traj.ops().mesh().n_nodes();
    let full = traj.full_state(n as isize);
    let terminal_radius = interface_radius(traj.ops().mesh(), &full[..n_nodes])
        .map(|c| c.radius)
        .unwrap_or(f64::NAN);
    Ok(SweepRow {
        eps: acc.eps,
        scaled_energy_0: acc.scaled_energy[0],
        mm_integral: acc.modica_mortola,
        terminal_radius,
    })
}

/// Repeats the run for each `eps`, concurrently, and writes `gl_sweep.csv`.
pub fn cmd_sweep_eps(
    config: &RunConfig,
    eps_list: &[f64],
    out: &Path,
) -> Result<Vec<SweepRow>, CliError> {
    if config.eps.is_none() {
        return Err(CliError::Invalid {
            key: "eps".into(),
            message: "sweep-eps needs a Ginzburg–Landau scenario".into(),
        });
    }
    if eps_list.is_empty() {
        return Err(CliError::Invalid {
            key: "eps-list".into(),
            message: "needs at least one value".into(),
        });
    }
    prepare(config, out)?;
    let members: Vec<RunConfig> = eps_list
        .iter()
        .map(|&eps| {
            let c = RunConfig {
                eps: Some(eps),
                ..config.clone()
            };
            c.validate()?;
            for w in c.warnings() {
                warn!("eps = {eps}: {w}");
            }
            Ok(c)
        })
        .collect::<Result<_, CliError>>()?;
    let results: Vec<Result<SweepRow, CliError>> = thread::scope(|scope| {
        let handles: Vec<_> = members
            .iter()
            .map(|c| scope.spawn(move || sweep_row(c)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep member panicked"))
            .collect()
    });
    let rows = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut w = CsvWriter::create(
        &out.join("gl_sweep.csv"),
        &["eps", "scaled_energy_0", "mm_integral", "terminal_radius"],
    )?;
    for r in &rows {
        w.row([
            float(r.eps),
            float(r.scaled_energy_0),
            float(r.mm_integral),
            float(r.terminal_radius),
        ])?;
    }
    w.finish()?;
    Ok(rows)
}
