//! Verification instruments: Gronwall utilities, independent oracles,
//! energy and convergence studies, interface tracking, Ginzburg–Landau
//! accounting and obstacle checks.

mod contact;
mod convergence;
mod ginzburg_landau;
mod gronwall;
mod interface;
mod oracles;

pub use contact::{no_contact_check, NoContact};
pub use convergence::{convergence_study, loglog_slope, ConvergenceReport, ConvergenceRow};
pub use ginzburg_landau::{
    concentration_fraction, gl_energy_accounting, lagrangian_density, GlAccounting,
};
pub use gronwall::{check_gronwall, discrete_gronwall_bound, gronwall_envelope, GronwallCheck};
pub use interface::{
    cosine_reference, interface_radius, trace_interface, InterfaceCrossing, InterfaceTrace,
};
pub use oracles::{oracle_mol, oracle_recurrence, MolReference, MOL_SUBSTEPS};

use crate::stepper::Trajectory;

#[derive(Clone, Debug, PartialEq)]
pub struct EnergyDrift {
    /// `max_i (E_i − E_0)`; zero when the energy never rises.
    pub max_drift: f64,
    /// `E_i − E_0` for `i = 0, …, n`.
    pub series: Vec<f64>,
}

pub fn energy_drift(traj: &Trajectory) -> EnergyDrift {
    let totals: Vec<f64> = traj.energies().iter().map(|e| e.total).collect();
    let series: Vec<f64> = totals.iter().map(|e| e - totals[0]).collect();
    let max_drift = series.iter().copied().fold(0.0, f64::max);
    EnergyDrift { max_drift, series }
}
