use crate::error::{Error, Result};
use crate::operators::Mesh1D;
use crate::stepper::Trajectory;

/// Zero crossing of a nodal profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterfaceCrossing {
    /// Innermost crossing, linearly interpolated between bracketing nodes.
    pub radius: f64,
    /// Number of sign changes found.
    pub crossings: usize,
}

/// Scans `u` (one value per mesh node) outward from the first node for a sign
/// change. Returns `None` when `u` keeps one sign.
pub fn interface_radius(mesh: &Mesh1D, u: &[f64]) -> Option<InterfaceCrossing> {
    let r = mesh.nodes();
    assert_eq!(u.len(), r.len(), "profile needs one value per node");
    let mut first = None;
    let mut crossings = 0;
    let mut j = 0;
    while j + 1 < u.len() {
        let (a, b) = (u[j], u[j + 1]);
        let hit = if a == 0.0 {
            Some(r[j])
        } else if a * b < 0.0 {
            Some(r[j] + (r[j + 1] - r[j]) * a / (a - b))
        } else {
            None
        };
        if let Some(x) = hit {
            crossings += 1;
            first.get_or_insert(x);
            // skip over an exact nodal zero so it is counted once
            if b == 0.0 {
                j += 1;
            }
        }
        j += 1;
    }
    if first.is_none() && u[u.len() - 1] == 0.0 {
        first = Some(r[r.len() - 1]);
        crossings = 1;
    }
    first.map(|radius| InterfaceCrossing { radius, crossings })
}

/// Radius `R₀ cos(t/R₀)` of a shrinking circular interface, `0 ≤ t < R₀π/2`.
pub fn cosine_reference(r0: f64, t: f64) -> Result<f64> {
    if r0.is_nan() || r0 <= 0.0 {
        return Err(Error::Domain(format!("R0 must be > 0, got {r0}")));
    }
    if !(t >= 0.0 && t < r0 * std::f64::consts::FRAC_PI_2) {
        return Err(Error::Domain(format!(
            "t = {t} outside [0, R0·π/2) for R0 = {r0}"
        )));
    }
    Ok((r0 * (t / r0).cos()).max(0.0))
}

/// Measured against reference interface positions.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct InterfaceTrace {
    pub times: Vec<f64>,
    pub measured: Vec<Option<f64>>,
    pub reference: Vec<f64>,
    /// `|measured − reference| / R₀`; `None` where no interface was found.
    pub rel_errors: Vec<Option<f64>>,
}

impl InterfaceTrace {
    /// Largest relative error among samples with `t ≤ t_max`; infinite if any
    /// such sample lost its interface.
    pub fn max_rel_error_until(&self, t_max: f64) -> f64 {
        self.times
            .iter()
            .zip(&self.rel_errors)
            .filter(|(t, _)| **t <= t_max)
            .map(|(_, e)| e.unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }
}

/// Samples the interface of component 0 every `stride` steps while the
/// reference is defined.
pub fn trace_interface(traj: &Trajectory, r0: f64, stride: usize) -> InterfaceTrace {
    let stride = stride.max(1);
    let mesh = traj.ops().mesh();
    let n_nodes = mesh.n_nodes();
    let mut trace = InterfaceTrace::default();
    for i in (0..=traj.n_steps()).step_by(stride) {
        let t = traj.time(i);
        let Ok(reference) = cosine_reference(r0, t) else {
            break;
        };
        let full = traj.full_state(i as isize);
        let measured = interface_radius(mesh, &full[..n_nodes]).map(|c| c.radius);
        trace.times.push(t);
        trace.measured.push(measured);
        trace.reference.push(reference);
        trace
            .rel_errors
            .push(measured.map(|m| (m - reference).abs() / r0));
    }
    trace
}
