use crate::error::{Error, Result};

/// Conclusion of the discrete Gronwall inequality: if
/// `y_k ≤ A + (B/N) Σ_{j<k} y_j` for `k < N` then `y_k ≤ A e^B`.
pub fn discrete_gronwall_bound(a: f64, b: f64, n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::Config("Gronwall bound needs N >= 1".into()));
    }
    if !(a >= 0.0 && b >= 0.0) {
        return Err(Error::Config(format!(
            "Gronwall constants must be >= 0, got A = {a}, B = {b}"
        )));
    }
    Ok(a * b.exp())
}

/// The largest sequence satisfying the hypothesis, `y_k = A (1 + B/N)^k`,
/// built by summation.
pub fn gronwall_envelope(a: f64, b: f64, n: usize) -> Vec<f64> {
    let mut seq = Vec::with_capacity(n);
    let mut sum = 0.0;
    for _ in 0..n {
        let y = a + b / n as f64 * sum;
        seq.push(y);
        sum += y;
    }
    seq
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GronwallCheck {
    pub bound: f64,
    pub max_value: f64,
}

/// Verifies the hypothesis for `seq` (with `N = seq.len()`) and that the
/// conclusion holds.
pub fn check_gronwall(seq: &[f64], a: f64, b: f64) -> Result<GronwallCheck> {
    let n = seq.len();
    let bound = discrete_gronwall_bound(a, b, n)?;
    let mut sum = 0.0;
    for (k, &y) in seq.iter().enumerate() {
        let rhs = a + b / n as f64 * sum;
        if y > rhs + 1e-12 * rhs.abs() {
            return Err(Error::HypothesisViolated { index: k });
        }
        sum += y;
    }
    let max_value = seq.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max_value > bound * (1.0 + 1e-12) {
        return Err(Error::Numeric(format!(
            "Gronwall conclusion failed: {max_value} > {bound}"
        )));
    }
    Ok(GronwallCheck { bound, max_value })
}
