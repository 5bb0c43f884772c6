//! Pointwise potentials `W: ℝᵐ → [0, ∞)` with Lipschitz gradients.

use crate::error::{Error, Result};

/// Range on which `lipschitz_bound` certifies the double-well constant.
pub const CERTIFIED_RANGE: f64 = 2.0;

const LIPSCHITZ_SAMPLES: usize = 100_000;
const LIPSCHITZ_SAFETY: f64 = 1.1;

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialKind {
    Zero,
    /// `W(u) = c|u|²/2`, `c ≥ 0`.
    Quadratic(f64),
    /// `W(u) = (1 − |u|²)² / (1 + |u|²)`.
    DoubleWell,
    /// `W/ε²` for an inner potential `W`.
    GlScaled { inner: Box<PotentialKind>, eps: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PotentialSpec {
    kind: PotentialKind,
    components: usize,
}

impl PotentialSpec {
    pub fn new(kind: PotentialKind, components: usize) -> Result<Self> {
        if !(1..=2).contains(&components) {
            return Err(Error::Config(format!(
                "potential component count must be 1 or 2, got {components}"
            )));
        }
        validate(&kind)?;
        Ok(Self { kind, components })
    }

    pub fn zero(components: usize) -> Self {
        Self::new(PotentialKind::Zero, components).expect("valid")
    }

    pub fn double_well(components: usize) -> Self {
        Self::new(PotentialKind::DoubleWell, components).expect("valid")
    }

    /// Ginzburg–Landau scaling `W/ε²` of this potential.
    pub fn scaled(self, eps: f64) -> Result<Self> {
        Self::new(
            PotentialKind::GlScaled {
                inner: Box::new(self.kind),
                eps,
            },
            self.components,
        )
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn components(&self) -> usize {
        self.components
    }

    /// ε of a Ginzburg–Landau wrapper and the inner potential.
    pub fn gl_parts(&self) -> Option<(f64, PotentialSpec)> {
        match &self.kind {
            PotentialKind::GlScaled { inner, eps } => Some((
                *eps,
                PotentialSpec {
                    kind: (**inner).clone(),
                    components: self.components,
                },
            )),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.kind {
            PotentialKind::Zero => true,
            PotentialKind::Quadratic(c) => *c == 0.0,
            PotentialKind::DoubleWell => false,
            PotentialKind::GlScaled { inner, .. } => matches!(**inner, PotentialKind::Zero),
        }
    }

    pub fn value(&self, u: &[f64]) -> f64 {
        assert_eq!(u.len(), self.components, "point has wrong dimension");
        let q: f64 = u.iter().map(|x| x * x).sum();
        radial_value(&self.kind, q)
    }

    pub fn gradient(&self, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), self.components, "point has wrong dimension");
        let q: f64 = u.iter().map(|x| x * x).sum();
        let g = 2.0 * radial_slope(&self.kind, q);
        u.iter().map(|x| g * x).collect()
    }

    /// `W(a) − W(b)` without the cancellation of subtracting two values.
    pub fn difference(&self, a: &[f64], b: &[f64]) -> f64 {
        let qa: f64 = a.iter().map(|x| x * x).sum();
        let qb: f64 = b.iter().map(|x| x * x).sum();
        // qa - qb computed from the point difference
        let dq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x + y)).sum();
        radial_difference(&self.kind, qa, qb, dq)
    }

    /// Spectral norm of the Hessian at any point with `|u| = rho`.
    pub fn hessian_bound_at(&self, rho: f64) -> f64 {
        let q = rho * rho;
        let curv = radial_curvature(&self.kind, rho);
        if self.components == 1 {
            curv.abs()
        } else {
            curv.abs().max((2.0 * radial_slope(&self.kind, q)).abs())
        }
    }

    /// Lipschitz constant of ∇W on `|u| ≤ 2`.
    ///
    /// Exact for the zero and quadratic kinds; for the double well it is the
    /// sampled supremum of the Hessian norm times 1.1.
    pub fn lipschitz_bound(&self) -> f64 {
        match &self.kind {
            PotentialKind::Zero => 0.0,
            PotentialKind::Quadratic(c) => *c,
            PotentialKind::DoubleWell => {
                let n = LIPSCHITZ_SAMPLES;
                let sup = (0..n)
                    .map(|j| {
                        let u = -CERTIFIED_RANGE + 2.0 * CERTIFIED_RANGE * j as f64 / (n - 1) as f64;
                        self.hessian_bound_at(u.abs())
                    })
                    .fold(0.0, f64::max);
                LIPSCHITZ_SAFETY * sup
            }
            PotentialKind::GlScaled { .. } => {
                let (eps, inner) = self.gl_parts().expect("scaled");
                inner.lipschitz_bound() / (eps * eps)
            }
        }
    }

    /// Scalar `W` at a point of a one-component potential.
    #[inline]
    pub fn value1(&self, u: f64) -> f64 {
        radial_value(&self.kind, u * u)
    }

    #[inline]
    pub fn derivative1(&self, u: f64) -> f64 {
        2.0 * u * radial_slope(&self.kind, u * u)
    }

    /// `W''` of a one-component potential.
    pub fn second_derivative1(&self, u: f64) -> f64 {
        radial_curvature(&self.kind, u.abs())
    }
}

fn validate(kind: &PotentialKind) -> Result<()> {
    match kind {
        PotentialKind::Zero | PotentialKind::DoubleWell => Ok(()),
        PotentialKind::Quadratic(c) => {
            if c.is_finite() && *c >= 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "quadratic coefficient must be >= 0, got {c}"
                )))
            }
        }
        PotentialKind::GlScaled { inner, eps } => {
            if !(eps.is_finite() && *eps > 0.0) {
                return Err(Error::Config(format!("epsilon must be > 0, got {eps}")));
            }
            validate(inner)
        }
    }
}

// The potentials here depend on u only through q = |u|².

fn radial_value(kind: &PotentialKind, q: f64) -> f64 {
    match kind {
        PotentialKind::Zero => 0.0,
        PotentialKind::Quadratic(c) => 0.5 * c * q,
        PotentialKind::DoubleWell => (1.0 - q) * (1.0 - q) / (1.0 + q),
        PotentialKind::GlScaled { inner, eps } => radial_value(inner, q) / (eps * eps),
    }
}

/// dW/dq
fn radial_slope(kind: &PotentialKind, q: f64) -> f64 {
    match kind {
        PotentialKind::Zero => 0.0,
        PotentialKind::Quadratic(c) => 0.5 * c,
        PotentialKind::DoubleWell => -(1.0 - q) * (3.0 + q) / ((1.0 + q) * (1.0 + q)),
        PotentialKind::GlScaled { inner, eps } => radial_slope(inner, q) / (eps * eps),
    }
}

/// d²W/dρ² along a ray, ρ = |u|.
fn radial_curvature(kind: &PotentialKind, rho: f64) -> f64 {
    match kind {
        PotentialKind::Zero => 0.0,
        PotentialKind::Quadratic(c) => *c,
        PotentialKind::DoubleWell => {
            let q = rho * rho;
            (2.0 * q * q * q + 6.0 * q * q + 30.0 * q - 6.0) / (1.0 + q).powi(3)
        }
        PotentialKind::GlScaled { inner, eps } => radial_curvature(inner, rho) / (eps * eps),
    }
}

fn radial_difference(kind: &PotentialKind, qa: f64, qb: f64, dq: f64) -> f64 {
    match kind {
        PotentialKind::Zero => 0.0,
        PotentialKind::Quadratic(c) => 0.5 * c * dq,
        // (1-q)²/(1+q) = (1+q) - 4 + 4/(1+q)
        PotentialKind::DoubleWell => dq * (1.0 - 4.0 / ((1.0 + qa) * (1.0 + qb))),
        PotentialKind::GlScaled { inner, eps } => {
            radial_difference(inner, qa, qb, dq) / (eps * eps)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fd_gradient(w: &PotentialSpec, u: &[f64]) -> Vec<f64> {
        let h = 1e-6;
        (0..u.len())
            .map(|c| {
                let mut p = u.to_vec();
                let mut m = u.to_vec();
                p[c] += h;
                m[c] -= h;
                (w.value(&p) - w.value(&m)) / (2.0 * h)
            })
            .collect()
    }

    fn all_kinds(m: usize) -> Vec<PotentialSpec> {
        vec![
            PotentialSpec::zero(m),
            PotentialSpec::new(PotentialKind::Quadratic(2.5), m).unwrap(),
            PotentialSpec::double_well(m),
            PotentialSpec::double_well(m).scaled(0.3).unwrap(),
        ]
    }

    #[test]
    fn double_well_values() {
        let w = PotentialSpec::double_well(1);
        assert_eq!(w.value(&[0.0]), 1.0);
        assert_eq!(w.value(&[1.0]), 0.0);
        assert_eq!(w.value(&[-1.0]), 0.0);
        let gl = PotentialSpec::double_well(1).scaled(0.1).unwrap();
        assert!((gl.value(&[0.0]) - 100.0).abs() < 1e-12);
        let w2 = PotentialSpec::double_well(2);
        let s = 0.5_f64.sqrt();
        assert!(w2.value(&[s, s]).abs() < 1e-15);
    }

    #[test]
    fn double_well_gradient_formula() {
        let w = PotentialSpec::double_well(1);
        assert_eq!(w.gradient(&[0.0]), vec![0.0]);
        assert_eq!(w.gradient(&[1.0]), vec![0.0]);
        for &u in &[-1.7, -0.3, 0.2, 0.9, 1.4] {
            let closed = -2.0 * u * (1.0 - u * u) * (3.0 + u * u) / (1.0_f64 + u * u).powi(2);
            assert!((w.derivative1(u) - closed).abs() < 1e-14);
            let fd = fd_gradient(&w, &[u])[0];
            assert!((fd - closed).abs() < 1e-6 * (1.0 + closed.abs()));
        }
        assert_eq!(PotentialSpec::zero(1).gradient(&[0.7]), vec![0.0]);
    }

    #[test]
    fn second_derivative_matches_fd() {
        let w = PotentialSpec::double_well(1);
        assert_eq!(w.second_derivative1(0.0), -6.0);
        assert!((w.second_derivative1(1.0) - 4.0).abs() < 1e-14);
        for &u in &[-1.9, -0.6, 0.1, 1.2] {
            let h = 1e-5;
            let fd = (w.derivative1(u + h) - w.derivative1(u - h)) / (2.0 * h);
            assert!((fd - w.second_derivative1(u)).abs() < 1e-7);
        }
    }

    #[test]
    fn lipschitz_constants() {
        assert_eq!(PotentialSpec::zero(1).lipschitz_bound(), 0.0);
        let q = PotentialSpec::new(PotentialKind::Quadratic(3.0), 1).unwrap();
        assert_eq!(q.lipschitz_bound(), 3.0);

        // independent dense sampling of |W''| by finite differences of W
        let w = PotentialSpec::double_well(1);
        let n = 100_000;
        let h = 1e-4;
        let sup = (0..n)
            .map(|j| {
                let u = -2.0 + 4.0 * j as f64 / (n - 1) as f64;
                ((w.value1(u + h) - 2.0 * w.value1(u) + w.value1(u - h)) / (h * h)).abs()
            })
            .fold(0.0, f64::max);
        assert!((w.lipschitz_bound() - 1.1 * sup).abs() < 1e-4 * sup);
        assert!((w.lipschitz_bound() - 6.6).abs() < 1e-7, "{}", w.lipschitz_bound());

        let gl = PotentialSpec::double_well(1).scaled(0.1).unwrap();
        assert!((gl.lipschitz_bound() - 100.0 * w.lipschitz_bound()).abs() < 1e-9);
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(PotentialSpec::new(PotentialKind::Quadratic(-1.0), 1).is_err());
        assert!(PotentialSpec::new(PotentialKind::DoubleWell, 3).is_err());
        assert!(PotentialSpec::double_well(1).scaled(0.0).is_err());
    }

    fn point(m: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-2.0..2.0f64, m)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn gradient_consistent_and_nonnegative(m in 1usize..=2, seed in point(2)) {
            let u = &seed[..m];
            for w in all_kinds(m) {
                prop_assert!(w.value(u) >= 0.0);
                let g = w.gradient(u);
                let fd = fd_gradient(&w, u);
                let gn = g.iter().map(|x| x * x).sum::<f64>().sqrt();
                for (a, b) in g.iter().zip(&fd) {
                    prop_assert!((a - b).abs() <= 1e-6 * (1.0 + gn), "{a} vs {b}");
                }
            }
        }

        #[test]
        fn lipschitz_property(m in 1usize..=2, x in point(2), y in point(2)) {
            let (x, y) = (&x[..m], &y[..m]);
            let d = x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            prop_assume!(d > 1e-9);
            for w in all_kinds(m) {
                let gx = w.gradient(x);
                let gy = w.gradient(y);
                let dg = gx.iter().zip(&gy).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                prop_assert!(dg <= w.lipschitz_bound() * d + 1e-12);
            }
        }

        #[test]
        fn symmetry(u in -2.0..2.0f64, theta in 0.0..std::f64::consts::TAU, r in 0.0..2.0f64) {
            let w = PotentialSpec::double_well(1);
            prop_assert_eq!(w.value(&[u]), w.value(&[-u]));
            prop_assert_eq!(w.gradient(&[u])[0].abs(), w.gradient(&[-u])[0].abs());
            let w2 = PotentialSpec::double_well(2);
            let a = [r, 0.0];
            let b = [r * theta.cos(), r * theta.sin()];
            prop_assert!((w2.value(&a) - w2.value(&b)).abs() < 1e-12);
            let ga = w2.gradient(&a);
            let gb = w2.gradient(&b);
            let na = (ga[0].powi(2) + ga[1].powi(2)).sqrt();
            let nb = (gb[0].powi(2) + gb[1].powi(2)).sqrt();
            prop_assert!((na - nb).abs() < 1e-12 * (1.0 + na));
        }

        #[test]
        fn accurate_difference(a in -2.0..2.0f64, d in -1e-3..1e-3f64) {
            for w in all_kinds(1) {
                let b = a + d;
                let direct = w.value1(a) - w.value1(b);
                let diff = w.difference(&[a], &[b]);
                prop_assert!((diff - direct).abs() <= 1e-12 * (1.0 + w.value1(a)));
            }
        }
    }
}
