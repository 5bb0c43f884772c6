//! Named scenarios.

use serde::{Deserialize, Serialize};

use crate::config::{
    BoundaryValue, GeometryKind, InitialShape, PotentialName, PreconditionName, RunConfig,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Shrinking circular front of the singular-limit experiment.
    GlFront,
    /// Linear wave started on the first eigenmode.
    Eigenmode,
    /// String thrown down onto the flat obstacle `g = −0.5`.
    ObstacleImpact,
    /// Double-well wave from band-limited data.
    Semilinear,
    /// Zero data with the double well; stays at rest.
    Zero,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::GlFront,
        Preset::Eigenmode,
        Preset::ObstacleImpact,
        Preset::Semilinear,
        Preset::Zero,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::GlFront => "gl-front",
            Preset::Eigenmode => "eigenmode",
            Preset::ObstacleImpact => "obstacle-impact",
            Preset::Semilinear => "semilinear",
            Preset::Zero => "zero",
        }
    }

    pub fn config(self) -> RunConfig {
        let base = RunConfig {
            preset: Some(self),
            ..RunConfig::default()
        };
        match self {
            Preset::GlFront => RunConfig {
                geometry: GeometryKind::Radial,
                dim: 2,
                n_cells: 400,
                dirichlet_left: BoundaryValue::FREE,
                dirichlet_right: BoundaryValue::Value(-1.0),
                potential: PotentialName::DoubleWell,
                eps: Some(0.05),
                horizon: 0.45,
                n_steps: 900,
                u0: InitialShape::Front,
                front_radius: Some(0.4),
                precondition: PreconditionName::Spectral,
                ..base
            },
            Preset::Eigenmode => RunConfig {
                n_cells: 64,
                u0: InitialShape::Modes,
                u0_coeffs: vec![1.0],
                ..base
            },
            Preset::ObstacleImpact => RunConfig {
                n_cells: 64,
                v0: InitialShape::Sine,
                v0_amplitude: -4.0,
                obstacle: Some(-0.5),
                ..base
            },
            Preset::Semilinear => RunConfig {
                potential: PotentialName::DoubleWell,
                u0: InitialShape::Modes,
                u0_coeffs: vec![0.5, 0.2],
                ..base
            },
            Preset::Zero => RunConfig {
                potential: PotentialName::DoubleWell,
                n_steps: 16,
                ..base
            },
        }
    }
}
