//! Run configuration files.
//!
//! A config is a flat TOML table. An optional `preset` key names a scenario
//! whose values fill every key the file leaves out; keys without a preset
//! fall back to [`RunConfig::default`]. Unknown keys are rejected.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use minmove_core::{
    Dirichlet, Geometry, InitMode, Mesh1D, OperatorSet, PotentialKind, PotentialSpec,
    Preconditioner, SchemeConfig, SolverParams, Tolerance,
};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::presets::Preset;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeometryKind {
    Line,
    Radial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FreeTag {
    Free,
}

/// Endpoint condition: `"free"` or a Dirichlet value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoundaryValue {
    Value(f64),
    Named(FreeTag),
}

impl BoundaryValue {
    pub const FREE: Self = BoundaryValue::Named(FreeTag::Free);

    pub fn value(self) -> Option<f64> {
        match self {
            BoundaryValue::Value(v) => Some(v),
            BoundaryValue::Named(FreeTag::Free) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialName {
    Zero,
    Quadratic,
    DoubleWell,
}

/// Shape of the initial position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialShape {
    Zero,
    /// `Σ_k c_k φ_k` with the coefficients in `*_coeffs`.
    Modes,
    /// `amplitude · sin(π (x − a) / (b − a))`.
    Sine,
    /// `tanh((front_radius − x) / (2 eps))`.
    Front,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitName {
    Standard,
    Smoothed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PreconditionName {
    Off,
    Spectral,
}

/// Fully resolved configuration. This is also the format of the echoed
/// `effective_config.toml`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,

    pub geometry: GeometryKind,
    /// Ambient dimension for radial meshes.
    pub dim: u32,
    pub domain_start: f64,
    pub domain_end: f64,
    pub n_cells: usize,
    /// Fractional order `s`.
    pub order: f64,
    pub dirichlet_left: BoundaryValue,
    pub dirichlet_right: BoundaryValue,

    pub potential: PotentialName,
    pub quadratic_coef: f64,
    /// Ginzburg–Landau scaling; absent means unscaled.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    pub components: usize,

    pub horizon: f64,
    pub n_steps: usize,

    pub u0: InitialShape,
    pub u0_coeffs: Vec<f64>,
    pub u0_amplitude: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub front_radius: Option<f64>,
    pub v0: InitialShape,
    pub v0_coeffs: Vec<f64>,
    pub v0_amplitude: f64,
    pub init_mode: InitName,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub smoothing_modes: Option<usize>,

    /// Constant lower obstacle.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub obstacle: Option<f64>,

    pub tol_abs: f64,
    pub tol_rel: f64,
    pub max_iter: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step0: Option<f64>,
    pub precondition: PreconditionName,

    pub snapshot_stride: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let solver = SolverParams::default();
        Self {
            preset: None,
            geometry: GeometryKind::Line,
            dim: 1,
            domain_start: 0.0,
            domain_end: 1.0,
            n_cells: 32,
            order: 1.0,
            dirichlet_left: BoundaryValue::Value(0.0),
            dirichlet_right: BoundaryValue::Value(0.0),
            potential: PotentialName::Zero,
            quadratic_coef: 0.0,
            eps: None,
            components: 1,
            horizon: 1.0,
            n_steps: 128,
            u0: InitialShape::Zero,
            u0_coeffs: Vec::new(),
            u0_amplitude: 0.0,
            front_radius: None,
            v0: InitialShape::Zero,
            v0_coeffs: Vec::new(),
            v0_amplitude: 0.0,
            init_mode: InitName::Standard,
            smoothing_modes: None,
            obstacle: None,
            tol_abs: solver.tol.abs,
            tol_rel: solver.tol.rel,
            max_iter: solver.max_iter,
            step0: None,
            precondition: PreconditionName::Off,
            snapshot_stride: 10,
            output_dir: None,
        }
    }
}

fn invalid(key: &str, msg: impl fmt::Display) -> CliError {
    CliError::Invalid {
        key: key.to_string(),
        message: msg.to_string(),
    }
}

/// Reads, expands and validates a config file.
pub fn parse_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<RunConfig, CliError> {
    let user: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| CliError::Parse(e.to_string()))?;
    let preset = match user.get("preset") {
        None => None,
        Some(v) => Some(
            Preset::deserialize(v.clone()).map_err(|e| invalid("preset", e.message()))?,
        ),
    };
    let base = preset.map(Preset::config).unwrap_or_default();
    let mut merged = toml::Table::try_from(&base).expect("config serializes");
    for (k, v) in user {
        merged.insert(k, v);
    }
    let config: RunConfig = serde_path_to_error::deserialize(toml::Value::Table(merged))
        .map_err(|e| {
            let key = e.path().to_string();
            let inner = e.into_inner();
            if key == "." {
                CliError::Parse(inner.message().to_string())
            } else if inner.message().starts_with("unknown field") {
                CliError::UnknownKey(key)
            } else {
                invalid(&key, inner.message())
            }
        })?;
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    /// Checks every documented precondition, naming the offending key.
    pub fn validate(&self) -> Result<(), CliError> {
        let finite = |key: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(invalid(key, format!("must be finite, got {v}")))
            }
        };
        finite("domain_start", self.domain_start)?;
        finite("domain_end", self.domain_end)?;
        if self.domain_end <= self.domain_start {
            return Err(invalid("domain_end", "must exceed domain_start"));
        }
        if self.n_cells < 2 {
            return Err(invalid("n_cells", format!("must be >= 2, got {}", self.n_cells)));
        }
        if !(0.0..=1.0).contains(&self.order) {
            return Err(invalid("order", format!("must lie in [0, 1], got {}", self.order)));
        }
        if self.geometry == GeometryKind::Radial {
            if self.dim < 1 {
                return Err(invalid("dim", "must be >= 1"));
            }
            if self.domain_start != 0.0 {
                return Err(invalid("domain_start", "radial meshes start at r = 0"));
            }
            if self.dirichlet_left != BoundaryValue::FREE {
                return Err(invalid(
                    "dirichlet_left",
                    "the radial centre is a free symmetry node",
                ));
            }
        }
        for (key, b) in [
            ("dirichlet_left", self.dirichlet_left),
            ("dirichlet_right", self.dirichlet_right),
        ] {
            if let Some(v) = b.value() {
                finite(key, v)?;
                if v != 0.0 && self.order != 1.0 {
                    return Err(invalid(
                        key,
                        "nonzero Dirichlet data requires order = 1",
                    ));
                }
            }
        }

        if !(self.quadratic_coef >= 0.0 && self.quadratic_coef.is_finite()) {
            return Err(invalid("quadratic_coef", "must be finite and >= 0"));
        }
        if let Some(eps) = self.eps {
            if !(eps > 0.0 && eps.is_finite()) {
                return Err(invalid("eps", format!("must be > 0, got {eps}")));
            }
        }
        if !(1..=2).contains(&self.components) {
            return Err(invalid("components", "must be 1 or 2"));
        }

        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(invalid("horizon", format!("must be > 0, got {}", self.horizon)));
        }
        if self.n_steps < 2 {
            return Err(invalid("n_steps", format!("must be >= 2, got {}", self.n_steps)));
        }

        let n_free = self.mesh()?.n_free();
        for (key_shape, shape, key_coeffs, coeffs, key_amp, amp) in [
            ("u0", self.u0, "u0_coeffs", &self.u0_coeffs, "u0_amplitude", self.u0_amplitude),
            ("v0", self.v0, "v0_coeffs", &self.v0_coeffs, "v0_amplitude", self.v0_amplitude),
        ] {
            finite(key_amp, amp)?;
            if let Some(c) = coeffs.iter().find(|c| !c.is_finite()) {
                return Err(invalid(key_coeffs, format!("must be finite, got {c}")));
            }
            match shape {
                InitialShape::Modes if coeffs.is_empty() => {
                    return Err(invalid(key_coeffs, "needs at least one coefficient"));
                }
                InitialShape::Modes if coeffs.len() > n_free => {
                    return Err(invalid(
                        key_coeffs,
                        format!("the mesh has only {n_free} modes"),
                    ));
                }
                InitialShape::Front if key_shape == "v0" => {
                    return Err(invalid("v0", "a front is only available for u0"));
                }
                InitialShape::Front => {
                    let r = self
                        .front_radius
                        .ok_or_else(|| invalid("front_radius", "required when u0 = \"front\""))?;
                    finite("front_radius", r)?;
                    if self.eps.is_none() {
                        return Err(invalid("eps", "required when u0 = \"front\""));
                    }
                }
                _ => {}
            }
        }
        if self.smoothing_modes == Some(0) {
            return Err(invalid("smoothing_modes", "must be >= 1"));
        }

        if let Some(g) = self.obstacle {
            finite("obstacle", g)?;
            if self.components != 1 {
                return Err(invalid("obstacle", "obstacle runs require components = 1"));
            }
            if self.precondition == PreconditionName::Spectral {
                return Err(invalid(
                    "precondition",
                    "spectral preconditioning is not available with an obstacle",
                ));
            }
        }

        for (key, v) in [("tol_abs", self.tol_abs), ("tol_rel", self.tol_rel)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(key, format!("must be finite and >= 0, got {v}")));
            }
        }
        if self.tol_abs == 0.0 && self.tol_rel == 0.0 {
            return Err(invalid("tol_abs", "tol_abs and tol_rel cannot both be zero"));
        }
        if self.max_iter < 1 {
            return Err(invalid("max_iter", "must be >= 1"));
        }
        if let Some(a) = self.step0 {
            if !(a > 0.0 && a.is_finite()) {
                return Err(invalid("step0", format!("must be > 0, got {a}")));
            }
        }
        if self.snapshot_stride < 1 {
            return Err(invalid("snapshot_stride", "must be >= 1"));
        }
        Ok(())
    }

    /// Advisory messages, currently only the interface resolution rule.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let (Some(eps), Ok(mesh)) = (self.eps, self.mesh()) {
            let h = mesh.max_spacing();
            if h > eps / 2.0 {
                out.push(format!(
                    "resolution rule h <= eps/2 violated: h = {h}, eps = {eps}"
                ));
            }
        }
        out
    }

    pub fn mesh(&self) -> Result<Mesh1D, CliError> {
        let geometry = match self.geometry {
            GeometryKind::Line => Geometry::Line,
            GeometryKind::Radial => Geometry::Radial { dim: self.dim },
        };
        let dirichlet = Dirichlet {
            left: self.dirichlet_left.value(),
            right: self.dirichlet_right.value(),
        };
        Mesh1D::uniform(
            self.domain_start,
            self.domain_end,
            self.n_cells,
            geometry,
            dirichlet,
        )
        .map_err(|e| invalid("n_cells", e))
    }

    pub fn potential_spec(&self) -> Result<PotentialSpec, CliError> {
        let kind = match self.potential {
            PotentialName::Zero => PotentialKind::Zero,
            PotentialName::Quadratic => PotentialKind::Quadratic(self.quadratic_coef),
            PotentialName::DoubleWell => PotentialKind::DoubleWell,
        };
        let spec = PotentialSpec::new(kind, self.components).map_err(|e| invalid("potential", e))?;
        match self.eps {
            Some(eps) => spec.scaled(eps).map_err(|e| invalid("eps", e)),
            None => Ok(spec),
        }
    }

    pub fn solver_params(&self) -> SolverParams {
        SolverParams {
            tol: Tolerance {
                abs: self.tol_abs,
                rel: self.tol_rel,
            },
            max_iter: self.max_iter,
            step0: self.step0,
            precondition: match self.precondition {
                PreconditionName::Off => Preconditioner::Off,
                PreconditionName::Spectral => Preconditioner::Spectral,
            },
            ..SolverParams::default()
        }
    }

    /// Whether `interface.csv` applies: a Ginzburg–Landau front on a radial mesh.
    pub fn tracks_interface(&self) -> bool {
        self.geometry == GeometryKind::Radial && self.eps.is_some() && self.u0 == InitialShape::Front
    }

    fn initial(
        &self,
        ops: &OperatorSet,
        shape: InitialShape,
        coeffs: &[f64],
        amplitude: f64,
    ) -> DVector<f64> {
        let mesh = ops.mesh();
        let block = match shape {
            InitialShape::Zero => DVector::zeros(ops.n_free()),
            InitialShape::Modes => coeffs
                .iter()
                .enumerate()
                .fold(DVector::zeros(ops.n_free()), |acc, (k, c)| acc + ops.mode(k) * *c),
            InitialShape::Sine => {
                let (a, b) = (self.domain_start, self.domain_end);
                mesh.sample(|x| amplitude * (PI * (x - a) / (b - a)).sin())
            }
            InitialShape::Front => {
                let r0 = self.front_radius.unwrap_or_default();
                let eps = self.eps.unwrap_or(1.0);
                mesh.sample(|x| ((r0 - x) / (2.0 * eps)).tanh())
            }
        };
        // later components start at rest
        let mut full = DVector::zeros(ops.n_free() * self.components);
        full.rows_mut(0, ops.n_free()).copy_from(&block);
        full
    }

    /// Builds the operators and the scheme configuration.
    pub fn scheme(&self) -> Result<SchemeConfig, CliError> {
        self.validate()?;
        let mesh = self.mesh()?;
        let ops = Arc::new(OperatorSet::new(mesh, self.order).map_err(|e| invalid("order", e))?);
        self.scheme_with(ops)
    }

    /// As [`scheme`](Self::scheme) but reusing prebuilt operators.
    pub fn scheme_with(&self, ops: Arc<OperatorSet>) -> Result<SchemeConfig, CliError> {
        let u0 = self.initial(&ops, self.u0, &self.u0_coeffs, self.u0_amplitude);
        let v0 = self.initial(&ops, self.v0, &self.v0_coeffs, self.v0_amplitude);
        let n_free = ops.n_free();
        let mut cfg = SchemeConfig::new(
            Arc::clone(&ops),
            self.potential_spec()?,
            self.horizon,
            self.n_steps,
            u0,
            v0,
        );
        cfg.obstacle = self.obstacle.map(|g| DVector::from_element(n_free, g));
        cfg.init_mode = match self.init_mode {
            InitName::Standard => InitMode::Standard,
            InitName::Smoothed => InitMode::Smoothed {
                k_max: self.smoothing_modes,
            },
        };
        cfg.solver = self.solver_params();
        if let Some(g) = self.obstacle {
            if cfg.u0.iter().any(|u| *u < g) {
                return Err(invalid("obstacle", "u0 lies below the obstacle"));
            }
        }
        cfg.validate().map_err(CliError::from)?;
        Ok(cfg)
    }

    /// The echoed effective config; re-parses to `self`.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
