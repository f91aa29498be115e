//! Scenario files: a versioned TOML description of one experiment.
//!
//! ```toml
//! schema = 1
//! name = "gaussian_1111"
//! kind = "limits"
//! kappa_values = [0.0, 1.0]
//! layout = [1, 1, 1, 1]
//!
//! [blocks]
//! left = [{ family = "rapidity_gaussian", center = 0.0, width = 0.25 }]
//! x = [{ family = "rapidity_gaussian", center = 0.0, width = 0.25 }]
//! y_prime = [{ family = "rapidity_gaussian", center = -0.1, width = 0.25 }]
//! right = [{ family = "rapidity_gaussian", center = 0.2, width = 0.25 }]
//! ```
//!
//! Blocks `left` and `right` carry undeformed fields, `x` fields deformed by
//! `+κ` and `y_prime` fields by `−κ`. A product-defect scenario instead has a
//! `[defect]` table with monomials `a` (deformed by `+κ`) and `b`, where `b`
//! lists the functions whose `J`-conjugated fields form `B`; omitting `b`
//! means `B = J A J`.

use std::path::Path;

use serde::Deserialize;
use warped_fields::correlators::CorrelatorTask;
use warped_fields::fock_oracle::OracleOptions;
use warped_fields::one_particle::{act_translation, hat_transform, RapidityVector, TestFunction1D};
use warped_fields::quad::QuadratureSpec;
use warped_fields::wick::{BlockLayout, Deformation, Field, FieldMonomial};
use warped_fields::Complex64;

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Limits,
    ProductDefect,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: u32,
    pub name: String,
    pub kind: ScenarioKind,
    #[serde(default)]
    pub description: Option<String>,
    pub kappa_values: Vec<f64>,
    pub layout: Option<[usize; 4]>,
    #[serde(default)]
    pub t_grid: Option<Vec<f64>>,
    #[serde(default = "one")]
    pub flow_scale: f64,
    #[serde(default)]
    pub blocks: Blocks,
    #[serde(default)]
    pub defect: Option<DefectSpec>,
    #[serde(default)]
    pub quad: QuadConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub outputs: Outputs,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Blocks {
    #[serde(default)]
    pub left: Vec<FunctionSpec>,
    #[serde(default)]
    pub x: Vec<FunctionSpec>,
    #[serde(default)]
    pub y_prime: Vec<FunctionSpec>,
    #[serde(default)]
    pub right: Vec<FunctionSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefectSpec {
    pub a: Vec<FunctionSpec>,
    #[serde(default)]
    pub b: Option<Vec<FunctionSpec>>,
    #[serde(default = "zero_offset")]
    pub offsets: Vec<f64>,
    /// Minimum `|defect| / error` for a conclusive witness.
    #[serde(default = "default_significance")]
    pub min_significance: f64,
}

fn zero_offset() -> Vec<f64> {
    vec![0.0]
}

fn default_significance() -> f64 {
    10.0
}

/// One field factor: a rapidity vector from a named family, optionally
/// translated along the light ray, entering as a Segal or smeared field.
#[derive(Clone, Debug, Deserialize)]
pub struct FunctionSpec {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default)]
    pub field: FieldKind,
    #[serde(default)]
    pub translate: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `A e^{i k θ} exp(−(θ−c)²/2w²)` directly in rapidity.
    RapidityGaussian {
        center: f64,
        width: f64,
        #[serde(default)]
        momentum: f64,
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        phase: f64,
    },
    /// Hat transform of `A b^{(order)}`, `b` the standard bump on `(lo, hi)`.
    HatBump {
        lo: f64,
        hi: f64,
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        order: usize,
    },
    /// Hat transform of `A g^{(order)}`, `g` a Gaussian on the light ray.
    /// With `normalize` the amplitude is rescaled to unit sup-norm in rapidity.
    HatGaussian {
        center: f64,
        width: f64,
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        order: usize,
        #[serde(default)]
        normalize: bool,
    },
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    /// `a*(ψ) + a(ψ)`.
    #[default]
    Segal,
    /// `a*(ξ) + a(S ξ)`.
    Smeared,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadConfig {
    #[serde(default = "default_points")]
    pub points_per_dim: usize,
    #[serde(default = "default_target")]
    pub target_abs_error: f64,
    #[serde(default = "default_refinements")]
    pub max_refinements: usize,
    #[serde(default = "default_phase_work")]
    pub max_phase_work: f64,
}

fn default_points() -> usize {
    QuadratureSpec::<f64>::default().points_per_dim
}
fn default_target() -> f64 {
    QuadratureSpec::<f64>::default().target_abs_error
}
fn default_refinements() -> usize {
    QuadratureSpec::<f64>::default().max_refinements
}
fn default_phase_work() -> f64 {
    QuadratureSpec::<f64>::default().max_phase_work as f64
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            points_per_dim: default_points(),
            target_abs_error: default_target(),
            max_refinements: default_refinements(),
            max_phase_work: default_phase_work(),
        }
    }
}

/// Fock-oracle settings for `cross-check`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_grid_points")]
    pub points: usize,
    #[serde(default = "default_check_t")]
    pub cross_check_t: Vec<f64>,
    /// Leakage above this fraction of `max(1, |value|)` marks a row inconclusive.
    #[serde(default = "default_leakage")]
    pub leakage_threshold: f64,
}

fn default_grid_points() -> usize {
    OracleOptions::default().points
}
fn default_check_t() -> Vec<f64> {
    vec![0.0, 0.5]
}
fn default_leakage() -> f64 {
    1e-6
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { points: default_grid_points(), cross_check_t: default_check_t(), leakage_threshold: default_leakage() }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

impl Default for Outputs {
    fn default() -> Self {
        Self { formats: default_formats() }
    }
}

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let s: Scenario = toml::from_str(text).map_err(|e| config(format!("scenario parse error: {e}")))?;
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.schema != SCHEMA_VERSION {
            return Err(config(format!("unsupported schema {} (expected {SCHEMA_VERSION})", self.schema)));
        }
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(config(format!("scenario name {:?} must be non-empty [A-Za-z0-9_-]", self.name)));
        }
        if self.kappa_values.is_empty() {
            return Err(config("kappa_values is empty"));
        }
        if let Some(k) = self.kappa_values.iter().find(|k| !k.is_finite() || **k < 0.0) {
            return Err(config(format!("kappa {k} must be finite and non-negative")));
        }
        if !(self.flow_scale.is_finite() && self.flow_scale != 0.0) {
            return Err(config("flow_scale must be finite and nonzero"));
        }
        if self.quad.points_per_dim == 0 || !(self.quad.target_abs_error > 0.0) || !(self.quad.max_phase_work >= 1.0) {
            return Err(config("quad settings must be positive"));
        }
        match self.kind {
            ScenarioKind::Limits => {
                if self.defect.is_some() {
                    return Err(config("a limits scenario has no [defect] table"));
                }
                if let Some(t) = &self.t_grid {
                    if t.is_empty() {
                        return Err(config("t_grid is empty"));
                    }
                    if t.iter().any(|x| !x.is_finite()) {
                        return Err(config("t_grid holds a non-finite value"));
                    }
                }
                let b = &self.blocks;
                let lengths = [b.left.len(), b.x.len(), b.y_prime.len(), b.right.len()];
                match self.layout {
                    Some(l) if l != lengths => {
                        return Err(config(format!("layout {l:?} does not match block lengths {lengths:?}")));
                    }
                    None => return Err(config("limits scenario needs a layout")),
                    _ => {}
                }
                if lengths.iter().sum::<usize>() > warped_fields::wick::MAX_POINTS {
                    return Err(config(format!("layout {lengths:?} exceeds {} points", warped_fields::wick::MAX_POINTS)));
                }
            }
            ScenarioKind::ProductDefect => {
                let d = self.defect.as_ref().ok_or_else(|| config("product-defect scenario needs a [defect] table"))?;
                if d.a.is_empty() {
                    return Err(config("defect.a is empty"));
                }
                if d.offsets.is_empty() || d.offsets.iter().any(|x| !x.is_finite()) {
                    return Err(config("defect.offsets must be a non-empty list of finite values"));
                }
            }
        }
        Ok(())
    }

    pub fn layout(&self) -> Result<BlockLayout, CliError> {
        let [a, n, m, b] = self.layout.ok_or_else(|| config("scenario has no layout"))?;
        Ok(BlockLayout::new(a, n, m, b))
    }

    /// `--quad-points` replaces `points_per_dim`.
    pub fn quadrature(&self, points_override: Option<usize>) -> QuadratureSpec<f64> {
        QuadratureSpec {
            points_per_dim: points_override.unwrap_or(self.quad.points_per_dim),
            target_abs_error: self.quad.target_abs_error,
            max_refinements: self.quad.max_refinements,
            max_phase_work: self.quad.max_phase_work as usize,
            ..QuadratureSpec::default()
        }
    }

    pub fn oracle_options(&self) -> OracleOptions {
        OracleOptions { points: self.grid.points, ..OracleOptions::default() }
    }

    pub fn writes(&self, f: Format) -> bool {
        self.outputs.formats.contains(&f)
    }

    /// The correlator task at deformation strength `kappa`.
    pub fn task(&self, kappa: f64, quad: &QuadratureSpec<f64>) -> Result<CorrelatorTask<f64>, CliError> {
        let b = &self.blocks;
        let fields = |specs: &[FunctionSpec], d: Deformation| -> Result<Vec<Field<f64>>, CliError> {
            specs.iter().map(|s| s.field(d, quad)).collect()
        };
        let task = CorrelatorTask::new(
            fields(&b.left, Deformation::None)?,
            FieldMonomial::new(kappa, fields(&b.x, Deformation::Plus)?),
            FieldMonomial::new(kappa, fields(&b.y_prime, Deformation::Minus)?),
            fields(&b.right, Deformation::None)?,
        )
        .with_quad(quad.clone())
        .with_flow_scale(self.flow_scale);
        let task = match &self.t_grid {
            Some(t) => task.with_t_grid(t.clone()),
            None => task,
        };
        task.validate().map_err(|e| config(e.to_string()))?;
        Ok(task)
    }

    /// `(A, B)` of the product-defect scenario at strength `kappa`.
    pub fn defect_pair(
        &self,
        kappa: f64,
        quad: &QuadratureSpec<f64>,
    ) -> Result<(FieldMonomial<f64>, FieldMonomial<f64>), CliError> {
        let d = self.defect.as_ref().ok_or_else(|| config("scenario has no [defect] table"))?;
        let a: Vec<Field<f64>> = d.a.iter().map(|s| s.field(Deformation::Plus, quad)).collect::<Result<_, _>>()?;
        let b: Vec<Field<f64>> = match &d.b {
            None => a.iter().map(Field::conjugated).collect(),
            Some(specs) => specs.iter().map(|s| s.field(Deformation::Plus, quad).map(|f| f.conjugated())).collect::<Result<_, _>>()?,
        };
        Ok((FieldMonomial::new(kappa, a), FieldMonomial::new(kappa, b)))
    }
}

impl FunctionSpec {
    pub fn vector(&self, quad: &QuadratureSpec<f64>) -> Result<RapidityVector<f64>, CliError> {
        let bad = |e: warped_fields::one_particle::OneParticleError| config(format!("function spec {:?}: {e}", self.family));
        let v = match &self.family {
            Family::RapidityGaussian { center, width, momentum, amplitude, phase } => {
                RapidityVector::gaussian(*center, *width, Complex64::from_polar(*amplitude, *phase), *momentum).map_err(bad)?
            }
            Family::HatBump { lo, hi, amplitude, order } => {
                hat_transform(&TestFunction1D::bump_derivative(*lo, *hi, *amplitude, *order).map_err(bad)?, quad).map_err(bad)?
            }
            Family::HatGaussian { center, width, amplitude, order, normalize } => {
                let make = |amp: f64| -> Result<RapidityVector<f64>, CliError> {
                    hat_transform(&TestFunction1D::gaussian_derivative(*center, *width, amp, *order).map_err(bad)?, quad).map_err(bad)
                };
                let v = make(*amplitude)?;
                if *normalize && v.sup_norm() > 0.0 {
                    make(*amplitude / v.sup_norm())?
                } else {
                    v
                }
            }
        };
        Ok(if self.translate == 0.0 { v } else { act_translation(&v, self.translate) })
    }

    pub fn field(&self, deformation: Deformation, quad: &QuadratureSpec<f64>) -> Result<Field<f64>, CliError> {
        let v = self.vector(quad)?;
        match self.field {
            FieldKind::Segal => Ok(Field::segal(deformation, v)),
            FieldKind::Smeared => Field::smeared(deformation, v).map_err(|e| config(format!("smeared field: {e}"))),
        }
    }
}
