//! TOML configuration files. Unknown keys are rejected everywhere.

use std::path::Path;

use blowup_core::certificate::CertificateOptions;
use blowup_core::function::FieldFn;
use blowup_core::multiplier::Symbol;
use blowup_core::simulator::{Diagnostic, Integrator, Scenario, Thresholds};
use blowup_core::{Domain, Grid, MultiplierOp};
use serde::{Deserialize, Serialize};

use crate::checks::CheckConfig;
use crate::error::{CliError, Result};
use crate::expr;
use crate::SCHEMA_VERSION;

pub fn read_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    toml::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

fn check_schema(found: u32) -> Result<()> {
    if found != SCHEMA_VERSION {
        return Err(CliError::config(format!(
            "schema_version {found} is not supported (expected {SCHEMA_VERSION})"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// `torus` or `line`.
    pub domain: String,
    pub dim: usize,
    pub points: usize,
    /// Box half-width for `line`.
    pub half_width: Option<f64>,
}

impl GridConfig {
    pub fn build(&self) -> Result<Grid> {
        let grid = match self.domain.as_str() {
            "torus" => {
                if self.half_width.is_some() {
                    return Err(CliError::config("half_width only applies to line grids"));
                }
                Grid::torus(self.dim, self.points)
            }
            "line" => {
                let half = self
                    .half_width
                    .ok_or_else(|| CliError::config("line grids need half_width"))?;
                Grid::line(self.dim, self.points, half)
            }
            other => return Err(CliError::config(format!("unknown domain `{other}` (torus, line)"))),
        };
        grid.map_err(|e| CliError::config(e.to_string()))
    }
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    /// `exponential_euler` or `rk4`.
    #[serde(default = "default_method")]
    pub method: String,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "one")]
    pub sample_every: usize,
    #[serde(default = "twelve")]
    pub bisection_depth: usize,
}

fn default_method() -> String {
    "exponential_euler".into()
}

fn one() -> usize {
    1
}

fn twelve() -> usize {
    12
}

#[derive(Debug, Clone, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DetectionConfig {
    pub sup_growth: Option<f64>,
    pub spectral_tail: Option<f64>,
    pub max_halvings: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CertificateConfig {
    /// Catalog weight pair name.
    pub weight: Option<String>,
    /// Closed-form `W₂`; `W₁ = R*(W₂)` is then computed spectrally.
    pub w2: Option<String>,
    /// Quadrature base grid; defaults to the scenario grid.
    pub grid: Option<GridConfig>,
    pub levels: Option<usize>,
    pub clip_floor: Option<f64>,
    pub clip_tolerance: Option<f64>,
    pub sign_tolerance: Option<f64>,
    pub convergence_tolerance: Option<f64>,
}

impl CertificateConfig {
    pub fn options(&self) -> CertificateOptions {
        let d = CertificateOptions::default();
        CertificateOptions {
            clip_floor: self.clip_floor.unwrap_or(d.clip_floor),
            clip_tolerance: self.clip_tolerance.unwrap_or(d.clip_tolerance),
            sign_tolerance: self.sign_tolerance.unwrap_or(d.sign_tolerance),
            convergence_tolerance: self.convergence_tolerance.unwrap_or(d.convergence_tolerance),
            levels: self.levels.unwrap_or(d.levels),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MonitorConfig {
    /// Samples with `t ≤ until` are checked against `c*/(1 - c* t)`.
    pub until: f64,
    #[serde(default = "monitor_tolerance")]
    pub relative_tolerance: f64,
}

fn monitor_tolerance() -> f64 {
    1e-3
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    /// `value` (use `blowup_time`), `clm_sine` (`t = 2`, from `ω₀ = -sin x`)
    /// or `characteristics` (`1/max ω₀'`).
    pub kind: String,
    pub blowup_time: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub seed: Option<u64>,
    pub grid: GridConfig,
    pub operator: String,
    /// Initial datum `ω₀(x, y)`.
    pub initial: String,
    pub integrator: Option<IntegratorConfig>,
    #[serde(default)]
    pub detection: DetectionConfig,
    pub diagnostics: Option<Vec<String>>,
    pub certificate: Option<CertificateConfig>,
    pub monitor: Option<MonitorConfig>,
    pub oracle: Option<OracleConfig>,
    #[serde(default, rename = "check")]
    pub checks: Vec<CheckConfig>,
}

/// A scenario config with every physical parameter validated.
#[derive(Debug, Clone)]
pub struct Validated {
    pub config: ScenarioConfig,
    pub grid: Grid,
    pub operator: MultiplierOp,
    pub scenario: Option<Scenario>,
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self> {
        read_toml(path)
    }

    /// Builds and validates everything a run needs, without executing it.
    pub fn validate(&self) -> Result<Validated> {
        check_schema(self.schema_version)?;
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(CliError::config(format!("invalid scenario name `{}`", self.name)));
        }
        let grid = self.grid.build()?;
        let operator = MultiplierOp::by_name(&self.operator).map_err(|e| CliError::config(e.to_string()))?;
        operator.check_dim(&grid).map_err(|e| CliError::config(e.to_string()))?;
        let initial = expr::field_fn(&self.initial)?;
        initial.sample(&grid).map_err(|e| CliError::config(format!("initial: {e}")))?;

        if let Some(cert) = &self.certificate {
            match (&cert.weight, &cert.w2) {
                (Some(_), Some(_)) => return Err(CliError::config("certificate: give either weight or w2, not both")),
                (None, None) => return Err(CliError::config("certificate: weight or w2 is required")),
                (None, Some(w2)) => {
                    expr::field_fn(w2)?;
                }
                (Some(name), None) => {
                    blowup_core::weights::catalog_pair(name).map_err(|e| CliError::config(e.to_string()))?;
                }
            }
            if let Some(g) = &cert.grid {
                g.build()?;
            }
            let o = cert.options();
            if o.levels < 3 {
                return Err(CliError::config("certificate.levels must be at least 3"));
            }
        }

        let scenario = match &self.integrator {
            None => None,
            Some(ic) => {
                let mut s = Scenario::new(grid, operator.clone(), initial, ic.dt, ic.t_end);
                s.integrator = match ic.method.as_str() {
                    "exponential_euler" => Integrator::ExponentialEuler,
                    "rk4" => Integrator::Rk4,
                    other => {
                        return Err(CliError::config(format!(
                            "unknown integrator `{other}` (exponential_euler, rk4)"
                        )))
                    }
                };
                s.sample_every = ic.sample_every;
                s.bisection_depth = ic.bisection_depth;
                let d = Thresholds::default();
                s.thresholds = Thresholds {
                    sup_growth: self.detection.sup_growth.unwrap_or(d.sup_growth),
                    spectral_tail: self.detection.spectral_tail.unwrap_or(d.spectral_tail),
                    max_halvings: self.detection.max_halvings.unwrap_or(d.max_halvings),
                };
                if let Some(list) = &self.diagnostics {
                    s.diagnostics = list
                        .iter()
                        .map(|n| {
                            Diagnostic::from_name(n).ok_or_else(|| CliError::config(format!("unknown diagnostic `{n}`")))
                        })
                        .collect::<Result<_>>()?;
                }
                if s.diagnostics.contains(&Diagnostic::MFunctional) {
                    let cert = self
                        .certificate
                        .as_ref()
                        .ok_or_else(|| CliError::config("M_functional needs a [certificate] section"))?;
                    s.weight_pair = Some(weight_pair(cert, &operator, &grid)?);
                }
                s.validate().map_err(|e| CliError::config(e.to_string()))?;
                Some(s)
            }
        };
        if self.monitor.is_some() && self.certificate.is_none() {
            return Err(CliError::config("[monitor] needs a [certificate] section"));
        }
        if let Some(m) = &self.monitor {
            if scenario.is_none() {
                return Err(CliError::config("[monitor] needs an [integrator] section"));
            }
            let has_m = self.diagnostics.as_ref().is_some_and(|d| d.iter().any(|n| n == "M_functional" || n == "M"));
            if !has_m {
                return Err(CliError::config("[monitor] needs the M_functional diagnostic"));
            }
            if !(m.until > 0.0 && m.relative_tolerance >= 0.0) {
                return Err(CliError::config("monitor.until must be positive"));
            }
        }
        if let Some(o) = &self.oracle {
            match (o.kind.as_str(), o.blowup_time) {
                ("value", Some(t)) if t > 0.0 => {}
                ("value", _) => return Err(CliError::config("oracle kind `value` needs a positive blowup_time")),
                ("characteristics", None) => {
                    if !matches!(operator.symbol(), Symbol::Derivative { axis: 0 }) || grid.dim() != 1 {
                        return Err(CliError::config("the characteristics oracle needs dx on a 1-D grid"));
                    }
                }
                ("clm_sine", None) => {
                    let sine = FieldFn::closed("-sin(x)", |[x, _]| -x.sin()).sample(&grid)?;
                    let data = expr::field_fn(&self.initial)?.sample(&grid)?;
                    let off = data.values().iter().zip(sine.values()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                    if !matches!(operator.symbol(), Symbol::Hilbert) || grid.domain() != Domain::Torus || off > 1e-12 {
                        return Err(CliError::config("the clm_sine oracle needs hilbert, a torus and ω₀ = -sin(x)"));
                    }
                }
                ("clm_sine" | "characteristics", Some(_)) => {
                    return Err(CliError::config(format!("oracle kind `{}` computes blowup_time itself", o.kind)))
                }
                (other, _) => return Err(CliError::config(format!("unknown oracle kind `{other}`"))),
            }
        }
        for c in &self.checks {
            c.validate()?;
        }
        Ok(Validated {
            config: self.clone(),
            grid,
            operator,
            scenario,
        })
    }
}

/// The weight pair a certificate section asks for. Catalog pairs keep their
/// own operator, which must match the scenario's.
pub fn weight_pair(
    cert: &CertificateConfig,
    operator: &MultiplierOp,
    grid: &Grid,
) -> Result<blowup_core::WeightPair> {
    match (&cert.weight, &cert.w2) {
        (Some(name), None) => {
            let pair = blowup_core::weights::catalog_pair(name).map_err(|e| CliError::config(e.to_string()))?;
            if pair.operator.name() != operator.name() {
                return Err(CliError::config(format!(
                    "weight pair `{name}` belongs to {}, the scenario uses {}",
                    pair.operator.name(),
                    operator.name()
                )));
            }
            Ok(pair)
        }
        (None, Some(w2)) => {
            let base = match &cert.grid {
                Some(g) => g.build()?,
                None => *grid,
            };
            Ok(blowup_core::weights::numeric_weight(operator, &expr::field_fn(w2)?, &base)?)
        }
        _ => Err(CliError::config("certificate: give exactly one of weight and w2")),
    }
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RadialGridConfig {
    pub r_min: f64,
    pub r_max: f64,
    pub nodes: usize,
}

impl RadialGridConfig {
    pub fn build(&self) -> Result<blowup_core::polar::radial::RadialGrid> {
        blowup_core::polar::radial::RadialGrid::log_spaced(self.r_min, self.r_max, self.nodes)
            .map_err(|e| CliError::config(e.to_string()))
    }
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct StreamConfig {
    pub grid: RadialGridConfig,
    /// Smooth test profiles `ω₂(r)` for the 𝒮 identity and the mode solver.
    pub profiles: Vec<String>,
    pub s_radii: Vec<f64>,
    /// Modes `k` checked against the mode equation and the Green's form.
    pub modes: Vec<usize>,
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConeConfig {
    pub k_max: usize,
    pub samples: usize,
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OperatorsConfig {
    pub grid: RadialGridConfig,
    pub c: f64,
    pub big_c: f64,
    pub pairs: usize,
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    pub alphas: Vec<f64>,
    pub c: f64,
    pub big_c: f64,
    pub grid: RadialGridConfig,
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct HaConfig {
    /// A number, or omitted to use the first passing α of the dominance scan.
    pub alpha: Option<f64>,
    pub points: usize,
    pub half_width: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub annulus: [f64; 2],
    pub tolerance: f64,
    /// `polynomial_bump` or `smooth_bump`.
    #[serde(default = "default_shape")]
    pub shape: String,
    /// α values for the mass-ratio trend.
    #[serde(default)]
    pub mass_alphas: Vec<f64>,
}

fn default_shape() -> String {
    "polynomial_bump".into()
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct KeyBoundConfig {
    pub operator: String,
    pub grid: GridConfig,
    /// `F₀(r)`.
    pub radial: String,
    #[serde(default = "smooth_shape")]
    pub shape: String,
    pub dt: f64,
    pub t_end: f64,
    pub interval: f64,
    pub alpha: f64,
    pub c: f64,
    pub big_c: f64,
    pub radial_grid: RadialGridConfig,
    pub angular_samples: usize,
    #[serde(default = "half")]
    pub floor_fraction: f64,
}

fn smooth_shape() -> String {
    "smooth_bump".into()
}

fn half() -> f64 {
    0.5
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PolarConfig {
    pub schema_version: u32,
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub seed: Option<u64>,
    pub stream: Option<StreamConfig>,
    pub cone: Option<ConeConfig>,
    pub operators: Option<OperatorsConfig>,
    pub weight: Option<WeightConfig>,
    pub ha: Option<HaConfig>,
    pub key_bound: Option<KeyBoundConfig>,
    #[serde(default, rename = "check")]
    pub checks: Vec<CheckConfig>,
}

impl PolarConfig {
    pub fn load(path: &Path) -> Result<Self> {
        read_toml(path)
    }

    pub fn validate(&self) -> Result<()> {
        check_schema(self.schema_version)?;
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(CliError::config(format!("invalid scenario name `{}`", self.name)));
        }
        if let Some(s) = &self.stream {
            s.grid.build()?;
            for p in &s.profiles {
                expr::radial_fn(p)?;
            }
            if s.modes.contains(&0) {
                return Err(CliError::config("stream.modes lists k ≥ 1"));
            }
        }
        if let Some(o) = &self.operators {
            o.grid.build()?;
            if o.pairs == 0 {
                return Err(CliError::config("operators.pairs must be positive"));
            }
        }
        if let Some(w) = &self.weight {
            w.grid.build()?;
            for &a in &w.alphas {
                blowup_core::polar::weight::singular_weight(a).map_err(|e| CliError::config(e.to_string()))?;
            }
            if !(w.c >= 0.0 && w.big_c >= 0.0) {
                return Err(CliError::config("weight.c and weight.big_c must be non-negative"));
            }
        }
        if let Some(h) = &self.ha {
            if h.alpha.is_none() && self.weight.is_none() {
                return Err(CliError::config("ha.alpha is required without a [weight] scan"));
            }
            shape(&h.shape)?;
            Grid::line(2, h.points, h.half_width).map_err(|e| CliError::config(e.to_string()))?;
        }
        if let Some(k) = &self.key_bound {
            k.grid.build()?;
            k.radial_grid.build()?;
            shape(&k.shape)?;
            expr::radial_fn(&k.radial)?;
            MultiplierOp::by_name(&k.operator).map_err(|e| CliError::config(e.to_string()))?;
        }
        for c in &self.checks {
            c.validate()?;
        }
        Ok(())
    }
}

pub fn shape(name: &str) -> Result<blowup_core::polar::cone::ConeShape> {
    blowup_core::polar::cone::ConeShape::from_name(name)
        .ok_or_else(|| CliError::config(format!("unknown cone shape `{name}` (polynomial_bump, smooth_bump)")))
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    /// `run`, `certify` or `polar`.
    pub verb: String,
    /// Path relative to the manifest.
    pub config: String,
    /// Status the scenario is expected to end with.
    #[serde(default = "ok")]
    pub expect: String,
    /// Acceptance criteria that fail when the status differs from `expect`.
    #[serde(default)]
    pub criteria: Vec<u32>,
}

fn ok() -> String {
    "ok".into()
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub schema_version: u32,
    pub name: String,
    #[serde(default, rename = "scenario")]
    pub scenarios: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let m: Manifest = read_toml(path)?;
        check_schema(m.schema_version)?;
        for e in &m.scenarios {
            if !["run", "certify", "polar"].contains(&e.verb.as_str()) {
                return Err(CliError::config(format!("unknown verb `{}` in manifest", e.verb)));
            }
            if crate::Status::from_name(&e.expect).is_none() {
                return Err(CliError::config(format!("unknown expected status `{}`", e.expect)));
            }
        }
        Ok(m)
    }
}
