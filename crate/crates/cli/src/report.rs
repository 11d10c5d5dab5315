//! The JSON report shared by every verb.

use blowup_core::certificate::{BlowupCertificate, CertificateOptions, HypothesisReport};
use blowup_core::simulator::{Termination, Trajectory, Trigger};
use blowup_core::weights::MassMethod;
use blowup_core::{Domain, Grid};
use serde::Serialize;

use crate::checks::{CheckOutcome, Quantities};
use crate::error::{CliError, Status};
use crate::{SCHEMA_VERSION, TOOL_NAME, TOOL_VERSION};

#[derive(Debug, Clone, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorInfo {
    pub kind: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: Tool,
    pub verb: String,
    pub name: String,
    pub config_path: String,
    /// The parsed configuration, echoed back.
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub status: Status,
    pub exit_code: u8,
    pub error: Option<ErrorInfo>,
    pub certificate: Option<CertificateSection>,
    pub trajectory: Option<TrajectorySection>,
    pub monitor: Option<MonitorSection>,
    pub oracle: Option<OracleSection>,
    pub polar: Option<serde_json::Value>,
    pub quantities: Quantities,
    pub checks: Vec<CheckOutcome>,
    pub warnings: Vec<String>,
    /// Files written next to the report, relative to the output directory.
    pub files: Vec<String>,
    pub wall_clock_seconds: f64,
}

impl Report {
    pub fn new(verb: &str, name: &str, config_path: &str) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            tool: Tool {
                name: TOOL_NAME,
                version: TOOL_VERSION,
            },
            verb: verb.into(),
            name: name.into(),
            config_path: config_path.into(),
            config: serde_json::Value::Null,
            seed: None,
            status: Status::Ok,
            exit_code: 0,
            error: None,
            certificate: None,
            trajectory: None,
            monitor: None,
            oracle: None,
            polar: None,
            quantities: Quantities::new(),
            checks: Vec::new(),
            warnings: Vec::new(),
            files: Vec::new(),
            wall_clock_seconds: 0.0,
        }
    }

    pub fn set_status(&mut self, status: Status) {
        self.status = status;
        self.exit_code = status.exit_code();
    }

    pub fn fail(&mut self, error: &CliError) {
        self.set_status(error.status());
        self.error = Some(ErrorInfo {
            kind: error.kind(),
            message: error.to_string(),
        });
    }

    /// Applies check outcomes and `--strict` to an otherwise successful run.
    pub fn settle(&mut self, strict: bool) {
        if self.status != Status::Ok {
            return;
        }
        if self.checks.iter().any(|c| !c.passed) {
            self.set_status(Status::ChecksFailed);
        } else if strict && !self.warnings.is_empty() {
            self.set_status(Status::StrictWarnings);
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GridInfo {
    pub domain: &'static str,
    pub dim: usize,
    pub points_per_axis: usize,
    pub half_width: Option<f64>,
    pub period: f64,
    pub spacing: f64,
}

impl From<&Grid> for GridInfo {
    fn from(g: &Grid) -> Self {
        let (domain, half_width) = match g.domain() {
            Domain::Torus => ("torus", None),
            Domain::Line { half_width } => ("line", Some(half_width)),
        };
        GridInfo {
            domain,
            dim: g.dim(),
            points_per_axis: g.points_per_axis(),
            half_width,
            period: g.period(),
            spacing: g.spacing(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalizationInfo {
    pub mass: f64,
    /// `exact` or `quadrature`.
    pub method: &'static str,
    pub quadrature_points_per_axis: Option<usize>,
    pub quadrature_half_width: Option<f64>,
    pub exact_mass: Option<f64>,
    pub deficit: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelInfo {
    pub points_per_axis: usize,
    pub jensen: f64,
    pub pairing: f64,
    pub clipped: usize,
    pub excluded: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptionsInfo {
    pub clip_floor: f64,
    pub clip_tolerance: f64,
    pub sign_tolerance: f64,
    pub convergence_tolerance: f64,
    pub levels: usize,
}

impl From<&CertificateOptions> for OptionsInfo {
    fn from(o: &CertificateOptions) -> Self {
        OptionsInfo {
            clip_floor: o.clip_floor,
            clip_tolerance: o.clip_tolerance,
            sign_tolerance: o.sign_tolerance,
            convergence_tolerance: o.convergence_tolerance,
            levels: o.levels,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateSection {
    pub operator: String,
    pub weight: String,
    pub provenance: &'static str,
    pub quadrature_grid: GridInfo,
    pub weight_grid: GridInfo,
    pub normalization: NormalizationInfo,
    pub options: OptionsInfo,
    pub sign_ok: bool,
    pub min_product: f64,
    pub product_scale: f64,
    pub pairing: f64,
    pub jensen_integral: f64,
    pub jensen_error_estimate: f64,
    pub integrable: bool,
    pub clipped_nodes: usize,
    pub levels: Vec<LevelInfo>,
    pub notes: Vec<String>,
    pub issued: bool,
    pub refused_condition: Option<String>,
    pub refusal_detail: Option<String>,
    pub c_star: Option<f64>,
    pub t_bound: Option<f64>,
}

impl CertificateSection {
    pub fn new(report: &HypothesisReport, weight: String, certificate: Option<&BlowupCertificate>) -> Self {
        let n = &report.normalization;
        let (method, qp, qh) = match n.method {
            MassMethod::Exact => ("exact", None, None),
            MassMethod::Quadrature {
                points_per_axis,
                half_width,
            } => ("quadrature", Some(points_per_axis), half_width),
        };
        let failing = report.failing_condition();
        CertificateSection {
            operator: report.operator.clone(),
            weight,
            provenance: report.provenance.as_str(),
            quadrature_grid: (&report.grid).into(),
            weight_grid: (&report.grid).into(),
            normalization: NormalizationInfo {
                mass: n.mass,
                method,
                quadrature_points_per_axis: qp,
                quadrature_half_width: qh,
                exact_mass: n.exact_mass,
                deficit: n.deficit(),
            },
            options: (&report.options).into(),
            sign_ok: report.sign_ok,
            min_product: report.min_product,
            product_scale: report.product_scale,
            pairing: report.pairing,
            jensen_integral: report.jensen_integral,
            jensen_error_estimate: report.jensen_error_estimate,
            integrable: report.integrable,
            clipped_nodes: report.clipped_nodes,
            levels: report
                .levels
                .iter()
                .map(|l| LevelInfo {
                    points_per_axis: l.points_per_axis,
                    jensen: l.jensen,
                    pairing: l.pairing,
                    clipped: l.clipped,
                    excluded: l.excluded,
                })
                .collect(),
            notes: report.notes.clone(),
            issued: certificate.is_some(),
            refused_condition: failing.as_ref().map(|(c, _)| (*c).to_string()),
            refusal_detail: failing.map(|(_, d)| d),
            c_star: certificate.map(|c| c.c_star),
            t_bound: certificate.map(|c| c.t_bound),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectorySection {
    pub grid: GridInfo,
    pub operator: String,
    pub integrator: &'static str,
    pub dt: f64,
    pub t_end: f64,
    pub sup_growth: f64,
    pub spectral_tail: f64,
    pub max_halvings: usize,
    pub bisection_depth: usize,
    pub termination: &'static str,
    pub trigger: Option<&'static str>,
    pub trigger_value: Option<f64>,
    pub failure_time: Option<f64>,
    pub blowup_bracket: Option<[f64; 2]>,
    pub final_time: f64,
    pub samples: usize,
    pub steps: usize,
    pub smallest_dt: f64,
    pub diagnostics: Vec<&'static str>,
}

impl TrajectorySection {
    pub fn new(s: &blowup_core::simulator::Scenario, t: &Trajectory) -> Self {
        let (trigger, trigger_value, failure_time) = match t.termination {
            Termination::ReachedEnd => (None, None, None),
            Termination::BlowupDetected { trigger } => {
                let v = match trigger {
                    Trigger::SupNorm { value, .. } => value,
                    Trigger::SpectralTail { fraction } => fraction,
                    Trigger::DtCascade { depth } => depth as f64,
                };
                (Some(trigger.name()), Some(v), None)
            }
            Termination::StepFailure { time, value, .. } => (None, Some(value), Some(time)),
        };
        TrajectorySection {
            grid: (&s.grid).into(),
            operator: s.operator.name().into(),
            integrator: s.integrator.as_str(),
            dt: s.dt,
            t_end: s.t_end,
            sup_growth: s.thresholds.sup_growth,
            spectral_tail: s.thresholds.spectral_tail,
            max_halvings: s.thresholds.max_halvings,
            bisection_depth: s.bisection_depth,
            termination: t.termination.name(),
            trigger,
            trigger_value,
            failure_time,
            blowup_bracket: t.blowup_bracket.map(|(a, b)| [a, b]),
            final_time: t.times.last().copied().unwrap_or(0.0),
            samples: t.times.len(),
            steps: t.steps,
            smallest_dt: t.smallest_dt,
            diagnostics: t.diagnostics.iter().map(|d| d.name()).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MonitorSection {
    pub until: f64,
    pub relative_tolerance: f64,
    pub c_star: f64,
    pub samples: usize,
    pub min_slack: f64,
    /// Smallest `slack / M(t)`.
    pub min_relative_slack: f64,
    pub violations: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleSection {
    pub kind: String,
    pub blowup_time: f64,
    /// Largest PDE residual of the exact solution, relative, when checked.
    pub residual: Option<f64>,
    pub residual_points_per_axis: Option<usize>,
    pub bracket_relative_error: Option<f64>,
    pub bracket_contains: Option<bool>,
}
