//! Time integration of `∂ₜω = ω R(ω)` with blow-up detection.

mod detect;
mod diagnostics;
pub mod oracle;
mod step;

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

pub use detect::{detect_blowup, spectral_tail_fraction, tail_fraction_in_band, DetectionWindow, Thresholds, Trigger};
pub use diagnostics::{energy_diagnostics, h1_log, m_functional, riesz1_squared, EnergyRecord};
pub use step::{step_exponential, step_rk4, Stepper};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::function::FieldFn;
use crate::grid::Grid;
use crate::multiplier::MultiplierOp;
use crate::weights::WeightPair;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrator {
    ExponentialEuler,
    Rk4,
}

impl Integrator {
    pub fn as_str(self) -> &'static str {
        match self {
            Integrator::ExponentialEuler => "exponential_euler",
            Integrator::Rk4 => "rk4",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Diagnostic {
    L1,
    /// `‖R₁ω‖²` (two dimensions only).
    L2R1,
    Linf,
    /// `M(t) = ∫ωW₁` with unit-mass `W₂` (needs a weight pair).
    MFunctional,
    /// `‖∇log ω‖²` (positive data only).
    H1Log,
    /// Energy share of the top third of the represented frequencies.
    SpectralTail,
}

impl Diagnostic {
    pub const ALL: [Diagnostic; 6] = [
        Diagnostic::L1,
        Diagnostic::L2R1,
        Diagnostic::Linf,
        Diagnostic::MFunctional,
        Diagnostic::H1Log,
        Diagnostic::SpectralTail,
    ];

    /// Column name used in reports.
    pub fn name(self) -> &'static str {
        match self {
            Diagnostic::L1 => "L1",
            Diagnostic::L2R1 => "L2_R1",
            Diagnostic::Linf => "Linf",
            Diagnostic::MFunctional => "M",
            Diagnostic::H1Log => "H1_log",
            Diagnostic::SpectralTail => "spectral_tail",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|d| d.name() == name || d.config_name() == name)
    }

    /// Name used in scenario files.
    pub fn config_name(self) -> &'static str {
        match self {
            Diagnostic::MFunctional => "M_functional",
            other => other.name(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub grid: Grid,
    pub operator: MultiplierOp,
    pub initial: FieldFn,
    pub weight_pair: Option<WeightPair>,
    pub integrator: Integrator,
    pub dt: f64,
    pub t_end: f64,
    pub diagnostics: Vec<Diagnostic>,
    pub thresholds: Thresholds,
    /// A sample is recorded every this many steps (and at the end).
    pub sample_every: usize,
    /// Halvings of the last step used to bracket a detected blow-up.
    pub bisection_depth: usize,
}

impl Scenario {
    pub fn new(grid: Grid, operator: MultiplierOp, initial: FieldFn, dt: f64, t_end: f64) -> Self {
        Scenario {
            grid,
            operator,
            initial,
            weight_pair: None,
            integrator: Integrator::ExponentialEuler,
            dt,
            t_end,
            diagnostics: Vec::from([Diagnostic::Linf, Diagnostic::SpectralTail]),
            thresholds: Thresholds::default(),
            sample_every: 1,
            bisection_depth: 12,
        }
    }

    pub fn validate(&self) -> Result<()> {
        step::check_dt(self.dt)?;
        let positive = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be positive and finite, got {v}"),
                })
            }
        };
        positive("t_end", self.t_end)?;
        positive("sup_growth", self.thresholds.sup_growth)?;
        positive("spectral_tail", self.thresholds.spectral_tail)?;
        if self.sample_every == 0 {
            return Err(Error::InvalidParameter {
                name: "sample_every",
                reason: "must be at least 1".into(),
            });
        }
        self.operator.check_dim(&self.grid)?;
        if self.diagnostics.contains(&Diagnostic::MFunctional) && self.weight_pair.is_none() {
            return Err(Error::InvalidParameter {
                name: "diagnostics",
                reason: "M_functional needs a weight pair".into(),
            });
        }
        if self.diagnostics.contains(&Diagnostic::L2R1) && self.grid.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: self.grid.dim(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    ReachedEnd,
    BlowupDetected { trigger: Trigger },
    StepFailure { time: f64, index: usize, value: f64 },
}

impl Termination {
    pub fn name(&self) -> &'static str {
        match self {
            Termination::ReachedEnd => "reached_t_end",
            Termination::BlowupDetected { .. } => "blowup_detected",
            Termination::StepFailure { .. } => "step_failure",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub diagnostics: Vec<Diagnostic>,
    pub times: Vec<f64>,
    /// One row per sample, one entry per requested diagnostic.
    pub samples: Vec<Vec<f64>>,
    pub final_state: SpectralField,
    pub termination: Termination,
    /// `[last healthy time, first detected time]` when blow-up was detected.
    pub blowup_bracket: Option<(f64, f64)>,
    pub steps: usize,
    pub smallest_dt: f64,
}

impl Trajectory {
    /// The series of one diagnostic, if it was recorded.
    pub fn series(&self, d: Diagnostic) -> Option<Vec<f64>> {
        let col = self.diagnostics.iter().position(|&x| x == d)?;
        Some(self.samples.iter().map(|row| row[col]).collect())
    }
}

struct Runner<'a> {
    scenario: &'a Scenario,
    stepper: Stepper,
    w1: Option<SpectralField>,
    initial_sup: f64,
}

impl Runner<'_> {
    fn advance(&self, state: &SpectralField, dt: f64, t: f64) -> Result<SpectralField> {
        match self.scenario.integrator {
            Integrator::ExponentialEuler => self.stepper.exponential(state, dt, t),
            Integrator::Rk4 => self.stepper.rk4(state, dt, t),
        }
    }

    /// Highest wavenumber the integrator represents: the 2/3 rule keeps RK4
    /// states below `n/3`.
    fn band(&self) -> i64 {
        let n = self.scenario.grid.points_per_axis() as i64;
        match self.scenario.integrator {
            Integrator::ExponentialEuler => n / 2,
            Integrator::Rk4 => n / 3,
        }
    }

    fn tail(&self, state: &SpectralField) -> f64 {
        tail_fraction_in_band(state, self.band())
    }

    fn trigger(&self, state: &SpectralField, depth: usize) -> Option<Trigger> {
        let tail = self.tail(state);
        detect::check_sample(
            self.initial_sup,
            state.max_abs(),
            Some(tail),
            depth,
            &self.scenario.thresholds,
        )
    }

    fn sample(&self, state: &SpectralField) -> Result<Vec<f64>> {
        self.scenario
            .diagnostics
            .iter()
            .map(|d| match d {
                Diagnostic::L1 => Ok(state.l1_norm()),
                Diagnostic::L2R1 => riesz1_squared(state),
                Diagnostic::Linf => Ok(state.max_abs()),
                Diagnostic::MFunctional => m_functional(state, self.w1.as_ref().expect("validated")),
                Diagnostic::H1Log => h1_log(state),
                Diagnostic::SpectralTail => Ok(self.tail(state)),
            })
            .collect()
    }
}

/// Integrates a scenario until `t_end`, detected blow-up or a step that
/// cannot be completed.
///
/// A failing step is retried with halved `dt`. When more halvings than
/// allowed are needed, the run ends as a blow-up if the sup-norm has grown
/// tenfold, and as a step failure otherwise. After detection the last step is
/// bisected to bracket the blow-up time.
pub fn run(scenario: &Scenario) -> Result<Trajectory> {
    scenario.validate()?;
    let grid = scenario.grid;
    let mut state = scenario.initial.sample(&grid)?;
    let w1 = match &scenario.weight_pair {
        Some(pair) if scenario.diagnostics.contains(&Diagnostic::MFunctional) => {
            let mass = pair.normalization.mass;
            Some(pair.w1.sample(&grid)?.map(|v| v / mass)?)
        }
        _ => None,
    };
    let runner = Runner {
        scenario,
        stepper: Stepper::new(&scenario.operator, &grid)?,
        w1,
        initial_sup: state.max_abs(),
    };

    let mut times = Vec::from([0.0]);
    let mut samples = Vec::from([runner.sample(&state)?]);
    let mut t = 0.0;
    let mut steps = 0usize;
    let mut smallest_dt = scenario.dt;
    let mut termination = Termination::ReachedEnd;
    let mut bracket = None;

    while t < scenario.t_end {
        let h = scenario.dt.min(scenario.t_end - t);
        if h <= scenario.t_end * 1e-14 {
            break;
        }
        // Retry with halved steps until the step succeeds.
        let mut depth = 0;
        let mut trial = h;
        let next = loop {
            match runner.advance(&state, trial, t) {
                Ok(next) => break Ok(next),
                Err(Error::StepFailure { time, index, value }) => {
                    depth += 1;
                    trial /= 2.0;
                    if depth > scenario.thresholds.max_halvings {
                        break Err(Termination::StepFailure { time, index, value });
                    }
                }
                Err(e) => return Err(e),
            }
        };
        smallest_dt = smallest_dt.min(trial);
        let next = match next {
            Ok(next) => next,
            Err(failure) => {
                termination = if state.max_abs() > 10.0 * runner.initial_sup {
                    bracket = Some((t, t + h));
                    Termination::BlowupDetected {
                        trigger: Trigger::DtCascade { depth },
                    }
                } else {
                    failure
                };
                break;
            }
        };
        if let Some(trigger) = runner.trigger(&next, depth) {
            let (lo, lo_state, hi) = bisect(&runner, state, t, t + trial, scenario.bisection_depth)?;
            state = lo_state;
            t = lo;
            if times.last() != Some(&t) {
                times.push(t);
                samples.push(runner.sample(&state)?);
            }
            bracket = Some((lo, hi));
            termination = Termination::BlowupDetected { trigger };
            break;
        }
        state = next;
        t += trial;
        steps += 1;
        if steps.is_multiple_of(scenario.sample_every) || t >= scenario.t_end {
            times.push(t);
            samples.push(runner.sample(&state)?);
        }
    }
    if matches!(termination, Termination::ReachedEnd) && times.last() != Some(&t) {
        times.push(t);
        samples.push(runner.sample(&state)?);
    }

    Ok(Trajectory {
        diagnostics: scenario.diagnostics.clone(),
        times,
        samples,
        final_state: state,
        termination,
        blowup_bracket: bracket,
        steps,
        smallest_dt,
    })
}

/// Shrinks `[lo, hi]` around the first detection, advancing the healthy state.
fn bisect(
    runner: &Runner<'_>,
    mut state: SpectralField,
    mut lo: f64,
    mut hi: f64,
    depth: usize,
) -> Result<(f64, SpectralField, f64)> {
    for _ in 0..depth {
        let half = 0.5 * (hi - lo);
        match runner.advance(&state, half, lo) {
            Ok(next) if runner.trigger(&next, 0).is_none() => {
                state = next;
                lo += half;
            }
            Ok(_) | Err(Error::StepFailure { .. }) => hi = lo + half,
            Err(e) => return Err(e),
        }
    }
    Ok((lo, state, hi))
}
