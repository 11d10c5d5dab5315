//! The `run` and `certify` verbs, plus the invocation wrapper shared with
//! `polar`: load, execute, settle status, write files.

use std::path::{Path, PathBuf};
use std::time::Instant;

use blowup_core::certificate::{check_hypothesis_with, issue_certificate, monitor_bound, BlowupCertificate};
use blowup_core::simulator::oracle::{burgers_exact, clm_sine, CLM_SINE_BLOWUP};
use blowup_core::simulator::{self, Diagnostic, Termination, Trajectory};
use blowup_core::{Grid, MultiplierOp, SpectralField};

use crate::checks::{evaluate_all, CheckConfig, Quantity};
use crate::config::{self, OracleConfig, ScenarioConfig, Validated};
use crate::error::{CliError, Result};
use crate::expr::Expr;
use crate::output::{ensure_dir, num, write_json, Table};
use crate::report::{CertificateSection, MonitorSection, OracleSection, Report, TrajectorySection};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verb {
    Run,
    Certify,
    Polar,
}

impl Verb {
    pub fn as_str(self) -> &'static str {
        match self {
            Verb::Run => "run",
            Verb::Certify => "certify",
            Verb::Polar => "polar",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [Verb::Run, Verb::Certify, Verb::Polar].into_iter().find(|v| v.as_str() == name)
    }
}

#[derive(Debug, Clone)]
pub struct Options {
    pub out: PathBuf,
    /// Overrides the seed of the configuration.
    pub seed: Option<u64>,
    pub strict: bool,
}

/// State filled in by a verb while it runs.
pub struct Context {
    pub report: Report,
    pub tables: Vec<Table>,
    pub checks: Vec<CheckConfig>,
}

impl Context {
    pub fn set(&mut self, name: &str, value: f64) {
        self.report.quantities.insert(name.into(), Quantity::Number(value));
    }

    pub fn flag(&mut self, name: &str, value: bool) {
        self.report.quantities.insert(name.into(), Quantity::Flag(value));
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.report.warnings.push(message.into());
    }
}

/// Runs one verb on one configuration file and writes its report into
/// `<out>/<name>/`. Never panics on bad input; every failure ends up in the
/// returned report's status.
pub fn execute(verb: Verb, path: &Path, options: &Options) -> Report {
    let start = Instant::now();
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let mut ctx = Context {
        report: Report::new(verb.as_str(), &stem, &path.display().to_string()),
        tables: Vec::new(),
        checks: Vec::new(),
    };
    ctx.report.seed = options.seed;
    let result = match verb {
        Verb::Run | Verb::Certify => scenario(verb, path, options, &mut ctx),
        Verb::Polar => crate::polar::run_polar(path, options, &mut ctx),
    };
    if let Err(e) = result {
        ctx.report.fail(&e);
    }
    ctx.report.checks = evaluate_all(&ctx.checks, &ctx.report.quantities);
    ctx.report.settle(options.strict);
    let dir = options.out.join(&ctx.report.name);
    if let Err(e) = write_files(&dir, &mut ctx) {
        ctx.report.fail(&e);
    }
    ctx.report.wall_clock_seconds = start.elapsed().as_secs_f64();
    if let Err(e) = write_json(&dir.join("report.json"), &ctx.report) {
        ctx.report.fail(&e);
    }
    ctx.report
}

fn write_files(dir: &Path, ctx: &mut Context) -> Result<()> {
    ensure_dir(dir)?;
    for table in &ctx.tables {
        table.write(dir)?;
        ctx.report.files.push(table.file.clone());
    }
    ctx.report.files.push("report.json".into());
    Ok(())
}

fn scenario(verb: Verb, path: &Path, options: &Options, ctx: &mut Context) -> Result<()> {
    let cfg = ScenarioConfig::load(path)?;
    ctx.report.name = cfg.name.clone();
    ctx.report.config = serde_json::to_value(&cfg)?;
    ctx.report.seed = options.seed.or(cfg.seed);
    ctx.checks = cfg.checks.clone();
    let v = cfg.validate()?;
    match verb {
        Verb::Certify if cfg.certificate.is_none() => {
            return Err(CliError::config("certify needs a [certificate] section"))
        }
        Verb::Run if v.scenario.is_none() => return Err(CliError::config("run needs an [integrator] section")),
        _ => {}
    }

    let certificate = match &cfg.certificate {
        Some(_) => Some(certify_step(&v, ctx)?),
        None => None,
    };
    if verb == Verb::Certify {
        return Ok(());
    }

    let scenario = v.scenario.as_ref().expect("checked above");
    let trajectory = simulator::run(scenario)?;
    record_trajectory(scenario, &trajectory, ctx);

    if let (Some(m), Some(cert)) = (&cfg.monitor, &certificate) {
        monitor_step(m.until, m.relative_tolerance, cert, &trajectory, ctx)?;
    }
    if let Some(o) = &cfg.oracle {
        oracle_step(o, &v, &trajectory, ctx)?;
    }
    if let (Some(cert), Termination::ReachedEnd) = (&certificate, trajectory.termination) {
        if scenario.t_end >= cert.t_bound {
            ctx.warn(format!(
                "run reached t_end = {} past T_bound = {} without detected blow-up",
                scenario.t_end, cert.t_bound
            ));
        }
    }
    if let Termination::StepFailure { time, index, value } = trajectory.termination {
        return Err(blowup_core::Error::StepFailure { time, index, value }.into());
    }
    Ok(())
}

fn certify_step(v: &Validated, ctx: &mut Context) -> Result<BlowupCertificate> {
    let cc = v.config.certificate.as_ref().expect("caller checked");
    let pair = config::weight_pair(cc, &v.operator, &v.grid)?;
    let base = match &cc.grid {
        Some(g) => g.build()?,
        None => v.grid,
    };
    let omega0 = crate::expr::field_fn(&v.config.initial)?;
    let hyp = check_hypothesis_with(&omega0, &base, &pair, &cc.options())?;
    let description = blowup_core::weights::describe(&pair);

    ctx.flag("sign_ok", hyp.sign_ok);
    ctx.flag("hypothesis_passes", hyp.passes());
    ctx.set("pairing", hyp.pairing);
    ctx.set("jensen_integral", hyp.jensen_integral);
    ctx.set("jensen_error_estimate", hyp.jensen_error_estimate);
    ctx.set("clipped_nodes", hyp.clipped_nodes as f64);
    if hyp.product_scale > 0.0 {
        ctx.set("min_product_relative", hyp.min_product / hyp.product_scale);
    }
    if let Some(d) = hyp.normalization.deficit() {
        ctx.set("normalization_deficit", d);
        if d.abs() > 1e-6 {
            ctx.warn(format!("W2 mass truncated by the box: relative deficit {d:e}"));
        }
    }
    if hyp.clipped_nodes > 0 {
        ctx.warn(format!("{} integrand values clipped in the Jensen integral", hyp.clipped_nodes));
    }
    let mut levels = Table::new(
        "certificate_levels.csv",
        &["points_per_axis", "jensen", "pairing", "clipped", "excluded"],
    );
    for l in &hyp.levels {
        levels.push(vec![
            l.points_per_axis.to_string(),
            num(l.jensen),
            num(l.pairing),
            l.clipped.to_string(),
            l.excluded.to_string(),
        ]);
    }
    ctx.tables.push(levels);

    let weight_grid = pair.grid;
    match issue_certificate(hyp.clone()) {
        Ok(cert) => {
            ctx.set("c_star", cert.c_star);
            ctx.set("t_bound", cert.t_bound);
            let mut section = CertificateSection::new(&hyp, description, Some(&cert));
            section.weight_grid = (&weight_grid).into();
            ctx.report.certificate = Some(section);
            Ok(cert)
        }
        Err(e) => {
            let mut section = CertificateSection::new(&hyp, description, None);
            section.weight_grid = (&weight_grid).into();
            ctx.report.certificate = Some(section);
            Err(e.into())
        }
    }
}

fn record_trajectory(scenario: &simulator::Scenario, t: &Trajectory, ctx: &mut Context) {
    ctx.report.trajectory = Some(TrajectorySection::new(scenario, t));
    ctx.flag("blowup_detected", matches!(t.termination, Termination::BlowupDetected { .. }));
    ctx.set("final_time", t.times.last().copied().unwrap_or(0.0));
    ctx.set("steps", t.steps as f64);
    if let Some((lo, hi)) = t.blowup_bracket {
        ctx.set("bracket_low", lo);
        ctx.set("bracket_high", hi);
    }
    let mut header = vec!["t"];
    header.extend(t.diagnostics.iter().map(|d| d.name()));
    let mut table = Table::new("diagnostics.csv", &header);
    for (time, row) in t.times.iter().zip(&t.samples) {
        let mut r = vec![*time];
        r.extend_from_slice(row);
        table.push_numbers(&r);
    }
    ctx.tables.push(table);
    for &d in &t.diagnostics {
        let series = t.series(d).expect("recorded");
        let name = d.name();
        ctx.set(&format!("initial:{name}"), series[0]);
        ctx.set(&format!("final:{name}"), *series.last().expect("at least one sample"));
        ctx.set(&format!("max_relative_increase:{name}"), max_relative_increase(&series));
    }
}

/// Largest `(v[i+1] - v[i]) / |v[i]|` over consecutive samples (0 for a
/// non-increasing series).
pub fn max_relative_increase(series: &[f64]) -> f64 {
    series
        .windows(2)
        .map(|w| (w[1] - w[0]) / w[0].abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

fn monitor_step(until: f64, tolerance: f64, cert: &BlowupCertificate, t: &Trajectory, ctx: &mut Context) -> Result<()> {
    let m = t.series(Diagnostic::MFunctional).expect("validated");
    let keep: Vec<usize> = (0..t.times.len())
        .filter(|&i| t.times[i] <= until && t.times[i] < cert.t_bound)
        .collect();
    let times: Vec<f64> = keep.iter().map(|&i| t.times[i]).collect();
    let values: Vec<f64> = keep.iter().map(|&i| m[i]).collect();
    let mon = monitor_bound(&times, &values, cert.c_star, tolerance)?;
    let mut table = Table::new("monitor.csv", &["t", "M", "lower_bound", "slack"]);
    let mut min_rel = f64::INFINITY;
    for (i, (&time, &value)) in times.iter().zip(&values).enumerate() {
        table.push_numbers(&[time, value, cert.lower_bound(time), mon.slack[i]]);
        min_rel = min_rel.min(mon.slack[i] / value.abs());
    }
    ctx.tables.push(table);
    if !mon.holds() {
        ctx.warn(format!(
            "M(t) fell below c*/(1 - c* t) at {} samples (first at t = {})",
            mon.violations.len(),
            times[mon.violations[0]]
        ));
    }
    if times.last().is_some_and(|&last| last < until.min(cert.t_bound) - 0.5 * t.smallest_dt.max(1e-12))
        && matches!(t.termination, Termination::ReachedEnd)
    {
        ctx.warn(format!("monitor window ends at t = {} before until = {until}", times.last().unwrap()));
    }
    ctx.set("monitor_min_slack", mon.min_slack());
    ctx.set("monitor_min_relative_slack", min_rel);
    ctx.set("monitor_last_time", times.last().copied().unwrap_or(0.0));
    ctx.flag("monitor_holds", mon.holds());
    ctx.report.monitor = Some(MonitorSection {
        until,
        relative_tolerance: tolerance,
        c_star: cert.c_star,
        samples: times.len(),
        min_slack: mon.min_slack(),
        min_relative_slack: min_rel,
        violations: mon.violations.len(),
        holds: mon.holds(),
    });
    Ok(())
}

fn oracle_step(o: &OracleConfig, v: &Validated, t: &Trajectory, ctx: &mut Context) -> Result<()> {
    let (blowup_time, residual, residual_n) = match o.kind.as_str() {
        "value" => (o.blowup_time.expect("validated"), None, None),
        "clm_sine" => {
            let (res, n) = clm_sine_residual()?;
            (CLM_SINE_BLOWUP, Some(res), Some(n))
        }
        "characteristics" => {
            let omega0 = Expr::parse(&v.config.initial, &["x", "y"])?;
            let (time, res) = characteristics(&omega0, &v.grid)?;
            (time, Some(res), Some(v.grid.points_per_axis()))
        }
        _ => unreachable!("validated"),
    };
    ctx.set("oracle_blowup_time", blowup_time);
    if let Some(r) = residual {
        ctx.set("oracle_residual", r);
    }
    let (rel, contains) = match t.blowup_bracket {
        Some((lo, hi)) => {
            let rel = (lo - blowup_time).abs().max((hi - blowup_time).abs()) / blowup_time;
            ctx.set("bracket_relative_error", rel);
            ctx.flag("bracket_contains_oracle", lo <= blowup_time && blowup_time <= hi);
            (Some(rel), Some(lo <= blowup_time && blowup_time <= hi))
        }
        None => (None, None),
    };
    ctx.report.oracle = Some(OracleSection {
        kind: o.kind.clone(),
        blowup_time,
        residual,
        residual_points_per_axis: residual_n,
        bracket_relative_error: rel,
        bracket_contains: contains,
    });
    Ok(())
}

/// Substitutes the closed-form solution from `-sin x` into `∂ₜω = ωHω`,
/// with `Hω` computed spectrally and `∂ₜ` by a fourth-order difference.
/// Returns the worst residual relative to `max|ω|²` and the grid size.
pub fn clm_sine_residual() -> Result<(f64, usize)> {
    let n = 4096;
    let grid = Grid::torus(1, n)?;
    let mut worst = 0.0f64;
    for t in [0.5, 1.0, 1.5, 1.9] {
        let at = |s: f64| SpectralField::from_fn(grid, |[x, _]| clm_sine(x, s));
        let w = at(t)?;
        let hw = MultiplierOp::hilbert().apply(&w)?;
        let d = 1e-3;
        let (a, b, c, e) = (at(t - 2.0 * d)?, at(t - d)?, at(t + d)?, at(t + 2.0 * d)?);
        let scale = w.max_abs().powi(2);
        for i in 0..grid.len() {
            let dt = (a.values()[i] - 8.0 * b.values()[i] + 8.0 * c.values()[i] - e.values()[i]) / (12.0 * d);
            worst = worst.max((dt - w.values()[i] * hw.values()[i]).abs() / scale);
        }
    }
    Ok((worst, n))
}

/// Blow-up time `1/max ω₀'` of `∂ₜω = ω∂ₓω` and the residual of the
/// characteristics solution at half that time, relative to
/// `max|ω₀|·max ω₀'`.
pub fn characteristics(omega0: &Expr, grid: &Grid) -> Result<(f64, f64)> {
    let f = |x: f64| omega0.eval(&[("x", x), ("y", 0.0)]);
    let fine = grid.refined(8)?;
    let sampled = SpectralField::from_fn(fine, |[x, _]| f(x))?;
    let slope = MultiplierOp::derivative(0).apply(&sampled)?.max();
    if !(slope > 0.0) {
        return Err(CliError::config("characteristics oracle: ω₀' is nowhere positive, no blow-up"));
    }
    let blowup = 1.0 / slope;
    let bound = sampled.max_abs() * 1.01 + 1e-12;
    let h = 1e-6;
    let df = |x: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    let exact = |x: f64, s: f64| burgers_exact(f, df, bound, x, s);
    let t = 0.5 * blowup;
    let d = 1e-4 * blowup;
    let stride = (grid.points_per_axis() / 128).max(1);
    let mut worst = 0.0f64;
    for i in (0..grid.points_per_axis()).step_by(stride) {
        let x = grid.coords(i)[0];
        let wt = (exact(x, t + d)? - exact(x, t - d)?) / (2.0 * d);
        let wx = (exact(x + d, t)? - exact(x - d, t)?) / (2.0 * d);
        worst = worst.max((wt - exact(x, t)? * wx).abs());
    }
    Ok((blowup, worst / (bound * slope)))
}
