//! The `suite` verb: runs every scenario of a manifest on a worker pool and
//! aggregates check outcomes per acceptance criterion.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::Manifest;
use crate::error::{CliError, Result, Status};
use crate::output::{ensure_dir, write_json, Table};
use crate::pipeline::{execute, Options, Verb};
use crate::report::{ErrorInfo, Report, Tool};
use crate::{SCHEMA_VERSION, TOOL_NAME, TOOL_VERSION};

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioOutcome {
    pub name: String,
    pub verb: String,
    pub config: String,
    pub expected: String,
    pub status: Status,
    pub exit_code: u8,
    /// Status as expected and every check passed.
    pub passed: bool,
    pub checks_passed: usize,
    pub checks_total: usize,
    pub error: Option<String>,
    pub wall_clock_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionOutcome {
    pub criterion: u32,
    pub checks: usize,
    pub checks_passed: usize,
    pub passed: bool,
    /// `scenario/check` names that failed, or `scenario` for a status mismatch.
    pub failing: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub tool: Tool,
    pub name: String,
    pub manifest: String,
    pub seed: Option<u64>,
    pub workers: usize,
    pub status: Status,
    pub exit_code: u8,
    pub error: Option<ErrorInfo>,
    pub scenarios: Vec<ScenarioOutcome>,
    pub criteria: Vec<CriterionOutcome>,
    pub passed: usize,
    pub failed: usize,
    pub files: Vec<String>,
    pub wall_clock_seconds: f64,
    /// Full per-scenario reports, in manifest order.
    #[serde(skip)]
    pub reports: Vec<Report>,
}

impl SuiteReport {
    fn new(manifest: &Path, options: &Options, workers: usize) -> Self {
        SuiteReport {
            schema_version: SCHEMA_VERSION,
            tool: Tool {
                name: TOOL_NAME,
                version: TOOL_VERSION,
            },
            name: String::new(),
            manifest: manifest.display().to_string(),
            seed: options.seed,
            workers,
            status: Status::Ok,
            exit_code: 0,
            error: None,
            scenarios: Vec::new(),
            criteria: Vec::new(),
            passed: 0,
            failed: 0,
            files: Vec::new(),
            wall_clock_seconds: 0.0,
            reports: Vec::new(),
        }
    }

    fn fail(&mut self, e: &CliError) {
        self.status = e.status();
        self.exit_code = self.status.exit_code();
        self.error = Some(ErrorInfo {
            kind: e.kind(),
            message: e.to_string(),
        });
    }
}

/// Runs a manifest. Scenario outputs go to `<out>/<scenario name>/`, the
/// aggregate to `<out>/suite_report.json` plus two CSV tables.
pub fn run_suite(manifest_path: &Path, options: &Options, workers: usize) -> SuiteReport {
    let start = Instant::now();
    let mut report = SuiteReport::new(manifest_path, options, workers);
    if let Err(e) = run_inner(manifest_path, options, workers, &mut report) {
        report.fail(&e);
    }
    report.wall_clock_seconds = start.elapsed().as_secs_f64();
    if let Err(e) = write_suite(&options.out, &mut report) {
        report.fail(&e);
    }
    report
}

fn scenario_name(path: &Path) -> Result<String> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let value: toml::Table = toml::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    match value.get("name") {
        Some(toml::Value::String(s)) => Ok(s.clone()),
        _ => Err(CliError::config(format!("{}: missing `name`", path.display()))),
    }
}

fn run_inner(manifest_path: &Path, options: &Options, workers: usize, report: &mut SuiteReport) -> Result<()> {
    let manifest = Manifest::load(manifest_path)?;
    report.name = manifest.name.clone();
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let entries: Vec<(Verb, PathBuf)> = manifest
        .scenarios
        .iter()
        .map(|e| (Verb::from_name(&e.verb).expect("validated"), base.join(&e.config)))
        .collect();
    let mut names = BTreeSet::new();
    for (_, path) in &entries {
        let name = scenario_name(path)?;
        if !names.insert(name.clone()) {
            return Err(CliError::config(format!("scenario name `{name}` appears twice in the manifest")));
        }
    }
    ensure_dir(&options.out)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::config(format!("worker pool: {e}")))?;
    let reports: Vec<Report> =
        pool.install(|| entries.par_iter().map(|(verb, path)| execute(*verb, path, options)).collect());

    let mut criteria: BTreeMap<u32, CriterionOutcome> = BTreeMap::new();
    let bucket = |c: u32| CriterionOutcome {
        criterion: c,
        checks: 0,
        checks_passed: 0,
        passed: true,
        failing: Vec::new(),
    };
    for (entry, r) in manifest.scenarios.iter().zip(&reports) {
        let checks_passed = r.checks.iter().filter(|c| c.passed).count();
        let status_ok = r.status.as_str() == entry.expect;
        let passed = status_ok && checks_passed == r.checks.len();
        for c in &r.checks {
            if let Some(n) = c.criterion {
                let out = criteria.entry(n).or_insert_with(|| bucket(n));
                out.checks += 1;
                if c.passed {
                    out.checks_passed += 1;
                } else {
                    out.passed = false;
                    out.failing.push(format!("{}/{}", r.name, c.name));
                }
            }
        }
        if !status_ok {
            for &n in &entry.criteria {
                let out = criteria.entry(n).or_insert_with(|| bucket(n));
                out.passed = false;
                out.failing.push(format!("{} (status {}, expected {})", r.name, r.status.as_str(), entry.expect));
            }
        }
        report.scenarios.push(ScenarioOutcome {
            name: r.name.clone(),
            verb: r.verb.clone(),
            config: entry.config.clone(),
            expected: entry.expect.clone(),
            status: r.status,
            exit_code: r.exit_code,
            passed,
            checks_passed,
            checks_total: r.checks.len(),
            error: r.error.as_ref().map(|e| e.message.clone()),
            wall_clock_seconds: r.wall_clock_seconds,
        });
    }
    report.criteria = criteria.into_values().collect();
    report.passed = report.scenarios.iter().filter(|s| s.passed).count();
    report.failed = report.scenarios.len() - report.passed;
    report.reports = reports;
    if report.failed > 0 || report.criteria.iter().any(|c| !c.passed) {
        report.status = Status::ChecksFailed;
        report.exit_code = Status::ChecksFailed.exit_code();
    }
    Ok(())
}

fn write_suite(out: &Path, report: &mut SuiteReport) -> Result<()> {
    ensure_dir(out)?;
    let mut scenarios = Table::new(
        "suite_scenarios.csv",
        &["name", "verb", "config", "expected", "status", "passed", "checks_passed", "checks_total"],
    );
    for s in &report.scenarios {
        scenarios.push(vec![
            s.name.clone(),
            s.verb.clone(),
            s.config.clone(),
            s.expected.clone(),
            s.status.as_str().into(),
            s.passed.to_string(),
            s.checks_passed.to_string(),
            s.checks_total.to_string(),
        ]);
    }
    let mut criteria = Table::new("suite_criteria.csv", &["criterion", "checks", "checks_passed", "passed"]);
    for c in &report.criteria {
        criteria.push(vec![
            c.criterion.to_string(),
            c.checks.to_string(),
            c.checks_passed.to_string(),
            c.passed.to_string(),
        ]);
    }
    report.files = Vec::new();
    for t in [&scenarios, &criteria] {
        t.write(out)?;
        report.files.push(t.file.clone());
    }
    report.files.push("suite_report.json".into());
    write_json(&out.join("suite_report.json"), report)
}
