use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

fn blowup(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_blowup")).args(args).output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout).into_owned() + &String::from_utf8_lossy(&out.stderr);
    (out.status.code().unwrap(), text)
}

fn report(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(name).join("report.json")).unwrap()).unwrap()
}

fn write(dir: &Path, file: &str, text: &str) -> String {
    let p = dir.join(file);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const SMALL_CLM: &str = r#"
schema_version = 1
name = "small_clm"
operator = "hilbert"
initial = "-sin(x)"
diagnostics = ["Linf", "M_functional"]

[grid]
domain = "torus"
dim = 1
points = 128

[integrator]
dt = 1e-2
t_end = 1.0

[certificate]
weight = "clm_torus"

[monitor]
until = 1.0
"#;

#[test]
fn run_writes_report_and_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.toml", SMALL_CLM);
    let out = tmp.path().join("out");
    let (code, text) = blowup(&["run", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{text}");
    let r = report(&out, "small_clm");
    assert_eq!(r["status"], "ok");
    assert_eq!(r["schema_version"], 1);
    assert!((r["certificate"]["c_star"].as_f64().unwrap() - 0.18393972058572117).abs() < 1e-8);
    assert_eq!(r["certificate"]["quadrature_grid"]["points_per_axis"], 128);
    assert_eq!(r["trajectory"]["termination"], "reached_t_end");
    assert_eq!(r["config"]["grid"]["points"], 128);
    for f in ["diagnostics.csv", "certificate_levels.csv", "monitor.csv"] {
        assert!(out.join("small_clm").join(f).exists(), "{f}");
    }
    let diag = fs::read_to_string(out.join("small_clm/diagnostics.csv")).unwrap();
    assert!(diag.starts_with("t,Linf,M\r\n"));
    assert_eq!(diag.lines().count(), 102);
}

#[test]
fn certify_skips_time_integration() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.toml", SMALL_CLM);
    let (code, text) = blowup(&["certify", &cfg, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(code, 0, "{text}");
    let r = report(tmp.path(), "small_clm");
    assert!(r["trajectory"].is_null());
    assert_eq!(r["certificate"]["issued"], true);
}

#[test]
fn positive_sine_is_refused_with_exit_3() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = scenarios().join("clm_plus_sin.toml");
    let (code, text) = blowup(&["run", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(code, 3, "{text}");
    let r = report(tmp.path(), "clm_plus_sin");
    assert_eq!(r["status"], "hypothesis_refused");
    assert_eq!(r["certificate"]["refused_condition"], "sign");
    assert!(r["error"]["message"].as_str().unwrap().contains("sign"));
    assert!(r["trajectory"].is_null());
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        SMALL_CLM.replace("t_end = 1.0", "t_end = 1.0\ncolour = 3"),
        SMALL_CLM.replace("hilbert", "laplacian"),
        SMALL_CLM.replace("points = 128", "points = 127"),
        SMALL_CLM.replace("-sin(x)", "-sin(z)"),
        SMALL_CLM.replace("dt = 1e-2", "dt = -1"),
        SMALL_CLM.replace("schema_version = 1", "schema_version = 9"),
        SMALL_CLM.replace("clm_torus", "riesz12_torus"),
    ];
    for (i, text) in cases.iter().enumerate() {
        let cfg = write(tmp.path(), &format!("bad{i}.toml"), text);
        let (code, out) = blowup(&["run", &cfg, "--out", tmp.path().to_str().unwrap()]);
        assert_eq!(code, 2, "case {i}: {out}");
    }
    let r: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("small_clm/report.json")).unwrap()).unwrap();
    assert_eq!(r["error"]["kind"], "config");
}

#[test]
fn missing_config_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, _) = blowup(&["run", "/nonexistent/x.toml", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(code, 1);
}

#[test]
fn overflowing_step_exits_4() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "o.toml",
        r#"
schema_version = 1
name = "overflow"
operator = "hilbert"
initial = "1e300*sin(x)"
[grid]
domain = "torus"
dim = 1
points = 32
[integrator]
dt = 1.0
t_end = 2.0
[detection]
max_halvings = 0
"#,
    );
    let (code, text) = blowup(&["run", &cfg, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(code, 4, "{text}");
    assert_eq!(report(tmp.path(), "overflow")["trajectory"]["termination"], "step_failure");
}

#[test]
fn failing_check_exits_5_and_strict_warnings_exit_6() {
    let tmp = tempfile::tempdir().unwrap();
    let failing = SMALL_CLM.to_string() + "\n[[check]]\nname = \"impossible\"\nquantity = \"c_star\"\nmin = 1.0\n";
    let cfg = write(tmp.path(), "f.toml", &failing);
    let (code, _) = blowup(&["run", &cfg, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(code, 5);
    let r = report(tmp.path(), "small_clm");
    assert_eq!(r["checks"][0]["passed"], false);

    let line = scenarios().join("burgers_line.toml");
    let (code, _) = blowup(&["certify", line.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    let (code, _) = blowup(&["certify", line.to_str().unwrap(), "--strict", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(code, 6);
    assert_eq!(report(tmp.path(), "burgers_line")["warnings"].as_array().unwrap().len(), 1);
}

#[test]
fn empty_manifest_exits_0() {
    let tmp = tempfile::tempdir().unwrap();
    let m = write(tmp.path(), "m.toml", "schema_version = 1\nname = \"empty\"\n");
    let out = tmp.path().join("out");
    let (code, text) = blowup(&["suite", &m, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{text}");
    let r: Value = serde_json::from_str(&fs::read_to_string(out.join("suite_report.json")).unwrap()).unwrap();
    assert_eq!(r["scenarios"].as_array().unwrap().len(), 0);
    assert_eq!(r["status"], "ok");
}

fn small_manifest(dir: &Path, failing: bool) -> String {
    let check = if failing { "min = 1.0" } else { "max = 1.0" };
    write(
        dir,
        "a.toml",
        &(SMALL_CLM.to_string()
            + &format!("\n[[check]]\nname = \"c\"\ncriterion = 4\nquantity = \"c_star\"\n{check}\n")),
    );
    write(
        dir,
        "p.toml",
        r#"
schema_version = 1
name = "small_polar"
[operators]
c = 1.0
big_c = 1.0
pairs = 4
[operators.grid]
r_min = 1e-2
r_max = 50.0
nodes = 600
[[check]]
name = "adjoint"
criterion = 8
quantity = "adjoint_max_defect"
max = 1e-6
"#,
    );
    write(
        dir,
        "m.toml",
        r#"
schema_version = 1
name = "small"
[[scenario]]
verb = "run"
config = "a.toml"
[[scenario]]
verb = "polar"
config = "p.toml"
[[scenario]]
verb = "run"
config = "../refused.toml"
expect = "hypothesis_refused"
criteria = [5]
"#,
    )
}

fn setup(tmp: &Path, failing: bool) -> String {
    let sub = tmp.join("m");
    fs::create_dir_all(&sub).unwrap();
    fs::copy(scenarios().join("clm_plus_sin.toml"), tmp.join("refused.toml")).unwrap();
    small_manifest(&sub, failing)
}

#[test]
fn manifest_with_a_failing_scenario_exits_5() {
    let tmp = tempfile::tempdir().unwrap();
    let m = setup(tmp.path(), true);
    let out = tmp.path().join("out");
    let (code, text) = blowup(&["suite", &m, "--out", out.to_str().unwrap(), "--workers", "2"]);
    assert_eq!(code, 5, "{text}");
    let r: Value = serde_json::from_str(&fs::read_to_string(out.join("suite_report.json")).unwrap()).unwrap();
    let s = r["scenarios"].as_array().unwrap();
    assert_eq!(s.len(), 3);
    assert_eq!(s[0]["passed"], false);
    assert_eq!(s[1]["passed"], true);
    assert_eq!(s[2]["status"], "hypothesis_refused");
    assert_eq!(s[2]["passed"], true);
    let crit: Vec<(u64, bool)> = r["criteria"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["criterion"].as_u64().unwrap(), c["passed"].as_bool().unwrap()))
        .collect();
    assert_eq!(crit, [(4, false), (8, true)]);
}

#[test]
fn suite_csvs_are_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let m = setup(tmp.path(), false);
    let runs: Vec<PathBuf> = [("a", "1"), ("b", "3")]
        .iter()
        .map(|(dir, workers)| {
            let out = tmp.path().join(dir);
            let (code, text) = blowup(&["suite", &m, "--out", out.to_str().unwrap(), "--seed", "11", "--workers", workers]);
            assert_eq!(code, 0, "{text}");
            out
        })
        .collect();
    let mut compared = 0;
    for entry in walk(&runs[0]) {
        if entry.extension().is_some_and(|e| e == "csv") {
            let rel = entry.strip_prefix(&runs[0]).unwrap();
            assert_eq!(fs::read(&entry).unwrap(), fs::read(runs[1].join(rel)).unwrap(), "{}", rel.display());
            compared += 1;
        }
    }
    assert!(compared >= 5, "{compared}");
    let r = report(&runs[0], "small_polar");
    assert_eq!(r["seed"], 11);
}

fn walk(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out.sort();
    out
}

#[test]
fn seed_changes_the_random_pairs() {
    let tmp = tempfile::tempdir().unwrap();
    let m = setup(tmp.path(), false);
    let p = Path::new(&m).with_file_name("p.toml");
    let defect = |seed: &str| {
        let out = tmp.path().join(format!("s{seed}"));
        let (code, _) = blowup(&["polar", p.to_str().unwrap(), "--seed", seed, "--out", out.to_str().unwrap()]);
        assert_eq!(code, 0);
        report(&out, "small_polar")["quantities"]["adjoint_max_defect"].as_f64().unwrap()
    };
    assert_eq!(defect("1"), defect("1"));
    assert_ne!(defect("1"), defect("2"));
}

#[test]
fn duplicate_scenario_names_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "a.toml", SMALL_CLM);
    let m = write(
        tmp.path(),
        "m.toml",
        "schema_version = 1\nname = \"dup\"\n[[scenario]]\nverb = \"run\"\nconfig = \"a.toml\"\n[[scenario]]\nverb = \"certify\"\nconfig = \"a.toml\"\n",
    );
    let (code, _) = blowup(&["suite", &m, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(code, 2);
}

#[test]
fn bundled_configs_validate() {
    use blowup_cli::config::{Manifest, PolarConfig, ScenarioConfig};
    let manifest = Manifest::load(&scenarios().join("acceptance.toml")).unwrap();
    assert!(!manifest.scenarios.is_empty());
    for entry in fs::read_dir(scenarios()).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        if path.file_name().unwrap() == "acceptance.toml" {
            continue;
        }
        if text.contains("[stream]") || text.contains("[ha]") || text.contains("[key_bound]") || text.contains("[weight]") {
            PolarConfig::load(&path).unwrap().validate().unwrap();
        } else {
            ScenarioConfig::load(&path).unwrap().validate().unwrap();
        }
    }
}
