//! End-to-end tests of the command-line binary: argument handling, exit
//! codes, file output.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_so3-align"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("so3_align_cli_{tag}_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

const GOOD_SCENARIO: &str = r#"
schema_version = 1
name = "cli-good"

[units]
angle = "rad"
rate = "rad/time"

[sim]
t_end = 2.0
seed = 5

[target]
mode = "full_info"
direction = [0.0, 1.0, 0.0]
omega_known = [3.141592653589793, 0.0, 0.0]

[[robots]]
speed = 0.5
[robots.controller]
k_w = 1.0
"#;

// Deterministically far from the reference with a 1-second horizon: the
// settling check cannot pass, which is exactly what --check must report.
const UNSETTLED_SCENARIO: &str = r#"
schema_version = 1
name = "cli-unsettled"

[units]
angle = "rad"
rate = "rad/time"

[sim]
t_end = 1.0

[target]
mode = "partial_info"
direction = [0.0, 1.0, 0.0]
omega_unknown = [0.0, 0.0, -0.2]

[[robots]]
speed = 0.5
attitude = [0.0, 0.0, 2.5]
[robots.controller]
omega_d = 0.2243994752564138
mu_star = 0.4
"#;

#[test]
fn presets_lists_all_four() {
    let out = run(&["presets"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for name in ["fig3", "fig4", "fig5", "fig6"] {
        assert!(text.contains(name), "missing {name} in:\n{text}");
    }
}

#[test]
fn simulate_preset_writes_csv_and_pairs() {
    let dir = temp_dir("csv");
    let out_path = dir.join("run.csv");
    let out = run(&[
        "simulate",
        "--preset",
        "fig5",
        "--t-end",
        "1",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = std::fs::read_to_string(&out_path).unwrap();
    // Header plus 1001 samples x 2 robots.
    assert_eq!(text.lines().count(), 1 + 1001 * 2);
    assert!(text.starts_with("t,robot,px,py,pz,r00"));
    let pairs = std::fs::read_to_string(dir.join("run_pairs.csv")).unwrap();
    assert_eq!(pairs.lines().count(), 1 + 1001);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn simulate_preset_writes_json() {
    let dir = temp_dir("json");
    let out_path = dir.join("run.json");
    let out = run(&[
        "simulate",
        "--preset",
        "fig3",
        "--t-end",
        "1",
        "--format",
        "json",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["name"], "fig3");
    assert_eq!(doc["times"].as_array().unwrap().len(), 1001);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn simulate_check_passes_on_preset() {
    let out = run(&["simulate", "--preset", "fig5", "--check"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("result: PASS"), "{text}");
}

#[test]
fn simulate_check_failure_exits_one() {
    let dir = temp_dir("unsettled");
    let path = dir.join("unsettled.toml");
    std::fs::write(&path, UNSETTLED_SCENARIO).unwrap();
    let out = run(&["simulate", path.to_str().unwrap(), "--check"]);
    assert_eq!(code(&out), 1, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("result: FAIL"), "{text}");
    assert!(text.contains("never entered the bound"), "{text}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn simulate_without_source_is_usage_error() {
    let out = run(&["simulate"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("scenario file or --preset"));
}

#[test]
fn simulate_unknown_preset_is_config_error() {
    let out = run(&["simulate", "--preset", "fig9"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("unknown preset"));
}

#[test]
fn simulate_bad_override_is_config_error() {
    let out = run(&["simulate", "--preset", "fig3", "--dt", "0.5"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("too coarse"));
}

#[test]
fn validate_good_file() {
    let dir = temp_dir("validate");
    let path = dir.join("good.toml");
    std::fs::write(&path, GOOD_SCENARIO).unwrap();
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).starts_with("ok: cli-good"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn validate_rejects_unknown_keys() {
    let dir = temp_dir("badkey");
    let path = dir.join("bad.toml");
    std::fs::write(
        &path,
        GOOD_SCENARIO.replace("seed = 5", "seed = 5\nwat = 1"),
    )
    .unwrap();
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn validate_missing_file_is_io_error() {
    let out = run(&["validate", "/does/not/exist.toml"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("failed to read"));
}

#[test]
fn log_level_env_is_honored() {
    let out = bin()
        .args(["simulate", "--preset", "fig3", "--t-end", "1"])
        .env("SO3_LOG_LEVEL", "debug")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    // An unknown level must not break the run either.
    let out = bin()
        .args(["simulate", "--preset", "fig3", "--t-end", "1"])
        .env("SO3_LOG_LEVEL", "not-a-level")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
}
