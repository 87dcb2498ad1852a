use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lpfiber::report::VerificationReport;

fn lpfiber(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpfiber")).args(args).output().expect("binary runs")
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("scenario.toml");
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn minimal_config_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let run = lpfiber(&["verify", "--config", s(&scenario("minimal.toml")), "--out", s(&out)]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let report = VerificationReport::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(report.summary.total > 0);
    assert!(report.checks.iter().all(|c| c.suite == "semigroup-law" && c.pass));
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "fibre_dim = 3\nsuites = [\"semigroup-law\"]\n");
    let run = lpfiber(&["verify", "--config", s(&config)]);
    assert_eq!(run.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&run.stderr);
    assert!(stderr.contains("fibre_dim"), "{stderr}");
}

#[test]
fn nested_unknown_key_names_its_path() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "[bundle]\nkind = \"scalar_profile\"\nprofile = { kind = \"polynomial\", coeffs = [-1.0], degree = 2 }\n",
    );
    let run = lpfiber(&["verify", "--config", s(&config)]);
    assert_eq!(run.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&run.stderr);
    assert!(stderr.contains("bundle") && stderr.contains("degree"), "{stderr}");
}

#[test]
fn impossible_tolerance_fails_with_status_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "suites = [\"fd-generator\"]\n\n[tolerances]\nfd-generator = 1e-30\n");
    let out = dir.path().join("report.csv");
    let run = lpfiber(&["verify", "--config", s(&config), "--format", "csv", "--out", s(&out)]);
    assert_eq!(run.status.code(), Some(1));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.contains("taylor-scalar"));
    assert!(csv.lines().any(|l| l.starts_with("convergence,")), "{csv}");
}

#[test]
fn unknown_suite_flag_is_a_config_error() {
    let run = lpfiber(&["verify", "--config", s(&scenario("minimal.toml")), "--suite", "no-such-suite"]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn empty_suite_list_writes_every_format() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "seed = 3\n");
    for format in ["json", "csv", "text"] {
        let out = dir.path().join(format!("report.{format}"));
        let run = lpfiber(&["verify", "--config", s(&config), "--format", format, "--out", s(&out)]);
        assert_eq!(run.status.code(), Some(0), "{format}");
        assert!(!std::fs::read_to_string(&out).unwrap().is_empty(), "{format}");
    }
    let report = VerificationReport::from_json(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report.summary.total, 0);
    assert!(report.summary.overall_pass);
}

#[test]
fn json_report_round_trips_through_report_command() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let run = lpfiber(&[
        "verify",
        "--config",
        s(&scenario("minimal.toml")),
        "--suite",
        "fd-generator",
        "--suite",
        "semigroup-law",
        "--seed",
        "11",
        "--out",
        s(&json),
    ]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let again = dir.path().join("again.json");
    let run = lpfiber(&["report", s(&json), "--format", "json", "--out", s(&again)]);
    assert_eq!(run.status.code(), Some(0));
    let a = VerificationReport::from_json(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let b = VerificationReport::from_json(&std::fs::read_to_string(&again).unwrap()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.config["seed"], 11);

    let text = lpfiber(&["report", s(&json)]);
    let text = String::from_utf8_lossy(&text.stdout);
    assert!(text.contains("[fd-generator]") && text.contains("order"), "{text}");
}

#[test]
fn same_seed_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "suites = [\"norm-axioms\", \"resolvent-identity\"]\nseed = 5\n");
    let runs: Vec<String> = (0..2)
        .map(|k| {
            let out = dir.path().join(format!("{k}.json"));
            lpfiber(&["verify", "--config", s(&config), "--out", s(&out)]);
            let report = VerificationReport::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
            report.deterministic_json().unwrap()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn evolve_writes_trajectory_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("trajectory.csv");
    let run = lpfiber(&["evolve", "--config", s(&scenario("evolution.toml")), "--out", s(&out)]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,node,re0,im0"));
    // 9 frames of 32 nodes
    assert_eq!(lines.count(), 9 * 32);
}

#[test]
fn evolve_rejects_misaligned_step() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "[evolution]\nnodes = 10\nstep = 0.03\nfamily = { kind = \"constant\", matrix = [[-1.0]] }\ninitial = { kind = \"constant\", x0 = [1.0] }\n",
    );
    let run = lpfiber(&["evolve", "--config", s(&config)]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn identify_round_trips_a_function_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "[grid]\ntopology = \"interval\"\na = 0.0\nb = 1.0\nnodes = 5\n\n[bundle]\nkind = \"constant\"\nmatrix = [[-1.0, 1.0], [0.0, -2.0]]\n",
    );
    let input = dir.path().join("f.csv");
    let mut rows = String::from("node,re0,im0,re1,im1\n");
    for k in 0..5 {
        let s = k as f64 / 4.0;
        rows.push_str(&format!("{s},{},{},{},0\n", 1.0 + s, s, -s));
    }
    std::fs::write(&input, rows).unwrap();
    let preimage = dir.path().join("g.csv");
    let report = dir.path().join("id.json");
    let run = lpfiber(&[
        "identify",
        "--config",
        s(&config),
        s(&input),
        "--preimage",
        s(&preimage),
        "--out",
        s(&report),
    ]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let r = VerificationReport::from_json(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r.summary.total, 3);
    // A⁻¹ = [[-1, -1/2], [0, -1/2]] applied to f(0) = (1, 0) gives (-1, 0).
    let g = std::fs::read_to_string(&preimage).unwrap();
    let first: Vec<f64> = g.lines().nth(1).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first.len(), 5);
    assert!((first[1] + 1.0).abs() < 1e-15 && first[3].abs() < 1e-15, "{first:?}");
}

#[test]
fn missing_config_file_is_status_two() {
    let run = lpfiber(&["verify", "--config", "/nonexistent/scenario.toml"]);
    assert_eq!(run.status.code(), Some(2));
}
