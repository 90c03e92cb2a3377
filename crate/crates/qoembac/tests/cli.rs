//! Integration tests driving the compiled binary end to end.

use std::path::Path;
use std::process::{Command, Output};

fn qoembac(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qoembac"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const BATCH: &str = r#"
[defaults]
duration_s = 40.0
seed = 7

[[scenario]]
name = "capacity22"
capacity_mbps = 22.0
policies = ["cbac", "pro-ibmac"]
preset = "mad-cif"
[scenario.synth]
mean_mbps = 1.2
burstiness = 4.0
seed = 11

[[scenario]]
name = "sweep22"
capacity_mbps = 22.0
policies = ["pro-ibmac"]
betas = [0.96, 0.78]
[scenario.synth]
mean_mbps = 1.2
burstiness = 4.0
seed = 11
"#;

#[test]
fn simulate_writes_csv_bundles() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("batch.toml"), BATCH).unwrap();
    let out = qoembac(&["--quiet", "--out", "run", "simulate", "batch.toml"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));

    for variant in ["capacity22/cbac", "capacity22/pro-ibmac", "sweep22/pro-ibmac_b0.96", "sweep22/pro-ibmac_b0.78"] {
        for file in ["admissions.csv", "rates.csv", "qoe.csv", "summary.csv"] {
            let path = dir.path().join("run").join(variant).join(file);
            assert!(path.is_file(), "missing {path:?}");
        }
        // Per-packet CSV is opt-in and was not requested.
        assert!(!dir.path().join("run").join(variant).join("packets.csv").exists());
    }
    let rollup = std::fs::read_to_string(dir.path().join("run/summary.csv")).unwrap();
    assert_eq!(rollup.lines().count(), 5, "header plus one row per variant:\n{rollup}");
    assert!(rollup.lines().next().unwrap().starts_with("scenario,"));
}

#[test]
fn simulate_missing_trace_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let batch = r#"
[[scenario]]
name = "broken"
capacity_mbps = 22.0
policies = ["cbac"]
trace_file = "no-such-trace.txt"
"#;
    std::fs::write(dir.path().join("batch.toml"), batch).unwrap();
    let out = qoembac(&["simulate", "batch.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no-such-trace.txt"), "{}", stderr(&out));
}

#[test]
fn fit_reports_coefficients_and_preset_goodness() {
    let dir = tempfile::tempdir().unwrap();
    let csv = "c_l_mbps,n,beta\n22,15,0.96\n24,17,0.95\n30,21,0.94\n36,26,0.87\n39,29,0.84\n40,30,0.83\n";
    std::fs::write(dir.path().join("points.csv"), csv).unwrap();
    let out = qoembac(
        &["--out", ".", "fit", "points.csv", "--preset", "mad-cif"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("alpha = -0.61999"), "{text}");
    assert!(text.contains("delta = 0.91875"), "{text}");
    assert!(text.contains("preset mad-cif"), "{text}");
    let fit_csv = std::fs::read_to_string(dir.path().join("fit.csv")).unwrap();
    assert!(fit_csv.starts_with("model,alpha,delta,"));
    assert_eq!(fit_csv.lines().count(), 3, "fit row plus preset row:\n{fit_csv}");
}

#[test]
fn fit_with_one_point_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("points.csv"), "c_l_mbps,n,beta\n22,15,0.96\n").unwrap();
    let out = qoembac(&["fit", "points.csv"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("at least 2 points"), "{}", stderr(&out));
}

#[test]
fn admit_worked_example() {
    // Three half-active 4 Mbps sessions, beta 0.5: the exceedable rate is
    // 6 (1 + 0.5 * 2) = 12 Mbps, so a 2 Mbps request fits a 15 Mbps link
    // but not a 13 Mbps one.
    let dir = tempfile::tempdir().unwrap();
    let state = "session_id,x_bps,p,x_min,x_max\n\
                 1,4000000,0.5,0,4000000\n\
                 2,4000000,0.5,0,4000000\n\
                 3,4000000,0.5,0,4000000\n";
    std::fs::write(dir.path().join("state.csv"), state).unwrap();
    let accept = qoembac(
        &["admit", "--state", "state.csv", "--xnew", "2000000", "--cl", "15000000",
          "--policy", "pro-ibmac", "--beta", "0.5"],
        dir.path(),
    );
    assert!(accept.status.success());
    let text = stdout(&accept);
    assert!(text.starts_with("accept\n"), "{text}");
    assert!(text.contains("pro_iaar_bps = 12000000"), "{text}");

    let reject = qoembac(
        &["admit", "--state", "state.csv", "--xnew", "2000000", "--cl", "13000000",
          "--policy", "pro-ibmac", "--beta", "0.5"],
        dir.path(),
    );
    assert!(stdout(&reject).starts_with("reject\n"));

    let cbac = qoembac(
        &["admit", "--state", "state.csv", "--xnew", "2000000", "--cl", "15000000",
          "--policy", "cbac"],
        dir.path(),
    );
    assert!(stdout(&cbac).starts_with("accept\n"));
    assert!(stdout(&cbac).contains("calr_bps = 12000000"));

    let bad = qoembac(
        &["admit", "--state", "state.csv", "--xnew", "1", "--cl", "1",
          "--policy", "pro-ibmac"],
        dir.path(),
    );
    assert_eq!(bad.status.code(), Some(2), "pro-ibmac without beta or preset");
}

#[test]
fn trace_synth_inspect_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let synth = qoembac(
        &["--quiet", "trace", "synth", "--mean-mbps", "1.5", "--burstiness", "3.0",
          "--duration", "15", "--seed", "9", "--output", "t.txt"],
        dir.path(),
    );
    assert!(synth.status.success(), "{}", stderr(&synth));
    let inspect = qoembac(&["trace", "inspect", "t.txt"], dir.path());
    assert!(inspect.status.success(), "{}", stderr(&inspect));
    let text = stdout(&inspect);
    assert!(text.contains("frames = 450"), "{text}");
    assert!(text.contains("duration_s = 15"), "{text}");
    // Mean payload rate lands on the requested bitrate.
    let mean: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("mean_payload_bps = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((mean - 1.5e6).abs() / 1.5e6 < 0.02, "mean {mean}");
}

#[test]
fn unknown_policy_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("state.csv"),
        "session_id,x_bps,p,x_min,x_max\n1,1000000,1.0,0,1000000\n",
    )
    .unwrap();
    let out = qoembac(
        &["admit", "--state", "state.csv", "--xnew", "1", "--cl", "10", "--policy", "bogus"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}
