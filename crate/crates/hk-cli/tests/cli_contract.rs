//! End-to-end contract of the `hk` binary: exit codes, envelope shape,
//! format gating, seed precedence, and byte-level determinism.
//!
//! Every test spawns the real executable; nothing here reaches into
//! library internals except to cross-check that the JSON artifact
//! re-parses to the exact values the library computed.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn hk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hk"))
        .args(args)
        .env_remove("HK_DEFAULT_SEED")
        .output()
        .expect("binary runs")
}

fn hk_with_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hk"))
        .args(args)
        .env_remove("HK_DEFAULT_SEED")
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn tmp_path(tag: &str) -> PathBuf {
    std::env::temp_dir().join(format!("hk-contract-{tag}-{}", std::process::id()))
}

#[test]
fn means_artifact_reparses_to_the_library_values() {
    let out = hk(&["means", "--a", "14,10", "--w", "0.7,0.3"]);
    assert_eq!(code(&out), 0, "stderr: {}", text(&out.stderr));
    let v = json(&out);

    let a = hk_core::PositiveSample::new(&[14.0, 10.0]).unwrap();
    let w = hk_core::WeightVector::new(&[0.7, 0.3]).unwrap();
    let report = hk_core::mean_gap(&a, &w).unwrap();
    // Shortest round-trip decimals: the JSON floats re-parse to the exact
    // f64 the library produced, not an approximation of it.
    assert_eq!(v["results"]["h_w"].as_f64().unwrap(), report.h_w);
    assert_eq!(v["results"]["m_w"].as_f64().unwrap(), report.m_w);
    assert_eq!(v["results"]["gap"].as_f64().unwrap(), report.gap_closed_form);

    assert!((v["results"]["h_w"].as_f64().unwrap() - 12.5).abs() < 1e-12);
    assert!((v["results"]["m_w"].as_f64().unwrap() - 12.8).abs() < 1e-12);
    assert!((v["results"]["gap"].as_f64().unwrap() - 0.3).abs() < 1e-12);
    assert_eq!(v["results"]["strict_bound_holds"], Value::Bool(true));
    assert_eq!(v["results"]["scaling_relation"]["holds"], Value::Bool(true));
}

#[test]
fn every_artifact_is_one_envelope() {
    let out = hk(&["means", "--a", "2,3,5", "--w", "uniform"]);
    let v = json(&out);
    let keys = v.as_object().unwrap();
    assert_eq!(keys.len(), 3);
    // Textual order is part of the artifact: config first, provenance last.
    let s = text(&out.stdout);
    let pos = |k: &str| s.find(&format!("\"{k}\"")).unwrap();
    assert!(pos("config") < pos("results") && pos("results") < pos("provenance"));
    assert_eq!(v["config"]["command"], "means");
    assert_eq!(v["config"]["w"], "uniform");
    assert_eq!(v["provenance"]["seed"], 7);
    assert_eq!(v["provenance"]["version"], env!("CARGO_PKG_VERSION"));

    let listed = json(&hk(&["means", "--a", "2,3,5", "--w", "0.2,0.3,0.5"]));
    assert_eq!(listed["config"]["w"], serde_json::json!([0.2, 0.3, 0.5]));
}

#[test]
fn equal_points_report_zero_gap() {
    let v = json(&hk(&["means", "--a", "1,1", "--w", "0.5,0.5"]));
    assert_eq!(v["results"]["h_w"].as_f64().unwrap(), 1.0);
    assert_eq!(v["results"]["m_w"].as_f64().unwrap(), 1.0);
    assert_eq!(v["results"]["gap"].as_f64().unwrap(), 0.0);
}

#[test]
fn input_errors_exit_two() {
    for args in [
        &["means", "--a", "14,-10", "--w", "0.7,0.3"][..],
        &["means", "--a", "14,10", "--w", "0.7,0.2,0.1"][..],
        &["means", "--a", "14,10", "--w", "0.7,0.3", "--format", "csv"][..],
        &["geometry", "--a", "3,4,6", "--w", "uniform", "--case", "1"][..],
        &["geometry", "--a", "3,4", "--w", "uniform", "--format", "csv"][..],
        &["figure", "--a", "2,3,4,5", "--w", "uniform"][..],
        &["recon", "--signal", "custom"][..],
        &["recon", "--signal", "sin", "--samples", "/nonexistent.json"][..],
        &["recon", "--signal", "sin", "--levels", "0"][..],
        &["recon", "--signal", "sin", "--levels", "17"][..],
        &["verify", "--cases", "0"][..],
        &["verify", "--format", "csv"][..],
        &["means", "--a", "14,10", "--w", "0.7,0.3", "--no-such-flag"][..],
    ] {
        let out = hk(args);
        assert_eq!(code(&out), 2, "args {args:?}, stderr: {}", text(&out.stderr));
    }
}

#[test]
fn non_convergence_owns_exit_code_three() {
    // The solver failure class stays distinct from input errors so scripts
    // can tell "bad invocation" from "scene the solver could not crack".
    let solver = hk_cli::CliError::from(hk_core::Error::NoConvergence {
        iterations: 500,
        max_residual: 1.0,
    });
    assert_eq!(solver.exit_code(), 3);
    assert_eq!(hk_cli::CliError::Input(String::new()).exit_code(), 2);
    assert_eq!(hk_cli::CliError::Property(String::new()).exit_code(), 1);
}

#[test]
fn injected_fault_is_caught_and_named() {
    let out = hk(&["verify", "--seed", "5", "--cases", "5", "--inject-bug"]);
    assert_eq!(code(&out), 1);
    let err = text(&out.stderr);
    assert!(err.contains("gap-identity"), "stderr: {err}");
    assert!(err.contains("minimal reproducing input"), "stderr: {err}");
    // The artifact still lands on stdout with the failure recorded.
    let v = json(&out);
    assert_eq!(v["results"]["pass"], Value::Bool(false));
    assert_eq!(v["config"]["inject_bug"], Value::Bool(true));
}

#[test]
fn verify_runs_the_full_property_set() {
    let out = hk(&["verify", "--seed", "11", "--cases", "2"]);
    assert_eq!(code(&out), 0, "stderr: {}", text(&out.stderr));
    let v = json(&out);
    let props = v["results"]["properties"].as_array().unwrap();
    assert_eq!(props.len(), 21);
    for p in props {
        assert_eq!(p["failures"], 0, "property {} failed", p["name"]);
    }
    let total: u64 = props.iter().map(|p| p["cases_run"].as_u64().unwrap()).sum();
    assert_eq!(v["results"]["total_cases"].as_u64().unwrap(), total);
    assert_eq!(v["results"]["failed_properties"], 0);
    assert_eq!(v["results"]["pass"], Value::Bool(true));
    for name in [
        "gap-identity",
        "case-consistency",
        "analytic-numeric-agreement",
        "step-localization",
        "translate-clip-agreement",
    ] {
        assert!(props.iter().any(|p| p["name"] == name), "{name} missing");
    }
}

#[test]
fn seed_resolution_order_is_flag_env_default() {
    let v = json(&hk(&["verify", "--cases", "1"]));
    assert_eq!(v["provenance"]["seed"], 7);

    let v = json(&hk_with_env(&["verify", "--cases", "1"], "HK_DEFAULT_SEED", "99"));
    assert_eq!(v["provenance"]["seed"], 99);

    let v = json(&hk_with_env(
        &["verify", "--cases", "1", "--seed", "3"],
        "HK_DEFAULT_SEED",
        "99",
    ));
    assert_eq!(v["provenance"]["seed"], 3);
}

#[test]
fn out_file_holds_exactly_the_stdout_bytes() {
    let first = hk(&["verify", "--seed", "42", "--cases", "10"]);
    assert_eq!(code(&first), 0);

    let path = tmp_path("out.json");
    let second = hk(&[
        "verify",
        "--seed",
        "42",
        "--cases",
        "10",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&second), 0);
    assert!(second.stdout.is_empty());
    let written = std::fs::read(&path).expect("artifact written");
    std::fs::remove_file(&path).ok();
    assert_eq!(written, first.stdout);
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = ["recon", "--signal", "sin", "--levels", "3"];
    let one = hk(&args);
    let two = hk(&args);
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, two.stdout);
}

#[test]
fn three_point_scene_crosses_at_the_predicted_point() {
    let out = hk(&["geometry", "--a", "3,4,6", "--w", "0.2,0.2,0.6", "--variant", "thm4"]);
    assert_eq!(code(&out), 0, "stderr: {}", text(&out.stderr));
    let v = json(&out);
    let r = &v["results"];
    let xb = r["x_bar"].as_array().unwrap();
    assert!((xb[0].as_f64().unwrap() - 4.0 / 13.0).abs() < 1e-15);
    assert!((xb[1].as_f64().unwrap() - 3.0 / 13.0).abs() < 1e-15);
    assert!((xb[2].as_f64().unwrap() - 20.0 / 13.0).abs() < 1e-15);
    assert!(r["max_residual"].as_f64().unwrap() <= 1e-10);
    assert_eq!(r["degenerate"], Value::Bool(false));

    let newton = &r["newton"];
    assert!(newton["max_gap_to_analytic"].as_f64().unwrap() <= 1e-8);
    let starts = newton["random_starts"].as_array().unwrap();
    assert_eq!(starts.len(), 2);
    for s in starts {
        assert!(s["max_gap_to_analytic"].as_f64().unwrap() <= 1e-8);
    }
}

#[test]
fn corollary_scene_reads_both_means_off_the_star_plane() {
    let out = hk(&["geometry", "--a", "3,6", "--w", "0.6,0.4", "--variant", "corollary"]);
    let v = json(&out);
    let r = &v["results"];
    let xb = r["x_bar"].as_array().unwrap();
    assert_eq!(xb[0].as_f64().unwrap(), 0.75);
    // The crossing height is the harmonic mean itself, bit for bit.
    assert_eq!(xb[1].as_f64().unwrap(), r["h_w"].as_f64().unwrap());
    assert_eq!(r["star"]["h_star"].as_f64().unwrap(), 7.5);
    assert_eq!(r["star"]["m_star"].as_f64().unwrap(), 10.0);
    assert_eq!(r["degenerate"], Value::Bool(true));
}

#[test]
fn uniform_weights_flatten_the_axis_surfaces() {
    let out = hk(&["geometry", "--a", "2,5,9", "--w", "uniform", "--variant", "thm3"]);
    let v = json(&out);
    assert_eq!(v["results"]["degenerate"], Value::Bool(true));
    for b in v["results"]["axis_b"].as_array().unwrap() {
        assert_eq!(b.as_f64().unwrap(), 0.0);
    }
}

#[test]
fn two_point_case_reports_the_crossing() {
    let out = hk(&["geometry", "--a", "14,10", "--w", "0.7,0.3", "--case", "3"]);
    assert_eq!(code(&out), 0, "stderr: {}", text(&out.stderr));
    let v = json(&out);
    let r = &v["results"];
    let case = &r["case"];
    assert_eq!(case["index"], 3);
    assert!((case["x_h"].as_f64().unwrap() - 0.625).abs() < 1e-14);
    let h = r["h_w"].as_f64().unwrap();
    assert!((case["y_h"].as_f64().unwrap() - h / 2.0).abs() < 1e-12);
    assert!((case["chord_at_x_h"].as_f64().unwrap() - h).abs() < 1e-12);
}

#[test]
fn figure_csv_carries_config_and_sections() {
    let out = hk(&[
        "figure",
        "--a",
        "3,4,6",
        "--w",
        "uniform",
        "--variant",
        "thm3",
        "--resolution",
        "5",
        "--format",
        "csv",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", text(&out.stderr));
    let s = text(&out.stdout);
    assert!(s.starts_with("# "));
    for needle in [
        "# command=figure",
        "# seed=7",
        "# surface=V1",
        "# surface=V2",
        "# surface=V3",
        "# surface=Pi",
        "# markers",
        "# scalars",
        "x1,x2,xn",
    ] {
        assert!(s.contains(needle), "missing {needle} in:\n{s}");
    }
    assert!(s.lines().any(|l| l.starts_with("x_bar,")));
    assert!(s.lines().any(|l| l.starts_with("h_w,")));
}

#[test]
fn figure_json_serializes_the_tracks() {
    let out = hk(&["figure", "--a", "3,4", "--w", "0.5,0.5", "--resolution", "9"]);
    let v = json(&out);
    let r = &v["results"];
    assert_eq!(r["resolution"], 9);
    let surfaces = r["surfaces"].as_array().unwrap();
    let names: Vec<&str> = surfaces.iter().map(|s| s["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["V1", "V2", "Pi"]);
    for s in surfaces {
        assert_eq!(s["points"].as_array().unwrap().len(), 9);
    }
}

#[test]
fn step_signal_localizes_the_jump() {
    let out = hk(&["recon", "--signal", "step", "--levels", "3"]);
    let v = json(&out);
    assert_eq!(v["results"]["overshoot"]["linear"].as_f64().unwrap(), 0.0625);
    assert_eq!(v["results"]["overshoot"]["pph"].as_f64().unwrap(), 0.0);
}

#[test]
fn smooth_signal_reports_fourth_order_slopes() {
    let out = hk(&["recon", "--signal", "sin", "--levels", "4"]);
    let v = json(&out);
    let r = &v["results"];
    assert_eq!(r["base_intervals"], 16);
    assert_eq!(r["domain"][0].as_f64().unwrap(), 0.6);
    assert_eq!(r["domain"][1].as_f64().unwrap(), 2.5);
    let table = r["table"].as_array().unwrap();
    assert_eq!(table.len(), 4);
    assert!(table[0]["linear"]["slope"].is_null());
    for op in ["linear", "pph"] {
        let slope = table[3][op]["slope"].as_f64().unwrap();
        assert!((slope - 4.0).abs() < 0.5, "{op} slope {slope}");
    }
}

#[test]
fn cubic_signal_is_reproduced_exactly_by_the_linear_operator() {
    let out = hk(&["recon", "--signal", "cubic", "--levels", "2", "--operator", "linear"]);
    let v = json(&out);
    for row in v["results"]["table"].as_array().unwrap() {
        assert!(row["linear"]["max_error"].as_f64().unwrap() <= 1e-13);
        assert!(row.get("pph").is_none());
    }
}

#[test]
fn custom_samples_route_through_both_operators() {
    let path = tmp_path("samples.json");
    std::fs::write(&path, r#"{"x":[0,1,2,3,4,5],"f":[0,1,4,9,16,25]}"#).unwrap();
    let file = path.to_str().unwrap();

    let out = hk(&["recon", "--signal", "custom", "--samples", file]);
    assert_eq!(code(&out), 0, "stderr: {}", text(&out.stderr));
    let v = json(&out);
    let r = &v["results"];
    assert_eq!(r["points"], 6);
    // Quadratic data: both operators reproduce the midpoints exactly.
    let want = [2.25, 6.25, 12.25];
    let lin = r["linear"].as_array().unwrap();
    let pph = r["pph"].as_array().unwrap();
    assert_eq!(lin.len(), want.len());
    for i in 0..want.len() {
        assert_eq!(lin[i].as_f64().unwrap(), want[i]);
        assert_eq!(pph[i].as_f64().unwrap(), want[i]);
    }

    let out = hk(&["recon", "--signal", "custom", "--samples", file, "--format", "csv"]);
    let s = text(&out.stdout);
    assert!(s.contains("# table=predictions"));
    assert!(s.contains("midpoint,linear,pph"));
    assert!(s.contains("# table=overshoot"));
    std::fs::remove_file(&path).ok();
}
