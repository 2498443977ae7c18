use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use refent::states::random_bipartite;
use refent::{fixtures, ToleranceConfig};
use refent_cli::StateFile;
use serde_json::Value;
use tempfile::TempDir;

fn refent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_refent"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_state(dir: &TempDir, name: &str, file: &StateFile) -> PathBuf {
    let p = dir.path().join(name);
    file.write(&p).unwrap();
    p
}

fn b9_file(dir: &TempDir) -> PathBuf {
    write_state(dir, "b9.json", &StateFile::from_state(&fixtures::b9_state().unwrap()))
}

fn compute(measure: &str, state: &Path, extra: &[&str]) -> (String, Value) {
    let mut args = vec!["compute", measure, "--state", state.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = refent(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let mut lines = out.lines();
    let scalar = lines.next().unwrap().to_string();
    let json: Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    (scalar, json)
}

#[test]
fn min_reflected_on_b9_file() {
    let dir = TempDir::new().unwrap();
    let path = b9_file(&dir);
    let (scalar, json) = compute("min_reflected", &path, &[]);
    assert_eq!(scalar, "0.405465108108");
    assert_eq!(json["unit"], "nats");
    assert_eq!(json["provenance"]["route"], "largest eigenvalue of the AA* marginal");

    let (_, double) = compute("prmi_double", &path, &["--alpha", "0.5"]);
    let a = json["value_nats"].as_f64().unwrap();
    let b = double["value_nats"].as_f64().unwrap();
    assert!((a - b).abs() <= 1e-6);
    assert!(double["provenance"]["details"]["iterations"].as_u64().is_some());

    let (bits, _) = compute("min_reflected", &path, &["--bits"]);
    let expected = -(2.0f64 / 3.0).log2();
    assert!((bits.parse::<f64>().unwrap() - expected).abs() < 1e-11);
}

#[test]
fn reflected_on_product_file_is_zero() {
    let dir = TempDir::new().unwrap();
    let product = refent::states::product_state(
        &refent::ComplexMatrix::from_real_diagonal(&[0.5, 0.5]),
        &refent::ComplexMatrix::from_real_diagonal(&[0.5, 0.5]),
    )
    .unwrap();
    let path = write_state(&dir, "product.json", &StateFile::from_state(&product));
    let (_, json) = compute("reflected", &path, &["--m", "1", "--n", "2"]);
    assert!(json["value_nats"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn every_measure_runs() {
    let dir = TempDir::new().unwrap();
    let path = b9_file(&dir);
    let rho = random_bipartite(9, 3, 3, 9).unwrap();
    let sigma = write_state(&dir, "sigma.json", &StateFile::from_state(&rho));
    let cases: &[(&str, &[&str])] = &[
        ("renyi_entropy", &["--alpha", "2", "--system", "a"]),
        ("mutual_information", &[]),
        ("petz_divergence", &["--alpha", "0.5", "--sigma", sigma.to_str().unwrap()]),
        ("prmi_single", &["--alpha", "0.5"]),
        ("deflected", &["--s", "0.5", "--alpha", "2"]),
        ("minimized_reflected", &["--n", "inf", "--seed", "4"]),
        ("cc_reflected", &["--alpha", "inf"]),
    ];
    for (measure, extra) in cases {
        let (_, json) = compute(measure, &path, extra);
        assert_eq!(json["measure"], *measure);
        assert!(json["value_nats"].as_f64().is_some(), "{measure}");
    }
    let (_, cc) = compute("cc_reflected", &path, &["--alpha", "inf"]);
    assert!((cc["value_nats"].as_f64().unwrap() + (2.0f64 / 3.0).ln()).abs() < 1e-12);
}

#[test]
fn state_round_trip_is_bitwise() {
    let dir = TempDir::new().unwrap();
    for seed in 0..5 {
        let rho = random_bipartite(seed, 2, 3, 6).unwrap();
        let path = write_state(&dir, "s.json", &StateFile::from_state(&rho));
        let back = StateFile::read(&path).unwrap().to_matrix().unwrap();
        let loaded = StateFile::load(&path, &ToleranceConfig::default()).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let (x, y, z) = (rho.rho()[(i, j)], back[(i, j)], loaded.rho()[(i, j)]);
                assert_eq!(x.re.to_bits(), y.re.to_bits());
                assert_eq!(x.im.to_bits(), y.im.to_bits());
                assert_eq!(x.re.to_bits(), z.re.to_bits());
                assert_eq!(x.im.to_bits(), z.im.to_bits());
            }
        }
    }
}

#[test]
fn corrupted_trace_is_rejected() {
    let dir = TempDir::new().unwrap();
    let bad = refent::ComplexMatrix::from_real_diagonal(&[0.3, 0.2, 0.2, 0.2]);
    let path = write_state(&dir, "bad.json", &StateFile::from_matrix(&bad, 2, 2));
    let o = refent(&["compute", "min_reflected", "--state", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("trace"));

    let report = dir.path().join("report.jsonl");
    let o = refent(&[
        "verify",
        "--fast",
        "--trials",
        "1",
        "--dims",
        "2x2",
        "--state",
        path.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let text = std::fs::read_to_string(&report).unwrap();
    let first: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(first["check_name"], "state_validation");
    assert_eq!(first["passed"], false);
}

#[test]
fn parse_errors_report_lines() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\n  \"d_a\": 2,\n  \"d_b\": oops\n}\n").unwrap();
    let o = refent(&["compute", "min_reflected", "--state", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn verify_fast_mode_passes() {
    let o = refent(&["verify", "--fast", "--trials", "2", "--dims", "2x2,2x3", "--tol.hermit_tol", "1e-11"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.lines().count() > 50);
    for line in out.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["passed"], true, "{line}");
    }
    let o = refent(&["verify", "--fast", "--tol.nonsense=1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_is_deterministic() {
    let strip = |o: Output| -> Vec<Value> {
        stdout(&o)
            .lines()
            .map(|l| {
                let mut v: Value = serde_json::from_str(l).unwrap();
                v["runtime_ms"] = Value::Null;
                v
            })
            .collect()
    };
    let args = ["verify", "--fast", "--trials", "1", "--dims", "2x2", "--seed", "77"];
    assert_eq!(strip(refent(&args)), strip(refent(&args)));
}

fn reproduce(target: &str, extra: &[&str]) -> String {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out.csv");
    let mut args = vec!["reproduce", target, "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = refent(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read_to_string(out).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn b9_curve_csv() {
    let text = reproduce("b9-curve", &[]);
    assert!(!text.contains('\r'));
    assert_eq!(text.lines().next().unwrap(), "n,sr_n,log2");
    let rows = rows(&text);
    assert_eq!(rows.len(), 60);
    let at2 = rows.iter().find(|r| r[0] == 2.0).unwrap();
    assert!((at2[1] - 2f64.ln()).abs() < 1e-10);
    assert_eq!(at2[2], 2f64.ln());
    for r in &rows {
        assert!((r[1] - fixtures::b9_reflected_closed_form(r[0])).abs() < 1e-10);
    }
}

#[test]
fn b3_crossing_csv() {
    let text = reproduce("b3-crossing", &[]);
    assert_eq!(text.lines().next().unwrap(), "p,x_u,x_1");
    let rows = rows(&text);
    assert_eq!(rows.len(), 101);
    for r in &rows {
        let (xu, x1) = fixtures::b3_closed_forms(r[0]);
        assert!((r[1] - xu).abs() < 1e-12 && (r[2] - x1).abs() < 1e-12);
    }
}

#[test]
fn theorem_scatter_csv() {
    let text = reproduce("theorem-scatter", &["--trials", "3", "--dims", "2x2,3x3", "--seed", "5"]);
    assert_eq!(text.lines().next().unwrap(), "seed,d_a,d_b,sr_inf,i_half,residual");
    let rows = rows(&text);
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r[5] <= 1e-6));
}

#[test]
fn unknown_target_fails() {
    let o = refent(&["reproduce", "b10-curve"]);
    assert_eq!(o.status.code(), Some(2));
}
