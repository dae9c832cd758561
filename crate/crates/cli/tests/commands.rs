use std::process::{Command, Output};

use u1walsh::circuit::{exact_circuit, gate_count};
use u1walsh::linalg::max_abs_diff;
use u1walsh::qasm::read_qasm;
use u1walsh::sim::circuit_unitary;
use u1walsh::studies::{cosine_sum_series, ModelSpec};
use u1walsh::trotter::step_circuit;
use u1walsh::{Digitization, Formulation, LatticeSpec, TrotterOrder, TrotterPlan};

fn u1walsh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_u1walsh"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = u1walsh(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn data_lines(s: &str) -> Vec<&str> {
    s.lines().filter(|l| !l.starts_with('#')).collect()
}

fn csv_records(s: &str) -> Vec<csv::StringRecord> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(s.as_bytes())
        .records()
        .map(|r| r.unwrap())
        .collect()
}

#[test]
fn output_is_deterministic() {
    let args = [
        "evolve",
        "--nq",
        "1",
        "--lattice",
        "2x3",
        "--g-grid",
        "0.2:5:4",
        "--dt",
        "0.1",
        "--theta-min",
        "0,0.5",
        "--theta-min-policy",
        "dt",
    ];
    let a = ok(&args);
    assert_eq!(a, ok(&args));
    let mut seq = args.to_vec();
    seq.push("--sequential");
    assert_eq!(data_lines(&a), data_lines(&ok(&seq)));
    assert!(a.starts_with("# u1walsh "));
    assert!(a.contains("# config: {"));
}

#[test]
fn export_round_trips_to_the_step_unitary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("step.qasm");
    let p = path.to_str().unwrap();
    let args = [
        "export",
        "--nq",
        "2",
        "--g",
        "0.7",
        "--dt",
        "0.1",
        "--theta-min",
        "0.5",
        "--theta-min-policy",
        "dt",
        "--order",
        "2",
        "--out",
        p,
    ];
    ok(&args);
    let first = std::fs::read(&path).unwrap();
    ok(&args);
    assert_eq!(first, std::fs::read(&path).unwrap());

    let read = read_qasm(&path).unwrap();
    let model = ModelSpec::new(LatticeSpec::new(2, 2).unwrap(), Formulation::Compact)
        .build(2, 0.7)
        .unwrap();
    let direct = step_circuit(
        &model,
        &TrotterPlan::new(TrotterOrder::Second, 0.1, 1, 0.05, 0.05).unwrap(),
    )
    .unwrap();
    assert_eq!(gate_count(&read), gate_count(&direct));
    let d = max_abs_diff(&circuit_unitary(&read).unwrap(), &circuit_unitary(&direct).unwrap());
    assert!(d < 1e-12, "{d}");
}

#[test]
fn export_counts_match_gatecount() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("step.qasm");
    let common = [
        "--nq",
        "2",
        "--g",
        "1.5",
        "--dt",
        "0.2",
        "--theta-min",
        "1e-2",
        "--basis",
        "weaved",
    ];
    let mut export = vec!["export", "--out", path.to_str().unwrap()];
    export.extend(common);
    ok(&export);
    let c = gate_count(&read_qasm(&path).unwrap());

    let mut count = vec!["gatecount", "--target", "step"];
    count.extend(common);
    let text = ok(&count);
    let rows = csv_records(&text);
    assert_eq!(rows.len(), 1);
    let header = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
        .headers()
        .unwrap()
        .clone();
    let field = |name: &str| -> usize {
        let i = header.iter().position(|h| h == name).unwrap();
        rows[0][i].parse().unwrap()
    };
    assert_eq!((field("rz"), field("cnot"), field("h")), (c.rz, c.cnot, c.h));
    assert_eq!((field("cphase"), field("swap")), (c.cphase, c.swap));
}

#[test]
fn theta_zero_gatecount_is_exact_synthesis() {
    let text = ok(&[
        "gatecount",
        "--target",
        "single-cos",
        "--nq",
        "1,2,3,4",
        "--g",
        "1",
        "--dt",
        "1",
    ]);
    for (r, n_q) in csv_records(&text).iter().zip(1..) {
        let b = Digitization::prescribed(1, n_q, 1.0, Formulation::Compact, None, None)
            .unwrap()
            .b_max[0];
        let s = cosine_sum_series(1, n_q, b, 1.0, 22).unwrap().scaled(-1.0);
        let c = gate_count(&exact_circuit(&s));
        assert_eq!(
            (r[8].parse::<usize>().unwrap(), r[9].parse::<usize>().unwrap()),
            (c.rz, c.cnot),
            "n_q = {n_q}"
        );
        assert_eq!(&r[7], "0", "nothing dropped at θ_min = 0");
    }
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"nq": [2], "g": [0.5], "format": "json", "formulation": "non-compact"}"#,
    )
    .unwrap();
    let text = ok(&[
        "spectrum",
        "--config",
        cfg.to_str().unwrap(),
        "--levels",
        "2",
        "--g",
        "0.1",
    ]);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["provenance"]["config"]["g"], serde_json::json!([0.1]));
    assert_eq!(doc["rows"].as_array().unwrap().len(), 2);
    // The oracle does not depend on g.
    let other = ok(&[
        "spectrum",
        "--config",
        cfg.to_str().unwrap(),
        "--levels",
        "2",
        "--g",
        "1",
    ]);
    let other: serde_json::Value = serde_json::from_str(&other).unwrap();
    for i in 0..2 {
        assert_eq!(doc["rows"][i]["reference"], other["rows"][i]["reference"]);
    }
}

#[test]
fn evolve_at_t_zero_is_one() {
    let text = ok(&[
        "evolve",
        "--nq",
        "1",
        "--lattice",
        "2x3",
        "--g",
        "0.3,3",
        "--t",
        "0",
        "--theta-min",
        "0,0.1",
    ]);
    for r in csv_records(&text) {
        assert!((r[5].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn bad_input_fails_cleanly() {
    for args in [
        vec!["gatecount", "--g", "-1"],
        vec!["spectrum", "--lattice", "2by2"],
        vec!["plaquette", "--formulation", "non-compact"],
        vec!["export", "--nq", "2,3"],
        vec!["gatecount", "--weave", "/nonexistent/weave.json"],
    ] {
        let out = u1walsh(&args);
        assert!(!out.status.success(), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    }
}
