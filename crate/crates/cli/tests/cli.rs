// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

use dc_core::{serialize_qasm, Circuit, Gate};

fn dcq(dir: &Path, args: &[&str], seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dcq"));
    cmd.args(args).current_dir(dir).env_remove("DC_SEED");
    if let Some(s) = seed {
        cmd.env("DC_SEED", s);
    }
    cmd.output().expect("dcq runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// 200 CNOTs over a ring of 6 qubits with X gates on the odd qubits first.
fn write_fixture(dir: &Path) {
    let mut c = Circuit::new("ring", 6);
    c.extend([Gate::x(1), Gate::x(3), Gate::x(5)]);
    c.extend((0..200).map(|i| Gate::cnot(i % 6, (i + 1) % 6)));
    std::fs::write(dir.join("ring.qasm"), serialize_qasm(&c)).unwrap();
    std::fs::write(dir.join("quiet.noise"), "seed = 3\n").unwrap();
    std::fs::write(
        dir.join("loud.noise"),
        "eps_1q = 0.001\neps_2q = 0.01\neps_meas = 0.01\nt1_layers = 300\nseed = 3\n",
    )
    .unwrap();
}

fn config(dir: &Path, file: &str, body: &str) {
    std::fs::write(dir.join(file), format!("circuit = ring.qasm\nshots = 500\n{body}")).unwrap();
}

fn report_json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn noiseless_run_is_perfect_and_sdc_has_forty_jobs() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    config(dir.path(), "ideal.cfg", "noise = quiet.noise\nmode = sdc:5\n");
    let r = report_json(&stdout(&dcq(dir.path(), &["run", "ideal.cfg"], None)));
    assert_eq!(r["metrics"]["pst"], 100.0);
    assert_eq!(r["metrics"]["e_max_f"], 100.0);
    assert_eq!(r["metrics"]["job_count"], 40);
    assert_eq!(r["run"]["jobs"].as_array().unwrap().len(), 40);

    let manifest = stdout(&dcq(dir.path(), &["slice", "ring.qasm", "--mode", "sdc:5"], None));
    assert_eq!(report_json(&manifest)["job_count"], 40);
}

#[test]
fn seed_override() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    config(dir.path(), "a.cfg", "noise = loud.noise\nmode = baseline\nseed = 11\n");
    let plain = stdout(&dcq(dir.path(), &["run", "a.cfg"], None));
    let same = stdout(&dcq(dir.path(), &["run", "a.cfg"], Some("11")));
    let other = stdout(&dcq(dir.path(), &["run", "a.cfg"], Some("12")));
    assert_eq!(plain, same);
    assert_ne!(plain, other);
    assert_eq!(report_json(&other)["noise"]["seed"], 12);
    assert_eq!(dcq(dir.path(), &["run", "a.cfg"], Some("twelve")).status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    let code = |args: &[&str]| dcq(dir.path(), args, None).status.code();

    assert_eq!(code(&["run", "missing.cfg"]), Some(2));
    config(dir.path(), "bad.cfg", "mode = sdc:0\n");
    assert_eq!(code(&["run", "bad.cfg"]), Some(2));

    std::fs::write(dir.path().join("broken.qasm"), "qreg q[2];\ncx q[0];\n").unwrap();
    assert_eq!(code(&["slice", "broken.qasm", "--mode", "sdc:5"]), Some(3));
    std::fs::write(dir.path().join("unknown.qasm"), "qreg q[2];\nrz q[0];\n").unwrap();
    assert_eq!(code(&["slice", "unknown.qasm", "--mode", "sdc:5"]), Some(3));

    assert_eq!(code(&["route", "ring.qasm", "--map", "linear-4"]), Some(4));
    std::fs::write(dir.path().join("split.map"), "6\n0 1\n1 2\n3 4\n4 5\n").unwrap();
    assert_eq!(code(&["route", "ring.qasm", "--map", "split.map"]), Some(4));
}

#[test]
fn route_reports_swaps_for_plans_and_circuits() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    let manifest = stdout(&dcq(dir.path(), &["slice", "ring.qasm", "--mode", "sdc:5"], None));
    std::fs::write(dir.path().join("plan.json"), manifest).unwrap();
    let plan = report_json(&stdout(&dcq(dir.path(), &["route", "plan.json", "--map", "linear-6"], None)));
    assert_eq!(plan["blocks"], 40);
    let whole = report_json(&stdout(&dcq(dir.path(), &["route", "ring.qasm", "--map", "linear-6"], None)));
    assert_eq!(whole["blocks"], 1);
    // The ring's closing edge 5-0 is never adjacent on a line.
    assert!(whole["swap_count"].as_u64().unwrap() > 0);
    assert!(plan.get("route_time_us").is_none());
    let timed = report_json(&stdout(&dcq(dir.path(), &["route", "ring.qasm", "--map", "linear-6", "--timing"], None)));
    assert!(timed["route_time_us"].as_f64().is_some());
}

#[test]
fn report_prints_ratio_column() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    for (name, mode) in [("base", "baseline"), ("sdc", "sdc:5"), ("ddc", "ddc:0.7")] {
        config(dir.path(), &format!("{name}.cfg"), &format!("name = ring\nnoise = loud.noise\nmode = {mode}\n"));
        let out = dcq(dir.path(), &["run", &format!("{name}.cfg"), "-o", &format!("{name}.json")], None);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let csv = stdout(&dcq(dir.path(), &["report", "base.json", "sdc.json", "ddc.json", "--csv"], None));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("circuit,baseline_pst,"));
    assert!(lines[0].ends_with(",pst_sdc_over_baseline"));
    assert!(lines[1].starts_with("ring,"));
    assert!(lines[1].ends_with('x') || lines[1].ends_with("inf"));
    let text = stdout(&dcq(dir.path(), &["report", "base.json", "sdc.json"], None));
    assert!(text.contains("PST sdc/baseline"));
}

#[test]
fn bench_routing_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(&dcq(dir.path(), &["bench-routing", "--sizes", "4,8", "--family", "mixed"], None));
    assert_eq!(out, stdout(&dcq(dir.path(), &["bench-routing", "--sizes", "4,8", "--family", "mixed"], None)));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "family,blocks,weight,swaps");
    assert!(lines[1].starts_with("mixed,4,20,"));
    let timed = stdout(&dcq(dir.path(), &["bench-routing", "--sizes", "4,8,16", "--timing", "--reps", "1"], None));
    assert!(timed.lines().last().unwrap().starts_with("# linear fit r2 = "));
}
