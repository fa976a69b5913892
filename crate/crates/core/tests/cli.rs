use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use credal_cfr::cli::RunManifest;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_otl-cfr"));
    c.env_remove("OTL_CFR_OUT_DIR");
    c
}

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(rel)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        run(&["estimate", "--idm-s", "1", "--credible-gamma", "0.9"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn estimate_from_records_matches_bundled_counts() {
    let bundled = run(&["estimate", "--json"]);
    let records = data("records/failure_history.csv");
    let from_records = run(&["estimate", "--json", "--records", p(&records)]);
    assert!(bundled.status.success() && from_records.status.success());
    assert_eq!(json(&bundled)["tables"], json(&from_records)["tables"]);
    let text = String::from_utf8(run(&["estimate", "--records", p(&records)]).stdout).unwrap();
    assert!(text.contains("40 failures"));
}

#[test]
fn estimate_writes_report_network_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tables.json");
    let net = dir.path().join("line.json");
    let status = run(&[
        "estimate",
        "--out",
        p(&out),
        "--network-out",
        p(&net),
        "--prior",
        "0.00042",
    ]);
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(report["failures"], 40);
    assert_eq!(report["tables"].as_array().unwrap().len(), 11);
    assert_eq!(
        std::fs::read_to_string(&net).unwrap(),
        std::fs::read_to_string(data("networks/line2_idm.json")).unwrap()
    );
    let manifest: RunManifest = serde_json::from_slice(
        &std::fs::read(dir.path().join("tables.json.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest.command, "estimate");
    assert_eq!(manifest.outputs.len(), 2);
    assert!(manifest.outputs.iter().all(|d| d.sha256.len() == 64));
}

#[test]
fn estimate_modes() {
    let dirichlet = run(&[
        "estimate",
        "--json",
        "--dirichlet-weights",
        p(&data("tables/prior_weights_baseline.json")),
    ]);
    let v = json(&dirichlet);
    assert_eq!(v["mode"]["kind"], "dirichlet");
    let t = &v["tables"][0]["intervals"][0];
    assert_eq!(t["lower"], t["upper"]);
    let credible = json(&run(&["estimate", "--json", "--credible-gamma", "0.95"]));
    assert_eq!(credible["mode"]["kind"], "credible_interval");
    let wide = json(&run(&["estimate", "--json", "--idm-s", "2"]));
    assert_eq!(wide["s"], 2.0);
}

#[test]
fn empty_record_history_gives_vacuous_tables() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("empty.csv");
    std::fs::write(&csv, credal_cfr::cfr::RECORD_HEADER.join(",") + "\n").unwrap();
    let out = run(&["estimate", "--json", "--records", p(&csv)]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["failures"], 0);
    for table in v["tables"].as_array().unwrap() {
        for iv in table["intervals"].as_array().unwrap() {
            assert_eq!(iv, &serde_json::json!([0.0, 1.0]));
        }
    }
}

#[test]
fn malformed_records_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bad.csv");
    let good = std::fs::read_to_string(data("records/failure_history.csv")).unwrap();
    let mut lines: Vec<&str> = good.lines().take(3).collect();
    lines.push("999,20,10,1,0,0,0.5,maybe");
    std::fs::write(&csv, lines.join("\n") + "\n").unwrap();
    let out = run(&["estimate", "--records", p(&csv)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("line 4"),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn infer_scenario_file_and_flags_agree() {
    let net = data("networks/line2_idm.json");
    let scenario = data("scenarios/line2_storm_uncertain_wind.json");
    let from_file = json(&run(&["infer", p(&net), "--scenario", p(&scenario)]));
    let from_flags = run(&[
        "infer",
        p(&net),
        "-e",
        "E1=e13,E3=e31,E4=e41,E5=e52,E6=e62",
        "--soft",
        "E2=e23:0.7,e22:0.3",
        "--prior",
        "0.00042",
    ]);
    assert!(
        from_flags.status.success(),
        "{}",
        String::from_utf8_lossy(&from_flags.stderr)
    );
    let from_flags = json(&from_flags);
    assert_eq!(from_file["lower"], from_flags["lower"]);
    assert_eq!(from_file["upper"], from_flags["upper"]);
    assert_eq!(from_file["mode"], "interval");
    let lower = from_file["lower"].as_f64().unwrap();
    assert!((lower - 1.9605e-2).abs() < 1e-6, "{lower}");
}

#[test]
fn infer_rejects_bad_evidence() {
    let net = data("networks/line1_idm.json");
    assert_eq!(
        run(&["infer", p(&net), "-e", "E1=e99"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["infer", p(&net), "-e", "E1"]).status.code(), Some(2));
    assert_eq!(
        run(&["infer", p(&net), "-e", "H=h1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["infer", p(&net), "--soft", "E2=e21:0.5,e22:0.2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["infer", "/nonexistent.json"]).status.code(), Some(1));
    assert_eq!(
        run(&["infer", p(&net), "-e", "E1=e13", "--max-combinations", "1"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn simulate_then_compare() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "simulate",
            "--config",
            p(&data("sim/single_condition.json")),
            "--replications",
            "4",
        ])
        .env("OTL_CFR_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let manifest: RunManifest =
        serde_json::from_slice(&std::fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest.seeds, vec![1, 2, 3, 4]);
    assert_eq!(manifest.config["replications"], 4);
    let names: Vec<_> = manifest.outputs.iter().map(|d| d.path.as_str()).collect();
    assert_eq!(names, ["trace.csv", "trace.json"]);

    let trace = dir.path().join("trace.csv");
    let text = run(&["compare", "--trace", p(&trace)]);
    assert!(text.status.success());
    assert!(String::from_utf8_lossy(&text.stdout).contains("idm:s=1"));
    let from_csv = json(&run(&["compare", "--json", "--trace", p(&trace)]));
    let from_json = json(&run(&[
        "compare",
        "--json",
        "--trace",
        p(&dir.path().join("trace.json")),
    ]));
    assert_eq!(from_csv, from_json);
    assert_eq!(from_csv["summaries"][0]["runs"], 4);
}

#[test]
fn simulate_rejects_invalid_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(
        &cfg,
        r#"{"horizon_hours": 10, "seed": 1, "checkpoints": {"every": 1},
            "conditions": [{"label": "a", "occurrence": 0.6, "failure_rate": 0.1},
                           {"label": "b", "occurrence": 0.6, "failure_rate": 0.1}]}"#,
    )
    .unwrap();
    let out = run(&["simulate", "--config", p(&cfg), "--out", p(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("trace.csv").exists());
}

#[test]
fn compare_reports_malformed_trace_line() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    std::fs::write(
        &trace,
        credal_cfr::sim::TRACE_HEADER.join(",")
            + "\n1,1,only,idm:s=1,0,0.5,0.01,0,1\n1,x,only,idm:s=1,0,0.5,0.01,0,1\n",
    )
    .unwrap();
    let out = run(&["compare", "--trace", p(&trace)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("line 3"),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
