use std::process::Command;

use wgqed::scenario::{execute, preset, Overrides, RunError, ScenarioConfig, PRESET_NAMES};
use wgqed::Execution;

fn wgqed() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_wgqed"));
    cmd.env_remove("WGQED_THREADS");
    cmd
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn presets_round_trip_through_canonical_json() {
    for name in PRESET_NAMES {
        let config = preset(name).unwrap();
        let text = config.to_canonical_json();
        let parsed = ScenarioConfig::parse(&text).unwrap();
        assert_eq!(parsed, config, "{name}");
        assert_eq!(parsed.to_canonical_json(), text, "{name}");
    }
}

#[test]
fn sparse_documents_normalize_and_round_trip() {
    let doc = r#"{
        "scenario": "custom",
        "emitter": {
            "ground_energies": [0.0],
            "excited_energies": [1.0],
            "dipoles": [[[[1, 0], [0, 0], [0, 0]]]]
        },
        "input": {"direction": "forward", "ground_index": 0, "photon_frequency": 1.0},
        "sweep": {"parameter": "theta", "start": 0, "stop": 1.5, "steps": 4}
    }"#;
    let config = ScenarioConfig::parse(doc).unwrap();
    assert_eq!(config.waveguide.v_g, 0.1);
    assert_eq!(config.integrator.rtol, 1e-9);
    let canonical = config.to_canonical_json();
    assert_eq!(ScenarioConfig::parse(&canonical).unwrap(), config);
    assert_eq!(ScenarioConfig::parse(&canonical).unwrap().to_canonical_json(), canonical);
}

#[test]
fn preset_documents_merge_overrides() {
    let doc = r#"{"scenario": "isotropic-scan", "loss": [{"isotropic": 0.05}], "sweep": {"steps": 11}}"#;
    let config = ScenarioConfig::parse(doc).unwrap();
    assert_eq!(config.loss, vec![wgqed::scenario::LossSpec::Isotropic(0.05)]);
    assert_eq!(config.sweep.unwrap().steps, 11);
    assert_eq!(config.sweep.unwrap().stop, std::f64::consts::PI);
    assert_eq!(config.emitter, preset("isotropic-scan").unwrap().emitter);
}

fn config_error(doc: &str) -> String {
    match ScenarioConfig::parse(doc) {
        Err(RunError::Config(msg)) => msg,
        other => panic!("expected config error, got {other:?}"),
    }
}

#[test]
fn schema_errors_name_the_field() {
    assert!(config_error(r#"{"scenario": "ixi-scan", "bogus": 1}"#).contains("bogus"));
    assert!(config_error(r#"{"scenario": "ixi-scan", "sweep": {"steps": 1}}"#).contains("sweep.steps"));
    assert!(config_error(r#"{"scenario": "ixi-scan", "input": {"ground_index": 5}}"#).contains("input.ground_index"));
    assert!(config_error(r#"{"scenario": "custom"}"#).contains("emitter"));
    assert!(config_error(r#"{"scenario": "two-level", "emitter": {"ground_energies": [0], "excited_energies": [2], "dipoles": [[[[1,0],[0,0],[0,0]]]]}}"#)
        .contains("emitter"));
    assert!(config_error(r#"{"scenario": "warp-drive"}"#).contains("warp-drive"));
    assert!(config_error("not json").contains("JSON"));
}

#[test]
fn overrides_replace_loss_and_steps() {
    let mut config = preset("isotropic-scan").unwrap();
    Overrides { loss: Some(0.003), steps: Some(5), ..Overrides::default() }.apply(&mut config).unwrap();
    let out = execute(&config, Execution::Sequential).unwrap();
    assert_eq!(out.table.columns[0], "theta");
    assert_eq!(out.table.rows.len(), 5);
}

#[test]
fn paradox_preset_csv_starts_at_given_populations() {
    let out = wgqed().args(["run", "paradox-emission"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = parse_csv(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(header, ["t", "pop_e1", "pop_e2", "p_forward", "p_backward", "p_loss", "trace"]);
    assert_eq!(rows[0][1], 0.2);
    assert_eq!(rows[0][2], 0.8);
}

#[test]
fn isotropic_scan_has_no_reflection_at_circular_points() {
    for loss in ["0.2", "0.003"] {
        let out = wgqed().args(["run", "isotropic-scan", "--loss", loss]).output().unwrap();
        assert_eq!(out.status.code(), Some(0));
        let (header, rows) = parse_csv(&String::from_utf8(out.stdout).unwrap());
        assert_eq!(header, ["theta", "re_t", "im_t", "re_r", "im_r", "p_loss"]);
        assert_eq!(rows.len(), 401);
        for k in [100, 300] {
            assert!(rows[k][3].abs() < 1e-10 && rows[k][4].abs() < 1e-10, "loss {loss} row {k}");
        }
    }
}

#[test]
fn ixi_scan_columns() {
    let out = wgqed().args(["run", "ixi-scan", "--steps", "5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = parse_csv(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(
        header,
        ["theta", "re_f_g1", "im_f_g1", "re_f_g2", "im_f_g2", "re_b_g1", "im_b_g1", "re_b_g2", "im_b_g2", "p_loss"]
    );
    assert_eq!(rows.len(), 5);
}

#[test]
fn runs_are_deterministic_across_thread_counts() {
    for name in PRESET_NAMES {
        let one = wgqed().env("WGQED_THREADS", "1").args(["run", name]).output().unwrap();
        let many = wgqed().env("WGQED_THREADS", "4").args(["run", name]).output().unwrap();
        let again = wgqed().args(["run", name]).output().unwrap();
        assert_eq!(one.status.code(), Some(0), "{name}");
        assert_eq!(one.stdout, many.stdout, "{name}");
        assert_eq!(one.stdout, again.stdout, "{name}");
    }
}

#[test]
fn exit_codes() {
    let unknown = wgqed().args(["run", "nonsense"]).output().unwrap();
    assert_eq!(unknown.status.code(), Some(1));

    let threads = wgqed().env("WGQED_THREADS", "zero").args(["run", "two-level"]).output().unwrap();
    assert_eq!(threads.status.code(), Some(1));

    let singular = wgqed().args(["run", "isotropic-scan", "--loss", "0"]).output().unwrap();
    assert_eq!(singular.status.code(), Some(2));
    let stderr = String::from_utf8(singular.stderr).unwrap();
    assert!(stderr.contains("theta = 0"), "{stderr}");
    // Failed points still appear, as NaN.
    let (_, rows) = parse_csv(&String::from_utf8(singular.stdout).unwrap());
    assert!(rows[0][1].is_nan());

    let projected = wgqed()
        .args(["run", "isotropic-scan", "--loss", "0", "--dark-state-projection"])
        .output()
        .unwrap();
    assert_eq!(projected.status.code(), Some(0));
    let (_, rows) = parse_csv(&String::from_utf8(projected.stdout).unwrap());
    assert!((rows[0][3].hypot(rows[0][4]) - 1.0).abs() < 1e-12);
    assert!(rows[0][1].hypot(rows[0][2]) < 1e-12);

    let bad_flag = wgqed().args(["run", "two-level", "--format", "xml"]).output().unwrap();
    assert_eq!(bad_flag.status.code(), Some(1));
}

#[test]
fn config_file_with_json_output() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("scan.json");
    let out_path = dir.path().join("out.json");
    std::fs::write(
        &config_path,
        r#"{"scenario": "ixi-scan", "sweep": {"steps": 3}, "output": {"format": "json"}}"#,
    )
    .unwrap();
    let out = wgqed()
        .args(["run", config_path.to_str().unwrap(), "--out", out_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(doc["scenario"], "ixi-scan");
    assert_eq!(doc["rows"].as_array().unwrap().len(), 3);
    assert_eq!(doc["columns"][0], "theta");

    std::fs::write(&config_path, r#"{"scenario": "ixi-scan", "sweep": {"steps": 0}}"#).unwrap();
    let bad = wgqed().args(["run", config_path.to_str().unwrap()]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8(bad.stderr).unwrap().contains("sweep.steps"));
}
