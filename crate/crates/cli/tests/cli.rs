use std::path::Path;
use std::process::{Command, Output};

fn hrw(dir: &Path, experiment: &str, config: &str, extra: &[&str]) -> Output {
    let path = dir.join(format!("{experiment}.config.json"));
    std::fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_hrw"))
        .arg(experiment)
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

#[test]
fn degree_prints_gamma_and_decoration() {
    let dir = tempfile::tempdir().unwrap();
    let o = hrw(dir.path(), "degree", r#"{"walk":{"N":4,"law":{"type":"geometric","c":2}}}"#, &[]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "gamma=1 decoration=minus");
    let json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("out/degree.json")).unwrap()).unwrap();
    assert_eq!(json["result"]["decoration"], "minus");
    assert_eq!(json["walkHash"].as_str().unwrap().len(), 64);
}

#[test]
fn single_step_return_probability_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = hrw(dir.path(), "transition", r#"{"walk":{"N":2,"law":{"type":"geometric","c":1}},"params":{"n":1,"rad":0}}"#, &[]);
    assert!(o.status.success());
    let json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("out/transition.json")).unwrap()).unwrap();
    assert_eq!(json["result"]["value"].as_f64().unwrap(), 0.0);
}

#[test]
fn benchmark_sweep_ends_near_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"{"walk":{"N":2,"law":{"type":"muC","mu":1,"cseq":{"type":"power","beta":0.5}}},
        "params":{"tGrid":[1e2,1e3,1e4,1e5,1e6,1e7,1e8]}}"#;
    let o = hrw(dir.path(), "asymptotic-benchmark", config, &["--quiet"]);
    assert!(o.status.success());
    assert!(stdout(&o).is_empty());
    let tsv = std::fs::read_to_string(dir.path().join("out/asymptotic-benchmark.tsv")).unwrap();
    let mut lines = tsv.lines();
    assert!(lines.next().unwrap().starts_with("# "));
    assert_eq!(lines.next().unwrap(), "t\tmeasured\tpredicted\tratio");
    let last: f64 = tsv.lines().last().unwrap().split('\t').nth(3).unwrap().parse().unwrap();
    assert!((0.9..=1.1).contains(&last), "final ratio {last}");
}

#[test]
fn validation_failures_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = hrw(dir.path(), "simulate", r#"{"walk":{"N":2,"law":{"type":"geometric","c":1}},"params":{"replicas":5,"horizon":3}}"#, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed"));
    assert!(!dir.path().join("out").exists());

    let o = hrw(dir.path(), "occupation", r#"{"walk":{"N":4,"law":{"type":"geometric","c":2}},"seed":1,"params":{"replicas":5,"t":50}}"#, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("requires recurrent walk"));

    let o = hrw(dir.path(), "degree", r#"{"walk":{"N":2,"law":{"type":"geometric","c":5}}}"#, &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_mode_validates_without_running() {
    let dir = tempfile::tempdir().unwrap();
    let o = hrw(dir.path(), "green", r#"{"walk":{"N":4,"law":{"type":"geometric","c":2}},"params":{"zeta":1.5}}"#, &["--check"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "ok");
    assert!(!dir.path().join("out").exists());
}

#[test]
fn seed_flag_overrides_config_and_output_is_complete() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"{"walk":{"N":3,"law":{"type":"geometric","c":1}},"seed":1,"params":{"replicas":50,"horizon":10}}"#;
    let o = hrw(dir.path(), "simulate", config, &["--seed", "99", "--threads", "2"]);
    assert!(o.status.success());
    let json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("out/simulate.json")).unwrap()).unwrap();
    assert_eq!(json["seed"], 99);
    let names: Vec<String> = std::fs::read_dir(dir.path().join("out"))
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert_eq!(names.len(), 2, "only final artifacts remain: {names:?}");
    let tsv = std::fs::read_to_string(dir.path().join("out/simulate.tsv")).unwrap();
    assert_eq!(tsv.lines().count(), 2 + 50);
}

#[test]
fn every_experiment_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("kernel-table", r#"{"walk":{"N":3,"law":{"type":"muD","mu":2,"dseq":{"type":"power","beta":0.3}}},"params":{"levels":8}}"#),
        ("green", r#"{"walk":{"N":4,"law":{"type":"geometric","c":2}},"params":{"zeta":1.5}}"#),
        ("incomplete-sweep", r#"{"walk":{"N":2,"law":{"type":"geometric","c":1}},"params":{"zeta":1,"tGrid":[1,10,100]}}"#),
        ("last-exit", r#"{"walk":{"N":8,"law":{"type":"muC","mu":1,"cseq":{"type":"geometric","eta":2}}},"params":{"radius":2}}"#),
        ("return-tail", r#"{"walk":{"N":2,"law":{"type":"geometric","c":1}},"params":{"horizon":10,"steps":500}}"#),
        ("chain-analytics", r#"{"walk":{"N":2,"law":{"type":"geometric","c":0.5}},"params":{"levels":6}}"#),
        ("max-process", r#"{"walk":{"N":2,"law":{"type":"geometric","c":1}},"params":{"n":10,"levels":12}}"#),
        ("timescale", r#"{"walk":{"N":100,"law":{"type":"geometric","c":1}},"params":{"mu":2,"eta":1.2,"levels":3}}"#),
        ("occupation", r#"{"walk":{"N":2,"law":{"type":"geometric","c":1}},"seed":3,"params":{"replicas":20,"t":100}}"#),
    ];
    for (experiment, config) in cases {
        let o = hrw(dir.path(), experiment, config, &[]);
        assert!(o.status.success(), "{experiment}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(dir.path().join(format!("out/{experiment}.json")).exists());
    }
}
