use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn tarclust(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tarclust")).args(args).output().expect("run tarclust")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn out_arg(dir: &Path) -> &str {
    dir.to_str().unwrap()
}

#[test]
fn cluster_writes_every_output() {
    let tmp = tempfile::tempdir().unwrap();
    let (panel, windows) = (data("panel.csv"), data("windows.toml"));
    let out = tarclust(&[
        "cluster", "-i", &panel, "-c", &windows, "--no-nonlinearity-test", "-o", out_arg(tmp.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["report.json", "summary.json", "features.csv", "silhouette.svg", "clusters.svg"] {
        assert!(tmp.path().join(f).is_file(), "{f} missing");
    }
    let report = json(tmp.path().join("report.json"));
    let names: Vec<&str> = report["windows"].as_array().unwrap().iter().map(|w| w["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["early", "middle", "late"]);
    assert_eq!(report["config"]["seed"], 7);
    assert_eq!(report["labels"].as_array().unwrap().len(), 12);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().filter(|l| l.contains("average silhouette")).count(), 3);
}

#[test]
fn flags_override_the_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let (panel, windows) = (data("panel.csv"), data("windows.toml"));
    let out = tarclust(&[
        "cluster", "-i", &panel, "-c", &windows, "--seed", "3", "--c-max", "4", "--k", "2",
        "--no-nonlinearity-test", "--serial", "-o", out_arg(tmp.path()),
    ]);
    assert_eq!(code(&out), 0);
    let cfg = &json(tmp.path().join("report.json"))["config"];
    assert_eq!(cfg["seed"], 3);
    assert_eq!(cfg["c_max"], 4);
    assert_eq!(cfg["k"], 2);
    assert_eq!(cfg["parallel"], false);
    assert_eq!(cfg["bootstrap_reps"], 199);
}

#[test]
fn features_verb_writes_a_matrix() {
    let tmp = tempfile::tempdir().unwrap();
    let panel = data("panel.csv");
    let out = tarclust(&["features", "-i", &panel, "--columns", "GOLD,COAL,TIN", "-o", out_arg(tmp.path())]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(tmp.path().join("features.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "window,feature,GOLD,COAL,TIN");
    let rows: Vec<&str> = lines.collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.starts_with("full,") && r.split(',').count() == 5));
    assert!(!tmp.path().join("report.json").exists());
}

#[test]
fn nonlinearity_table_and_json() {
    let tmp = tempfile::tempdir().unwrap();
    let panel = data("panel.csv");
    let out = tarclust(&[
        "test-nonlinearity", "-i", &panel, "--columns", "ALUMINUM,COAL", "--bootstrap-reps", "100", "-o",
        out_arg(tmp.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.lines().next().unwrap().contains("1 vs 2"));
    assert_eq!(stdout.lines().count(), 3);
    let v = json(tmp.path().join("nonlinearity.json"));
    assert_eq!(v["bootstrap_reps"], 100);
    let series = v["series"].as_array().unwrap();
    assert_eq!(series.len(), 2);
    for s in series {
        let p = s["p_values"].as_array().unwrap();
        assert_eq!(p.len(), 2);
        assert!(p.iter().all(|x| (0.0..=1.0).contains(&x.as_f64().unwrap())));
    }
}

#[test]
fn simulate_writes_recovery_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tarclust(&[
        "simulate", "--replicates", "2", "--n-per-dgm", "3", "--length", "300", "--dgms", "ser03,ser09",
        "--c-max", "4", "--bootstrap-reps", "100", "-o", out_arg(tmp.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["summary.json", "replicates.json", "replicates.csv", "silhouette.svg", "grouping.svg"] {
        assert!(tmp.path().join(f).is_file(), "{f} missing");
    }
    let s = json(tmp.path().join("summary.json"));
    assert_eq!(s["summary"]["replicates"], 2);
    assert_eq!(s["config"]["dgms"], serde_json::json!(["ser03", "ser09"]));
    assert_eq!(json(tmp.path().join("replicates.json")).as_array().unwrap().len(), 2);
    assert!(String::from_utf8(out.stdout).unwrap().contains("exact grouping"));
}

#[test]
fn missing_input_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tarclust(&["cluster", "-i", "/nonexistent/panel.csv", "-o", out_arg(tmp.path())]);
    assert_eq!(code(&out), 3);
    let panel = data("panel.csv");
    let out = tarclust(&["features", "-i", &panel, "--columns", "GOLD,URANIUM", "-o", out_arg(tmp.path())]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("URANIUM"));
}

#[test]
fn bad_configuration_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let panel = data("panel.csv");
    let o = out_arg(tmp.path());
    assert_eq!(code(&tarclust(&["cluster", "-i", &panel, "--c-min", "9", "--c-max", "3", "-o", o])), 2);
    assert_eq!(code(&tarclust(&["cluster", "-i", &panel, "--criterion", "mdl", "-o", o])), 2);
    assert_eq!(code(&tarclust(&["cluster", "-i", &panel, "-c", "/nonexistent.toml", "-o", o])), 2);
    let bad = tmp.path().join("bad.toml");
    std::fs::write(&bad, "bogus_key = 1\n").unwrap();
    assert_eq!(code(&tarclust(&["cluster", "-i", &panel, "-c", bad.to_str().unwrap(), "-o", o])), 2);
    assert_eq!(code(&tarclust(&["simulate", "--stationarize", "log_diff", "-o", o])), 2);
    assert_eq!(code(&tarclust(&["simulate", "--dgms", "ser42", "-o", o])), 2);
}

#[test]
fn unusable_data_exits_4() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("short.csv");
    let mut text = String::from("date,a,b,c\n");
    for i in 0..40 {
        let (year, month) = (2000 + i / 12, i % 12 + 1);
        text.push_str(&format!("{year}-{month:02}-01,{},{},3.0\n", 1 + i, 2 + 2 * i));
    }
    std::fs::write(&csv, text).unwrap();
    let out = tarclust(&["cluster", "-i", csv.to_str().unwrap(), "-o", out_arg(&tmp.path().join("o"))]);
    assert_eq!(code(&out), 4, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn unwritable_output_exits_1() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let panel = data("panel.csv");
    let out = tarclust(&[
        "features", "-i", &panel, "--columns", "GOLD,COAL", "-o", blocker.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
}
