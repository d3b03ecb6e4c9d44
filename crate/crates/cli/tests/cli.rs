use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qlwave(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qlwave"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn invalid_beta_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = qlwave(&["blowup", "--beta", "0.4"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_str(stderr(&o).trim()).unwrap();
    assert_eq!(err["error"]["kind"], "validation");
    assert!(err["error"]["message"].as_str().unwrap().contains("beta > 1/2"));
    assert!(!dir.path().join("blowup.json").exists());
}

#[test]
fn malformed_inputs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"scenario": "model", "bogus": 1}"#).unwrap();
    for args in [
        vec!["blowup", "--config", cfg.to_str().unwrap()],
        vec!["blowup", "--config", "/nonexistent/config.json"],
        vec!["blowup", "--scenario", "tsunami"],
        vec!["rate", "--lambda", "0.2"],
        vec!["sweep", "--seeds-x1", "2"],
        vec!["frobnicate"],
    ] {
        let o = qlwave(&args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn unwritable_output_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let o = qlwave(&["blowup", "--scenario", "model"], &blocker.join("sub"));
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let err: Value = serde_json::from_str(stderr(&o).trim()).unwrap();
    assert_eq!(err["error"]["kind"], "runtime");
}

#[test]
fn blowup_report_embeds_config_and_schema() {
    let dir = tempfile::tempdir().unwrap();
    let o = qlwave(&["blowup", "--scenario", "c_variant", "--eps", "0.001"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let r = json(&dir.path().join("blowup.json"));
    assert_eq!(r["schema_version"], "1.0");
    assert_eq!(r["command"], "blowup");
    assert_eq!(r["config"]["scenario"], "c_variant");
    assert_eq!(r["config"]["params"]["eps"], 0.001);
    assert!(r["config"]["resolution"]["dt"].as_f64().unwrap() > 0.0);
    let t = r["result"]["report"]["t_eps"].as_f64().unwrap();
    assert!(t > 0.0 && t <= r["result"]["t_bound"].as_f64().unwrap());
    assert!(r["result"]["report"]["nu1"].as_f64().unwrap() > 0.0);
    assert!(r["result"]["report"]["audits"].as_array().unwrap().iter().all(|a| a["passed"] == true));
    let history = fs::read_to_string(dir.path().join("min_phi_x.csv")).unwrap();
    assert!(history.starts_with("t,min_phi_x\n"));
}

#[test]
fn flags_override_config_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"scenario": "c_variant", "params": {"eps": 0.001, "c": 0.1}, "eps_list": [0.01, 0.001]}"#).unwrap();
    let o = qlwave(&["sweep", "--config", cfg.to_str().unwrap(), "--c", "0.3"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let r = json(&dir.path().join("sweep.json"));
    assert_eq!(r["config"]["params"]["c"], 0.3);
    assert_eq!(r["config"]["params"]["eps"], 0.001);
    assert_eq!(r["config"]["params"]["beta"], 1.0);
    assert_eq!(r["result"]["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn rate_writes_series_and_fit() {
    let dir = tempfile::tempdir().unwrap();
    let o = qlwave(&["rate", "--scenario", "model"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("rate.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "k,t,gap,i,i1,i2,i3,outer_ratio,min_phi_x,spacing_at_min");
    let values: Vec<f64> = lines.map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert_eq!(values.len(), 8);
    assert!(values.windows(2).all(|w| w[1] > w[0]));
    assert!(!csv.contains('\r') && csv.ends_with('\n'));
    let r = json(&dir.path().join("rate.json"));
    assert_eq!(r["result"]["strictly_increasing"], true);
    assert!(r["result"]["fit"]["exponent"].as_f64().unwrap() >= 1.0);
}

#[test]
fn every_subcommand_writes_its_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["--scenario", "source_term", "--seeds-x1", "40", "--seeds-x2", "5"];
    for (cmd, files) in [
        ("simulate", vec!["field.csv", "simulate.json"]),
        ("norm", vec!["norm.json"]),
        ("audit", vec!["audit.json"]),
    ] {
        let mut args = vec![cmd];
        args.extend(base);
        let o = qlwave(&args, dir.path());
        assert!(o.status.success(), "{cmd}: {}", stderr(&o));
        for f in files {
            assert!(dir.path().join(f).exists(), "{cmd}: {f}");
        }
    }
    let field = fs::read_to_string(dir.path().join("field.csv")).unwrap();
    assert!(field.starts_with("t,x1,x2,phi,v,phi_x,w,phi_xx,w_x\n"));
    let n = json(&dir.path().join("norm.json"));
    assert!(n["result"]["windowed_i"]["total"].as_f64().unwrap() > 0.0);
    let a = json(&dir.path().join("audit.json"));
    assert!(a["result"]["flags"].as_array().unwrap().len() >= 5);
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, threads) in [(a.path(), "0"), (b.path(), "1")] {
        for cmd in ["sweep", "rate"] {
            let o = qlwave(&[cmd, "--scenario", "model", "--threads", threads], dir);
            assert!(o.status.success(), "{}", stderr(&o));
        }
        let o = qlwave(
            &["blowup", "--scenario", "perturbed_data", "--seeds-x1", "40", "--seeds-x2", "5", "--threads", threads],
            dir,
        );
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for f in ["sweep.csv", "sweep.json", "rate.csv", "rate.json", "blowup.json", "min_phi_x.csv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}
