use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn k3bps(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_k3bps"))
        .args(args)
        .env_remove("K3BPS_THREADS")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

#[test]
fn hilb_values_and_bounds() {
    let o = k3bps(&["hilb", "--nmax", "3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o), serde_json::json!([1, 24, 324, 3200]));
    let o = k3bps(&["hilb", "--nmax", "0", "--format", "csv"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "n,chi\n0,1\n");
    assert_eq!(code(&k3bps(&["hilb", "--nmax", "-1"])), 2);
    assert_eq!(code(&k3bps(&["hilb"])), 2);
}

#[test]
fn kkv_tables() {
    let o = k3bps(&["kkv", "--gmax", "1", "--hmax", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["rows"], serde_json::json!([[1, 24], [0, -2]]));
    let o = k3bps(&["kkv", "--hmax", "0"]);
    assert_eq!(json(&o)["rows"], serde_json::json!([[1]]));
    let o = k3bps(&["kkv", "--gmax", "3", "--hmax", "2", "--format", "csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("h,g0,g1,g2,g3\n"));
    assert!(text.ends_with("2,324,-54,3,0\n"));
}

#[test]
fn multicover_examples() {
    let dir = tempfile::tempdir().unwrap();
    let gram = dir.path().join("gram.json");
    fs::write(&gram, r#"{"rank": 1, "gram": [[0]]}"#).unwrap();
    let g = gram.to_str().unwrap();
    let o = k3bps(&["multicover", "--gram", g, "--v", "0;1;5"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["J"], "24");
    let o = k3bps(&["multicover", "--gram", g, "--v", "0;2;-4"]);
    assert_eq!(json(&o)["J"], "30");
    assert_eq!(code(&k3bps(&["multicover", "--gram", g, "--v", "0;1/2;1"])), 3);
    assert_eq!(code(&k3bps(&["multicover", "--gram", g, "--v", "0;1,1;1"])), 2);

    let bare = dir.path().join("bare.json");
    fs::write(&bare, "[[2]]").unwrap();
    let o = k3bps(&["multicover", "--gram", bare.to_str().unwrap(), "--v", "1;0;1"]);
    // ⟨v,v⟩ = −2: χ(Hilb^0) = 1
    assert_eq!(json(&o)["J"], "1");
    let o = k3bps(&["multicover", "--gram", bare.to_str().unwrap(), "--v", "0;1;0", "--convention", "literal"]);
    assert_eq!(json(&o)["J"], "3200");
}

#[test]
fn verify_identities_pass() {
    for args in [
        vec!["verify", "pt-bps"],
        vec!["verify", "pt-bps", "--source", "synthetic", "--gmax", "3", "--seed", "4"],
        vec!["verify", "behrend-log", "--seed", "2", "--charges", "3"],
        vec!["verify", "lemma46", "--count", "100"],
        vec!["verify", "gerbe-rescale", "--r", "3", "--gmax", "2"],
        vec!["verify", "isometry", "--count", "20"],
    ] {
        let o = k3bps(&args);
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let report = json(&o);
        assert_eq!(report["pass"], true);
        assert!(report["first_mismatch"].is_null());
    }
}

#[test]
fn verify_reports_verified_box() {
    let o = k3bps(&["verify", "pt-bps", "--t-max", "4", "--q-max", "6"]);
    let r = json(&o);
    assert_eq!(r["verified_box"]["t_max"], serde_json::json!([4]));
    assert!(r["checked"].as_u64().unwrap() > 0);
}

#[test]
fn table_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("gv.json");
    fs::write(&table, r#"[{"g": 0, "beta": [1], "n": 3}, {"g": 2, "beta": [2], "n": -1}]"#).unwrap();
    let t = table.to_str().unwrap();
    let o = k3bps(&["verify", "pt-bps", "--source", "file", "--table", t, "--t-max", "2"]);
    assert_eq!(code(&o), 0);
    let o = k3bps(&["gv-resum", "--source", "file", "--table", t, "--t-max", "2"]);
    let s = json(&o);
    let lead = s["terms"]
        .as_array()
        .unwrap()
        .iter()
        .find(|m| m["t"] == serde_json::json!([1]) && m["u"] == -2)
        .unwrap();
    assert_eq!(lead["c"], "3");
    assert_eq!(code(&k3bps(&["verify", "pt-bps", "--source", "file"])), 2);
}

#[test]
fn gerbe_rescale_from_series_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    let o = k3bps(&["gv-resum", "--gmax", "1", "--t-max", "1", "--output", f.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let o = k3bps(&["gerbe-rescale", "--series", f.to_str().unwrap(), "--r", "2"]);
    let s = json(&o);
    let first = &s["terms"][0];
    assert_eq!((first["u"].as_i64(), first["c"].as_str()), (Some(-2), Some("162")));
}

#[test]
fn config_file_and_override() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("job.conf");
    fs::write(&conf, "# job\nnmax = 2\nformat = csv\n").unwrap();
    let c = conf.to_str().unwrap();
    let o = k3bps(&["--config", c, "hilb"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "n,chi\n0,1\n1,24\n2,324\n");
    let o = k3bps(&["hilb", "--config", c, "--nmax", "1"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "n,chi\n0,1\n1,24\n");
    fs::write(&conf, "seed = 5\ncount = 10\n").unwrap();
    assert_eq!(code(&k3bps(&["verify", "lemma46", "--config", c])), 0);
    fs::write(&conf, "broken line\n").unwrap();
    assert_eq!(code(&k3bps(&["hilb", "--config", c])), 2);
}

#[test]
fn deterministic_output_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let args = ["verify", "behrend-log", "--seed", "17", "--charges", "4", "--output", p.to_str().unwrap()];
        assert_eq!(code(&k3bps(&args)), 0);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    for p in [&a, &b] {
        let args = ["gv-resum", "--source", "synthetic", "--seed", "3", "--gmax", "3", "--output", p.to_str().unwrap()];
        k3bps(&args);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn thread_override() {
    let o = Command::new(env!("CARGO_BIN_EXE_k3bps"))
        .args(["verify", "pt-bps"])
        .env("K3BPS_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let o = Command::new(env!("CARGO_BIN_EXE_k3bps"))
        .args(["hilb", "--nmax", "1"])
        .env("K3BPS_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors() {
    assert_eq!(code(&k3bps(&["verify", "nonsense"])), 2);
    assert_eq!(code(&k3bps(&["verify", "pt-bps", "--q-max", "1000"])), 2);
    assert_eq!(code(&k3bps(&["verify", "pt-bps", "--t-max", "x"])), 2);
    assert_eq!(code(&k3bps(&["gerbe-rescale", "--r", "0"])), 2);
}
