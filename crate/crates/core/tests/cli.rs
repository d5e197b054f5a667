use std::process::{Command, Output};

use serde_json::Value;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_besov-dunkl")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

const SMALL: [&str; 2] = ["--grid-points", "512"];

#[test]
fn seminorm_gaussian() {
    let v = json(&cli(&["seminorm", "--function", "gaussian", "--alpha", "0.5", "--p", "2", "--q", "2", "--beta", "0.5"]));
    for k in ["bd", "kd", "ed"] {
        let s = v["seminorms"][k].as_f64().unwrap();
        assert!(s.is_finite() && s > 0.0, "{k} = {s}");
    }
    let rows = v["per_scale"].as_array().unwrap().len();
    assert!((17..=30).contains(&rows));
}

#[test]
fn seminorm_constant_and_sup_branch() {
    let v = json(&cli(&["seminorm", "--function", "constant", "--q", "inf", SMALL[0], SMALL[1]]));
    assert_eq!(v["flags"]["degenerate"], Value::Bool(true));
    assert_eq!(v["params"]["q"], Value::String("inf".into()));
    for k in ["bd", "kd", "ed"] {
        assert_eq!(v["seminorms"][k].as_f64(), Some(0.0));
    }
}

#[test]
fn seminorm_csv_plot_data() {
    let plot = std::env::temp_dir().join(format!("bd_plot_{}.csv", std::process::id()));
    let out = cli(&["seminorm", "--output", "csv", "--scales", "-3:1:5", "--plot", plot.to_str().unwrap(), SMALL[0], SMALL[1]]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("x,w,k,e\n"));
    assert_eq!(std::fs::read_to_string(&plot).unwrap(), text);
    let _ = std::fs::remove_file(plot);
}

#[test]
fn usage_errors() {
    let out = cli(&["seminorm", "--function", "no_such_function"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no_such_function"));
    assert_eq!(cli(&["seminorm", "--beta", "-1", SMALL[0], SMALL[1]]).status.code(), Some(2));
    assert_eq!(cli(&["seminorm", "--scales", "1:2", SMALL[0], SMALL[1]]).status.code(), Some(2));
    assert_eq!(cli(&["verify", "--suite", "S9"]).status.code(), Some(2));
}

#[test]
fn transform_translate_convolve() {
    let out = cli(&["transform", "--output", "csv", SMALL[0], SMALL[1]]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("lambda,re,im\n"));

    let dir = std::env::temp_dir();
    let path = dir.join(format!("bd_tau_{}.csv", std::process::id()));
    let p = path.to_str().unwrap();
    let out = cli(&["translate", "--function", "bump", "--x", "0", "--output", "csv", "--out", p, SMALL[0], SMALL[1]]);
    assert!(out.status.success());
    // tau_0 is the identity, so reading the file back gives the bump again
    let direct = cli(&["translate", "--function", "bump", "--x", "0", "--output", "csv", SMALL[0], SMALL[1]]);
    let again = cli(&["translate", "--function", p, "--x", "0", "--output", "csv", SMALL[0], SMALL[1]]);
    assert_eq!(direct.stdout, again.stdout);
    let wrong = cli(&["translate", "--function", p, "--x", "0", "--grid-points", "256"]);
    assert_eq!(wrong.status.code(), Some(3));
    let _ = std::fs::remove_file(path);

    let v = json(&cli(&["convolve", "--function", "gaussian", "--with", "bump", "--theta-nodes", "32", "--grid-points", "256"]));
    assert_eq!(v["values"].as_array().unwrap().len(), 256);
}

#[test]
fn verify_rejects_bad_profiles_and_reports_failures() {
    let base = include_str!("../profiles/default.toml");
    let dir = std::env::temp_dir();
    let bad = dir.join(format!("bd_bad_{}.toml", std::process::id()));
    std::fs::write(&bad, base.replace("alpha_set = [-0.25,", "alpha_set = [-0.6,")).unwrap();
    let out = cli(&["verify", "--profile", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));

    let zero = dir.join(format!("bd_zero_{}.toml", std::process::id()));
    let text = base
        .replace("\"s1.plancherel\" = 1e-8", "\"s1.plancherel\" = 0.0")
        .replace("grid_points = 2048", "grid_points = 512");
    std::fs::write(&zero, text).unwrap();
    let out = cli(&["verify", "--profile", zero.to_str().unwrap(), "--suite", "S1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("s1.plancherel"));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["pass"], Value::Bool(false));
    let suite = &report["suites"][0];
    assert!(suite["profile_hash"].as_str().unwrap().len() == 64);
    for c in suite["checks"].as_array().unwrap() {
        for k in ["id", "anchor", "observed", "ceiling", "pass"] {
            assert!(c.get(k).is_some());
        }
    }
    let _ = std::fs::remove_file(bad);
    let _ = std::fs::remove_file(zero);
}
