use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const M3: &str = r#"{"blocks": {"A": [[2, 0], [0, 10]], "B": [[[1, 0]], [[1, 0]]], "C": [[-1]]}, "rb": {"a": 0, "b": 2}}"#;

fn specblock(args: &[&str]) -> Output {
    specblock_env(args, &[])
}

fn specblock_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_specblock"));
    cmd.args(args).env_remove("SPECBLOCK_TOL");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn checks<'a>(r: &'a Value, family: &str) -> Vec<&'a Value> {
    r["checks"].as_array().unwrap().iter().filter(|c| c["family"] == family).collect()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn m3_enclose_passes() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "m3.json", M3);
    let out = specblock(&["enclose", "--input", &input]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let dist = checks(&r, "dist-bound");
    assert_eq!(dist.len(), 2);
    assert!(dist.iter().all(|c| c["outcome"] == "pass"));
    assert_eq!(r["summary"]["fail"], 0);
    assert!(r["input_digest"].as_str().unwrap().starts_with("sha256:"));
}

#[test]
fn malformed_json_exits_2() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "bad.json", "{\"blocks\": [1,");
    let out = specblock(&["enclose", "--input", &input]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
    assert!(out.stdout.is_empty());
}

#[test]
fn invalid_problems_exit_2() {
    let dir = TempDir::new().unwrap();
    let cases = [
        r#"{"blocks": {"A": [[1, 2], [3, 4]], "B": [[0], [0]], "C": [[0]]}}"#,
        r#"{"blocks": {"A": [[1]], "B": "missing.csv", "C": [[0]]}}"#,
        r#"{"blocks": {"A": [[1]], "B": [[0]], "C": [[0]]}, "mhd": {}}"#,
        r#"{"blocks": {"A": [[1]], "B": [[0, 1]], "C": [[0]]}}"#,
        r#"{"blocks": {"A": [[1]], "B": [[0]], "C": [[0]]}, "rb": {"a": -1, "b": 0}}"#,
        r#"{"mhd": {"grid_n": 5, "rho": "bogus", "va2": 1, "vs2": 1, "kperp": 1, "kpar": 1}}"#,
    ];
    for (i, text) in cases.iter().enumerate() {
        let input = write(dir.path(), &format!("p{i}.json"), text);
        let out = specblock(&["enclose", "--input", &input]);
        assert_eq!(out.status.code(), Some(2), "case {i}: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(specblock(&["enclose"]).status.code(), Some(2));
    assert_eq!(specblock(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn invalid_relative_bound_exits_1() {
    let dir = TempDir::new().unwrap();
    let text = M3.replace(r#""b": 2}"#, r#""b": 1}"#);
    let input = write(dir.path(), "m3.json", &text);
    let out = specblock(&["enclose", "--input", &input]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(checks(&r, "relative-bound")[0]["outcome"], "fail");
}

#[test]
fn decoupled_windows_degenerate() {
    let dir = TempDir::new().unwrap();
    let input = write(
        dir.path(),
        "b0.json",
        r#"{"blocks": {"A": [[3, 0, 0], [0, 7, 0], [0, 0, 12]], "B": [[0, 0], [0, 0], [0, 0]], "C": [[-2, 1], [1, -2]]},
            "rb": {"a": 0, "b": 0}}"#,
    );
    let out = specblock(&["enclose", "--input", &input]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let c = -1.0;
    let inc = checks(&r, "inclusion");
    assert_eq!(inc.len(), 3);
    for w in inc.iter().chain(checks(&r, "exclusion").iter()) {
        assert_eq!(w["outcome"], "pass");
        let mu = num(&w["inputs"]["mu"]);
        let (lo, hi) = match w["family"].as_str().unwrap() {
            "inclusion" => (&w["outputs"]["alpha_minus"], &w["outputs"]["alpha_plus"]),
            _ => (&w["outputs"]["beta_minus"], &w["outputs"]["beta_plus"]),
        };
        assert!((num(lo) - c).abs() <= 1e-12 && (num(hi) - mu).abs() <= 1e-12, "{w}");
    }
}

#[test]
fn angular_m3_above_6_has_codim_1() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "m3.json", M3);
    let out = specblock(&["angular", "--input", &input, "--alpha", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let k = checks(&r, "angular").into_iter().find(|c| c["name"] == "angular operator").unwrap();
    assert_eq!(k["outputs"]["codim"], 1);
    // Default α is c̃: codim equals κ = 0.
    let r = report(&specblock(&["angular", "--input", &input]));
    let codim = checks(&r, "angular").into_iter().find(|c| c["name"] == "codimension").unwrap();
    assert_eq!(codim["outcome"], "pass");
    assert_eq!(codim["outputs"]["kappa"], 0);
}

#[test]
fn soq_full_dimension_recovers_eigenvalues() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "m3.json", M3);
    let out = specblock(&["soq", "--input", &input, "--subspace-dim", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let pts = &checks(&r, "soq")[0];
    assert_eq!(pts["name"], "second-order spectrum");
    assert_eq!(pts["outcome"], "pass");
    let re: Vec<f64> = pts["outputs"]["re"].as_array().unwrap().iter().map(num).collect();
    let want = [-1.3834072093172122, 2.292229445408130, 10.091177763909082];
    for (x, y) in re.iter().zip(want) {
        assert!((x - y).abs() < 1e-6, "{x} vs {y}");
    }
    assert_eq!(specblock(&["soq", "--input", &input, "--subspace-dim", "4"]).status.code(), Some(2));
}

#[test]
fn basis_m3() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "m3.json", M3);
    let out = specblock(&["basis", "--input", &input, "--n-max", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(checks(&r, "riesz")[0]["outcome"], "pass");
    assert_eq!(checks(&r, "decay").len(), 2);
}

#[test]
fn csv_blocks_with_complex_entries() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "a.csv", "2, 1+1j\n1-1j, 5\n");
    write(dir.path(), "b.csv", "0.5j\n-0.25\n");
    let input = write(dir.path(), "p.json", r#"{"blocks": {"A": "a.csv", "B": "b.csv", "C": [[[-3, 0]]]}}"#);
    let out = specblock(&["enclose", "--input", &input]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["parameters"]["dim"], 3);
    // The digest covers referenced files too.
    write(dir.path(), "b.csv", "0.5j\n-0.5\n");
    let again = report(&specblock(&["enclose", "--input", &input]));
    assert_ne!(r["input_digest"], again["input_digest"]);
}

#[test]
fn report_round_trips_and_is_finite() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "m3.json", M3);
    for cmd in ["enclose", "angular", "basis", "soq"] {
        let out = specblock(&[cmd, "--input", &input]);
        let text = String::from_utf8(out.stdout).unwrap();
        let parsed: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string_pretty(&parsed).unwrap() + "\n", text, "{cmd}");
        let mut stack = vec![&parsed];
        while let Some(v) = stack.pop() {
            match v {
                Value::Number(n) => assert!(n.as_f64().unwrap().is_finite()),
                Value::Array(a) => stack.extend(a),
                Value::Object(o) => stack.extend(o.values()),
                _ => {}
            }
        }
        for c in parsed["checks"].as_array().unwrap() {
            assert!(!c["anchor"].as_str().unwrap().is_empty(), "{c}");
        }
    }
}

#[test]
fn out_file_and_csv_tables() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "m3.json", M3);
    let out_path = dir.path().join("r.json");
    let csv_dir = dir.path().join("tables");
    let out = specblock(&[
        "enclose",
        "--input",
        &input,
        "--out",
        out_path.to_str().unwrap(),
        "--csv",
        csv_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_slice(&std::fs::read(&out_path).unwrap()).unwrap();
    let families: std::collections::BTreeSet<&str> =
        r["checks"].as_array().unwrap().iter().map(|c| c["family"].as_str().unwrap()).collect();
    for f in families {
        let text = std::fs::read_to_string(csv_dir.join(format!("{f}.csv"))).unwrap();
        let rows = text.lines().count() - 1;
        assert_eq!(rows, checks(&r, f).len(), "{f}");
        assert!(text.starts_with("name,outcome,tolerance,note,anchor"));
    }
}

#[test]
fn window_restricts_eigenvalue_checks() {
    let dir = TempDir::new().unwrap();
    let text = M3.replace("}, \"rb\"", "}, \"window\": [5, 20], \"rb\"");
    let input = write(dir.path(), "m3.json", &text);
    let r = report(&specblock(&["enclose", "--input", &input]));
    let dist = checks(&r, "dist-bound");
    assert_eq!(dist.len(), 1);
    assert!(num(&dist[0]["inputs"]["lambda"]) > 10.0);
    assert!(checks(&r, "inclusion").iter().all(|c| num(&c["inputs"]["mu"]) == 10.0));
}

#[test]
fn tolerance_env_override() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "m3.json", M3);
    let r = report(&specblock_env(&["enclose", "--input", &input], &[("SPECBLOCK_TOL", "1e-6")]));
    assert_eq!(num(&r["parameters"]["base_tolerance"]), 1e-6);
    let r = report(&specblock(&["enclose", "--input", &input]));
    assert_eq!(num(&r["parameters"]["base_tolerance"]), 1e-10);
}

#[test]
fn mhd_constant_profile() {
    let out = specblock(&["mhd", "--n", "64", "--n-max", "6"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["summary"]["fail"], 0);
    assert!((num(&r["parameters"]["c"]) - (2.0 + 2f64.sqrt())).abs() < 1e-12);
    assert_eq!(num(&r["parameters"]["a"]), 2.5);
    let per_n = checks(&r, "decay").into_iter().filter(|c| c["name"].as_str().unwrap().starts_with("projection decay n =")).count();
    assert_eq!(per_n, 6);
}

#[test]
fn mhd_problem_files() {
    let dir = TempDir::new().unwrap();
    let profile = r#"{"mhd": {"grid_n": 33, "rho": "linear", "va2": "sinusoidal", "vs2": 0.5, "kperp": 1, "kpar": 1, "g": 0},
                      "flags": {"bands": "literal"}}"#;
    let input = write(dir.path(), "p.json", profile);
    let out = specblock(&["mhd", "--input", &input, "--n", "32", "--n-max", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(report(&out)["parameters"]["bands"], "literal");
    let out = specblock(&["enclose", "--input", &input, "--n", "32"]);
    assert_eq!(out.status.code(), Some(0));
    // One displacement component in A, two in C.
    assert_eq!(report(&out)["parameters"]["dim"], 96);
    let blocks = write(dir.path(), "m3.json", M3);
    assert_eq!(specblock(&["mhd", "--input", &blocks]).status.code(), Some(2));
}

#[test]
fn selftest_is_deterministic_and_catches_corruption() {
    let a = specblock(&["selftest", "--seed", "42"]);
    let b = specblock(&["selftest", "--seed", "42"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = specblock(&["selftest", "--seed", "43"]);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(specblock(&["selftest"]).status.code(), Some(0));
    assert_eq!(specblock(&["selftest", "--corrupt-fixture"]).status.code(), Some(1));
}
