use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tripartite"));
    for var in ["TRIPARTITE_EPS_RANK", "TRIPARTITE_EPS_TAU", "TRIPARTITE_EPS_DISC"] {
        cmd.env_remove(var);
    }
    cmd
}

fn state(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("states").join(name)
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn shipped_representatives_classify() {
    for (file, class) in [
        ("product.json", "A-B-C"),
        ("a_bc.json", "A-BC"),
        ("b_ac.json", "B-AC"),
        ("c_ab.json", "C-AB"),
        ("w.json", "W"),
        ("ghz.json", "GHZ"),
    ] {
        let v = json_of(&run(bin().arg("classify").arg(state(file))));
        assert_eq!(v["class"], class, "{file}");
    }
}

#[test]
fn product_state_has_no_entropy() {
    let v = json_of(&run(bin().arg("measures").arg(state("product.json"))));
    for key in ["s_a", "s_b", "s_c", "tau", "e_tau"] {
        assert_eq!(v[key].as_f64().unwrap(), 0.0, "{key}");
    }
}

#[test]
fn canonical_and_residual_reports() {
    let v = json_of(&run(bin().arg("canonical").arg(state("ghz.json"))));
    assert_eq!(v["class"], "GHZ");
    assert_eq!(v["tensor_rank"], 2);
    let v = json_of(&run(bin().args(["residual", "--measure", "c2"]).arg(state("w.json"))));
    assert!((v["e_tau"].as_f64().unwrap() - 4.0 / 3.0).abs() < 1e-12);
}

#[test]
fn random_states_land_in_their_class() {
    let dir = tempfile::tempdir().unwrap();
    for (class, seed, expected) in [("w", "7", "W"), ("generic", "1", "GHZ"), ("a-bc", "3", "A-BC")] {
        let path = dir.path().join(format!("{class}.json"));
        let out = run(bin().args(["--seed", seed, "random", "--class", class, "--out"]).arg(&path));
        assert!(out.status.success());
        let v = json_of(&run(bin().arg("classify").arg(&path)));
        assert_eq!(v["class"], expected);
        if class == "a-bc" {
            let m = json_of(&run(bin().arg("measures").arg(&path)));
            assert!(m["s_a"].as_f64().unwrap().abs() < 1e-9);
        }
    }
}

#[test]
fn seeded_output_is_byte_identical() {
    let args = ["--seed", "11", "--workers", "2", "verify", "--suite", "tangle-monotone", "--trials", "300"];
    let a = run(bin().args(args));
    let b = run(bin().args(["--seed", "11", "--workers", "1", "verify", "--suite", "tangle-monotone", "--trials", "300"]));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let r1 = run(bin().args(["--seed", "5", "random", "--class", "ghz"]));
    let r2 = run(bin().args(["--seed", "5", "random", "--class", "ghz"]));
    assert_eq!(r1.stdout, r2.stdout);
}

#[test]
fn missing_seed_is_reported() {
    let out = run(bin().args(["random", "--class", "generic"]));
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("seed: "));
}

#[test]
fn exit_codes() {
    let parse = run(bin().arg("classify").arg(state("missing.json")));
    assert_eq!(parse.status.code(), Some(1));
    assert!(parse.stdout.is_empty());
    let usage = run(bin().args(["verify", "--suite", "nonsense"]));
    assert_eq!(usage.status.code(), Some(1));
    let module = run(bin().arg("epr").arg(state("w.json")));
    assert_eq!(module.status.code(), Some(2));
    // a rank threshold this coarse makes class members look biseparable
    let violation = run(bin().args(["--seed", "1", "--eps-rank", "0.05", "verify", "--suite", "rank-monotone", "--trials", "200"]));
    assert_eq!(violation.status.code(), Some(3));
    let report: Value = serde_json::from_slice(&violation.stdout).unwrap();
    assert_eq!(report["passed"], false);
    assert!(report["report"]["ilo"]["first_failure_seed"].is_u64());
}

#[test]
fn inconclusive_classification_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("edge.json");
    // det ρ_A = 3e-9 (1 − 3e-9), inside a decade of the default threshold
    let s = 3e-9f64.sqrt();
    let c = (1.0 - s * s).sqrt();
    let body = format!(
        "{{\"dims\":[2,2,2],\"amplitudes\":[[{c},0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[{s},0]]}}"
    );
    std::fs::write(&path, body).unwrap();
    let out = run(bin().arg("classify").arg(&path));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("inconclusive"));
    let loose = run(bin().args(["--eps-rank", "1e-7", "classify"]).arg(&path));
    assert_eq!(json_of(&loose)["class"], "A-B-C");
}

#[test]
fn environment_sets_tolerances_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("edge.json");
    let s = 3e-9f64.sqrt();
    let c = (1.0 - s * s).sqrt();
    std::fs::write(
        &path,
        format!("{{\"dims\":[2,2,2],\"amplitudes\":[[{c},0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[{s},0]]}}"),
    )
    .unwrap();
    let env = run(bin().env("TRIPARTITE_EPS_RANK", "1e-7").arg("classify").arg(&path));
    assert_eq!(json_of(&env)["class"], "A-B-C");
    let flag = run(bin().env("TRIPARTITE_EPS_RANK", "1e-7").args(["--eps-rank", "1e-12", "classify"]).arg(&path));
    assert_eq!(json_of(&flag)["class"], "GHZ");
    let bad = run(bin().env("TRIPARTITE_EPS_RANK", "0").arg("classify").arg(&path));
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn text_format_is_flat() {
    let out = run(bin().args(["--format", "text", "classify"]).arg(state("w.json")));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "class: W"));
}

#[test]
fn dimension_counts() {
    let v = json_of(&run(bin().args(["dimcount", "2", "2", "2"])));
    assert_eq!(v["lower_bound"], -4);
    let v = json_of(&run(bin().args(["dimcount", "2", "2", "2", "2"])));
    assert_eq!(v["lower_bound"], 6);
    let v = json_of(&run(bin().args(["dimcount", "2", "2", "3"])));
    assert_eq!(v["lower_bound"], -6);
}

#[test]
fn epr_conversion_of_shipped_pair() {
    let v = json_of(&run(bin().arg("epr").arg(state("epr.json"))));
    assert!((v["optimal_probability"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn light_verify_suites_pass() {
    for suite in ["wn", "f-grid"] {
        let out = run(bin().args(["--seed", "1", "verify", "--suite", suite, "--resolution", "41"]));
        assert_eq!(json_of(&out)["passed"], true, "{suite}");
    }
}
