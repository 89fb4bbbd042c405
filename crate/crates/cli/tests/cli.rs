use std::process::{Command, Output};

use serde_json::Value;

fn otbounds(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_otbounds")).args(args).output().expect("binary runs")
}

/// Runs with `--format structured` and returns the results object.
fn results(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "structured"]);
    let out = otbounds(&all);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    report["results"].clone()
}

fn close(v: &Value, want: f64) -> bool {
    (v.as_f64().unwrap() - want).abs() < 1e-9
}

#[test]
fn entropy_of_bit_ot() {
    let r = results(&["entropy", "ot:1,2,1,1", "--all"]);
    for key in ["H(U|V)", "H(V|U)", "I(U;V)", "I(U;V|C)"] {
        assert!(close(&r[key], 1.0), "{key} = {}", r[key]);
    }
}

#[test]
fn rabin_shannon_entropy() {
    let r = results(&["entropy", "rabin:1/2,1", "--shannon"]);
    assert!(close(&r["H(U|V)"], 0.5));
    assert!(r.get("H_min(U|V)").is_none());
}

#[test]
fn smooth_min_entropy_of_bit_ot() {
    let r = results(&["entropy", "ot:1,2,1,1", "--smooth-min", "--eps", "0.1"]);
    assert_eq!(r["H_min^eps(U|V)"]["eps"], "1/10");
    assert!(close(&r["H_min^eps(U|V)"]["value"], 1.0 - 0.9f64.log2()));
}

#[test]
fn function_primitive_reports_output_entropy() {
    let r = results(&["entropy", "eq:3"]);
    assert_eq!(r["distinct_rows"], true);
    assert!(close(&r["d_f"], 1.0));
}

#[test]
fn parse_errors_exit_with_2() {
    assert_eq!(otbounds(&["entropy", "nosuch:1"]).status.code(), Some(2));
    assert_eq!(otbounds(&["entropy", "ot:1,2"]).status.code(), Some(2));
    assert_eq!(otbounds(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(otbounds(&["entropy", "ot:1,2,1,1", "--eps", "x"]).status.code(), Some(2));
}

#[test]
fn domain_and_budget_errors() {
    assert_eq!(otbounds(&["entropy", "olfe:4,1"]).status.code(), Some(3));
    assert_eq!(otbounds(&["entropy", "ot:1,2,1,1", "--smooth-min", "--eps", "1"]).status.code(), Some(3));
    assert_eq!(otbounds(&["entropy", "ot:1,4,8,4"]).status.code(), Some(4));
}

#[test]
fn extension_is_violated_at_one_twentieth() {
    let r = results(&["check-reduction", "--target", "ot:1,2,1,5", "--resource", "ot:1,2,1,4", "--eps", "1/20"]);
    assert_eq!(r["verdict"], "violated");
    assert_eq!(r["minimal_error"], "1/14");
}

#[test]
fn four_from_three_bit_ots_is_satisfiable() {
    let r = results(&["check-reduction", "--target", "ot:1,4,1,1", "--resource", "ot:1,2,1,3", "--eps", "0"]);
    assert_eq!(r["verdict"], "satisfiable");
    assert!(close(&r["required_ratio"], 3.0));
}

#[test]
fn two_bit_ot_from_rabin_is_violated() {
    for k in 2..=8 {
        let res = format!("rabin:1/2,{k}");
        let r = results(&["check-reduction", "--target", "ot:1,2,2,1", "--resource", &res, "--eps", "1/5"]);
        assert_eq!(r["verdict"], "violated", "k = {k}");
        let hmin = r["bounds"].as_array().unwrap().iter().find(|b| b["name"] == "H_min^eps(U|V)").unwrap();
        assert_eq!(hmin["verdict"], "violated");
    }
}

#[test]
fn exact_ip_simulation_is_perfect() {
    let r = results(&["simulate", "ip", "--n", "3", "--mode", "exact"]);
    assert_eq!(r["correctness_error"], "0");
    assert_eq!(r["alice_distance"], "0");
    assert_eq!(r["bob_distance"], "0");
}

#[test]
fn exact_eq_uses_two_calls_per_extra_bit() {
    let r = results(&["simulate", "eq", "--k", "3"]);
    assert_eq!(r["perfect"], true);
    assert_eq!(r["ot_calls"], 4);
}

#[test]
fn sampled_derandomized_ot_is_correct() {
    let r = results(&["simulate", "derandomized-ot", "--mode", "sampled", "--trials", "50"]);
    assert_eq!(r["errors"], 0);
    assert_eq!(r["trials"], 50 * 4 * 2);
}

#[test]
fn honest_bb84_sessions() {
    let r = results(&["bb84", "--strategy", "honest", "--trials", "200"]);
    assert!(close(&r["pass_rate"], 1.0));
    assert!(close(&r["correctness_rate"], 1.0));
}

#[test]
fn sampling_lemma_within_bound() {
    let r = results(&["sample-lemma", "--trials", "2000"]);
    let fams = r["families"].as_array().unwrap();
    assert_eq!(fams.len(), 4);
    assert!(fams.iter().all(|f| f["within_bound"] == true));
}

#[test]
fn imposs1_at_five_commitments() {
    let r = results(&["bound", "imposs1", "--kappa", "5"]);
    assert_eq!(r["min_error"], "1/1152");
}

#[test]
fn bound_with_missing_parameter_is_a_parse_error() {
    assert_eq!(otbounds(&["bound", "thm", "--n", "2"]).status.code(), Some(2));
}

#[test]
fn dump_round_trip() {
    let dir = std::env::temp_dir().join(format!("otbounds-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for prim in ["ot:1,3,1,1", "rabin:1/3,2", "leaky-ot:1/4", "olfe:3,1"] {
        let a = dir.join("a.json");
        let b = dir.join("b.json");
        let first = results(&["entropy", prim, "--dump", a.to_str().unwrap()]);
        let second = results(&["entropy", a.to_str().unwrap(), "--dump", b.to_str().unwrap()]);
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "{prim}");
        for key in ["H(U|V)", "H(V|U)", "I(U;V|C)", "H_min(U|V)", "H_max(U|V)"] {
            assert_eq!(first[key], second[key], "{prim} {key}");
        }
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn subnormalized_file_needs_flag() {
    let path = std::env::temp_dir().join(format!("otbounds-sub-{}.json", std::process::id()));
    std::fs::write(&path, r#"{"x_alphabet":["0","1"],"y_alphabet":["a"],"mass":[["1/4"],["1/4"]]}"#).unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(otbounds(&["entropy", p]).status.code(), Some(3));
    let r = results(&["entropy", p, "--subnormalized"]);
    assert_eq!(r["total_mass"], "1/2");
    assert_eq!(r["guessing_probability"], "1/4");
    std::fs::remove_file(&path).unwrap();
}

fn without_wall_time(out: &Output) -> String {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .filter(|l| !l.contains("wall_time_s"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn reports_are_deterministic_modulo_wall_time() {
    for args in [
        &["simulate", "eq-amplify", "--n", "4", "--k", "3", "--mode", "sampled", "--trials", "300", "--seed", "9"][..],
        &["bb84", "--strategy", "no-measure", "--trials", "100", "--seed", "4"][..],
        &["sample-lemma", "--trials", "500", "--seed", "2", "--format", "structured"][..],
    ] {
        assert_eq!(without_wall_time(&otbounds(args)), without_wall_time(&otbounds(args)), "{args:?}");
    }
}

#[test]
fn seed_changes_sampled_results() {
    let run = |seed: &str| results(&["bb84", "--strategy", "no-measure", "--m", "16", "--k", "2", "--trials", "400", "--seed", seed]);
    assert_ne!(run("1")["aborts"], run("2")["aborts"]);
}
