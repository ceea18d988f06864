use std::collections::BTreeSet;
use std::process::{Command, Output};

use freebeta_core::ncl::validate_ncl;
use serde_json::Value;

fn freebeta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freebeta")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = freebeta(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

#[test]
fn moments_table_for_two_three() {
    let v = json(&["moments", "--family", "fbp", "--a", "2", "--b", "3", "--n", "5", "--route", "all"]);
    assert_eq!(v["schema_version"], "1.0");
    assert_eq!(v["command"], "moments");
    assert_eq!(v["params"]["a"], "2");
    assert_eq!(v["results"]["all_agree"], true);
    let rows = v["results"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[2]["ncl"], "11/2");
    assert_eq!(rows[2]["fock"], "11/2");
    assert_eq!(rows[0]["closed"], "1/1");
    let prov: Vec<&str> = v["provenance"].as_array().unwrap().iter().map(|p| p.as_str().unwrap()).collect();
    assert_eq!(prov, ["ncl", "closed", "fock", "s-transform"]);
}

#[test]
fn enumerate_three_matches_brute_force() {
    let v = json(&["enumerate-ncl", "--n", "3", "--list"]);
    assert_eq!(v["results"]["count"], 6);
    let listed: BTreeSet<String> =
        v["results"]["rows"].as_array().unwrap().iter().map(|r| r["partition"].as_str().unwrap().to_string()).collect();

    let subsets: Vec<Vec<usize>> = (1u32..8).map(|m| (1..=3).filter(|i| m >> (i - 1) & 1 == 1).collect()).collect();
    let mut brute = BTreeSet::new();
    for mask in 1u32..1 << subsets.len() {
        let mut blocks: Vec<Vec<usize>> = (0..subsets.len()).filter(|i| mask >> i & 1 == 1).map(|i| subsets[i].clone()).collect();
        if validate_ncl(3, blocks.clone()).unwrap() {
            blocks.sort();
            let text: Vec<String> =
                blocks.iter().map(|b| format!("{{{}}}", b.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))).collect();
            brute.insert(text.join(","));
        }
    }
    assert_eq!(listed, brute);
}

#[test]
fn meixner_for_two_three() {
    let v = json(&["meixner", "--a", "2", "--b", "3"]);
    let r = &v["results"];
    assert!((r["theta"].as_f64().unwrap() - 1.5).abs() < 1e-15);
    assert!((r["tau"].as_f64().unwrap() - 0.5).abs() < 1e-15);
    assert_eq!(r["discriminant"], "1/4");
    assert_eq!(r["class"], "free negative binomial");
}

#[test]
fn csv_output() {
    let out = freebeta(&["t-coeffs", "--a", "1", "--b", "2", "--n", "3", "--format", "csv"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "k,alpha\n0,1/1\n1,2/1\n2,2/1\n3,2/1\n");

    let out = freebeta(&["mc-fisher", "--p", "50", "--a", "2", "--b", "3", "--bins", "8", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "bin_left,bin_right,empirical_density,theoretical_density");
    assert_eq!(lines.len(), 9);
}

#[test]
fn gamma_routes_agree() {
    let v = json(&["gamma-gf", "--alpha", "1/3", "--beta", "2", "--gamma", "-1/2", "--n", "6"]);
    assert_eq!(v["results"]["all_agree"], true);
    assert_eq!(v["results"]["rows"].as_array().unwrap().len(), 6);
}

#[test]
fn ncl_stats_totals() {
    let v = json(&["ncl-stats", "--n", "5"]);
    assert_eq!(v["results"]["total"], 90);
}

#[test]
fn density_support_and_score() {
    let v = json(&["support", "--family", "fbp", "--a", "1/2", "--b", "2"]);
    assert_eq!(v["results"]["atoms"][0]["mass"], 0.5);
    let v = json(&["density", "--family", "free-f", "--a", "2", "--b", "3", "--points", "11", "--numeric"]);
    for row in v["results"]["rows"].as_array().unwrap() {
        if let Some(s) = row["stieltjes"].as_f64() {
            assert!((s - row["density"].as_f64().unwrap()).abs() < 1e-8);
        }
    }
    let v = json(&["score-check", "--family", "free-t", "--m", "10"]);
    assert_eq!(v["results"]["passed"], true);
}

#[test]
fn fisher_output_is_deterministic_across_thread_counts() {
    let args = ["mc-fisher", "--p", "60", "--a", "2", "--b", "3", "--seed", "7", "--seeds", "3"];
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_freebeta")).args(args).env("FREEBETA_THREADS", threads).output().unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let one = run("1");
    assert_eq!(one, run("4"));
    let v: Value = serde_json::from_slice(&one).unwrap();
    assert_eq!(v["results"]["seeds"], serde_json::json!([7, 8, 9]));
    assert_eq!(v["results"]["n1"], 120);
}

#[test]
fn validation_errors_exit_two() {
    for args in [
        vec!["moments", "--family", "fbp", "--a", "2", "--b", "1"],
        vec!["moments", "--family", "fbp", "--a", "2"],
        vec!["moments", "--family", "free-t", "--m", "2", "--route", "ncl"],
        vec!["enumerate-ncl", "--n", "13"],
        vec!["meixner", "--a", "2", "--b", "3", "--format", "csv"],
        vec!["meixner", "--theta", "1", "--tau", "-2"],
        vec!["no-such-command"],
        vec!["moments", "--family", "fbp", "-a", "2", "--b", "3"],
    ] {
        let out = freebeta(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let out = Command::new(env!("CARGO_BIN_EXE_freebeta"))
        .args(["ncl-stats", "--n", "3"])
        .env("FREEBETA_THREADS", "none")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_passes() {
    let out = freebeta(&["verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["results"]["checks_run"], 12);
    assert!(v["results"]["rows"].as_array().unwrap().iter().all(|r| r["passed"] == true));
}
