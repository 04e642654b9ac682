use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use vlab::bethe::{energy, solve_ground_state};
use vlab::cli::{execute, Cli, Format, ReportEnvelope, RunConfig};
use vlab::weights::{BranchId, Sign};
use vlab::Error;

use clap::Parser;

fn scratch(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(format!("cli-{name}"))
}

fn vlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vlab")).args(args).env_remove("VLAB_BUDGET_DIM").output().expect("binary runs")
}

fn with_report(name: &str, args: &[&str]) -> (Output, Value) {
    let path = scratch(&format!("{name}.json"));
    let mut all: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap().to_string();
    all.extend(["--report", &p]);
    let out = vlab(&all);
    let env: Value = serde_json::from_str(&std::fs::read_to_string(&path).expect("report written")).unwrap();
    (out, env)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_ybe_passes_for_branch_2b() {
    let (out, env) = with_report("ybe2b", &["verify", "--branch", "2B", "--scope", "ybe"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(env["passed"], Value::Bool(true));
    assert!(env["checks"][0]["residual"].as_f64().unwrap() < 1e-10);
    assert!(String::from_utf8_lossy(&out.stderr).contains("PASS ybe"));
}

#[test]
fn verify_hamiltonian_passes_for_branch_1a() {
    let (out, env) = with_report("ham1a", &["verify", "--branch", "1A", "--scope", "hamiltonian", "--L", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(env["checks"][0]["residual"].as_f64().unwrap() < 1e-7);
}

#[test]
fn perturbed_gamma_fails_verification() {
    let (out, env) = with_report("perturb", &["verify", "--branch", "1A", "--gamma-perturb", "0.05", "--scope", "ybe"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(env["passed"], Value::Bool(false));
    assert!(env["checks"][0]["residual"].as_f64().unwrap() > 1e-6);
}

#[test]
fn default_verify_passes_on_every_branch() {
    for b in ["1A", "1B", "2A", "2B", "1S", "2S"] {
        let out = vlab(&["verify", "--branch", b, "--eps1", "-1", "--samples", "5"]);
        assert_eq!(out.status.code(), Some(0), "{b}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn census_counts_and_dump() {
    let dump = scratch("census-dump.json");
    let out = vlab(&["census", "--dump", dump.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["total"], 123);
    assert_eq!(report["counts"]["4"], 57);
    let entries: Value = serde_json::from_str(&std::fs::read_to_string(dump).unwrap()).unwrap();
    assert_eq!(entries.as_array().unwrap().len(), 123);
    let six = vlab(&["census", "--model", "six-vertex"]);
    assert_eq!(six.status.code(), Some(0));
    let r: Value = serde_json::from_str(&stdout(&six)).unwrap();
    assert_eq!(r["counts"]["3"], 6);
}

#[test]
fn spectrum_csv_schema() {
    let out = vlab(&["spectrum", "--branch", "1A", "--L", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("branch,L,sz_sector,index,re,im,method,residual"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|r| r.split(',').count() == 8 && r.starts_with("1A,2,")));
    assert!(!text.contains('\r'));
}

#[test]
fn spectrum_lowest_level_matches_bethe() {
    let out = vlab(&["spectrum", "--branch", "2B", "--L", "4", "--sector", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let lowest: f64 = stdout(&out).lines().nth(1).unwrap().split(',').nth(4).unwrap().parse().unwrap();
    let e = energy(&solve_ground_state(4, Sign::Plus).unwrap(), Sign::Plus).unwrap();
    assert!((lowest - e).abs() < 1e-8);
}

#[test]
fn exit_codes() {
    assert_eq!(vlab(&["spectrum", "--L", "20"]).status.code(), Some(2));
    assert_eq!(vlab(&["bethe", "solve", "--L", "7"]).status.code(), Some(3));
    assert_eq!(vlab(&["verify", "--branch", "3C"]).status.code(), Some(3));
    assert_eq!(vlab(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(vlab(&["--help"]).status.code(), Some(0));
    let small = Command::new(env!("CARGO_BIN_EXE_vlab"))
        .args(["spectrum", "--branch", "1A", "--L", "4"])
        .env("VLAB_BUDGET_DIM", "5")
        .output()
        .unwrap();
    assert_eq!(small.status.code(), Some(2));
    let bad = Command::new(env!("CARGO_BIN_EXE_vlab"))
        .args(["spectrum", "--branch", "1A", "--L", "2"])
        .env("VLAB_BUDGET_DIM", "lots")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(3));
}

#[test]
fn bethe_outputs() {
    let out = vlab(&["bethe", "solve", "--L", "40"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("L,j,Q_j,mu_j,re_lambda,im_lambda,scaled_re,scaled_im"));
    assert_eq!(lines.count(), 40);

    let out = vlab(&["bethe", "thermo"]);
    assert_eq!(out.status.code(), Some(0));
    let t: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(t["abs_error"].as_f64().unwrap() < 1e-10);

    let out = vlab(&["bethe", "dispersion", "--samples", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("mu,energy,momentum,two_sin_p"));
    assert_eq!(text.lines().count(), 21);
}

#[test]
fn relations_dump() {
    let dump = scratch("relations.json");
    let out = vlab(&["relations", "--dump", dump.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let cat: Value = serde_json::from_str(&std::fs::read_to_string(dump).unwrap()).unwrap();
    let cat = cat.as_array().unwrap();
    assert_eq!(cat.len(), 99);
    assert!(cat.iter().all(|r| r.get("id").is_some() && r.get("group").is_some() && r.get("terms").is_some()));
}

#[test]
fn flags_override_config_file() {
    let cfg = scratch("precedence.json");
    std::fs::write(&cfg, r#"{"branch": "1A", "seed": 5, "L": 3, "epsilon1": -1}"#).unwrap();
    let (_, env) = with_report("prec-file", &["--config", cfg.to_str().unwrap(), "verify", "--scope", "ybe"]);
    assert_eq!(env["config"]["branch"], "1A");
    assert_eq!(env["config"]["seed"], 5);
    assert_eq!(env["config"]["L"], 3);
    assert_eq!(env["config"]["epsilon1"], -1);
    assert_eq!(env["sampler"], "splitmix64(seed=5)");
    let (_, env) = with_report(
        "prec-flag",
        &["--config", cfg.to_str().unwrap(), "verify", "--scope", "ybe", "--branch", "2A", "--seed", "9"],
    );
    assert_eq!(env["config"]["branch"], "2A");
    assert_eq!(env["config"]["seed"], 9);
    assert_eq!(env["config"]["L"], 3);
}

#[test]
fn unknown_config_keys_are_rejected() {
    assert!(matches!(RunConfig::from_json(r#"{"branch": "1A", "colour": 3}"#), Err(Error::Config(_))));
    let cfg = scratch("unknown.json");
    std::fs::write(&cfg, r#"{"bogus": true}"#).unwrap();
    let (out, env) = with_report("unknown", &["--config", cfg.to_str().unwrap(), "census"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(env["error"].as_str().unwrap().contains("bogus"));
}

#[test]
fn config_defaults() {
    let cfg = RunConfig::from_json("{}").unwrap();
    assert_eq!(cfg, RunConfig::default());
    assert_eq!(cfg.branch, BranchId::B2B);
    assert_eq!(cfg.j0_value(), -vlab::I);
    assert_eq!(cfg.format_or(Format::Csv), Format::Csv);
}

#[test]
fn runs_are_reproducible() {
    let run = |seed: &str| -> ReportEnvelope {
        execute(&Cli::parse_from(["vlab", "verify", "--branch", "1B", "--seed", seed, "--scope", "ybe", "--scope", "invariants"]))
    };
    let (a, b, other) = (run("11"), run("11"), run("12"));
    assert_eq!(a.checks, b.checks);
    assert_eq!(a.config, b.config);
    assert_ne!(a.checks, other.checks);
}

#[test]
fn artifact_goes_to_out_path() {
    let path = scratch("spectrum.csv");
    let out = vlab(&["spectrum", "--branch", "2A", "--L", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).is_empty());
    assert_eq!(std::fs::read_to_string(path).unwrap().lines().count(), 28);
}
