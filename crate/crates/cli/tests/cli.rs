use std::path::PathBuf;
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edspec"))
        .current_dir(fixtures())
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn canonical_atm(tag: &str) -> PathBuf {
    let out = std::env::temp_dir().join(format!("edspec-cli-{tag}-{}.json", std::process::id()));
    let o = run(&["canonical", "atm.ops", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn missing_input_is_fatal() {
    let model = canonical_atm("missing");
    let o = run(&["check", model.to_str().unwrap(), "missing.ops"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot read `missing.ops`"));
}

#[test]
fn refuted_chain_exits_with_one() {
    let o = run(&["refine", "atm_chain.claim"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("refine Spec0 by Spec1"), "{text}");
}

#[test]
fn canonical_model_passes_check_and_is_self_bisimilar() {
    let model = canonical_atm("check");
    let m = model.to_str().unwrap();
    let o = run(&["check", m, "atm.ops"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("ATM: model"));
    let o = run(&["bisim", m, m]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("bisimilar"));
}

#[test]
fn unrealizable_spec_has_no_canonical_model() {
    let o = run(&["canonical", "cc.ops"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("cnt=3"));
}

#[test]
fn characterize_prints_the_top_level_sentence() {
    let o = run(&["characterize", "atm.ops"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("rho =\n  down Card . true and sen(Card"));
}

#[test]
fn output_is_byte_identical_across_runs() {
    for args in [
        &["refine", "atm_chain.claim"][..],
        &["--json", "refine", "atm_chain.claim"],
        &["characterize", "--simplify-disjoint", "atm.ops"],
        &["enumerate", "--sample", "3", "--seed", "5", "atm.ops"],
        &["compose", "atm_prime.ops", "cc.ops"],
    ] {
        assert_eq!(run(args).stdout, run(args).stdout, "{args:?}");
    }
}

#[test]
fn json_reports_carry_verdicts() {
    let o = run(&["--json", "refine", "atm_chain.claim"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0]["claim"], "refine Spec0 by Spec1");
    assert!(rows[0]["verdict"]["constructed"].is_object());
}

#[test]
fn export_output_loads_again() {
    let o = run(&["export", "atm_chain.claim"]);
    assert_eq!(o.status.code(), Some(0));
    let out = std::env::temp_dir().join(format!("edspec-cli-export-{}.edspec", std::process::id()));
    std::fs::write(&out, &o.stdout).unwrap();
    let o2 = run(&["export", out.to_str().unwrap()]);
    assert_eq!(o2.status.code(), Some(0), "{}", String::from_utf8_lossy(&o2.stderr));
    assert_eq!(o.stdout, o2.stdout);
}
