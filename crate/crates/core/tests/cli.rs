use std::path::PathBuf;
use std::process::{Command, Output};

fn inputs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../inputs")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gradeq")).args(args).current_dir(inputs()).output().unwrap()
}

fn machine(args: &[&str]) -> serde_json::Value {
    let mut full = vec!["--format", "machine"];
    full.extend_from_slice(args);
    let out = run(&full);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn claim(report: &serde_json::Value, name: &str) -> String {
    report["claims"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no claim `{name}`"))["value"]
        .as_str()
        .unwrap()
        .to_string()
}

#[test]
fn cohomology_with_product_support() {
    let r = machine(&["cohomology", "--group", "C2", "--module", "neg:C3xC3", "--degree", "1", "--support", "product"]);
    assert_eq!(claim(&r, "|Z^1|"), "9");
    assert_eq!(claim(&r, "|B^1|"), "9");
    assert_eq!(claim(&r, "|D^1|"), "3");
    assert_eq!(claim(&r, "|Z^1/D^1|"), "3");
}

#[test]
fn example_inputs_run() {
    let r = machine(&["classify-equiv", "d6_ttp.problem"]);
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
    machine(&["classify-equiv", "c3xc3_graded.problem"]);
    machine(&["aut-pointed", "vec_c3xc3.category"]);
    machine(&["classify-ext", "c3_inversion.ext"]);
    machine(&["metric", "z4_fermion.form"]);
    machine(&["metric", "toric.form"]);
    machine(&["cstar", "--group", "C3xC3", "--degree", "2"]);
}

#[test]
fn text_output_is_stable() {
    let a = run(&["classify-equiv", "d6_ttp.problem"]);
    let b = run(&["classify-equiv", "d6_ttp.problem"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stdout).contains("[checks]"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["cohomology", "--group", "C7x", "--degree", "1"]).status.code(), Some(2));
    assert_eq!(run(&["metric", "missing.form"]).status.code(), Some(2));
    assert_eq!(run(&["classify-ext", "c3_inversion.ext", "--max-order", "2"]).status.code(), Some(1));
    assert_eq!(run(&["cstar", "--group", "C2", "--degree", "9"]).status.code(), Some(2));
}
