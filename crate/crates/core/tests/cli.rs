use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const EXE: &str = env!("CARGO_BIN_EXE_curvtensor");

fn write(dir: &Path, name: &str, body: &str) {
    std::fs::write(dir.join(name), body).unwrap();
}

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(EXE).args(args).arg("--quiet").current_dir(dir).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn fixtures() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "A.json", "[[1,2,0],[2,0,1],[0,1,3]]");
    write(d, "bad.json", "{\"matrix\": [[1,2],");
    write(
        d,
        "dependent.json",
        r#"[{"build":"S","sign":1,"operator":[[1,0,0],[0,1,0],[0,0,1]]},
            {"build":"S","sign":1,"operator":[[2,0,0],[0,2,0],[0,0,"1/2"]]},
            {"build":"Lambda","sign":1,"operator":[[0,1,0],[-1,0,0],[0,0,0]]}]"#,
    );
    write(d, "nochain.json", "[[[1,0],[0,1]],[[1,0],[0,0]],[[0,0],[0,1]]]");
    write(
        d,
        "decomp.json",
        r#"{"terms": [{"build":"S","sign":1,"operator":[[1,0,0,0],[0,1,0,0],[0,0,0,0],[0,0,0,0]]},
                      {"build":"S","sign":1,"operator":[[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]}]}"#,
    );
    dir
}

#[test]
fn build_output_feeds_check() {
    let dir = fixtures();
    let built = run(dir.path(), &["build", "--op", "A.json", "--build", "S", "--mode", "exact", "--out", "T.json"]);
    assert_eq!(built.status.code(), Some(0));
    let out = run(dir.path(), &["check", "--tensor", "T.json", "--mode", "exact"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["report"]["is_act"], true);

    // Same through a pipe.
    let mut child = Command::new(EXE)
        .args(["check", "--tensor", "-", "--quiet"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let built = run(dir.path(), &["build", "--op", "A.json", "--build", "Lambda"]);
    child.stdin.take().unwrap().write_all(&built.stdout).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    // A self-adjoint operator under the Lambda build breaks antisymmetry.
    assert_eq!(json(&out)["report"]["is_act"], false);
}

#[test]
fn manifest_records_inputs_and_seed() {
    let dir = fixtures();
    let out = run(dir.path(), &["build", "--op", "A.json", "--seed", "17"]);
    let v = json(&out);
    assert_eq!(v["manifest"]["subcommand"], "build");
    assert_eq!(v["manifest"]["seed"], 17);
    assert_eq!(v["manifest"]["inputs"][0]["path"], "A.json");
    assert_eq!(v["manifest"]["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn malformed_and_missing_input_exit_one() {
    let dir = fixtures();
    let out = run(dir.path(), &["check", "--op", "bad.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"], "malformed_input");
    let out = run(dir.path(), &["check", "--op", "nope.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"], "io_error");
}

#[test]
fn unmet_conditions_exit_two() {
    let dir = fixtures();
    let out = run(dir.path(), &["chain", "--ops", "nochain.json", "--signs", "+,-"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"], "not_a_chain");

    // The identity pivot has no kernel.
    let out = run(dir.path(), &["reduce", "--decomp", "decomp.json", "--pivot", "2", "--mode", "exact"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"], "trivial_kernel");
}

#[test]
fn usage_errors_exit_sixty_four() {
    let dir = fixtures();
    assert_eq!(run(dir.path(), &["build", "--frobnicate"]).status.code(), Some(64));
    assert_eq!(run(dir.path(), &["teleport"]).status.code(), Some(64));
    assert_eq!(run(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn depend_reports_the_dependent_relation() {
    let dir = fixtures();
    let out = run(dir.path(), &["depend", "--terms", "dependent.json", "--mode", "exact"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["report"];
    assert_eq!(r["independent"], false);
    assert_eq!(r["rank"], 2);
    assert_eq!(r["coefficients"], serde_json::json!(["1", "-1", "1"]));
}

#[test]
fn reduce_drops_the_pivot() {
    let dir = fixtures();
    let out = run(dir.path(), &["reduce", "--decomp", "decomp.json", "--pivot", "1", "--mode", "exact"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn constructive_decomposition_feeds_depend() {
    let dir = fixtures();
    write(dir.path(), "R.json", r#"{"build":"S","operator":[[1,0,0],[0,2,0],[0,0,3]]}"#);
    let out = run(dir.path(), &["decompose", "--tensor", "R.json", "--constructive", "--mode", "exact"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["report"]["residual"], 0.0);
    assert_eq!(v["report"]["terms"], 6);
    // The sampled terms span the whole space at n = 3.
    write(dir.path(), "terms.json", &v["report"]["decomposition"]["terms"].to_string());
    let out = run(dir.path(), &["depend", "--terms", "terms.json", "--mode", "exact"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["report"];
    assert_eq!(r["independent"], true);
    assert_eq!(r["rank"], 6);
}
