use std::path::PathBuf;
use std::process::Command;

use serde_json::{json, Value};
use tempfile::TempDir;

fn ws(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "workspaces", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

/// Runs the binary, returning the exit code and the parsed stdout report.
fn run(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_approxcat"))
        .arg("--json-only")
        .args(args)
        .output()
        .expect("binary runs");
    let report: Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    });
    (out.status.code().expect("exit code"), report)
}

fn save(dir: &TempDir, name: &str, v: &Value) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn hom_from_s2_into_w_is_one_dimensional() {
    let (code, r) = run(&[
        "hom",
        "-w",
        &ws("loop-counterexample.json"),
        "--from",
        "S2",
        "--to",
        "W",
    ]);
    assert_eq!(code, 0);
    assert_eq!(r["dimension"], 1);
    assert_eq!(r["command"], "hom");
}

#[test]
fn ext_from_m_to_s1_counts_loops() {
    let (code, r) = run(&[
        "ext1",
        "-w",
        &ws("loop-counterexample.json"),
        "--from",
        "M",
        "--to",
        "S1",
    ]);
    assert_eq!(code, 0);
    assert_eq!(r["dimension"], 2);
}

#[test]
fn gt_certificate_round_trips_through_verify() {
    let (code, r) = run(&[
        "gt",
        "-w",
        &ws("a2.json"),
        "--of",
        "P1",
        "--x",
        "addS1",
        "--y",
        "addS2",
    ]);
    assert_eq!(code, 0);
    assert_eq!(r["approximant_dims"], json!([1, 0]));
    assert_eq!(r["steps"]["y_approximant_dims"], json!([0, 0]));
    let dir = TempDir::new().unwrap();
    let report = save(&dir, "gt.json", &r);
    let (code, v) = run(&["verify", &report]);
    assert_eq!(code, 0, "{v}");
    let cert = save(&dir, "cert.json", &r["certificate"]);
    assert_eq!(run(&["verify", &cert]).0, 0);

    let mut bad = r["certificate"].clone();
    bad["approximation"][0] = json!([[0]]);
    let bad = save(&dir, "bad.json", &bad);
    let (code, v) = run(&["verify", &bad]);
    assert_eq!(code, 1, "{v}");
    assert_eq!(v["valid"], false);
}

#[test]
fn gt_on_a_loop_is_refused() {
    let (code, r) = run(&[
        "gt",
        "-w",
        &ws("loop.json"),
        "--of",
        "J2",
        "--x",
        "addS",
        "--y",
        "addS",
    ]);
    assert_eq!(code, 3);
    assert_eq!(r["error"]["code"], "NonAcyclicQuiver");
}

#[test]
fn left_approximation_into_an_extension_handle() {
    let (code, r) = run(&[
        "approx-left",
        "-w",
        &ws("a2.json"),
        "--of",
        "P1+S2",
        "--into",
        "Z",
    ]);
    assert_eq!(code, 0);
    assert_eq!(r["certificate"]["kind"], "approximation");
}

#[test]
fn right_approximation_can_be_minimized() {
    let (code, r) = run(&[
        "approx-right",
        "-w",
        &ws("a2.json"),
        "--of",
        "P1+S2",
        "--by",
        "addP1",
        "--minimal",
    ]);
    assert_eq!(code, 0);
    assert_eq!(r["approximant_dims"], json!([1, 1]));
}

#[test]
fn membership_answers_and_exit_codes() {
    let e13 = ws("loop-counterexample.json");
    let (code, r) = run(&[
        "member-ext",
        "-w",
        &e13,
        "--of",
        "W",
        "--x",
        "addS1",
        "--y",
        "addM",
    ]);
    assert_eq!((code, r["member"].clone()), (0, json!(true)));
    let (code, r) = run(&[
        "member-ext",
        "-w",
        &e13,
        "--of",
        "S2",
        "--x",
        "addS1",
        "--y",
        "addM",
    ]);
    assert_eq!((code, r["member"].clone()), (1, json!(false)));
    let (code, _) = run(&["member-add", "-w", &e13, "--of", "S1+M", "--in", "addM"]);
    assert_eq!(code, 1);
    let (code, r) = run(&["member-add", "-w", &e13, "--of", "missing", "--in", "addM"]);
    assert_eq!(code, 2);
    assert_eq!(r["error"]["code"], "InvalidInput");

    let lp = ws("loop.json");
    let (code, r) = run(&[
        "member-filt",
        "-w",
        &lp,
        "--of",
        "J3",
        "--in",
        "addS",
        "--length",
        "3",
    ]);
    assert_eq!(code, 0);
    assert_eq!(r["depth"], 3);
    let (code, _) = run(&[
        "member-filt",
        "-w",
        &lp,
        "--of",
        "J3",
        "--in",
        "addS",
        "--length",
        "2",
    ]);
    assert_eq!(code, 1);
}

#[test]
fn exchange_and_normalize_respect_ext_vanishing() {
    let dir = TempDir::new().unwrap();
    // two vertices without arrows: every Ext^1 vanishes
    let space = save(
        &dir,
        "ws.json",
        &json!({
            "format": 1,
            "quiver": {"vertices": 2, "arrows": []},
            "field": "F2",
            "reps": {"S1": {"dims": [1, 0]}, "S2": {"dims": [0, 1]}, "T": {"dims": [2, 1]}},
            "handles": {"both": {"add": ["S1", "S2"]}, "rev": {"add": ["S2", "S1"]}}
        }),
    );
    let (code, f) = run(&[
        "member-filt",
        "-w",
        &space,
        "--of",
        "T",
        "--in",
        "both",
        "--length",
        "1",
    ]);
    assert_eq!(code, 0);
    let f = save(&dir, "f.json", &f);
    let (code, n) = run(&[
        "normalize",
        "--certificate",
        &f,
        "-w",
        &space,
        "--family",
        "rev",
    ]);
    assert_eq!(code, 0, "{n}");
    assert_eq!(n["factor_dims"], json!([[0, 1], [2, 0]]));
    let n = save(&dir, "n.json", &n);
    let (code, x) = run(&["exchange", "--certificate", &n, "--at", "0"]);
    assert_eq!(code, 0, "{x}");
    assert_eq!(x["factor_dims"], json!([[2, 0], [0, 1]]));
    let (code, _) = run(&["exchange", "--certificate", &n, "--at", "1"]);
    assert_eq!(code, 2);

    // a loop has self-extensions, so its filtrations cannot be reordered
    let (_, j) = run(&[
        "member-filt",
        "-w",
        &ws("loop.json"),
        "--of",
        "J2",
        "--in",
        "addS",
        "--length",
        "2",
    ]);
    let j = save(&dir, "j.json", &j);
    let (code, r) = run(&["exchange", "--certificate", &j, "--at", "0"]);
    assert_eq!(code, 3);
    assert_eq!(r["error"]["code"], "ExtObstruction");
}

#[test]
fn refute_rejects_every_candidate_out_of_s2() {
    let e13 = ws("loop-counterexample.json");
    let (code, r) = run(&["refute", "-w", &e13, "--of", "W"]);
    assert_eq!(code, 1);
    assert_eq!(r["refuted"], 2);
    let (code, r) = run(&[
        "refute",
        "-w",
        &e13,
        "--of",
        "W",
        "--candidate",
        "[[[],[]],[[1]]]",
    ]);
    assert_eq!(code, 1);
    assert_eq!(r["witnesses"][0]["kind"], "refutation");
    let (code, _) = run(&["refute", "-w", &e13, "--of", "S2"]);
    assert_eq!(code, 2);
    let (code, _) = run(&["refute", "-w", &ws("a2.json"), "--of", "P1"]);
    assert_eq!(code, 2);
}

#[test]
fn scenarios_pass() {
    for name in [
        "example-1.3",
        "gt-exhaustive-a2",
        "krause-solberg-a2",
        "nilpotent-loop",
    ] {
        let (code, r) = run(&["scenario", name]);
        assert_eq!(code, 0, "{name}: {r}");
        assert_eq!(r["passed"], true);
    }
}

#[test]
fn budget_flags_are_honoured() {
    let (code, r) = run(&[
        "--max-subspaces",
        "1",
        "member-ext",
        "-w",
        &ws("loop-counterexample.json"),
        "--of",
        "W",
        "--x",
        "addS1",
        "--y",
        "addM",
    ]);
    assert_eq!(code, 3, "{r}");
    assert_eq!(r["error"]["code"], "BudgetExceeded");
}
