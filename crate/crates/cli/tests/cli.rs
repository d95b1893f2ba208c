use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

struct Sandbox {
    dir: TempDir,
}

impl Sandbox {
    fn new() -> Self {
        Sandbox {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn file(&self, name: &str, value: &Value) -> PathBuf {
        let path = self.dir.path().join(name);
        fs::write(&path, value.to_string()).unwrap();
        path
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_affine-lambda"))
        .args(args)
        .env_remove("AFFINE_MAX_REFINEMENTS")
        .output()
        .unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn entries(v: &Value) -> Vec<Vec<String>> {
    v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|row| {
            row.as_array()
                .unwrap()
                .iter()
                .map(|e| e.as_str().unwrap().to_string())
                .collect()
        })
        .collect()
}

fn identity_rows(n: usize) -> Vec<Vec<String>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { "1/1" } else { "0/1" }.to_string())
                .collect()
        })
        .collect()
}

#[test]
fn embed_identity_gives_identity() {
    let sb = Sandbox::new();
    let input = sb.file(
        "a.json",
        &json!([["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]),
    );
    let out = stdout_json(&run(&["embed", "--n", "3", "--input", s(&input)]));
    assert_eq!(out["m"], 3);
    assert_eq!(entries(&out["matrix"]), identity_rows(4));
}

#[test]
fn embed_all_ones_matches_worked_example() {
    let sb = Sandbox::new();
    let input = sb.file(
        "a.json",
        &json!({"n": 4, "entries": [[1, 1, 1, 1], [0, 1, 1, 1], [0, 0, 1, 1], [0, 0, 0, 1]]}),
    );
    let output = sb.path("out.json");
    let status = run(&[
        "embed",
        "--n",
        "4",
        "--input",
        s(&input),
        "--output",
        s(&output),
    ]);
    assert!(status.status.success());
    let out: Value = serde_json::from_str(&fs::read_to_string(&output).unwrap()).unwrap();
    // a = b = … = f = 1 in the hand-expanded 7×7 matrix.
    let expected = [
        ["1/1", "-2/3", "2/3", "0/1", "-1/3", "1/3", "1/3"],
        ["0/1", "1/1", "0/1", "-1/2", "1/2", "0/1", "1/2"],
        ["0/1", "0/1", "1/1", "0/1", "-1/2", "1/2", "1/2"],
        ["0/1", "0/1", "0/1", "1/1", "0/1", "0/1", "1/1"],
        ["0/1", "0/1", "0/1", "0/1", "1/1", "0/1", "1/1"],
        ["0/1", "0/1", "0/1", "0/1", "0/1", "1/1", "1/1"],
        ["0/1", "0/1", "0/1", "0/1", "0/1", "0/1", "1/1"],
    ];
    let expected: Vec<Vec<String>> = expected
        .iter()
        .map(|r| r.iter().map(|e| e.to_string()).collect())
        .collect();
    assert_eq!(entries(&out["matrix"]), expected);
}

#[test]
fn embed_integerize_reports_p() {
    let sb = Sandbox::new();
    let input = sb.file("a.json", &json!([["1", "1/2"], ["0", "1"]]));
    let out = stdout_json(&run(&[
        "embed",
        "--n",
        "2",
        "--input",
        s(&input),
        "--integerize",
    ]));
    assert_eq!(
        entries(&out["p"]),
        vec![vec!["2/1", "0/1"], vec!["0/1", "1/1"]]
    );
    assert_eq!(
        entries(&out["conjugated"]),
        vec![vec!["1/1", "1/1"], vec!["0/1", "1/1"]]
    );
}

#[test]
fn embed_error_codes() {
    let sb = Sandbox::new();
    let bad = sb.path("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    assert_eq!(
        run(&["embed", "--n", "2", "--input", s(&bad)])
            .status
            .code(),
        Some(2)
    );
    let missing = sb.path("missing.json");
    assert_eq!(
        run(&["embed", "--n", "2", "--input", s(&missing)])
            .status
            .code(),
        Some(2)
    );
    let not_uni = sb.file("a.json", &json!([["2", "1"], ["0", "1"]]));
    let out = run(&["embed", "--n", "2", "--input", s(&not_uni)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unitriangular"));
    let ok = sb.file("b.json", &json!([["1", "1"], ["0", "1"]]));
    assert_eq!(
        run(&["embed", "--n", "3", "--input", s(&ok)]).status.code(),
        Some(3)
    );
}

#[test]
fn act_examples() {
    let sb = Sandbox::new();
    let p = sb.file("p.json", &json!(["1/3", "-2"]));
    let identity = sb.file(
        "id.json",
        &json!([["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]),
    );
    let out = stdout_json(&run(&["act", "--rep", s(&identity), "--point", s(&p)]));
    assert_eq!(out, json!(["1/3", "-2/1"]));

    let translation = sb.file(
        "t.json",
        &json!([["1", "0", "1/2"], ["0", "1", "5"], ["0", "0", "1"]]),
    );
    let out = stdout_json(&run(&[
        "act",
        "--rep",
        s(&translation),
        "--point",
        s(&p),
        "--power",
        "3",
    ]));
    assert_eq!(out, json!(["11/6", "13/1"]));
    let out = stdout_json(&run(&[
        "act",
        "--rep",
        s(&translation),
        "--point",
        s(&p),
        "--power",
        "-1",
    ]));
    assert_eq!(out, json!(["-1/6", "-7/1"]));
}

#[test]
fn act_on_origin_gives_translation_column() {
    let sb = Sandbox::new();
    let a = sb.file(
        "a.json",
        &json!([["1", "2", "1/3"], ["0", "1", "-1"], ["0", "0", "1"]]),
    );
    let rep = sb.path("rep.json");
    assert!(
        run(&["embed", "--n", "3", "--input", s(&a), "--output", s(&rep)])
            .status
            .success()
    );
    let rep_json: Value = serde_json::from_str(&fs::read_to_string(&rep).unwrap()).unwrap();
    let column: Vec<Value> = entries(&rep_json["matrix"])
        .iter()
        .take(3)
        .map(|row| json!(row[3]))
        .collect();
    let zero = sb.file("z.json", &json!(["0", "0", "0"]));
    let out = stdout_json(&run(&["act", "--rep", s(&rep), "--point", s(&zero)]));
    assert_eq!(out, Value::Array(column));
}

#[test]
fn act_dimension_mismatch_is_precondition_failure() {
    let sb = Sandbox::new();
    let p = sb.file("p.json", &json!(["1"]));
    let rep = sb.file(
        "t.json",
        &json!([["1", "0", "1"], ["0", "1", "1"], ["0", "0", "1"]]),
    );
    assert_eq!(
        run(&["act", "--rep", s(&rep), "--point", s(&p)])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn hyperbolic_and_integerize() {
    let sb = Sandbox::new();
    let shear = sb.file(
        "s.json",
        &json!([["1", "1", "0"], ["0", "1", "0"], ["0", "0", "1"]]),
    );
    let out = stdout_json(&run(&["hyperbolic", "--input", s(&shear)]));
    assert_eq!(out["essentially_hyperbolic"], false);
    let translation = sb.file(
        "t.json",
        &json!([["1", "0", "1"], ["0", "1", "0"], ["0", "0", "1"]]),
    );
    let out = stdout_json(&run(&["hyperbolic", "--input", s(&translation)]));
    assert_eq!(out["essentially_hyperbolic"], true);
    let out = stdout_json(&run(&["hyperbolic", "--input", s(&shear), "--certify"]));
    assert_eq!(out["admissible"]["hyperbolic"], true);

    let gens = sb.file("g.json", &json!([[["1", "1/2"], ["0", "1"]]]));
    assert_eq!(
        run(&["integerize", "--input", s(&gens)]).status.code(),
        Some(3)
    );
    let out = stdout_json(&run(&["integerize", "--input", s(&gens), "--close"]));
    assert_eq!(
        entries(&out["p"]),
        vec![vec!["2/1", "0/1"], vec!["0/1", "1/1"]]
    );
    assert_eq!(out["conjugates"].as_array().unwrap().len(), 2);
}

#[test]
fn extend_tstar_pure_diagonal() {
    let sb = Sandbox::new();
    let one = json!([{"coeff": "1", "exp": "0"}]);
    let g = sb.file(
        "g.json",
        &json!({"n": 2, "u": {"n": 2, "entries": [[one, []], [[], one]]}, "diag_exponents": ["1", "0"]}),
    );
    let out = stdout_json(&run(&["extend-tstar", "--input", s(&g)]));
    assert_eq!(out["essentially_free"], true);
    assert_eq!(out["free_and_rigid"]["witness"], Value::Null);
    assert_eq!(out["matrix"]["n"], 4);
}

#[test]
fn wreath_act_and_report() {
    let sb = Sandbox::new();
    let spec = sb.file("spec.json", &json!({"levels": ["Z", "Z"]}));
    let g = sb.file(
        "g.json",
        &json!({"shift": "1", "support": [{"index": "0", "h": "3"}]}),
    );
    let out = stdout_json(&run(&["wreath", "--spec", s(&spec), "--elem", s(&g)]));
    assert_eq!(out["depth"], 2);
    assert_eq!(out["report"]["certified"], true);

    let p = sb.file(
        "p.json",
        &json!({"base": "5", "fiber": {"index_space": "integers", "support": [{"index": "0", "value": "2"}]}}),
    );
    let out = stdout_json(&run(&[
        "wreath",
        "--spec",
        s(&spec),
        "--elem",
        s(&g),
        "--point",
        s(&p),
    ]));
    assert_eq!(out["base"], "6/1");
    assert_eq!(
        out["fiber"]["support"],
        json!([{"index": "-1/1", "value": "5/1"}])
    );

    let rational = sb.file("q.json", &json!({"shift": "1/2", "support": []}));
    assert_eq!(
        run(&["wreath", "--spec", s(&spec), "--elem", s(&rational)])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn verify_exit_codes_and_determinism() {
    let sb = Sandbox::new();
    let first = sb.path("v1.json");
    let second = sb.path("v2.json");
    for out in [&first, &second] {
        let status = run(&[
            "verify",
            "--suite",
            "lsa",
            "--n",
            "4",
            "--samples",
            "50",
            "--seed",
            "1",
            "--output",
            s(out),
        ]);
        assert_eq!(status.status.code(), Some(0));
    }
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
    assert_eq!(
        run(&["verify", "--suite", "lsa", "--samples", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["verify", "--suite", "lsa", "--n", "9", "--samples", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["verify", "--suite", "nope", "--samples", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn refinement_override_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_affine-lambda"))
        .args(["verify", "--suite", "lsa", "--n", "2", "--samples", "1"])
        .env("AFFINE_MAX_REFINEMENTS", "lots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_all_suites() {
    let out = run(&[
        "verify",
        "--suite",
        "all",
        "--n",
        "5",
        "--samples",
        "100",
        "--seed",
        "42",
    ]);
    let verdict: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(verdict["suite"], "all");
}
