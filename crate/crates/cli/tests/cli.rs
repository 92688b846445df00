//! End-to-end tests of the `nsleak` binary: subcommands, file formats,
//! exit codes, and machine-output round trips.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nsleak_core::fileio::{attribute_from_json, relation_from_json};
use nsleak_core::measures::leakage;

const REFERENCE_RELATION: &str = r#"{
  "variables": ["X", "Y"],
  "alphabets": {"X": ["x1", "x2", "x3"], "Y": ["y1", "y2"]},
  "tuples": [["x1", "y1"], ["x2", "y1"], ["x3", "y2"]]
}"#;

const REFERENCE_CHANNEL: &str = r#"{
  "from": "X", "to": "Y",
  "map": {"x1": ["y1"], "x2": ["y1"], "x3": ["y2"]}
}"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nsleak"))
}

fn write(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn measure_reports_reference_values_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let rel = write(dir.path(), "rel.json", REFERENCE_RELATION);
    let out = bin()
        .args(["measure", rel.to_str().unwrap(), "-x", "X", "-y", "Y"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("L*(X->Y)     log2(3)"));
    assert!(text.contains("L*(Y->X)     log2(2)"));
    assert!(text.contains("I*(X;Y)      log2(2)"));
    assert!(text.contains("min_epsilon  log2(3)"));
    assert!(text.contains("argmin observation: y2"));
    assert!(text.contains("x3->__ustar"));
    assert!(text.contains("{x1, x2} | {x3}"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn measure_json_is_lossless_and_reformat_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let rel = write(dir.path(), "rel.json", REFERENCE_RELATION);
    let dist = write(
        dir.path(),
        "dist.json",
        r#"{"weights": {"x1|y1": "1/3", "x2|y1": "1/3", "x3|y2": "1/3"}}"#,
    );
    let out = bin()
        .args([
            "measure",
            rel.to_str().unwrap(),
            "-x",
            "X",
            "-y",
            "Y",
            "--epsilon",
            "log2(3)",
            "--dist",
            dist.to_str().unwrap(),
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();

    // no floats anywhere: every measure value travels as a string
    fn assert_no_numbers_in_values(v: &serde_json::Value) {
        match v {
            serde_json::Value::Object(map) => {
                for (k, v) in map {
                    if k == "exact" || k == "decimal" {
                        assert!(v.is_string(), "{k} must be a string, got {v}");
                    }
                    assert_no_numbers_in_values(v);
                }
            }
            serde_json::Value::Array(items) => items.iter().for_each(assert_no_numbers_in_values),
            _ => {}
        }
    }
    assert_no_numbers_in_values(&parsed);

    // the exact strings carry the reference values
    let measures = parsed["measures"].as_array().unwrap();
    let find = |name: &str| -> String {
        measures
            .iter()
            .find(|m| m["name"] == name)
            .unwrap_or_else(|| panic!("missing measure {name}"))["exact"]
            .as_str()
            .unwrap()
            .to_string()
    };
    assert_eq!(find("L*(X->Y)"), "log2(3)");
    assert_eq!(find("L*(Y->X)"), "log2(2)");
    assert_eq!(find("I0(X;Y)"), "log2(3/2)");
    assert_eq!(parsed["stochastic"]["bf_leakage"]["exact"], "2/3");
    assert_eq!(parsed["stochastic"]["sibson_infinity"]["exact"], "log2(2)");
    assert_eq!(parsed["audit"]["identifiable"], true);

    // reformat is idempotent and loses nothing
    let reformatted = serde_json::to_string_pretty(&parsed).unwrap();
    let reparsed: serde_json::Value = serde_json::from_str(&reformatted).unwrap();
    assert_eq!(parsed, reparsed);
    assert_eq!(
        reformatted,
        serde_json::to_string_pretty(&reparsed).unwrap()
    );
}

#[test]
fn worst_attribute_file_reproduces_the_achieved_value() {
    let dir = tempfile::tempdir().unwrap();
    let rel_path = write(dir.path(), "rel.json", REFERENCE_RELATION);
    let out_path = dir.path().join("attr.json");
    let out = bin()
        .args([
            "worst-attribute",
            rel_path.to_str().unwrap(),
            "-x",
            "X",
            "-y",
            "Y",
            "-o",
            out_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));

    let text = std::fs::read_to_string(&out_path).unwrap();
    let (attribute, achieved) = attribute_from_json(&text).unwrap();
    let achieved = achieved.expect("achieved value recorded");
    let rel = relation_from_json(REFERENCE_RELATION).unwrap();
    let extended = rel.apply_attribute(&attribute, "X", "U").unwrap();
    let reevaluated = leakage(&extended, &["U"], &["Y"]).unwrap().value;
    assert_eq!(reevaluated, achieved);
    assert_eq!(achieved.to_string(), "log2(3)");
}

#[test]
fn audit_exit_codes_pass_fail_and_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let rel = write(dir.path(), "rel.json", REFERENCE_RELATION);
    let run = |eps: &str| {
        bin()
            .args([
                "audit",
                rel.to_str().unwrap(),
                "-x",
                "X",
                "-y",
                "Y",
                "--epsilon",
                eps,
            ])
            .output()
            .unwrap()
    };
    assert_eq!(run("log2(3)").status.code(), Some(0));
    let fail = run("1");
    assert_eq!(fail.status.code(), Some(1));
    assert!(stdout(&fail).contains("min epsilon  log2(3)"));
    assert_eq!(run("0").status.code(), Some(2));
    assert_eq!(run("-2").status.code(), Some(2));
}

#[test]
fn schema_violations_exit_two_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"variables": ["X"], "alphabets": {"X": ["a"]}, "tuples": [["a"]], "extra": 1}"#,
    );
    let out = bin()
        .args(["measure", bad.to_str().unwrap(), "-x", "X", "-y", "Y"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("unknown field"), "stderr: {err}");
    assert!(err.contains("line"), "stderr: {err}");

    let missing = dir.path().join("nope.json");
    let out = bin()
        .args(["measure", missing.to_str().unwrap(), "-x", "X", "-y", "Y"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn maximin_command_reports_partition_and_symmetry() {
    let dir = tempfile::tempdir().unwrap();
    let rel = write(dir.path(), "rel.json", REFERENCE_RELATION);
    let out = bin()
        .args(["maximin", rel.to_str().unwrap(), "-x", "X", "-y", "Y"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("maximin info     log2(2)"));
    assert!(text.contains("symmetric"));
    assert!(text.contains("x1->b0, x2->b0, x3->b1"));
}

#[test]
fn capacity_command_finds_the_witness_subset() {
    let dir = tempfile::tempdir().unwrap();
    let ch = write(dir.path(), "ch.json", REFERENCE_CHANNEL);
    let out = bin()
        .args(["capacity", ch.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("capacity bound   log2(2)"));
    assert!(text.contains("witness subset   {x1, x3}"));

    // the cap is enforced with an explicit instruction
    let capped = bin()
        .args(["capacity", ch.to_str().unwrap(), "--max-alphabet", "2"])
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(2));
    assert!(stderr(&capped).contains("raise the cap"));
}

#[test]
fn compose_chains_channels_into_a_relation() {
    let dir = tempfile::tempdir().unwrap();
    let base = write(
        dir.path(),
        "base.json",
        r#"{"variables": ["X"], "alphabets": {"X": ["x1", "x2"]}, "tuples": [["x1"], ["x2"]]}"#,
    );
    let k1 = write(
        dir.path(),
        "k1.json",
        r#"{"from": "X", "to": "Y", "map": {"x1": ["y1"], "x2": ["y1", "y2"]}}"#,
    );
    let k2 = write(
        dir.path(),
        "k2.json",
        r#"{"from": "Y", "to": "Z", "map": {"y1": ["z1"], "y2": ["z1", "z2"]}}"#,
    );
    let out_path = dir.path().join("chain.json");
    let out = bin()
        .args([
            "compose",
            base.to_str().unwrap(),
            k1.to_str().unwrap(),
            k2.to_str().unwrap(),
            "-o",
            out_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));

    let chain = relation_from_json(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(chain.variables(), &["X", "Y", "Z"]);
    assert_eq!(chain.tuples().len(), 4);
    assert!(chain.is_markov(&["X"], &["Y"], &["Z"]).unwrap());

    // alphabet mismatch between stages
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"from": "Q", "to": "Z", "map": {"y1": ["z1"]}}"#,
    );
    let out = bin()
        .args([
            "compose",
            base.to_str().unwrap(),
            k1.to_str().unwrap(),
            bad.to_str().unwrap(),
            "-o",
            out_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oracle_verify_passes_and_rejects_unknown_campaigns() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .current_dir(dir.path())
        .args([
            "oracle", "verify", "--prop", "dpi", "--trials", "25", "--seed", "3",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("violations 0"));

    let out = bin()
        .args(["oracle", "verify", "--prop", "no-such-prop"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("expected one of"));
}

#[test]
fn oracle_verify_respects_the_partition_cap() {
    let out = bin()
        .args([
            "oracle",
            "verify",
            "--prop",
            "closed-form",
            "--trials",
            "5",
            "--max-partition-cap",
            "3",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("raise the cap"));

    // raising the cap beyond the default warns about the cost
    let out = bin()
        .args([
            "oracle",
            "verify",
            "--prop",
            "maximin-symmetry",
            "--trials",
            "5",
            "--max-partition-cap",
            "12",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("warning"));
}

#[test]
fn oracle_verify_json_report_carries_the_claim() {
    let out = bin()
        .args([
            "oracle",
            "verify",
            "--prop",
            "maximin-symmetry",
            "--trials",
            "10",
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed["campaign"], "maximin-symmetry");
    assert_eq!(parsed["passed"], true);
    assert!(parsed["claim"].as_str().unwrap().contains("overlap"));
}

#[test]
fn random_is_deterministic_and_loadable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = bin()
            .args([
                "random",
                "--sizes",
                "4,3",
                "--density",
                "1/2",
                "--seed",
                "42",
                "-o",
                path.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
    }
    let ta = std::fs::read_to_string(&a).unwrap();
    let tb = std::fs::read_to_string(&b).unwrap();
    assert_eq!(ta, tb);

    let rel = relation_from_json(&ta).unwrap();
    assert_eq!(rel.marginal_set("X").unwrap().len(), 4);
    assert_eq!(rel.marginal_set("Y").unwrap().len(), 3);

    // different seed, different relation
    let c = dir.path().join("c.json");
    bin()
        .args([
            "random",
            "--sizes",
            "4,3",
            "--density",
            "1/2",
            "--seed",
            "43",
            "-o",
            c.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_ne!(std::fs::read_to_string(&c).unwrap(), ta);
}

#[test]
fn maximin_and_capacity_json_reformat_idempotently() {
    let dir = tempfile::tempdir().unwrap();
    let rel = write(dir.path(), "rel.json", REFERENCE_RELATION);
    let ch = write(dir.path(), "ch.json", REFERENCE_CHANNEL);
    let runs: Vec<Vec<&str>> = vec![
        vec!["maximin", rel.to_str().unwrap(), "-x", "X", "-y", "Y", "--format", "json"],
        vec!["capacity", ch.to_str().unwrap(), "--format", "json"],
    ];
    for args in runs {
        let out = bin().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "args {args:?}");
        let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        let once = serde_json::to_string_pretty(&parsed).unwrap();
        let twice = serde_json::to_string_pretty(
            &serde_json::from_str::<serde_json::Value>(&once).unwrap(),
        )
        .unwrap();
        assert_eq!(once, twice);
    }
}

#[test]
fn measure_selects_a_pair_out_of_a_wider_relation() {
    let dir = tempfile::tempdir().unwrap();
    let rel = write(
        dir.path(),
        "rel3.json",
        r#"{
          "variables": ["X", "Y", "Z"],
          "alphabets": {"X": ["x1", "x2"], "Y": ["y1", "y2"], "Z": ["z1", "z2"]},
          "tuples": [["x1", "y1", "z1"], ["x2", "y1", "z2"], ["x2", "y2", "z2"]]
        }"#,
    );
    let out = bin()
        .args([
            "measure",
            rel.to_str().unwrap(),
            "-x",
            "X",
            "-y",
            "Z",
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let lstar = parsed["measures"]
        .as_array()
        .unwrap()
        .iter()
        .find(|m| m["name"] == "L*(X->Z)")
        .unwrap();
    // conditional ranges {x1} and {x2}: min 1, prior 2
    assert_eq!(lstar["exact"], "log2(2)");

    // unknown variable names are an input error
    let out = bin()
        .args(["measure", rel.to_str().unwrap(), "-x", "X", "-y", "Q"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unrelated_relation_reports_zero_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    let rel = write(
        dir.path(),
        "prod.json",
        r#"{
          "variables": ["X", "Y"],
          "alphabets": {"X": ["x1", "x2"], "Y": ["y1", "y2"]},
          "tuples": [["x1", "y1"], ["x1", "y2"], ["x2", "y1"], ["x2", "y2"]]
        }"#,
    );
    let out = bin()
        .args([
            "measure",
            rel.to_str().unwrap(),
            "-x",
            "X",
            "-y",
            "Y",
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for name in [
        "L(X->Y)",
        "L*(X->Y)",
        "L*(Y->X)",
        "I*(X;Y)",
        "I0(X;Y)",
        "min_epsilon",
    ] {
        let m = parsed["measures"]
            .as_array()
            .unwrap()
            .iter()
            .find(|m| m["name"] == name)
            .unwrap();
        assert_eq!(m["exact"], "log2(1)", "{name} should vanish");
    }
    assert_eq!(parsed["min_epsilon_open_bound"], true);
}
