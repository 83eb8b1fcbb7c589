use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use dsmt_cli::problem::{self, Sources};
use dsmt_core::intervals::imprecise_hybrid;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn run(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_dsmt"))
        .args(args)
        .output()
        .expect("failed to run dsmt");
    (
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
        out.status.code().unwrap(),
    )
}

fn run_file(verb: &str, file: &str, extra: &[&str]) -> (String, String, i32) {
    let path = data(file);
    let mut args = vec![verb, path.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

/// The value printed on the row starting with `label`, in the given column.
fn cell(out: &str, label: &str, column: usize) -> String {
    let line = out
        .lines()
        .find(|l| l.starts_with(&format!("{label} ")))
        .unwrap_or_else(|| panic!("no row `{label}` in\n{out}"));
    let rest = &line[label.len()..];
    rest.split_whitespace().nth(column).unwrap().to_string()
}

#[test]
fn golden_outputs() {
    let cases: [(&[&str], &str, &str); 6] = [
        (&["lattice"], "hybrid3.json", "lattice_hybrid3.txt"),
        (&["compare"], "zadeh.json", "compare_zadeh.txt"),
        (&["compare"], "pcr1.json", "compare_pcr1.txt"),
        (&["compare"], "qualitative.json", "compare_qualitative.txt"),
        (
            &["fuse", "--rule", "dsmh"],
            "imprecise.json",
            "fuse_imprecise.txt",
        ),
        (
            &["sequential", "--rule", "smets"],
            "temporal.json",
            "sequential_smets.txt",
        ),
    ];
    for (args, input, golden) in cases {
        let (out, err, code) = run_file(args[0], input, &args[1..]);
        assert_eq!(code, 0, "{input}: {err}");
        assert_eq!(err, "");
        let expected = fs::read_to_string(data("golden").join(golden)).unwrap();
        assert_eq!(out, expected, "{golden}");
    }
}

#[test]
fn output_is_deterministic() {
    let first = run_file("compare", "temporal.json", &[]);
    let second = run_file("compare", "temporal.json", &[]);
    assert_eq!(first, second);
}

#[test]
fn lattice_rows() {
    let (out, _, code) = run_file("lattice", "hybrid3.json", &[]);
    assert_eq!(code, 0);
    let cards: Vec<&str> = out
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().last().unwrap())
        .collect();
    assert_eq!(cards, ["0", "1", "1", "2", "2", "2", "3", "3", "3", "4"]);

    let (out, _, _) = run_file("lattice", "dynamic.json", &["--format", "json"]);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["lattice"].as_array().unwrap().len(), 4);

    let (out, _, _) = run_file("lattice", "pcr1.json", &[]);
    assert_eq!(out.lines().count(), 1 + 4);
}

#[test]
fn free_lattice_of_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("free3.json");
    fs::write(&path, r#"{"frame": ["a", "b", "c"]}"#).unwrap();
    let (out, _, code) = run(&["lattice", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 1 + 19);
}

#[test]
fn fuse_dempster_on_dynamic_problem() {
    let (out, _, code) = run_file("fuse", "dynamic.json", &["--rule", "dempster"]);
    assert_eq!(code, 0);
    assert_eq!(cell(&out, "t1", 0), "0.600000");
    assert_eq!(cell(&out, "t2", 0), "0.314286");
    assert_eq!(cell(&out, "t1 | t2", 0), "0.085714");
    assert!(out.contains("total conflict: 0.650000"));
}

#[test]
fn fuse_pcr5_on_zadeh() {
    let (out, _, code) = run_file("fuse", "zadeh.json", &["--rule", "pcr5"]);
    assert_eq!(code, 0);
    assert_eq!(cell(&out, "M", 0), "0.486000");
    assert_eq!(cell(&out, "C", 0), "0.486000");
    assert_eq!(cell(&out, "T", 0), "0.028000");
}

#[test]
fn undefined_rule_exits_with_2() {
    let (out, err, code) = run_file("fuse", "four.json", &["--rule", "dempster"]);
    assert_eq!(code, 2);
    assert_eq!(out, "");
    assert!(err.contains("undefined"), "{err}");

    let (out, err, code) = run_file("sequential", "temporal.json", &["--rule", "dempster"]);
    assert_eq!(code, 2);
    assert!(out.starts_with("step 2: m1 + m2\n"));
    assert!(!out.contains("step 3"));
    assert!(err.contains("step 3"), "{err}");
}

#[test]
fn invalid_input_exits_with_1() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("not json", "not json"),
        (
            "bad sum",
            r#"{"frame": ["a", "b"], "sources": [{"masses": {"a": 0.5}}, {"masses": {"b": 1}}]}"#,
        ),
        (
            "unknown name",
            r#"{"frame": ["a", "b"], "sources": [{"masses": {"c": 1}}, {"masses": {"b": 1}}]}"#,
        ),
        (
            "bad label",
            r#"{"frame": ["a"], "mode": "qualitative", "scale": {"m": 3}, "sources": [{"masses": {"a": "L9"}}]}"#,
        ),
        (
            "no scale",
            r#"{"frame": ["a"], "mode": "qualitative", "sources": []}"#,
        ),
        (
            "reversed",
            r#"{"frame": ["a"], "mode": "imprecise", "sources": [{"masses": {"a": [{"lo": 0.5, "hi": 0.2}]}}]}"#,
        ),
        (
            "one source",
            r#"{"frame": ["a", "b"], "sources": [{"masses": {"a": 1}}]}"#,
        ),
    ];
    for (what, text) in cases {
        let path = dir.path().join("p.json");
        fs::write(&path, text).unwrap();
        let (_, err, code) = run(&["fuse", path.to_str().unwrap()]);
        assert_eq!(code, 1, "{what}: {err}");
        assert!(err.starts_with("error: "), "{what}: {err}");
    }
    let (_, err, code) = run_file("fuse", "dynamic.json", &["--rule", "pcr5"]);
    assert_eq!(code, 1);
    assert!(err.contains("`t3` is empty under the model"), "{err}");
    let (_, _, code) = run_file("fuse", "pcr1.json", &["--quasi-normalize", "L1"]);
    assert_eq!(code, 1);
}

#[test]
fn renormalize_is_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    fs::write(
        &path,
        r#"{"frame": ["a", "b"], "model": {"type": "shafer"},
            "sources": [{"masses": {"a": 1, "b": 1}}, {"masses": {"a | b": 1}}]}"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let (_, err, code) = run(&["fuse", p]);
    assert_eq!(code, 1);
    assert!(err.contains("--renormalize"), "{err}");
    let (out, _, code) = run(&["fuse", p, "--renormalize"]);
    assert_eq!(code, 0);
    assert_eq!(cell(&out, "a", 0), "0.500000");
}

#[test]
fn compare_pcr_example_one() {
    let (out, _, code) = run_file("compare", "pcr1.json", &[]);
    assert_eq!(code, 0);
    // columns: conjunctive dsmh pcr5 dempster ...
    assert_eq!(cell(&out, "A", 2), "0.540000");
    assert_eq!(cell(&out, "B", 2), "0.180000");
    assert_eq!(cell(&out, "A | B", 2), "0.280000");
    assert_eq!(cell(&out, "A", 1), "0.420000");
    assert_eq!(cell(&out, "A | B", 1), "0.460000");
}

#[test]
fn compare_without_conflict_gives_identical_columns() {
    let (out, _, code) = run_file("compare", "agree.json", &[]);
    assert_eq!(code, 0);
    for line in out.lines().skip(1) {
        let cells: Vec<&str> = line
            .split_whitespace()
            .skip_while(|c| !c.contains('.'))
            .collect();
        assert_eq!(cells.len(), 7, "{line}");
        assert!(cells.iter().all(|c| *c == cells[0]), "{line}");
    }
}

#[test]
fn compare_reports_failures_inline() {
    let (out, _, code) = run_file("compare", "four.json", &[]);
    assert_eq!(code, 0);
    assert!(out.contains("dempster: rule undefined"), "{out}");
    assert_eq!(cell(&out, "t1 | t2", 1), "0.120000");
}

#[test]
fn qualitative_quasi_normalization() {
    let (out, _, code) = run_file(
        "fuse",
        "qualitative.json",
        &["--rule", "pcr5", "--quasi-normalize", "L1"],
    );
    assert_eq!(code, 0);
    assert_eq!(cell(&out, "t1", 0), "L3");
    assert_eq!(cell(&out, "t2", 0), "L4");
    assert_eq!(cell(&out, "t1 | t2", 0), "L0");
}

#[test]
fn pignistic_outputs() {
    let (out, _, code) = run_file("pignistic", "vacuous.json", &[]);
    assert_eq!(code, 0);
    assert!(out.contains("argmax: t1, t2"));

    // DSmH on the dynamic problem: t1 0.34, t2 0.25, t1|t2 0.41 with t1, t2 disjoint
    let (out, _, code) = run_file("pignistic", "dynamic.json", &["--rule", "dsmh"]);
    assert_eq!(code, 0);
    assert_eq!(cell(&out, "t1", 0), format!("{:.6}", 0.34 + 0.41 / 2.0));
    assert_eq!(cell(&out, "t2", 0), format!("{:.6}", 0.25 + 0.41 / 2.0));
    assert!(!out.contains("\nt3 "));
    assert!(out.contains("argmax: t1\n"));
}

#[test]
fn pignistic_on_free_model_sums_to_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    fs::write(
        &path,
        r#"{"frame": ["a", "b", "c"],
            "sources": [{"masses": {"a": 0.9, "c": 0.1}}, {"masses": {"b": 0.9, "c": 0.1}}]}"#,
    )
    .unwrap();
    let (out, _, code) = run(&[
        "pignistic",
        path.to_str().unwrap(),
        "--rule",
        "conjunctive",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    let probs = doc["probabilities"].as_object().unwrap();
    let a = probs["a"].as_f64().unwrap();
    let b = probs["b"].as_f64().unwrap();
    let c = probs["c"].as_f64().unwrap();
    // the singletons overlap on a free model; only their union has probability 1
    assert!(a + b + c >= 1.0);
    assert!((a - b).abs() < 1e-12);
}

#[test]
fn sequential_outputs() {
    let (out, _, code) = run_file("sequential", "temporal.json", &["--rule", "pcr5"]);
    assert_eq!(code, 0);
    let step3 = out.split("step 3").nth(1).unwrap();
    let step3 = step3.split("step 4").next().unwrap();
    assert_eq!(cell(step3, "A", 0), "0.277490");
    assert_eq!(cell(step3, "B", 0), "0.545010");
    assert_eq!(cell(step3, "C", 0), "0.177500");

    let (seq, _, _) = run_file("sequential", "pcr1.json", &["--rule", "pcr5"]);
    let (fuse, _, _) = run_file("fuse", "pcr1.json", &["--rule", "pcr5"]);
    assert_eq!(seq, format!("step 2: m1 + m2\n{fuse}"));
}

#[test]
fn json_results_read_back_as_sources() {
    let dir = tempfile::tempdir().unwrap();
    for (file, rule) in [
        ("temporal.json", "pcr5"),
        ("zadeh.json", "smets"),
        ("imprecise.json", "dsmh"),
        ("qualitative.json", "pcr5"),
    ] {
        let (out, err, code) = run_file("fuse", file, &["--rule", rule, "--format", "json"]);
        assert_eq!(code, 0, "{err}");
        let path = dir.path().join("result.json");
        fs::write(&path, &out).unwrap();
        let reread = problem::load(&path, false).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
        let masses = doc["sources"][0]["masses"].as_object().unwrap();
        match &reread.sources {
            Sources::Precise(b) => {
                for (key, value) in masses {
                    let p = reread.frame.parse(key).unwrap();
                    assert_eq!(b[0].mass(&p), value.as_f64().unwrap(), "{file} {key}");
                }
                assert_eq!(b[0].focal_elements().count(), masses.len());
            }
            Sources::Imprecise(b) => {
                let Sources::Imprecise(original) =
                    problem::load(&data(file), false).unwrap().sources
                else {
                    unreachable!()
                };
                let expected = imprecise_hybrid(&original, &reread.model).unwrap();
                assert!(b[0].iter().eq(expected.iter()), "{file}");
            }
            Sources::Qualitative(_, b) => {
                for (key, value) in masses {
                    let p = reread.frame.parse(key).unwrap();
                    assert_eq!(b[0].mass(&p).to_string(), value.as_str().unwrap());
                }
            }
        }
    }
}

#[test]
fn reducible_mass_is_moved_with_a_warning() {
    let (out, err, code) = run_file("fuse", "reducible.json", &["--rule", "conjunctive"]);
    assert_eq!(code, 0, "{err}");
    assert!(
        err.contains("warning: m1: mass on `A | C` moved to `A`"),
        "{err}"
    );
    // m1 becomes A:0.6 B:0.4, so A = 0.3 and B = 0.2 against the second source
    let rows: Vec<Vec<&str>> = out
        .lines()
        .map(|l| l.split_whitespace().collect())
        .collect();
    assert!(rows.contains(&vec!["A", "0.300000"]), "{out}");
    assert!(rows.contains(&vec!["B", "0.200000"]), "{out}");
}
