use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn npk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_npk")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn structured(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "structured"]);
    let o = npk(&all);
    (code(&o), serde_json::from_str(&stdout(&o)).expect("structured output is json"))
}

fn rational(v: &Value) -> (i64, i64) {
    let s = v.as_str().expect("exact values are strings");
    match s.split_once('/') {
        Some((n, d)) => (n.parse().unwrap(), d.parse().unwrap()),
        None => (s.parse().unwrap(), 1),
    }
}

#[test]
fn su3_flag_passes_every_suite() {
    let (c, r) = structured(&["--target", "su3-flag", "--suite", "all"]);
    assert_eq!(c, 0);
    assert_eq!(r["version"], 1);
    assert_eq!(r["target"], "su3-flag");
    assert!(r["conventions"]["curvature"].is_string());
    let checks = r["checks"].as_array().unwrap();
    assert!(checks.len() > 50);
    for c in checks {
        for key in ["name", "anchor", "residual", "tol", "pass"] {
            assert!(c.get(key).is_some(), "{key} missing in {c}");
        }
    }
}

#[test]
fn cp3_twistor_suite_populates_codim2_values() {
    let (c, r) = structured(&["--target", "cp3-twistor", "--suite", "twistor"]);
    assert_eq!(c, 0);
    let v = &r["values"];
    let (kn, kd) = rational(&v["twistor.kappa"]);
    let (an, ad) = rational(&v["twistor.alpha"]);
    let (fn_, fd) = rational(&v["twistor.fiber_curvature"]);
    assert_ne!(an, 0);
    assert_eq!(kn * ad, -an * kd, "kappa = -alpha");
    assert_eq!(fn_ * ad, 4 * an * fd, "fiber curvature = 4 alpha");
}

#[test]
fn injected_fault_exits_4_with_a_four_index_witness() {
    let (c, r) = structured(&["--target", &fixture("su3-flag-fault.json")]);
    assert_eq!(c, 4);
    let first = r["checks"].as_array().unwrap().iter().find(|c| c["name"] == "gray: first identity").unwrap();
    assert_eq!(first["pass"], false);
    let w = first["witness"].as_str().unwrap();
    let inner = w.split_once('[').unwrap().1.trim_end_matches(']');
    assert_eq!(inner.split(',').count(), 4, "{w}");
}

#[test]
fn threeform_tool_labels() {
    let o = npk(&["threeform", "normal-form", &fixture("first-case-1-2.json")]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("case: i\n"), "{s}");
    assert!(s.contains("spectrum: {20:2, 4:4, 16:4}"), "{s}");
    assert!(s.contains("class: twistorial-candidate"), "{s}");

    let o = npk(&["threeform", "spectrum", &fixture("first-case-beta-zero.json")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("class: splits-off-Kähler"));

    let o = npk(&["threeform", "normal-form", &fixture("second-case.json")]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("case: ii\n"), "{s}");
    assert!(s.contains("decomposable: false"), "{s}");
    assert!(s.contains("class: not-decomposable"), "{s}");
}

#[test]
fn threeform_tool_structured_and_float() {
    for backend in ["exact", "float"] {
        let (c, r) = structured(&["threeform", "spectrum", &fixture("first-case-1-2.json"), "--backend", backend]);
        assert_eq!(c, 0);
        assert_eq!(r["class"], "twistorial-candidate");
        let mults: Vec<u64> = r["spectrum"].as_array().unwrap().iter().map(|e| e["algebraic"].as_u64().unwrap()).collect();
        assert_eq!(mults, [2, 4, 4]);
    }
}

#[test]
fn threeform_tool_errors() {
    assert_eq!(code(&npk(&["threeform", "normal-form", &fixture("malformed.json")])), 2);
    assert_eq!(code(&npk(&["threeform", "normal-form", &fixture("no-such-file.json")])), 2);
    assert_eq!(code(&npk(&["threeform", "normal-form", &fixture("zero-form.json")])), 3);
}

#[test]
fn run_exit_codes() {
    assert_eq!(code(&npk(&["--target", "no-such-model"])), 2);
    assert_eq!(code(&npk(&["--target", &fixture("malformed.json")])), 2);
    assert_eq!(code(&npk(&[])), 2);
    assert_ne!(code(&npk(&["--target", "su3-flag", "--tol", "0"])), 0);
    // The flip needs a Kähler submersion; su3-flag is already strict.
    assert_eq!(code(&npk(&["--target", "su3-flag", "--suite", "twistor"])), 3);
    assert_eq!(code(&npk(&["--target", "gxg-su2", "--suite", "submersion"])), 3);
    assert_eq!(code(&npk(&["--target", "gxg-su2", "--suite", "all"])), 0);
}

#[test]
fn reports_are_deterministic() {
    let args = ["--target", "gxg-sl2r", "--suite", "all", "--format", "structured"];
    assert_eq!(stdout(&npk(&args)), stdout(&npk(&args)));
    let mut seeded = args.to_vec();
    seeded.extend(["--seed", "7"]);
    assert_eq!(stdout(&npk(&seeded)), stdout(&npk(&seeded)));
}

#[test]
fn backends_agree_on_verdicts() {
    let (ce, e) = structured(&["--target", "para-twistor"]);
    let (cf, f) = structured(&["--target", "para-twistor", "--backend", "float"]);
    assert_eq!((ce, cf), (0, 0));
    let names = |r: &Value| -> Vec<(String, bool)> {
        r["checks"].as_array().unwrap().iter().map(|c| (c["name"].as_str().unwrap().to_string(), c["pass"].as_bool().unwrap())).collect()
    };
    assert_eq!(names(&e), names(&f));
    assert_eq!(f["backend"], "float");
}

#[test]
fn threeform_file_as_run_target() {
    let (c, r) = structured(&["--target", &fixture("second-case.json"), "--suite", "threeform"]);
    assert_eq!(c, 0);
    assert_eq!(r["values"]["threeform.class"], "not-decomposable");
    assert_eq!(code(&npk(&["--target", &fixture("second-case.json"), "--suite", "gray"])), 3);
}

#[test]
fn list_and_export() {
    let o = npk(&["list"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    for id in npk_core::catalog::builtin_ids() {
        assert!(s.contains(id), "{id}");
    }
    let o = npk(&["export", "--target", "gxg-su2"]);
    assert_eq!(code(&o), 0);
    let p = npk_core::curvature::parse_point(&serde_json::from_str(&stdout(&o)).unwrap()).unwrap();
    assert_eq!(p.dim(), 6);
}
