use cli::certify::{validate_report, CheckedInput};
use cli::{run, EXIT_FAILS, EXIT_HOLDS, EXIT_INCONCLUSIVE, EXIT_USAGE};
use combinat::OccupationVector;
use dsmatrix::DSMatrix;
use serde_json::Value;
use std::path::{Path, PathBuf};
use symtensor::SymTensor;
use tempfile::TempDir;

fn ov(e: &[u32]) -> OccupationVector {
    OccupationVector::new(e.to_vec())
}

fn write(dir: &TempDir, name: &str, contents: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn write_state(dir: &TempDir, name: &str, x: &DSMatrix) -> PathBuf {
    write(dir, name, &serde_json::to_string(&x.to_json()).unwrap())
}

fn write_tensor(dir: &TempDir, name: &str, t: &SymTensor) -> PathBuf {
    write(dir, name, &serde_json::to_string(&t.to_json()).unwrap())
}

fn exec(args: &[&str]) -> (i32, Value, String) {
    let mut argv = vec!["dscone"];
    argv.extend_from_slice(args);
    let (code, out) = run(argv);
    let v: Value = serde_json::from_str(&out).unwrap_or_else(|e| panic!("report is not JSON ({e}): {out}"));
    assert_eq!(v["exit_code"], code, "exit code recorded in the report");
    (code, v, out)
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn qutrit3_state() -> DSMatrix {
    witnesslib::qutrit3_search().state
}

#[test]
fn ppt_on_two_qubit_dicke_fails_with_eigenvector() {
    let dir = TempDir::new().unwrap();
    let x = DSMatrix::pure_dicke(&ov(&[1, 1])).unwrap();
    let f = write_state(&dir, "bell.json", &x);
    let (code, report, _) = exec(&["ppt", "--input", path(&f), "--level", "1"]);
    assert_eq!(code, EXIT_FAILS);
    assert_eq!(report["checks"][0]["verdict"]["certificate"]["kind"], "moment_eigenvector");
    assert_eq!(validate_report(&report, CheckedInput::State(&x.q_view()), None), Ok(1));
}

#[test]
fn ppt_level_above_half_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let f = write_state(&dir, "x.json", &DSMatrix::pure_dicke(&ov(&[1, 1])).unwrap());
    let (code, report, _) = exec(&["ppt", "--input", path(&f), "--level", "2"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(report["error"].as_str().unwrap().contains("exceeds"));
}

#[test]
fn repro_qutrit3_reports_eta() {
    let (code, report, _) = exec(&["repro", "qutrit3"]);
    assert_eq!(code, EXIT_HOLDS);
    let eta = report["checks"][0]["verdict"]["eta"].as_f64().unwrap();
    assert!((-0.03..=-0.015).contains(&eta), "η* = {eta}");
    assert_eq!(report["checks"][1]["status"], "holds");
    assert_eq!(report["checks"][2]["verdict"]["entangled"], true);
}

#[test]
fn malformed_json_reports_position() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bad.json", "{\"n\": 2,\n \"d\": 2,\n \"lambda\": [ }");
    let (code, report, _) = exec(&["ppt", "--input", path(&f)]);
    assert_eq!(code, EXIT_USAGE);
    let msg = report["error"].as_str().unwrap();
    assert!(msg.contains("line 3"), "{msg}");
    assert!(msg.contains("column"), "{msg}");
}

#[test]
fn missing_input_and_bad_flags_are_usage_errors() {
    assert_eq!(exec(&["ppt", "--input", "/nonexistent/x.json"]).0, EXIT_USAGE);
    assert_eq!(exec(&["ppt"]).0, EXIT_USAGE);
    assert_eq!(exec(&["hierarchy", "--family", "bogus", "--level", "1", "--input", "x"]).0, EXIT_USAGE);
    assert_eq!(exec(&["witness", "detect", "--state", "/nonexistent", "--witness", "robinson"]).0, EXIT_USAGE);
}

#[test]
fn lambda_and_q_payloads_are_equivalent() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", r#"{"n":2,"d":2,"lambda":[{"alpha":[2,0],"value":0.25},{"alpha":[1,1],"value":0.5},{"alpha":[0,2],"value":0.25}]}"#);
    let b = write(&dir, "b.json", r#"{"n":2,"d":2,"q":[{"alpha":[2,0],"value":0.25},{"alpha":[1,1],"value":0.25},{"alpha":[0,2],"value":0.25}]}"#);
    let (_, ra, _) = exec(&["param", "--input", path(&a)]);
    let (_, rb, _) = exec(&["param", "--input", path(&b)]);
    assert_eq!(ra["checks"][0]["verdict"]["lambda"], rb["checks"][0]["verdict"]["lambda"]);
    assert_ne!(ra["input_digest"], rb["input_digest"]);
}

#[test]
fn param_flags_negative_weights() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "neg.json", r#"{"n":2,"d":2,"lambda":[{"alpha":[2,0],"value":1.5},{"alpha":[1,1],"value":-0.5}]}"#);
    let (code, report, _) = exec(&["param", "--input", path(&f)]);
    assert_eq!(code, EXIT_FAILS);
    let x = DSMatrix::from_json_str(&std::fs::read_to_string(&f).unwrap()).unwrap();
    assert_eq!(validate_report(&report, CheckedInput::State(&x.q_view()), None), Ok(1));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let f = write_state(&dir, "q3.json", &qutrit3_state());
    for args in [
        vec!["sep", "--input", path(&f)],
        vec!["extend", "--input", path(&f), "--level", "1", "--ppt"],
        vec!["selftest", "--only", "4,10"],
    ] {
        let (_, _, a) = exec(&args);
        let (_, _, b) = exec(&args);
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn seed_and_config_are_recorded() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "ctx.json", r#"{"eps_psd": 1e-6, "seed": 7}"#);
    let (_, report, _) = exec(&["--config", path(&cfg), "witness", "list"]);
    assert_eq!(report["seed"], 7);
    assert_eq!(report["context"]["eps_psd"], 1e-6);
    assert_eq!(report["context"]["max_iter"], 5000);
    let (_, report, _) = exec(&["--config", path(&cfg), "--seed", "11", "witness", "list"]);
    assert_eq!(report["seed"], 11);
    let bad = write(&dir, "bad.json", r#"{"eps_psd": "small"}"#);
    assert_eq!(exec(&["--config", path(&bad), "witness", "list"]).0, EXIT_USAGE);
}

#[test]
fn timings_are_opt_in() {
    let (_, plain, _) = exec(&["repro", "qutrit3"]);
    assert!(plain["checks"][0].get("wall_time_ms").is_none());
    let (_, timed, _) = exec(&["--timings", "repro", "qutrit3"]);
    assert!(timed["checks"][0]["wall_time_ms"].as_f64().unwrap() >= 0.0);
}

#[test]
fn qubit_sep_is_exact() {
    let dir = TempDir::new().unwrap();
    // Equal mixture of all four-qubit Dicke states: diagonal in the Dicke
    // basis with equal weights, which is a mixture of product states.
    let mixed = SymTensor::from_fn(4, 2, |_| 0.2).unwrap();
    let sep = DSMatrix::from_lambda(mixed);
    let f = write_state(&dir, "qubit4.json", &sep);
    let (code, report, _) = exec(&["sep", "--input", path(&f)]);
    assert_eq!(code, EXIT_HOLDS, "{report}");
    assert_eq!(report["checks"][0]["name"], "qubit_separability");

    let ent = DSMatrix::pure_dicke(&ov(&[2, 2])).unwrap();
    let f = write_state(&dir, "dicke22.json", &ent);
    let (code, report, _) = exec(&["sep", "--input", path(&f)]);
    assert_eq!(code, EXIT_FAILS);
    assert_eq!(validate_report(&report, CheckedInput::State(&ent.q_view()), None), Ok(1));
}

#[test]
fn sep_detects_the_ppt_entangled_qutrit_state() {
    let dir = TempDir::new().unwrap();
    let x = qutrit3_state();
    let f = write_state(&dir, "q3.json", &x);
    let (code, report, _) = exec(&["sep", "--input", path(&f)]);
    assert_eq!(code, EXIT_FAILS);
    assert_eq!(report["checks"][0]["status"], "holds");
    assert!(validate_report(&report, CheckedInput::State(&x.q_view()), None).unwrap() >= 1);
}

#[test]
fn sep_decomposes_a_product_mixture() {
    let dir = TempDir::new().unwrap();
    let a = SymTensor::rank_one(&[0.5, 0.3, 0.2], 3).unwrap();
    let b = SymTensor::rank_one(&[0.1, 0.1, 0.8], 3).unwrap();
    let q = a.scale(0.6).add_scaled(&b, 0.4).unwrap();
    let f = write_state(&dir, "sep3.json", &DSMatrix::lambda_from_q(&q));
    let (code, report, _) = exec(&["sep", "--input", path(&f)]);
    assert_eq!(code, EXIT_HOLDS, "{report}");
    let last = report["checks"].as_array().unwrap().last().unwrap().clone();
    assert_eq!(last["name"], "cp_decomposition");
}

#[test]
fn witness_detect_validates() {
    let dir = TempDir::new().unwrap();
    let x = qutrit3_state();
    let f = write_state(&dir, "q3.json", &x);
    let (code, report, _) = exec(&["witness", "detect", "--state", path(&f), "--witness", "robinson"]);
    assert_eq!(code, EXIT_FAILS);
    assert_eq!(validate_report(&report, CheckedInput::State(&x.q_view()), None), Ok(1));
    assert_eq!(exec(&["witness", "detect", "--state", path(&f), "--witness", "nope"]).0, EXIT_USAGE);
    // Shape mismatch against a two-party witness.
    assert_eq!(exec(&["witness", "detect", "--state", path(&f), "--witness", "projective(1,1),0.5"]).0, EXIT_USAGE);

    let maxmix = DSMatrix::from_lambda(SymTensor::from_fn(3, 3, |_| 0.1).unwrap());
    let f = write_state(&dir, "mm.json", &maxmix);
    let (code, report, _) = exec(&["witness", "detect", "--state", path(&f), "--witness", "robinson"]);
    assert_eq!(code, EXIT_HOLDS);
    assert!(report["checks"][0]["verdict"]["certificate"]["pairing"].as_f64().unwrap() >= 0.0);
}

#[test]
fn witness_list_exports_provenance() {
    let (code, report, _) = exec(&["witness", "list"]);
    assert_eq!(code, EXIT_HOLDS);
    let checks = report["checks"].as_array().unwrap();
    assert_eq!(checks.len(), witnesslib::library().len());
    for c in checks {
        let w: witnesslib::WitnessJson = serde_json::from_value(c["verdict"].clone()).unwrap();
        assert!(!w.provenance.is_empty());
        assert!(w.to_witness().is_ok());
    }
}

#[test]
fn sos_obstructions_validate() {
    let dir = TempDir::new().unwrap();
    for w in [witnesslib::motzkin(), witnesslib::robinson()] {
        let f = write_tensor(&dir, "w.json", &w.tensor);
        let (code, report, _) = exec(&["sos", "--input", path(&f)]);
        assert_eq!(code, EXIT_FAILS, "{}", w.name);
        assert_eq!(validate_report(&report, CheckedInput::Tensor(&w.tensor), None), Ok(1), "{}", w.name);
    }
    let square = SymTensor::rank_one(&[1.0, 2.0], 2).unwrap();
    let f = write_tensor(&dir, "sq.json", &square);
    assert_eq!(exec(&["sos", "--input", path(&f)]).0, EXIT_HOLDS);
    assert_eq!(exec(&["sos", "--input", path(&f), "--level", "1"]).0, EXIT_HOLDS);
}

#[test]
fn hierarchy_levels_and_caps() {
    let dir = TempDir::new().unwrap();
    let m = witnesslib::motzkin().tensor;
    let f = write_tensor(&dir, "m.json", &m);
    let (code, report, _) = exec(&["hierarchy", "--family", "rsos", "--level", "0", "--input", path(&f)]);
    assert_eq!(code, EXIT_FAILS);
    assert_eq!(validate_report(&report, CheckedInput::Tensor(&m), Some(0)), Ok(1));
    assert_eq!(exec(&["hierarchy", "--family", "rsos", "--level", "1", "--input", path(&f)]).0, EXIT_HOLDS);
    let (code, report, _) = exec(&["hierarchy", "--family", "pnn", "--level", "0", "--input", path(&f)]);
    assert_eq!(code, EXIT_FAILS);
    assert_eq!(validate_report(&report, CheckedInput::Tensor(&m), Some(0)), Ok(1));

    assert_eq!(exec(&["hierarchy", "--family", "pnn", "--level", "5", "--input", path(&f)]).0, EXIT_USAGE);
    let (code, _, _) =
        exec(&["hierarchy", "--family", "pnn", "--level", "5", "--max-level", "5", "--input", path(&f)]);
    assert_ne!(code, EXIT_USAGE);

    let x = DSMatrix::pure_dicke(&ov(&[1, 1])).unwrap();
    let s = write_state(&dir, "bell.json", &x);
    for family in ["nnext", "momext"] {
        let (code, report, _) = exec(&["hierarchy", "--family", family, "--level", "1", "--input", path(&s)]);
        assert_eq!(code, EXIT_FAILS, "{family}");
        assert_eq!(validate_report(&report, CheckedInput::State(&x.q_view()), Some(1)), Ok(1), "{family}");
    }
}

#[test]
fn extend_round_trips_and_refutes() {
    let dir = TempDir::new().unwrap();
    let x = DSMatrix::pure_dicke(&ov(&[1, 1])).unwrap();
    let f = write_state(&dir, "bell.json", &x);
    let (code, report, _) = exec(&["extend", "--input", path(&f), "--level", "1"]);
    assert_eq!(code, EXIT_FAILS);
    assert_eq!(report["checks"][0]["verdict"]["certificate"]["kind"], "farkas_ray");
    assert_eq!(validate_report(&report, CheckedInput::State(&x.q_view()), Some(1)), Ok(1));

    let prod = DSMatrix::lambda_from_q(&SymTensor::rank_one(&[0.7, 0.3], 2).unwrap());
    let f = write_state(&dir, "prod.json", &prod);
    for ppt in [false, true] {
        let mut args = vec!["extend", "--input", path(&f), "--level", "2"];
        if ppt {
            args.push("--ppt");
        }
        let (code, report, _) = exec(&args);
        assert_eq!(code, EXIT_HOLDS, "{report}");
        let ext = &report["checks"][0]["verdict"]["certificate"]["extension"];
        let t = SymTensor::from_json_str(&ext.to_string()).unwrap();
        let back = t.marginal(2).unwrap();
        for (a, v) in prod.q_view().iter() {
            assert!((back.get(a) - v).abs() < 1e-8);
        }
    }
}

#[test]
fn marginal_of_dicke_state() {
    let dir = TempDir::new().unwrap();
    let x = DSMatrix::pure_dicke(&ov(&[2, 1])).unwrap();
    let f = write_state(&dir, "d21.json", &x);
    let (code, report, _) = exec(&["marginal", "--input", path(&f), "--traced", "1"]);
    assert_eq!(code, EXIT_HOLDS);
    let m = DSMatrix::from_json_str(&report["checks"][0]["verdict"]["marginal"].to_string()).unwrap();
    assert_eq!(m, x.marginal(1).unwrap());
    assert!((report["checks"][0]["verdict"]["trace"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(exec(&["marginal", "--input", path(&f), "--traced", "4"]).0, EXIT_USAGE);
}

#[test]
fn selftest_names_the_corrupted_witness() {
    let dir = TempDir::new().unwrap();
    let mut docs: Vec<witnesslib::WitnessJson> = witnesslib::library().iter().map(|w| w.to_json()).collect();
    let robinson = docs.iter_mut().find(|d| d.name == "robinson").unwrap();
    robinson.tensor.entries[0].value += 0.25;
    let f = write(&dir, "lib.json", &serde_json::to_string(&docs).unwrap());
    let (code, report, _) = exec(&["selftest", "--library", path(&f), "--only", "5"]);
    assert_ne!(code, EXIT_HOLDS);
    let integrity = &report["checks"][0];
    assert_eq!(integrity["name"], "library_integrity");
    assert_eq!(integrity["status"], "fails");
    assert!(integrity["verdict"]["invariant"].as_str().unwrap().contains("robinson"));
}

#[test]
fn selftest_subset_passes_on_shipped_library() {
    let (code, report, _) = exec(&["selftest", "--only", "1,5,7,9"]);
    assert_eq!(code, EXIT_HOLDS, "{report}");
    assert_eq!(report["checks"].as_array().unwrap().len(), 5);
}

/// Regression data: the PPT entangled three-qutrit optimizer against the
/// first level of the PPT bosonic extension hierarchy. No ground truth is
/// claimed; the anchor records the verdict this implementation produces.
#[test]
fn momext_level_one_on_qutrit_optimizer() {
    let dir = TempDir::new().unwrap();
    let x = qutrit3_state();
    let f = write_state(&dir, "q3.json", &x);
    let (code, report, _) = exec(&["hierarchy", "--family", "momext", "--level", "1", "--input", path(&f)]);
    eprintln!("MomExt(1) on the qutrit optimizer: exit {code}, {}", report["checks"][0]["verdict"]["details"]);
    assert_eq!(code, EXIT_FAILS);
    assert_eq!(validate_report(&report, CheckedInput::State(&x.q_view()), Some(1)), Ok(1));
}

#[test]
fn tampered_certificates_are_rejected() {
    let dir = TempDir::new().unwrap();
    let x = DSMatrix::pure_dicke(&ov(&[1, 1])).unwrap();
    let q = x.q_view();
    let f = write_state(&dir, "bell.json", &x);

    let (_, mut report, _) = exec(&["ppt", "--input", path(&f)]);
    report["checks"][0]["verdict"]["certificate"]["eigenvector"] = serde_json::json!([0.0, 1.0, 0.0]);
    assert!(validate_report(&report, CheckedInput::State(&q), None).is_err());

    let (_, mut report, _) = exec(&["extend", "--input", path(&f), "--level", "1"]);
    report["checks"][0]["verdict"]["certificate"]["y"][0] = serde_json::json!(5.0);
    assert!(validate_report(&report, CheckedInput::State(&q), Some(1)).is_err());

    let (_, mut report, _) = exec(&["hierarchy", "--family", "momext", "--level", "1", "--input", path(&f)]);
    report["checks"][0]["verdict"]["certificate"]["verdict"]["certificate"]["eigenvalue"] = serde_json::json!(1.0);
    // The eigenvector still proves the precondition failure: the checker
    // recomputes the quadratic form instead of trusting the eigenvalue.
    assert!(validate_report(&report, CheckedInput::State(&q), Some(1)).is_ok());

    let m = witnesslib::motzkin().tensor;
    let g = write_tensor(&dir, "m.json", &m);
    let (_, mut report, _) = exec(&["sos", "--input", path(&g)]);
    report["checks"][0]["verdict"]["obstruction"]["exponent"] = serde_json::json!([2, 4, 0]);
    assert!(validate_report(&report, CheckedInput::Tensor(&m), None).is_err());

    let (_, report, _) = exec(&["hierarchy", "--family", "pnn", "--level", "0", "--input", path(&g)]);
    assert!(validate_report(&report, CheckedInput::Tensor(&m), Some(0)).is_ok());
    assert!(validate_report(&report, CheckedInput::Tensor(&SymTensor::from_fn(3, 3, |_| 1.0).unwrap()), Some(0)).is_err());
}

#[test]
fn momext_on_a_boundary_state_is_not_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let maxmix = DSMatrix::from_lambda(SymTensor::from_fn(3, 3, |_| 0.1).unwrap());
    let f = write_state(&dir, "mm.json", &maxmix);
    let (code, _, _) = exec(&["hierarchy", "--family", "momext", "--level", "1", "--input", path(&f)]);
    assert!(code == EXIT_HOLDS || code == EXIT_INCONCLUSIVE, "exit {code}");
}
