//! End-to-end tests of the ptheta binary: document shape, determinism,
//! exit codes.

use std::process::{Command, Output};

fn ptheta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptheta"))
        .args(args)
        .env_remove("PTHETA_CACHE")
        .output()
        .expect("spawn ptheta")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is one well-formed JSON document")
}

#[test]
fn eval_reproduces_reference_value() {
    let out = ptheta(&["eval", "--q", "0.5", "--x", "1", "--tol", "1e-12"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["command"], "eval");
    let v = doc["value"]["re"].as_f64().unwrap();
    assert!((v - 1.6416326).abs() < 1e-6, "value {v}");
    assert!(doc["error_bound"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn identical_inputs_produce_byte_identical_output() {
    let a = ptheta(&["eval", "--q", "0.37,0.2", "--x", "-3.5,1.25", "--tol", "1e-11"]);
    let b = ptheta(&["eval", "--q", "0.37,0.2", "--x", "-3.5,1.25", "--tol", "1e-11"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let a = ptheta(&["zeros", "--q", "0.31", "--radius-exp", "6"]);
    let b = ptheta(&["zeros", "--q", "0.31", "--radius-exp", "6"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn domain_error_exits_2_with_clean_stdout() {
    let out = ptheta(&["eval", "--q", "1.5", "--x", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty(), "no partial document on failure");
    assert!(!out.stderr.is_empty());
}

#[test]
fn precision_budget_exits_3() {
    let out = ptheta(&["eval", "--q", "0.999", "--x", "1e300"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
}

#[test]
fn zeros_flags_the_conjugate_pair() {
    let out = ptheta(&["zeros", "--q", "0.31", "--radius-exp", "8"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["complex_pair_count"], 1);
    assert_eq!(doc["total_multiplicity"], 8);
    let zeros = doc["zeros"].as_array().unwrap();
    assert_eq!(zeros.len(), 8);
    for z in zeros {
        assert_eq!(z["certified"], true);
        assert!(z["residual"].as_f64().unwrap() < 1e-9);
    }
    // exactly one pair off the axis
    let off_axis = zeros
        .iter()
        .filter(|z| z["im"].as_f64().unwrap() != 0.0)
        .count();
    assert_eq!(off_axis, 2);
}

#[test]
fn spectrum_matches_reference_and_caches() {
    let dir = std::env::temp_dir().join(format!("ptheta-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cache = dir.join("spectrum.json");
    let cache_s = cache.to_str().unwrap();

    let out = ptheta(&["spectrum", "--j-max", "1", "--cache", cache_s]);
    let doc = stdout_json(&out);
    assert_eq!(doc["provenance"], "computed");
    let q1 = doc["entries"][0]["q"].as_f64().unwrap();
    assert!((q1 - 0.3092493386).abs() <= 5e-10, "q~_1 = {q1}");
    assert!(doc["entries"][0]["res_theta"].as_f64().unwrap() <= 1e-10);

    // warm cache: identical values, provenance flips to cached
    let out2 = ptheta(&["spectrum", "--j-max", "1", "--cache", cache_s]);
    let doc2 = stdout_json(&out2);
    assert_eq!(doc2["provenance"], "cached");
    assert_eq!(doc2["entries"][0]["q"], doc["entries"][0]["q"]);

    // corrupt cache: recomputed, not trusted
    std::fs::write(&cache, "{ garbage").unwrap();
    let out3 = ptheta(&["spectrum", "--j-max", "1", "--cache", cache_s]);
    let doc3 = stdout_json(&out3);
    assert_eq!(doc3["provenance"], "computed");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn spectrum_budget_exhaustion_prints_partial_and_exits_3() {
    let out = ptheta(&["spectrum", "--j-max", "3", "--q-max", "0.45"]);
    assert_eq!(out.status.code(), Some(3));
    let doc: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("partial table is well-formed");
    assert_eq!(doc["budget_exhausted"], true);
    assert_eq!(doc["entries"].as_array().unwrap().len(), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn verify_passes_for_positive_and_negative_q() {
    for q in ["0.4", "-0.5"] {
        let out = ptheta(&["verify", "--q", q, "--k-span", "8", "--product-k", "15"]);
        let doc = stdout_json(&out);
        assert_eq!(doc["all_pass"], true, "q = {q}: {doc}");
    }
}

#[test]
fn sweep_produces_flat_csv_rows() {
    let args = [
        "sweep",
        "--q-from",
        "-0.6",
        "--q-to",
        "-0.2",
        "--steps",
        "3",
        "--report",
        "alternation",
    ];
    let out = ptheta(&args);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.trim_end().lines().collect();
    assert_eq!(lines[0], "q,zero_count,pair_count,alternation_ok,monotone_from");
    assert_eq!(lines.len(), 4);
    for row in &lines[1..] {
        assert!(row.contains("true"), "row: {row}");
    }

    // deterministic flag pins ordering; output must be identical
    let mut det = args.to_vec();
    det.push("--deterministic");
    let out2 = ptheta(&det);
    assert_eq!(String::from_utf8(out2.stdout).unwrap(), text);

    // json rows carry the same fields
    let mut js = args.to_vec();
    js.extend(["--output-format", "json"]);
    let doc = stdout_json(&ptheta(&js));
    assert_eq!(doc["rows"].as_array().unwrap().len(), 3);
    assert_eq!(doc["rows"][0]["alternation_ok"], true);
}

#[test]
fn missing_radius_is_a_domain_error() {
    let out = ptheta(&["zeros", "--q", "0.3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seventeen_point_alternation_sweep() {
    let out = ptheta(&[
        "sweep",
        "--q-from",
        "-0.9",
        "--q-to",
        "-0.1",
        "--steps",
        "17",
        "--report",
        "alternation",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.trim_end().lines().collect();
    assert_eq!(lines.len(), 18); // header + 17 rows
    // consecutive alternation genuinely breaks where pairs swallow an
    // odd run of rungs; the three reference parameters hold
    let row = |q: &str| {
        lines[1..]
            .iter()
            .find(|l| l.starts_with(q))
            .unwrap_or_else(|| panic!("row {q} missing"))
            .to_string()
    };
    assert!(row("-0.9,").contains("true"));
    assert!(row("-0.5,").contains("true"));
    assert!(row("-0.85,").contains("false"));
    assert!(row("-0.75,").contains("false"));
}
