use std::path::Path;
use std::process::{Command, Output};

use quantrate::cli::{output_schema, EXIT_IO, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

fn quantrate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quantrate"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_to_file(dir: &Path, name: &str, args: &[&str]) -> Vec<u8> {
    let path = dir.join(name);
    let mut full = args.to_vec();
    let p = path.to_str().unwrap();
    full.extend(["--out", p]);
    let out = quantrate(&full);
    assert_eq!(out.status.code(), Some(EXIT_OK), "{}", String::from_utf8_lossy(&out.stderr));
    std::fs::read(&path).unwrap()
}

fn header(bytes: &[u8]) -> String {
    String::from_utf8(bytes.to_vec()).unwrap().lines().next().unwrap().to_string()
}

const FAST_MC: &[&str] = &["mc-validate", "--bits", "2,3", "--snr-db", "0,10", "--samples", "20000"];

#[test]
fn golden_csv_headers() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&[&str], &str); 5] = [
        (&["rate-sweep", "--bits", "2", "--snr-db", "0"], "b,snr_db,L_star,gmi_bits,capacity_bits"),
        (&["loading-sweep", "--bits", "2", "--loading", "1,2"], "b,L,snr_db,gmi_bits,marker"),
        (&["optimal-loading", "--bits", "2,3"], "K,b,L_star,L_hat,scaling_law,L_mse"),
        (FAST_MC, "b,L,snr_db,gmi_analytic_bits,gmi_mc_bits,std_err,z_score"),
        (
            &["rate-sweep", "--bits", "2", "--snr-db", "0", "--units", "nats"],
            "b,snr_db,L_star,gmi_nats,capacity_nats",
        ),
    ];
    for (i, (args, want)) in cases.iter().enumerate() {
        let bytes = run_to_file(dir.path(), &format!("{i}.csv"), args);
        assert_eq!(header(&bytes), *want);
        assert_eq!(bytes.last(), Some(&b'\n'));
        assert!(!bytes.contains(&b'\r'));
    }
}

#[test]
fn csv_rows_parse_with_dot_decimals() {
    let dir = tempfile::tempdir().unwrap();
    let bytes = run_to_file(dir.path(), "r.csv", &["rate-sweep", "--bits", "1..3", "--snr-db", "-5:2.5:5"]);
    let mut rdr = csv::Reader::from_reader(bytes.as_slice());
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3 * 5);
    for r in &rows {
        assert!(!r[1].contains(','));
        for field in r.iter() {
            field.parse::<f64>().unwrap();
        }
        assert!(r[3].parse::<f64>().unwrap() <= r[4].parse::<f64>().unwrap());
    }
}

#[test]
fn optimal_loading_rows() {
    let dir = tempfile::tempdir().unwrap();
    let bytes = run_to_file(dir.path(), "o.csv", &["optimal-loading", "--bits", "2..5"]);
    let mut rdr = csv::Reader::from_reader(bytes.as_slice());
    let rows: Vec<Vec<f64>> = rdr
        .records()
        .map(|r| r.unwrap().iter().map(|f| f.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 4);
    // K = 4 reference
    assert!((rows[1][2] - 2.344_077_765_773_948).abs() < 1e-9);
    for r in &rows {
        assert_eq!(r[4], 2.0 * (2.0 * r[0]).ln().sqrt());
        assert!((r[5] - r[2]).abs() < 1e-4);
    }
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 3] = [
        FAST_MC,
        &["loading-sweep", "--bits", "3,5"],
        &["rate-sweep", "--format", "json"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let a = run_to_file(dir.path(), &format!("a{i}"), args);
        let b = run_to_file(dir.path(), &format!("b{i}"), args);
        assert_eq!(a, b);
    }
    let mut other_seed = FAST_MC.to_vec();
    other_seed.extend(["--seed", "99"]);
    assert_ne!(
        run_to_file(dir.path(), "s1", FAST_MC),
        run_to_file(dir.path(), "s2", &other_seed)
    );
}

#[test]
fn json_outputs_match_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let runs: [(&str, &[&str]); 6] = [
        ("rate-sweep", &["rate-sweep", "--bits", "1..3", "--snr-db", "0,10"]),
        ("rate-sweep", &["rate-sweep", "--bits", "2", "--snr-db", "0", "--units", "nats"]),
        ("loading-sweep", &["loading-sweep", "--bits", "2"]),
        ("optimal-loading", &["optimal-loading", "--bits", "2..4"]),
        ("mc-validate", FAST_MC),
        ("mc-validate", &["mc-validate", "--bits", "1", "--snr-db", "0", "--samples", "10000", "--units", "nats"]),
    ];
    for (i, (cmd, args)) in runs.iter().enumerate() {
        let mut full = args.to_vec();
        full.extend(["--format", "json"]);
        let bytes = run_to_file(dir.path(), &format!("{i}.json"), &full);
        let doc: Value = serde_json::from_slice(&bytes).unwrap();
        let schema: Value = serde_json::from_str(output_schema(cmd).unwrap()).unwrap();
        let validator = jsonschema::validator_for(&schema).unwrap();
        let errors: Vec<String> = validator.iter_errors(&doc).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{cmd}: {errors:?}");
        assert!(!doc["rows"].as_array().unwrap().is_empty());
    }
}

#[test]
fn schemas_reject_foreign_documents() {
    let schema: Value = serde_json::from_str(output_schema("rate-sweep").unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let bad = serde_json::json!({
        "command": "rate-sweep",
        "params": {"bits": [2], "snr_db": [0.0], "loading": ["star"], "units": "bits"},
        "rows": [{"b": 2, "snr_db": 0.0, "L_star": 2.0, "gmi_bits": "high", "capacity_bits": 1.0}]
    });
    assert!(!validator.is_valid(&bad));
    assert!(output_schema("nope").is_none());
}

#[test]
fn loading_sweep_marks_reference_points() {
    let dir = tempfile::tempdir().unwrap();
    let bytes = run_to_file(dir.path(), "l.csv", &["loading-sweep", "--bits", "4", "--snr-db", "10"]);
    let text = String::from_utf8(bytes).unwrap();
    for m in ["L_star", "L_hat", "four_sigma"] {
        assert_eq!(text.lines().filter(|l| l.ends_with(&format!(",{m}"))).count(), 1, "{m}");
    }
    assert!(text.lines().any(|l| l.starts_with("4,4.0,10.0,") && l.ends_with(",four_sigma")));
}

#[test]
fn mc_std_err_scales_with_samples() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["mc-validate", "--bits", "3", "--snr-db", "10", "--loading", "star"];
    let se = |n: &str, name: &str| {
        let mut args = base.to_vec();
        args.extend(["--samples", n]);
        let bytes = run_to_file(dir.path(), name, &args);
        let mut rdr = csv::Reader::from_reader(bytes.as_slice());
        let r = rdr.records().next().unwrap().unwrap();
        r[5].parse::<f64>().unwrap()
    };
    let ratio = se("10000", "small") / se("1000000", "large");
    assert!(ratio > 5.0 && ratio < 20.0, "{ratio}");
}

#[test]
fn exit_codes() {
    assert_eq!(quantrate(&["--help"]).status.code(), Some(EXIT_OK));
    assert_eq!(quantrate(&["rate-sweep", "--help"]).status.code(), Some(EXIT_OK));
    assert_eq!(quantrate(&[]).status.code(), Some(EXIT_USAGE));
    assert_eq!(quantrate(&["rate-sweep", "--format", "xml"]).status.code(), Some(EXIT_USAGE));
    assert_eq!(quantrate(&["rate-sweep", "--snr-db", "1:0:3"]).status.code(), Some(EXIT_USAGE));
    assert_eq!(quantrate(&["mc-validate", "--samples", "10"]).status.code(), Some(EXIT_USAGE));
    assert_eq!(quantrate(&["mc-validate", "--loading", "auto"]).status.code(), Some(EXIT_USAGE));
    assert_eq!(
        quantrate(&["rate-sweep", "--out", "/nonexistent/dir/out.csv"]).status.code(),
        Some(EXIT_IO)
    );
}

#[test]
fn stdout_when_no_out_flag() {
    let out = quantrate(&["optimal-loading", "--bits", "2"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
}
