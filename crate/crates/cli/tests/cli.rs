use serde_json::Value;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_laplace-bounds"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_lines(out: &Output) -> Vec<Value> {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn num(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("{key} missing in {v}"))
}

#[test]
fn dixon2_constants() {
    let rows = json_lines(&run(&["constants", "--problem", "dixon2"]));
    let r = &rows[0];
    assert!((num(r, "K_alpha1_per_n") - 0.923786).abs() < 5e-6);
    assert!((num(r, "K_alpha2") - 20.481129).abs() < 5e-6);
    assert!((num(r, "K_l_per_n") - 0.135555).abs() < 5e-6);
    assert_eq!(r["binding"], "cubic_remainder");
    assert!(r["K_2"].is_null());
}

#[test]
fn dixon2_thresholds() {
    let r = &json_lines(&run(&["threshold", "--problem", "dixon2", "--ceil"]))[0];
    assert_eq!(num(r, "n0"), 1479.0);
    assert_eq!(num(r, "n2"), 240.0);
    let r = &json_lines(&run(&["threshold", "--problem", "dixon2", "--relax-a", "1.2", "--ceil"]))[0];
    assert_eq!(num(r, "n0"), 240.0);
    assert_eq!(r["binding"], "integrability");
}

#[test]
fn negative_relaxation_is_accepted_as_a_value() {
    let r = &json_lines(&run(&["threshold", "--problem", "dixon2", "--relax-a", "-0.25"]))[0];
    assert_eq!(num(r, "a"), -0.25);
    assert!(num(r, "n0") > 1479.0);
}

#[test]
fn mcw_comparison_uses_published_constants() {
    let rows = json_lines(&run(&["compare-mcw"]));
    let r5 = rows.iter().find(|r| num(r, "n") == 5.0).unwrap();
    assert!((num(r5, "our_lo") + 0.18584).abs() < 5e-5);
    assert!((num(r5, "our_hi") - 0.43196).abs() < 5e-5);
    assert!((num(r5, "mcw_radius") - 1.5407).abs() < 5e-4);
    assert_eq!(r5["mcw_larger"], true);
    let r1 = rows.iter().find(|r| num(r, "n") == 1.0).unwrap();
    assert_eq!(r1["mcw_larger"], false);
}

#[test]
fn csv_and_json_agree() {
    let args = ["bracket", "--problem", "separable-cubic:d=2,gamma=0.5", "--n", "geom:1e5:1e7:4"];
    let json = json_lines(&run(&args));
    let mut csv_args = args.to_vec();
    csv_args.extend(["--output", "csv"]);
    let out = run(&csv_args);
    assert!(out.status.success());
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let headers = reader.headers().unwrap().clone();
    let records: Vec<_> = reader.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), json.len());
    for (rec, row) in records.iter().zip(&json) {
        for (h, field) in headers.iter().zip(rec.iter()) {
            match &row[h] {
                Value::Number(n) => assert_eq!(field.parse::<f64>().unwrap(), n.as_f64().unwrap(), "{h}"),
                Value::Bool(b) => assert_eq!(field, b.to_string()),
                Value::String(s) => assert_eq!(field, s),
                other => panic!("unexpected {other}"),
            }
        }
    }
}

#[test]
fn verify_passes_on_library_problems() {
    for p in ["dixon2", "separable-cubic:d=2,gamma=0.5", "gaussian:d=2", "dixon2:g0=2"] {
        let out = run(&["verify", "--problem", p]);
        assert_eq!(out.status.code(), Some(0), "{p}: {}", String::from_utf8_lossy(&out.stderr));
        for r in json_lines(&out) {
            assert_eq!(r["valid"], true);
            assert_eq!(r["contained"], true, "{p}: {r}");
        }
    }
}

#[test]
fn dixon_table_matches_exact_sums() {
    let rows = json_lines(&run(&["dixon", "--n", "1,2,5"]));
    let s: Vec<_> = rows.iter().map(|r| r["S_exact"].as_str().unwrap().to_string()).collect();
    assert_eq!(s, ["6", "90", "756756"]);
    assert!(rows.iter().all(|r| r["contained"] == true));
}

#[test]
fn local_dump_round_trips_through_a_file() {
    let dir = std::env::temp_dir().join(format!("lb-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("local.json");
    let out = run(&["local", "--problem", "dixon2", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let from_file = &json_lines(&run(&["threshold", "--problem", path.to_str().unwrap()]))[0];
    let direct = &json_lines(&run(&["threshold", "--problem", "dixon2"]))[0];
    assert_eq!(from_file["n0"], direct["n0"]);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn config_file_is_merged_with_flags() {
    let dir = std::env::temp_dir().join(format!("lb-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.json");
    std::fs::write(&path, r#"{"command":"threshold","problem":"dixon2","ceil":true}"#).unwrap();
    let r = &json_lines(&run(&["--config", path.to_str().unwrap()]))[0];
    assert_eq!(num(r, "n0"), 1479.0);
    let r = &json_lines(&run(&["--config", path.to_str().unwrap(), "threshold", "--relax-a", "1.2"]))[0];
    assert_eq!(num(r, "n0"), 240.0);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn bad_input_fails() {
    assert_eq!(run(&["bracket", "--problem", "nope"]).status.code(), Some(1));
    assert_eq!(run(&["bracket", "--problem", "dixon2", "--n", "geom:5"]).status.code(), Some(1));
    assert_eq!(run(&["threshold", "--problem", "dixon2", "--relax-a", "-0.7"]).status.code(), Some(1));
    assert_eq!(run(&["constants"]).status.code(), Some(1));
    assert_eq!(run(&["constants", "--bogus"]).status.code(), Some(2));
}
