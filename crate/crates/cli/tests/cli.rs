use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nlgap_core::graph::{named, write_edge_list, Indexing, RegularGraph};
use serde_json::Value;

fn nlgap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlgap")).args(args).output().expect("spawn nlgap")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write_graph(dir: &Path, name: &str, g: &RegularGraph) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, write_edge_list(g, Indexing::ZeroBased)).unwrap();
    p
}

fn schema() -> jsonschema::JSONSchema {
    let o = nlgap(&["schema"]);
    assert_eq!(code(&o), 0);
    let s: Value = serde_json::from_slice(&o.stdout).unwrap();
    jsonschema::JSONSchema::compile(&s).unwrap()
}

fn report(o: &Output) -> Value {
    let v: Value = serde_json::from_slice(&o.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stderr)));
    let compiled = schema();
    if let Err(errs) = compiled.validate(&v) {
        let msgs: Vec<String> = errs.map(|e| e.to_string()).collect();
        panic!("schema violations: {msgs:?}");
    }
    v
}

fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing");
    v
}

#[test]
fn spectra_of_k4() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_graph(dir.path(), "k4.edges", &named::complete(4));
    let o = nlgap(&["spectra", "--in", p.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v = report(&o);
    assert!((v["result"]["lambda2"].as_f64().unwrap() + 1.0).abs() < 1e-9);
    assert_eq!(v["result"]["exact"], true);
    assert_eq!(v["status"], "ok");
}

#[test]
fn constants_eps_d() {
    let o = nlgap(&["constants", "--id", "eps_d"]);
    assert_eq!(code(&o), 0);
    let v = report(&o);
    assert_eq!(v["result"]["values"][0]["value"].as_f64().unwrap(), 0.2);
}

#[test]
fn constants_gamma_is_huge_and_finite_in_log() {
    let o = nlgap(&["constants", "--id", "Gamma", "--q", "2", "--C", "1", "--K", "1", "--d", "6", "--alpha", "paper"]);
    assert_eq!(code(&o), 0);
    let v = report(&o);
    let entry = &v["result"]["values"][0];
    assert_eq!(entry["sign"], 1);
    assert!(entry["log10_value"].as_f64().unwrap() > 100.0);
    let ln = entry["ln_value"].as_f64().unwrap();
    assert!((ln / std::f64::consts::LN_10 - entry["log10_value"].as_f64().unwrap()).abs() < 1e-9);
}

#[test]
fn failed_identity_exits_two() {
    let o = nlgap(&["constants", "--identities"]);
    let v = report(&o);
    let all = v["result"]["identities"]["recombination_equal"].as_bool().unwrap()
        && v["result"]["identities"]["scale_weight_sum_ok"].as_bool().unwrap();
    assert_eq!(code(&o), if all { 0 } else { 2 });
    assert_eq!(v["status"], if all { "ok" } else { "falsified" });
}

#[test]
fn expansion_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let g = named::disjoint_copies(&named::complete(4), 2);
    let p = write_graph(dir.path(), "two_k4.edges", &g);
    let o = nlgap(&["expan", "--in", p.to_str().unwrap(), "--alpha-log", "0", "--part", "a"]);
    assert_eq!(code(&o), 2);
    let v = report(&o);
    assert_eq!(v["result"]["verdicts"][0]["outcome"], "fail");
    assert_eq!(v["result"]["verdicts"][0]["witness"]["kind"], "ball_too_small");
}

#[test]
fn usage_and_input_errors_exit_one() {
    assert_eq!(code(&nlgap(&["no-such-command"])), 1);
    assert_eq!(code(&nlgap(&["spectra"])), 1);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.edges");
    fs::write(&p, "0 1\n1 1\n").unwrap();
    let o = nlgap(&["spectra", "--in", p.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("self-loop"));
    assert_eq!(code(&nlgap(&["--help"])), 0);
}

#[test]
fn gen_writes_graphs_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("graphs");
    let o = nlgap(&["--jobs", "2", "gen", "--n", "20", "--d", "3", "--seed", "5", "--count", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let manifest: Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert!(schema().is_valid(&manifest));
    assert_eq!(manifest["spec"]["seed"], 5);
    let items = manifest["result"]["graphs"].as_array().unwrap();
    assert_eq!(items.len(), 4);
    let mut texts = Vec::new();
    for it in items {
        let text = fs::read_to_string(out.join(it["file"].as_str().unwrap())).unwrap();
        let g = nlgap_core::graph::parse_edge_list(&text, Indexing::ZeroBased).unwrap();
        assert_eq!((g.n(), g.d()), (20, 3));
        texts.push(text);
    }
    texts.sort();
    texts.dedup();
    assert_eq!(texts.len(), 4, "seeded samples should differ");
    // Same spec, same graphs.
    let again = dir.path().join("again");
    nlgap(&["gen", "--n", "20", "--d", "3", "--seed", "5", "--count", "4", "--out", again.to_str().unwrap()]);
    assert_eq!(fs::read(out.join("g0002.edges")).unwrap(), fs::read(again.join("g0002.edges")).unwrap());
}

#[test]
fn reports_repeat_modulo_timing() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_graph(dir.path(), "petersen.edges", &named::petersen());
    let args = ["gamma", "--in", p.to_str().unwrap(), "--budget", "2e4", "--seed", "7"];
    let (a, b) = (nlgap(&args), nlgap(&args));
    assert_eq!(without_timing(report(&a)), without_timing(report(&b)));
    let v = report(&a);
    assert_eq!(v["result"]["exact"], false);
    let found = v["result"]["lower_bound"]["ratio"].as_f64().unwrap();
    let exact = v["result"]["closed_form"]["certified"].as_f64().unwrap();
    // d/(d−λ2) = 3/2 on the Petersen graph.
    assert!((exact - 1.5).abs() < 1e-9);
    assert!(found <= exact * (1.0 + 1e-6) && found > 1.4);
}

#[test]
fn certify_binary_field() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_graph(dir.path(), "petersen.edges", &named::petersen());
    let f = dir.path().join("f.csv");
    let rows: String = (0..10).map(|v| format!("{},{}\n", [1, -1, 0, 0][v % 4], [0, 1, -1, 0][v % 4])).collect();
    fs::write(&f, rows).unwrap();
    let norm = dir.path().join("norm.json");
    fs::write(&norm, r#"{"type":"lq","q":2}"#).unwrap();
    let out = dir.path().join("report.json");
    let args = [
        "certify", "--in", p.to_str().unwrap(), "--f", f.to_str().unwrap(), "--norm", norm.to_str().unwrap(),
        "--q", "2", "--C", "1", "--alpha-mode", "paper", "--p", "1", "--json", out.to_str().unwrap(),
    ];
    let o = nlgap(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(schema().is_valid(&v));
    assert_eq!(v["result"]["bound_holds"], true);
    assert_eq!(v["result"]["p2_holds"], true);
    assert!(v["result"]["failures"].as_array().unwrap().is_empty());
}

#[test]
fn certify_rejects_unbalanced_field() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_graph(dir.path(), "k4.edges", &named::complete(4));
    let f = dir.path().join("f.csv");
    fs::write(&f, "1\n1\n1\n0\n").unwrap();
    let o = nlgap(&["certify", "--in", p.to_str().unwrap(), "--f", f.to_str().unwrap(), "--field-kind", "binary"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("median"));
}

#[test]
fn cotype_of_orthonormal_pair() {
    let dir = tempfile::tempdir().unwrap();
    let norm = dir.path().join("norm.json");
    fs::write(&norm, r#"{"type":"lq","q":2}"#).unwrap();
    let xs = dir.path().join("v.csv");
    fs::write(&xs, "1,0\n0,1\n").unwrap();
    let o = nlgap(&["cotype", "--norm", norm.to_str().unwrap(), "--vectors", xs.to_str().unwrap(), "--q", "2"]);
    assert_eq!(code(&o), 0);
    let v = report(&o);
    assert_eq!(v["result"]["exact"], true);
    assert!((v["result"]["raw"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(text.as_bytes());
    r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect()
}

#[test]
fn sweep_empty_grid_is_header_only() {
    let o = nlgap(&["sweep", "--n", "", "--d", "3"]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "n");
}

#[test]
fn sweep_distance_grows_with_n() {
    let o = nlgap(&["--jobs", "3", "sweep", "--n", "16,64,256", "--d", "6", "--seed", "1"]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&String::from_utf8(o.stdout).unwrap());
    let col = rows[0].iter().position(|h| h == "mean_distance").unwrap();
    let means: Vec<f64> = rows[1..].iter().map(|r| r[col].parse().unwrap()).collect();
    assert_eq!(means.len(), 3);
    assert!(means.windows(2).all(|w| w[0] < w[1]), "{means:?}");
}

#[test]
fn sweep_over_samples_gives_distinct_graphs() {
    let o = nlgap(&["sweep", "--n", "30", "--d", "3", "--samples", "5"]);
    let rows = csv_rows(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(rows.len(), 6);
    let col = rows[0].iter().position(|h| h == "lambda2").unwrap();
    let mut l2: Vec<&str> = rows[1..].iter().map(|r| r[col].as_str()).collect();
    l2.sort();
    l2.dedup();
    assert!(l2.len() > 1);
    assert!(rows[1..].iter().all(|r| r.len() == rows[0].len()));
}

#[test]
fn uc_sweep_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("uc.csv");
    let o = nlgap(&["uc-sweep", "--d", "6", "--n", "32,64", "--samples", "2", "--q", "1,2", "--csv", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 1 + 2 * 2 * 2);
    let err = rows[0].iter().position(|h| h == "error").unwrap();
    let q = rows[0].iter().position(|h| h == "q").unwrap();
    // q = 1 is not a cotype exponent: that row records the error, the sweep goes on.
    for r in &rows[1..] {
        assert_eq!(r[err].is_empty(), r[q].parse::<f64>().unwrap() == 2.0, "{r:?}");
    }
}
