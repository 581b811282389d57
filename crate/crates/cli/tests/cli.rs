use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hypercoreset::{dist_h, dist_origin, BallPoint};
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hypercoreset"));
    c.env_remove("HYPERCORESET_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    assert_eq!(code(o), 0, "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("json report")
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_points(p: &Path) -> Vec<BallPoint> {
    let text = fs::read_to_string(p).unwrap();
    let mut lines = text.lines();
    let n: usize = lines
        .next()
        .unwrap()
        .split_whitespace()
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    let pts: Vec<BallPoint> = lines
        .map(|l| BallPoint::new(l.split_whitespace().map(|t| t.parse().unwrap()).collect()).unwrap())
        .collect();
    assert_eq!(pts.len(), n);
    pts
}

fn gen(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let out = path(dir, name);
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", s(&out)]);
    let o = run(&full);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn antipodal_pair_has_radius_five() {
    let dir = TempDir::new().unwrap();
    let f = gen(&dir, "a.pts", &["antipodal", "--n", "2", "--radius", "5"]);
    let pts = read_points(&f);
    assert_eq!(pts.len(), 2);
    for p in &pts {
        assert!((dist_origin(p) - 5.0).abs() < 1e-12);
    }
    let neg: Vec<f64> = pts[0].coords().iter().map(|x| -x).collect();
    assert_eq!(pts[1].coords(), &neg[..]);
}

#[test]
fn empty_file_and_determinism() {
    let dir = TempDir::new().unwrap();
    let f = gen(&dir, "e.pts", &["uniform-ball", "--n", "0"]);
    assert_eq!(fs::read_to_string(f).unwrap(), "2 0\n");
    let a = gen(
        &dir,
        "x.pts",
        &["clusters", "--n", "300", "--dim", "3", "--radius", "9", "--seed", "5"],
    );
    let b = gen(
        &dir,
        "y.pts",
        &["clusters", "--n", "300", "--dim", "3", "--radius", "9", "--seed", "5"],
    );
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let c = gen(
        &dir,
        "z.pts",
        &["clusters", "--n", "300", "--dim", "3", "--radius", "9", "--seed", "6"],
    );
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn build_then_query_antipodal_with_check() {
    let dir = TempDir::new().unwrap();
    let f = gen(&dir, "a.pts", &["antipodal", "--n", "2", "--radius", "5"]);
    let q = gen(
        &dir,
        "q.pts",
        &["uniform-ball", "--n", "200", "--radius", "20", "--seed", "1"],
    );
    let cs = path(&dir, "a.coreset.json");
    let r = json(&run(&["build", s(&f), "--eps", "0.5", "--coreset", s(&cs), "--check"]));
    assert_eq!(r["check"]["violations"], 0);
    let r = json(&run(&["query", s(&f), s(&q), "--coreset", s(&cs), "--check"]));
    assert_eq!(r["check"]["checked"], 200);
    assert_eq!(r["check"]["violations"], 0);
    assert_eq!(r["results"]["answers"].as_array().unwrap().len(), 200);
    assert_eq!(r["parameters"]["eps"], 0.5);
}

#[test]
fn sidecar_refuses_other_file() {
    let dir = TempDir::new().unwrap();
    let f = gen(&dir, "a.pts", &["uniform-ball", "--n", "50", "--seed", "1"]);
    let g = gen(&dir, "b.pts", &["uniform-ball", "--n", "50", "--seed", "2"]);
    let cs = path(&dir, "a.json");
    json(&run(&["build", s(&f), "--eps", "0.3", "--coreset", s(&cs)]));
    let o = run(&["query", s(&g), s(&f), "--coreset", s(&cs)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("different point file"));
    let o = run(&["query", s(&f), s(&g), "--coreset", s(&cs), "--eps", "0.4"]);
    assert_eq!(code(&o), 1);
    let o = run(&["query", s(&f), s(&g)]);
    assert_eq!(code(&o), 1);
}

#[test]
fn crippled_coreset_is_a_violation() {
    let dir = TempDir::new().unwrap();
    let f = gen(
        &dir,
        "a.pts",
        &["uniform-ball", "--n", "400", "--radius", "12", "--seed", "3"],
    );
    let q = gen(
        &dir,
        "q.pts",
        &["uniform-ball", "--n", "100", "--radius", "12", "--seed", "4"],
    );
    let cs = path(&dir, "a.json");
    json(&run(&["build", s(&f), "--eps", "0.1", "--coreset", s(&cs)]));
    let mut record: Value = serde_json::from_str(&fs::read_to_string(&cs).unwrap()).unwrap();
    record["indices"] = serde_json::json!([0]);
    fs::write(&cs, record.to_string()).unwrap();
    let o = run(&["query", s(&f), s(&q), "--coreset", s(&cs), "--check"]);
    assert_eq!(code(&o), 3);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(r["check"]["violations"].as_u64().unwrap() > 0);
    assert!(r["check"]["worst_margin"].as_f64().unwrap() < 0.0);
}

#[test]
fn diameter_of_antipodal_pair() {
    let dir = TempDir::new().unwrap();
    let f = gen(&dir, "a.pts", &["antipodal", "--n", "2", "--radius", "5"]);
    let eps = 0.1;
    let r = json(&run(&["diameter", s(&f), "--eps", "0.1", "--check"]));
    let d = r["results"]["distance"].as_f64().unwrap();
    assert!(d >= 10.0 - eps && d <= 10.0 + 1e-9, "{d}");
    assert_eq!(r["check"]["violations"], 0);
}

#[test]
fn mst_of_three_points_against_enumeration() {
    let dir = TempDir::new().unwrap();
    let f = path(&dir, "t.pts");
    fs::write(&f, "# triangle\n2 3\n0.5 0.1\n-0.7 0.2\n0.05 -0.9\n").unwrap();
    let pts = read_points_skipping_comments(&f);
    let w = [
        dist_h(&pts[0], &pts[1]),
        dist_h(&pts[1], &pts[2]),
        dist_h(&pts[0], &pts[2]),
    ];
    // the three spanning trees drop one edge each
    let best = (0..3).map(|k| w.iter().sum::<f64>() - w[k]).fold(f64::MIN, f64::max);
    let eps = 0.2;
    let r = json(&run(&["mst", s(&f), "--eps", "0.2", "--check"]));
    let total = r["results"]["total_weight"].as_f64().unwrap();
    assert!(total >= (1.0 - eps) * best && total <= best + 1e-9);
    assert_eq!(r["results"]["edges"].as_array().unwrap().len(), 2);
    assert_eq!(r["check"]["violations"], 0);
}

fn read_points_skipping_comments(p: &Path) -> Vec<BallPoint> {
    fs::read_to_string(p)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| BallPoint::new(l.split_whitespace().map(|t| t.parse().unwrap()).collect()).unwrap())
        .collect()
}

#[test]
fn center_and_bichromatic_checks_pass() {
    let dir = TempDir::new().unwrap();
    let f = gen(
        &dir,
        "a.pts",
        &["clusters", "--n", "300", "--dim", "3", "--radius", "14", "--seed", "8"],
    );
    let g = gen(
        &dir,
        "b.pts",
        &[
            "uniform-ball",
            "--n",
            "200",
            "--dim",
            "3",
            "--radius",
            "14",
            "--seed",
            "9",
        ],
    );
    for args in [
        vec!["center", s(&f), "--eps", "0.2", "--check"],
        vec!["bichromatic", s(&f), s(&g), "--eps", "0.2", "--check"],
    ] {
        let r = json(&run(&args));
        assert_eq!(r["check"]["violations"], 0, "{args:?}");
    }
    let h = gen(
        &dir,
        "c.pts",
        &["uniform-ball", "--n", "20", "--dim", "2", "--seed", "9"],
    );
    assert_eq!(code(&run(&["bichromatic", s(&f), s(&h), "--eps", "0.2"])), 2);
}

#[test]
fn reports_are_deterministic_apart_from_timings() {
    let dir = TempDir::new().unwrap();
    let f = gen(
        &dir,
        "a.pts",
        &[
            "uniform-ball",
            "--n",
            "500",
            "--dim",
            "3",
            "--radius",
            "15",
            "--seed",
            "2",
        ],
    );
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("timings_ms");
        v
    };
    let a = strip(json(&run(&["build", s(&f), "--eps", "0.1"])));
    let b = strip(json(
        &bin()
            .env("HYPERCORESET_THREADS", "1")
            .args(["build", s(&f), "--eps", "0.1"])
            .output()
            .unwrap(),
    ));
    assert_eq!(a, b);
}

#[test]
fn parse_errors_report_lines() {
    let dir = TempDir::new().unwrap();
    let f = path(&dir, "bad.pts");
    fs::write(&f, "2 2\n0.1 0.2\n0.3 nope\n").unwrap();
    let o = run(&["diameter", s(&f), "--eps", "0.5"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.pts:3:"));
    fs::write(&f, "1 1\n0.5\n").unwrap();
    assert_eq!(code(&run(&["diameter", s(&f), "--eps", "0.5"])), 2);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&run(&["diameter", "nowhere.pts", "--eps", "1.5"])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["diameter", "nowhere.pts", "--eps", "0.5"])), 1);
    assert_eq!(code(&run(&["gen", "spiral"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
    let o = bin()
        .env("HYPERCORESET_THREADS", "zero")
        .args(["validate", "core", "--trials", "0"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
}

#[test]
fn validate_zero_trials_is_empty_success() {
    let r = json(&run(&["validate", "all", "--trials", "0"]));
    assert_eq!(r["results"].as_array().unwrap().len(), 0);
    assert_eq!(r["check"]["violations"], 0);
}

#[test]
fn validate_suites_pass() {
    for suite in ["core", "lemmas", "coreset"] {
        let r = json(&run(&[
            "validate", suite, "--trials", "300", "--seed", "11", "--n", "200",
        ]));
        assert_eq!(r["check"]["violations"], 0, "{suite}");
        assert!(!r["results"].as_array().unwrap().is_empty());
    }
}

#[test]
fn bench_single_config_emits_one_row() {
    let dir = TempDir::new().unwrap();
    let csv = path(&dir, "b.csv");
    let r = json(&run(&[
        "bench",
        "--n",
        "300",
        "--dim",
        "2",
        "--eps",
        "0.25",
        "--queries",
        "20",
        "--repeat",
        "1",
        "--csv",
        s(&csv),
    ]));
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,D,eps,build_ms,query_us,coreset_size");
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("300,2,0.25,"));
    assert_eq!(r["results"]["rows"].as_array().unwrap().len(), 1);
    assert_eq!(r["results"]["scaling"].as_array().unwrap().len(), 0);
}
