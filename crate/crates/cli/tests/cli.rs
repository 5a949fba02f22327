use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ufscov(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ufscov"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn ufscov")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn grid_generation_and_coverage() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&ufscov(d, &["generate", "grid", "--m", "3", "--dim", "2", "-o", "grid.csv"])), 0);
    let csv = fs::read_to_string(d.join("grid.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10);
    assert!(d.join("grid.csv.meta.json").exists());
    assert!(d.join("grid.csv.manifest.json").exists());

    let out = ufscov(d, &["coverage", "-i", "grid.csv"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "0.000000");
    assert!(d.join("coverage.manifest.json").exists());

    let json = ufscov(d, &["coverage", "-i", "grid.csv", "--json", "--engine", "brute"]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["lambda"], 0.0);
    assert_eq!(v["nn_distances"].as_array().unwrap().len(), 9);
}

#[test]
fn two_points_and_constant_columns() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("two.csv"), "a,b\n0.1,0.4\n0.7,0.2\n").unwrap();
    let out = ufscov(d, &["coverage", "-i", "two.csv"]);
    assert_eq!(stdout(&out).trim(), "0.000000");

    fs::write(d.join("const.csv"), "a,b\n0.5,1\n0.5,1\n0.5,1\n").unwrap();
    let out = ufscov(d, &["coverage", "-i", "const.csv"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("degenerate"));
}

#[test]
fn unsupported_sobol_dimension_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = ufscov(dir.path(), &["generate", "sobol", "--n", "10", "--dim", "99999", "-o", "s.csv"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("unsupported"));
}

#[test]
fn malformed_input_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.csv"), "a,b\n0.1,x\n").unwrap();
    let out = ufscov(dir.path(), &["coverage", "-i", "bad.csv"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("row 1"));
    assert_eq!(code(&ufscov(dir.path(), &["coverage", "-i", "missing.csv"])), 1);
}

#[test]
fn redundant_generation_and_selection() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&ufscov(d, &["generate", "redundant", "--n", "1000", "--seed", "7", "-o", "bf.csv"])), 0);
    let header = fs::read_to_string(d.join("bf.csv")).unwrap().lines().next().unwrap().to_string();
    assert_eq!(header.split(',').count(), 8);
    let meta: serde_json::Value = serde_json::from_slice(&fs::read(d.join("bf.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 7);

    let out = ufscov(d, &["select", "-i", "bf.csv", "-o", "trace.json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let trace: serde_json::Value = serde_json::from_slice(&fs::read(d.join("trace.json")).unwrap()).unwrap();
    assert_eq!(trace["argmin_index"], 2);
    assert_eq!(trace["strategy"], "sfs");
    assert!(stdout(&out).contains("selected:"));

    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(d.join("trace.json.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "select");
    assert_eq!(manifest["input_hashes"]["bf.csv"].as_str().unwrap().len(), 64);
}

#[test]
fn exhaustive_guard() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&ufscov(d, &["generate", "uniform", "--n", "20", "--dim", "25", "-o", "wide.csv"])), 0);
    let out = ufscov(d, &["select", "-i", "wide.csv", "--strategy", "exhaustive"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("limit"));
}

#[test]
fn exhaustive_table() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ufscov(d, &["generate", "uniform", "--n", "50", "--dim", "3", "--seed", "2", "-o", "u.csv"]);
    let out = ufscov(d, &["select", "-i", "u.csv", "--strategy", "exhaustive", "--table", "all.csv"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(fs::read_to_string(d.join("all.csv")).unwrap().lines().count(), 8);
}

#[test]
fn perturbation() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ufscov(d, &["generate", "redundant", "--n", "200", "--seed", "1", "-o", "bf.csv"]);

    let out = ufscov(d, &["perturb", "-i", "bf.csv", "--noise", "0.05", "--columns", "J3,J4", "-o", "noisy.csv"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let read = |name: &str| -> Vec<Vec<String>> {
        fs::read_to_string(d.join(name))
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(str::to_string).collect())
            .collect()
    };
    let (a, b) = (read("bf.csv"), read("noisy.csv"));
    let changed: Vec<bool> = (0..8).map(|j| a.iter().zip(&b).any(|(x, y)| x[j] != y[j])).collect();
    assert_eq!(changed, [false, false, false, true, true, false, false, false]);

    for name in ["s1.csv", "s2.csv"] {
        let out = ufscov(d, &["perturb", "-i", "bf.csv", "--shuffle", "--columns", "J4,J5", "--seed", "1", "-o", name]);
        assert_eq!(code(&out), 0);
    }
    assert_eq!(fs::read(d.join("s1.csv")).unwrap(), fs::read(d.join("s2.csv")).unwrap());

    let both = ufscov(d, &["perturb", "-i", "bf.csv", "--noise", "0.1", "--shuffle", "--columns", "J3", "-o", "x.csv"]);
    assert_eq!(code(&both), 2);
    let neither = ufscov(d, &["perturb", "-i", "bf.csv", "--columns", "J3", "-o", "x.csv"]);
    assert_eq!(code(&neither), 2);
    let unknown = ufscov(d, &["perturb", "-i", "bf.csv", "--shuffle", "--columns", "nope", "-o", "x.csv"]);
    assert_eq!(code(&unknown), 2);
}

fn labelled_fixture(d: &Path) {
    let mut csv = String::from("x,y,class\n");
    for i in 0..60 {
        let (cx, label) = if i % 2 == 0 { (0.1, "a") } else { (0.9, "b") };
        csv.push_str(&format!("{},{},{label}\n", cx + 0.001 * (i as f64), (i as f64) / 60.0));
    }
    fs::write(d.join("lab.csv"), csv).unwrap();
}

#[test]
fn evaluation() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    labelled_fixture(d);

    // perfect external predictions
    let truth: String = fs::read_to_string(d.join("lab.csv"))
        .unwrap()
        .lines()
        .map(|l| l.rsplit(',').next().unwrap().to_string() + "\n")
        .collect();
    fs::write(d.join("pred.csv"), truth).unwrap();
    let out = ufscov(d, &["evaluate", "-i", "lab.csv", "--label", "class", "--pred", "pred.csv"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["overall_accuracy"], 1.0);
    assert_eq!(v["kappa"], 1.0);

    // single k-NN evaluation on separable data
    let out = ufscov(d, &["evaluate", "-i", "lab.csv", "--label", "class"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["oa_mean"], 1.0);

    // stepwise curve, reproducible
    assert_eq!(code(&ufscov(d, &["select", "-i", "lab.csv", "--label", "class", "-o", "t.json"])), 0);
    for name in ["c1.csv", "c2.csv"] {
        let args = ["evaluate", "-i", "lab.csv", "--label", "class", "--trace", "t.json", "--repeats", "20", "--seed", "3", "-o", name];
        assert_eq!(code(&ufscov(d, &args)), 0);
    }
    let curve = fs::read_to_string(d.join("c1.csv")).unwrap();
    assert!(curve.starts_with("prefix_len,oa_mean,oa_sd,kappa_mean,kappa_sd\n"));
    assert_eq!(curve.lines().count(), 3);
    assert_eq!(curve, fs::read_to_string(d.join("c2.csv")).unwrap());

    let missing = ufscov(d, &["evaluate", "-i", "lab.csv", "--label", "nope"]);
    assert_eq!(code(&missing), 2);
}

#[test]
fn bad_arguments_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&ufscov(dir.path(), &["frobnicate"])), 2);
    assert_eq!(code(&ufscov(dir.path(), &["select", "-i", "x.csv", "--strategy", "genetic"])), 2);
    assert_eq!(code(&ufscov(dir.path(), &["select", "-i", "x.csv", "--threads", "0"])), 2);
}
