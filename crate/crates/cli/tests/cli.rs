//! End-to-end runs of the `tsvm` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn tsvm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsvm"))
        .args(args)
        .env_remove("TSVM_SEED")
        .env_remove("SOURCE_DATE_EPOCH")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).display().to_string()
}

/// Compare with a checked-in file; `UPDATE_GOLDEN=1` rewrites it.
fn golden(name: &str, actual: &str) {
    let p = data("golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(p.parent().unwrap()).unwrap();
        std::fs::write(&p, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&p).expect("golden file exists");
    assert!(expected == actual, "{name} differs from its golden file");
}

fn train(dir: &TempDir, input: &str, extra: &[&str]) -> (Output, String) {
    let out = path(dir, "m.json");
    let mut args = vec!["train", input, "-o", &out];
    args.extend_from_slice(extra);
    (tsvm(&args), out)
}

#[test]
fn train_triangle_matches_golden() {
    let dir = TempDir::new().unwrap();
    let input = data("triangle.csv").display().to_string();
    let (o, m) = train(
        &dir,
        &input,
        &["--model", "tsvm", "--algorithm", "deterministic"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(&m).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["halfspaces"].as_array().unwrap().len(), 3);
    assert!(v["halfspaces"]
        .as_array()
        .unwrap()
        .iter()
        .all(|h| h.get("halfspace").is_some()));
    golden("triangle-model.json", &text);
    let stdout = String::from_utf8(o.stdout).unwrap();
    for key in ["lambda", "lifted margin", "supports", "training time"] {
        assert!(stdout.contains(key), "missing {key} in {stdout}");
    }
}

#[test]
fn overlapping_data_is_a_regime_violation() {
    let dir = TempDir::new().unwrap();
    let input = data("overlap.csv").display().to_string();
    let (o, _) = train(&dir, &input, &["--model", "tsvm"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("witness"), "{}", stderr(&o));
    let (o, m) = train(&dir, &input, &["--model", "simple", "--soft-margin", "10"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(Path::new(&m).exists());
}

#[test]
fn training_points_predict_their_own_class() {
    let dir = TempDir::new().unwrap();
    let input = data("clusters.csv").display().to_string();
    for algorithm in ["deterministic", "randomized"] {
        let (o, m) = train(&dir, &input, &["--algorithm", algorithm]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let p = tsvm(&["predict", &m, &input]);
        assert_eq!(code(&p), 0, "{}", stderr(&p));
        let out = String::from_utf8(p.stdout).unwrap();
        let truth = std::fs::read_to_string(&input).unwrap();
        let mut lines = out.lines();
        assert_eq!(
            lines.next(),
            Some("label,score_north,score_east,score_south,confident,delta")
        );
        for (row, expected) in lines.zip(truth.lines().skip(1)) {
            let label = row.split(',').next().unwrap();
            assert_eq!(label, expected.rsplit(',').next().unwrap(), "{row}");
            assert_eq!(row.split(',').nth(4), Some("true"), "{row}");
        }
    }
}

#[test]
fn tie_point_is_ambiguous() {
    let dir = TempDir::new().unwrap();
    let (o, m) = train(&dir, &data("pair.csv").display().to_string(), &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let p = tsvm(&["predict", &m, &data("tie.csv").display().to_string()]);
    assert_eq!(code(&p), 0);
    let out = String::from_utf8(p.stdout).unwrap();
    assert!(
        out.lines().nth(1).unwrap().starts_with("AMBIGUOUS,"),
        "{out}"
    );
}

#[test]
fn empty_input_gives_empty_output() {
    let dir = TempDir::new().unwrap();
    let (_, m) = train(&dir, &data("pair.csv").display().to_string(), &[]);
    let empty = path(&dir, "empty.csv");
    std::fs::write(&empty, "").unwrap();
    let p = tsvm(&["predict", &m, &empty]);
    assert_eq!(code(&p), 0);
    assert!(p.stdout.is_empty());
}

#[test]
fn dimension_and_parse_errors() {
    let dir = TempDir::new().unwrap();
    let (_, m) = train(&dir, &data("pair.csv").display().to_string(), &[]);
    let p = tsvm(&["predict", &m, &data("cube.csv").display().to_string()]);
    assert_eq!(code(&p), 4, "{}", stderr(&p));

    let bad = path(&dir, "bad.csv");
    std::fs::write(&bad, "x,y,label\n0,0,a\n1,oops,b\n").unwrap();
    let (o, _) = train(&dir, &bad, &[]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("bad.csv:3:2"), "{}", stderr(&o));
}

#[test]
fn check_suites() {
    let dir = TempDir::new().unwrap();
    for suite in ["k2-equivalence", "projection-theorem"] {
        let report = path(&dir, "report.json");
        let o = tsvm(&["check", suite, "--seed", "7", "-o", &report]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
        assert_eq!(v["passed"], true);
        assert_eq!(v["suites"][0]["suite"], suite);
    }
    assert_eq!(code(&tsvm(&["check", "nonexistent"])), 5);
}

#[test]
fn plot_triangle_matches_golden() {
    let dir = TempDir::new().unwrap();
    let input = data("triangle.csv").display().to_string();
    let (_, m) = train(&dir, &input, &[]);
    let svg = path(&dir, "tri.svg");
    let o = tsvm(&[
        "plot",
        &m,
        "--data",
        &input,
        "--bounds",
        "-1,5,-1,4",
        "--resolution",
        "60",
        "-o",
        &svg,
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let grid = std::fs::read_to_string(path(&dir, "tri.csv")).unwrap();
    golden("triangle-plot.svg", &std::fs::read_to_string(&svg).unwrap());
    golden("triangle-grid.csv", &grid);
    for label in ["0", "1", "2", "AMBIGUOUS"] {
        assert!(grid.contains(&format!(",{label},")), "no {label} cells");
    }
}

#[test]
fn plot_binary_model_and_errors() {
    let dir = TempDir::new().unwrap();
    let input = data("clusters.csv").display().to_string();
    let (_, m) = train(&dir, &input, &[]);
    let svg = path(&dir, "c.svg");
    let grid = path(&dir, "grid.csv");
    let o = tsvm(&["plot", &m, "--data", &input, "--grid", &grid, "-o", &svg]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(Path::new(&grid).exists());
    let o = tsvm(&[
        "plot",
        &m,
        "--bounds",
        "0,1,0,1",
        "--resolution",
        "0",
        "-o",
        &svg,
    ]);
    assert_eq!(code(&o), 6);
    let (_, m1) = train(&dir, &data("pair.csv").display().to_string(), &[]);
    let o = tsvm(&["plot", &m1, "--bounds", "0,1,0,1", "-o", &svg]);
    assert_eq!(code(&o), 6);
}

#[test]
fn seeds_and_timestamps_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let input = data("clusters.csv").display().to_string();
    let run = |seed_flag: Option<&str>, env_seed: Option<&str>, epoch: Option<&str>| {
        let out = path(&dir, "d.json");
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_tsvm"));
        cmd.args(["train", &input, "--algorithm", "randomized", "-o", &out])
            .env_remove("TSVM_SEED")
            .env_remove("SOURCE_DATE_EPOCH");
        if let Some(s) = seed_flag {
            cmd.args(["--seed", s]);
        }
        if let Some(s) = env_seed {
            cmd.env("TSVM_SEED", s);
        }
        if let Some(e) = epoch {
            cmd.env("SOURCE_DATE_EPOCH", e);
        }
        assert!(cmd.status().unwrap().success());
        std::fs::read_to_string(&out).unwrap()
    };
    let a = run(Some("5"), None, None);
    assert_eq!(a, run(Some("5"), None, None));
    assert_eq!(a, run(None, Some("5"), None));
    assert_eq!(a, run(Some("5"), Some("9"), None));
    assert!(a.contains("\"seed\": 5"));
    assert!(a.contains("\"created\": null"));
    assert!(run(Some("5"), None, Some("1700000000")).contains("\"created\": 1700000000"));
}
