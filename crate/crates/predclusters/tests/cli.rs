use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use predclusters::plot::parse_values;
use predclusters::results::{read_final_population, read_generations, read_run};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_predclusters"));
    c.env_remove("PREDCLUSTERS_SEED");
    c
}

fn blobs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/two_blobs.csv")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn small_run(out: &Path, extra: &[&str]) -> Output {
    let data = blobs();
    let mut args = vec![
        "run",
        "--model",
        "3",
        "--data",
        data.to_str().unwrap(),
        "--pop",
        "16",
        "--iters",
        "4",
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn run_writes_result_for_requested_model() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r1");
    let o = small_run(&out, &["--seed", "7"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_run(&out).unwrap();
    let model = serde_json::to_value(r.model).unwrap();
    assert_eq!(model, serde_json::json!({"id": 3, "init": "RSO", "regression": "LR", "update": "CM"}));
    assert_eq!(r.seed, 7 + 3 * 10_000);
    assert_eq!(r.generations.len(), 5);
    assert_eq!(r.final_population.len(), 16);
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(small_run(&a, &["--seed", "11"]).status.success());
    let mut cmd = bin();
    let data = blobs();
    let o = cmd
        .env("PREDCLUSTERS_SEED", "11")
        .args(["run", "--model", "3", "--data", data.to_str().unwrap()])
        .args(["--pop", "16", "--iters", "4", "--out", b.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(
        std::fs::read(a.join("generations.csv")).unwrap(),
        std::fs::read(b.join("generations.csv")).unwrap()
    );
}

#[test]
fn usage_errors_exit_with_2() {
    let o = run(&["run", "--model", "3"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("--data") && err.contains("Usage"), "{err}");

    assert_eq!(run(&["run", "--model", "3", "--data", "x.csv", "--frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["launch"]).status.code(), Some(2));
    assert_eq!(run(&["run", "--model", "12", "--data", "x.csv"]).status.code(), Some(2));
    assert_eq!(run(&["run", "--model", "1", "--data", "x.csv", "--normalize", "log"]).status.code(), Some(2));
}

#[test]
fn data_errors_exit_with_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["run", "--model", "1", "--data", "/no/such/file.csv", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("file not found"));

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "a,b\n1,2\n3,oops\n").unwrap();
    let o = run(&["run", "--model", "1", "--data", bad.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("row 2, column 2"), "{err}");
}

#[test]
fn help_lists_every_flag() {
    let o = run(&["run", "--help"]);
    assert!(o.status.success());
    let help = String::from_utf8_lossy(&o.stdout);
    for flag in [
        "--model",
        "--data",
        "--target",
        "--normalize",
        "--pop",
        "--iters",
        "--seed",
        "--out",
        "--crossover-pct",
        "--mutation-pct",
        "--sgd-cgamma",
        "--sgd-calpha",
        "--sgd-alpha",
        "--min-cluster-size",
    ] {
        assert!(help.contains(flag), "missing {flag}");
    }
    for (flag, default) in [
        ("--pop", "100"),
        ("--iters", "100"),
        ("--crossover-pct", "90"),
        ("--mutation-pct", "3"),
        ("--sgd-cgamma", "2000"),
        ("--sgd-calpha", "1"),
        ("--sgd-alpha", "0.75"),
    ] {
        let line = help.lines().skip_while(|l| !l.contains(flag)).take(3).collect::<String>();
        assert!(line.contains(&format!("[default: {default}]")), "{flag}: {line}");
    }
    let o = run(&["--help"]);
    let help = String::from_utf8_lossy(&o.stdout);
    for sub in ["run", "matrix", "baseline", "compare", "plot"] {
        assert!(help.contains(sub));
    }
}

#[test]
fn plot_series_match_csv_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r1");
    assert!(small_run(&out, &["--seed", "3"]).status.success());
    let plots = out.join("plots");
    let o = run(&["plot", "--in", out.to_str().unwrap(), "--out", plots.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let gens = read_generations(&out).unwrap();
    let svg = std::fs::read_to_string(plots.join("trajectories.svg")).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let series: Vec<_> = doc
        .descendants()
        .filter(|n| n.attribute("class") == Some("series"))
        .collect();
    assert_eq!(series.len(), 2);
    let dev = parse_values(series[0].attribute("data-values").unwrap()).unwrap();
    let mae = parse_values(series[1].attribute("data-values").unwrap()).unwrap();
    assert_eq!(dev, gens.iter().map(|g| g.mean_deviation).collect::<Vec<_>>());
    assert_eq!(mae, gens.iter().map(|g| g.mean_mae).collect::<Vec<_>>());
    let xs = parse_values(series[0].attribute("data-x").unwrap()).unwrap();
    assert_eq!(xs, gens.iter().map(|g| g.generation as f64).collect::<Vec<_>>());
    assert_eq!(series[0].attribute("points").unwrap().split_whitespace().count(), gens.len());

    let finals = read_final_population(&out).unwrap();
    let svg = std::fs::read_to_string(plots.join("final_boxplot.svg")).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let boxes: Vec<_> = doc
        .descendants()
        .filter(|n| n.attribute("class") == Some("box"))
        .collect();
    assert_eq!(boxes.len(), 2);
    let dev = parse_values(boxes[0].attribute("data-values").unwrap()).unwrap();
    assert_eq!(dev, finals.iter().map(|r| r.deviation).collect::<Vec<_>>());
}

#[test]
fn matrix_then_compare_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m");
    let data = blobs();
    let o = run(&[
        "matrix",
        "--data",
        data.to_str().unwrap(),
        "--models",
        "1,3,5,7",
        "--pop",
        "12",
        "--iters",
        "3",
        "--jobs",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["runs"].as_array().unwrap().len(), 4);
    let written = std::fs::read_to_string(out.join("comparison.json")).unwrap();
    let cmp: serde_json::Value = serde_json::from_str(&written).unwrap();
    assert_eq!(cmp["models"], serde_json::json!([1, 3, 5, 7]));

    let again = dir.path().join("again.json");
    let o = run(&["compare", "--in", out.to_str().unwrap(), "--out", again.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read_to_string(&again).unwrap(), written);

    let plots = dir.path().join("plots");
    assert!(run(&["plot", "--in", out.to_str().unwrap(), "--out", plots.to_str().unwrap()])
        .status
        .success());
    let svg = std::fs::read_to_string(plots.join("final_boxplot.svg")).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    assert_eq!(doc.descendants().filter(|n| n.attribute("class") == Some("box")).count(), 8);
}

#[test]
fn baseline_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b");
    let data = blobs();
    let o = run(&[
        "baseline",
        "--data",
        data.to_str().unwrap(),
        "--models",
        "1,3",
        "--pop",
        "10",
        "--iters",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = std::fs::read_to_string(out.join("baseline.txt")).unwrap();
    assert!(table.contains("Model 1") && table.contains("Model 3") && table.contains("Sig."));
    assert!(out.join("run_3_0_single/result.json").is_file());
    assert!(out.join("run_3_0_multi/final_population.csv").is_file());

    let o = run(&["baseline", "--data", data.to_str().unwrap(), "--models", "7", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}
