use std::fs;
use std::path::Path;

use predclusters::data::{load_csv, read_csv, write_csv, TargetColumn};
use predclusters::experiments::{
    run_experiment, run_experiment_on, DataSource, ExperimentConfig, Manifest, RunStatus, MANIFEST_FILE,
};
use predclusters::results::{read_final_population, read_generations, RunResult, UpdateMethod};
use predclusters::synthetic::{two_blobs, TwoBlobs};
use predclusters_core::{Dataset, EvolutionConfig, Normalization};
use proptest::prelude::*;

fn data_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/data"))
}

fn config(out: &Path, models: Vec<u8>, replicates: usize, iterations: usize) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(
        DataSource {
            path: data_dir().join("two_blobs.csv"),
            target: TargetColumn::Last,
            normalization: Normalization::None,
        },
        out,
    );
    c.models = models;
    c.replicates = replicates;
    c.evolution = EvolutionConfig {
        population_size: 12,
        iterations,
        ..EvolutionConfig::default()
    };
    c.jobs = 2;
    c
}

#[test]
fn boston_layout() {
    let ds = load_csv(data_dir().join("boston_housing.csv"), &TargetColumn::Last, Normalization::None).unwrap();
    assert_eq!((ds.n(), ds.d()), (506, 13));
    assert_eq!(ds.outcome_name(), "MEDV");
    assert!(!ds.feature_names().iter().any(|n| n == "MEDV"));
    assert_eq!(ds.normalize(Normalization::None).features(), ds.features());
}

#[test]
fn normalized_columns_have_declared_properties() {
    let ds = load_csv(data_dir().join("boston_housing.csv"), &TargetColumn::Last, Normalization::None).unwrap();
    let z = ds.normalize(Normalization::Zscore);
    let m = ds.normalize(Normalization::Minmax);
    assert_eq!(z.outcome(), ds.outcome());
    assert_eq!(m.outcome(), ds.outcome());
    for j in 0..ds.d() {
        let col: Vec<f64> = z.column(j).collect();
        let n = col.len() as f64;
        let mean = col.iter().sum::<f64>() / n;
        let sd = (col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
        assert!(mean.abs() < 1e-9 && (sd - 1.0).abs() < 1e-9, "column {j}");
        let col: Vec<f64> = m.column(j).collect();
        assert_eq!(col.iter().cloned().fold(f64::INFINITY, f64::min), 0.0);
        assert_eq!(col.iter().cloned().fold(f64::NEG_INFINITY, f64::max), 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn csv_round_trip(rows in prop::collection::vec(prop::collection::vec(-1e6f64..1e6, 3), 2..30)) {
        let features: Vec<Vec<f64>> = rows.iter().map(|r| r[..2].to_vec()).collect();
        let outcome: Vec<f64> = rows.iter().map(|r| r[2]).collect();
        let ds = Dataset::from_rows(&features, outcome).unwrap()
            .with_names(vec!["a".into(), "b".into()], "y".into());
        let mut buf = Vec::new();
        write_csv(&ds, &mut buf).unwrap();
        let back = read_csv(buf.as_slice(), &TargetColumn::Last).unwrap();
        for (x, y) in back.features().iter().zip(ds.features()) {
            prop_assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0));
        }
        prop_assert_eq!(back.outcome(), ds.outcome());
    }
}

#[test]
fn zero_iterations_single_model() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(&config(dir.path(), vec![3], 1, 0)).unwrap();
    assert_eq!(out.manifest.runs.len(), 1);
    assert_eq!(out.results.len(), 1);
    assert_eq!(out.results[0].generations.len(), 1);
    assert_eq!(read_generations(&dir.path().join("run_3_0")).unwrap().len(), 1);
}

#[test]
fn manifest_lists_every_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), vec![1, 4, 6, 7], 2, 3);
    run_experiment(&cfg).unwrap();
    let manifest = Manifest::read(dir.path()).unwrap();
    assert_eq!(manifest.runs.len(), 8);
    assert_eq!(manifest.config_hash, cfg.hash());
    assert_eq!(manifest.config_hash.len(), 64);
    for e in &manifest.runs {
        assert_eq!(e.status, RunStatus::Ok);
        let run_dir = dir.path().join(&e.dir);
        assert_eq!(read_generations(&run_dir).unwrap().len(), 4);
        assert_eq!(read_final_population(&run_dir).unwrap().len(), 12);
    }
    let results = manifest.load_results(dir.path()).unwrap();
    assert_eq!(results.len(), 8);
    let seeds: std::collections::HashSet<u64> = results.iter().map(|r| r.seed).collect();
    assert_eq!(seeds.len(), 8);
}

#[test]
fn elitism_in_crossover_mutation_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(&config(dir.path(), vec![1, 2, 3, 4], 1, 15)).unwrap();
    for r in &out.results {
        assert_eq!(r.model.update, UpdateMethod::Cm);
        for w in r.generations.windows(2) {
            assert!(w[1].min_deviation <= w[0].min_deviation, "model {}", r.model.id);
            assert!(w[1].min_mae <= w[0].min_mae, "model {}", r.model.id);
        }
    }
}

fn strip_wall_time(path: &Path) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("wall_time_secs");
    v
}

#[test]
fn repeated_experiment_is_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_experiment(&config(a.path(), vec![2, 5], 1, 4)).unwrap();
    let mut cfg = config(b.path(), vec![2, 5], 1, 4);
    cfg.jobs = 1;
    run_experiment(&cfg).unwrap();
    for run in ["run_2_0", "run_5_0"] {
        for f in ["generations.csv", "final_population.csv"] {
            assert_eq!(
                fs::read(a.path().join(run).join(f)).unwrap(),
                fs::read(b.path().join(run).join(f)).unwrap()
            );
        }
        assert_eq!(
            strip_wall_time(&a.path().join(run).join("result.json")),
            strip_wall_time(&b.path().join(run).join("result.json"))
        );
    }
    let ma: Manifest = Manifest::read(a.path()).unwrap();
    let mb: Manifest = Manifest::read(b.path()).unwrap();
    assert_eq!(ma.config_hash, mb.config_hash);
}

#[test]
fn failed_runs_are_recorded_and_others_kept() {
    let dir = tempfile::tempdir().unwrap();
    // a plain file where run_3_0 would be created
    fs::write(dir.path().join("run_3_0"), "occupied").unwrap();
    let ds = two_blobs(&TwoBlobs::default());
    let out = run_experiment_on(&config(dir.path(), vec![1, 3], 1, 2), &ds).unwrap();
    assert_eq!(out.results.len(), 1);
    let manifest = Manifest::read(dir.path()).unwrap();
    let failed: Vec<_> = manifest.runs.iter().filter(|e| e.status == RunStatus::Failed).collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0].model.id, 3);
    assert!(failed[0].error.is_some());
    assert!(dir.path().join("run_1_0").join("result.json").is_file());
    assert!(dir.path().join(MANIFEST_FILE).is_file());
}

#[test]
fn invalid_configs_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(dir.path(), vec![1], 0, 1);
    assert!(run_experiment(&c).is_err());
    c.replicates = 1;
    c.models = vec![9];
    assert!(run_experiment(&c).is_err());
    c.models = vec![1];
    c.data.path = dir.path().join("missing.csv");
    assert!(run_experiment(&c).is_err());
}

#[test]
fn result_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(&config(dir.path(), vec![7], 1, 2)).unwrap();
    let back: RunResult =
        serde_json::from_str(&fs::read_to_string(dir.path().join("run_7_0/result.json")).unwrap()).unwrap();
    assert_eq!(back, out.results[0]);
    assert!(back.sgd.is_some());
}
