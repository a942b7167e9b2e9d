//! The eight-model matrix, replicated runs, and the statistical comparisons
//! built on their final populations.

use std::path::{Path, PathBuf};
use std::time::Instant;

use predclusters_core::baseline::run_soga;
use predclusters_core::nsga2::EvolutionError;
use predclusters_core::stats::{compare_groups, ttest_ind, SampleGroup, StatsError, StatsReport};
use predclusters_core::{
    run_nsga2, run_sgd_evolution, Dataset, EvolutionConfig, InitMethod, Normalization, RegressionMode, SgdParams,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::{load_csv, LoadError, TargetColumn};
use crate::results::{
    mean, read_run, write_json, write_run, Algorithm, DatasetInfo, ModelSpec, ReplicateMode, ResultsError,
    RunResult, UpdateMethod,
};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const COMPARISON_FILE: &str = "comparison.json";

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Results(#[from] ResultsError),
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("unknown model {0}; models are numbered 1 to 8")]
    UnknownModel(u8),
    #[error("{0}")]
    InvalidConfig(String),
    #[error("cannot build thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}

/// All eight combinations of initialization, regression and update method.
pub fn build_model_matrix() -> [ModelSpec; 8] {
    std::array::from_fn(|i| {
        let bits = i as u8;
        ModelSpec {
            id: bits + 1,
            init: if bits & 1 == 0 { InitMethod::Rso } else { InitMethod::Rc },
            regression: if bits & 2 == 0 { RegressionMode::Cp } else { RegressionMode::Lr },
            update: if bits & 4 == 0 { UpdateMethod::Cm } else { UpdateMethod::Sgd },
        }
    })
}

pub fn model_spec(id: u8) -> Result<ModelSpec, ExperimentError> {
    build_model_matrix()
        .into_iter()
        .find(|m| m.id == id)
        .ok_or(ExperimentError::UnknownModel(id))
}

/// Seed of one run: independent streams per model and replicate.
pub fn run_seed(base: u64, model: u8, replicate: usize) -> u64 {
    base.wrapping_add(u64::from(model) * 10_000)
        .wrapping_add(replicate as u64)
}

pub fn dataset_info(dataset: &Dataset) -> DatasetInfo {
    DatasetInfo {
        source: dataset.source_path().to_string(),
        n: dataset.n(),
        d: dataset.d(),
        outcome: dataset.outcome_name().to_string(),
        normalization: dataset.normalization().map(|p| p.mode).unwrap_or_default(),
    }
}

fn model_config(model: &ModelSpec, base: &EvolutionConfig, seed: u64) -> EvolutionConfig {
    EvolutionConfig {
        regression_mode: model.regression,
        init_method: model.init,
        seed,
        ..base.clone()
    }
}

/// Runs one model once. `base.seed` is the experiment's base seed.
pub fn run_model(
    dataset: &Dataset,
    model: &ModelSpec,
    base: &EvolutionConfig,
    sgd: &SgdParams,
    replicate: usize,
) -> Result<RunResult, EvolutionError> {
    let config = model_config(model, base, run_seed(base.seed, model.id, replicate));
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let start = Instant::now();
    let (algorithm, sgd_used, outcome) = match model.update {
        UpdateMethod::Cm => (Algorithm::Nsga2, None, run_nsga2(dataset, &config, &mut rng)?),
        UpdateMethod::Sgd => (
            Algorithm::SgdEvolution,
            Some(*sgd),
            run_sgd_evolution(dataset, &config, sgd, &mut rng)?,
        ),
    };
    Ok(RunResult::from_outcome(
        *model,
        algorithm,
        replicate,
        dataset_info(dataset),
        config,
        sgd_used,
        outcome,
        start.elapsed().as_secs_f64(),
    ))
}

/// Deviation-only GA with the same seed, budget, initialization and MAE
/// regression mode as `run_model` would use for `model`.
pub fn run_single_objective(
    dataset: &Dataset,
    model: &ModelSpec,
    base: &EvolutionConfig,
    replicate: usize,
) -> Result<RunResult, EvolutionError> {
    let config = model_config(model, base, run_seed(base.seed, model.id, replicate));
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let start = Instant::now();
    let outcome = run_soga(dataset, &config, &mut rng)?;
    Ok(RunResult::from_outcome(
        *model,
        Algorithm::DeviationGa,
        replicate,
        dataset_info(dataset),
        config,
        None,
        outcome,
        start.elapsed().as_secs_f64(),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSource {
    pub path: PathBuf,
    pub target: TargetColumn,
    pub normalization: Normalization,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub data: DataSource,
    pub models: Vec<u8>,
    pub replicates: usize,
    /// `seed` is the base seed; initialization and regression mode are set
    /// per model.
    pub evolution: EvolutionConfig,
    pub sgd: SgdParams,
    pub out_dir: PathBuf,
    pub replicate_mode: ReplicateMode,
    pub alpha: f64,
    /// Worker threads; 0 picks one per core.
    #[serde(skip)]
    pub jobs: usize,
}

impl ExperimentConfig {
    pub fn new(data: DataSource, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            data,
            models: (1..=8).collect(),
            replicates: 1,
            evolution: EvolutionConfig::default(),
            sgd: SgdParams::default(),
            out_dir: out_dir.into(),
            replicate_mode: ReplicateMode::Pool,
            alpha: 0.05,
            jobs: 0,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.replicates == 0 {
            return Err(ExperimentError::InvalidConfig("replicates must be at least 1".into()));
        }
        if self.models.is_empty() {
            return Err(ExperimentError::InvalidConfig("no models selected".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(ExperimentError::InvalidConfig(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        for &m in &self.models {
            model_spec(m)?;
        }
        self.evolution.validate()?;
        Ok(())
    }

    /// SHA-256 of everything that influences results (output location and
    /// thread count excluded).
    pub fn hash(&self) -> String {
        let mut hashed = self.clone();
        hashed.out_dir = PathBuf::new();
        let bytes = serde_json::to_vec(&hashed).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub model: ModelSpec,
    pub replicate: usize,
    pub seed: u64,
    /// Relative to the manifest's directory.
    pub dir: PathBuf,
    pub status: RunStatus,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    pub wall_time_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub runs: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn read(dir: &Path) -> Result<Self, ResultsError> {
        crate::results::read_json(&dir.join(MANIFEST_FILE))
    }

    /// Loads the results of every successful run.
    pub fn load_results(&self, dir: &Path) -> Result<Vec<RunResult>, ResultsError> {
        self.runs
            .iter()
            .filter(|e| e.status == RunStatus::Ok)
            .map(|e| read_run(&dir.join(&e.dir)))
            .collect()
    }
}

pub fn run_dir_name(model: u8, replicate: usize) -> String {
    format!("run_{model}_{replicate}")
}

pub(crate) fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool, ExperimentError> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?)
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub manifest: Manifest,
    pub results: Vec<RunResult>,
}

/// Loads the configured dataset and runs every model × replicate.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome, ExperimentError> {
    config.validate()?;
    let dataset = load_csv(&config.data.path, &config.data.target, config.data.normalization)?;
    run_experiment_on(config, &dataset)
}

/// Runs every model × replicate on an already loaded dataset and writes the
/// run directories plus `manifest.json` under `config.out_dir`. A failed run
/// is recorded in the manifest; the remaining runs still execute.
pub fn run_experiment_on(config: &ExperimentConfig, dataset: &Dataset) -> Result<ExperimentOutcome, ExperimentError> {
    config.validate()?;
    std::fs::create_dir_all(&config.out_dir).map_err(|source| ResultsError::Io {
        path: config.out_dir.clone(),
        source,
    })?;
    let tasks: Vec<(ModelSpec, usize)> = config
        .models
        .iter()
        .flat_map(|&m| {
            let spec = model_spec(m).expect("validated");
            (0..config.replicates).map(move |r| (spec, r))
        })
        .collect();

    let pool = thread_pool(config.jobs)?;
    let outcomes: Vec<(ManifestEntry, Option<RunResult>)> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(model, replicate)| {
                let dir = PathBuf::from(run_dir_name(model.id, replicate));
                let seed = run_seed(config.evolution.seed, model.id, replicate);
                let start = Instant::now();
                let result = run_model(dataset, &model, &config.evolution, &config.sgd, replicate)
                    .map_err(ExperimentError::from)
                    .and_then(|r| {
                        write_run(&config.out_dir.join(&dir), &r)?;
                        Ok(r)
                    });
                let (status, error, result) = match result {
                    Ok(r) => (RunStatus::Ok, None, Some(r)),
                    Err(e) => (RunStatus::Failed, Some(e.to_string()), None),
                };
                let entry = ManifestEntry {
                    model,
                    replicate,
                    seed,
                    dir,
                    status,
                    error,
                    wall_time_secs: start.elapsed().as_secs_f64(),
                };
                (entry, result)
            })
            .collect()
    });

    let mut runs = Vec::with_capacity(outcomes.len());
    let mut results = Vec::new();
    for (entry, result) in outcomes {
        runs.push(entry);
        results.extend(result);
    }
    let manifest = Manifest {
        config_hash: config.hash(),
        config: config.clone(),
        runs,
    };
    write_json(&config.out_dir.join(MANIFEST_FILE), &manifest)?;
    Ok(ExperimentOutcome { manifest, results })
}

/// Final-generation objective values of one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSample {
    pub model: u8,
    pub deviation: Vec<f64>,
    pub mae: Vec<f64>,
}

/// Groups run results by model. `Pool` concatenates the final populations
/// of all replicates; `PerReplicate` contributes one population mean per
/// replicate. Models come out in ascending id order.
pub fn samples_from_results(results: &[RunResult], mode: ReplicateMode) -> Vec<ModelSample> {
    let mut ids: Vec<u8> = results.iter().map(|r| r.model.id).collect();
    ids.sort_unstable();
    ids.dedup();
    ids.into_iter()
        .map(|id| {
            let mut runs: Vec<&RunResult> = results.iter().filter(|r| r.model.id == id).collect();
            runs.sort_by_key(|r| r.replicate);
            let (deviation, mae) = match mode {
                ReplicateMode::Pool => (
                    runs.iter().flat_map(|r| r.final_deviations()).collect(),
                    runs.iter().flat_map(|r| r.final_maes()).collect(),
                ),
                ReplicateMode::PerReplicate => (
                    runs.iter().map(|r| r.mean_final_deviation()).collect(),
                    runs.iter().map(|r| r.mean_final_mae()).collect(),
                ),
            };
            ModelSample { model: id, deviation, mae }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObjectiveComparison {
    pub report: StatsReport,
    /// Whether the ANOVA rejects equal means at alpha.
    pub differs: bool,
    /// Best model plus its Tukey equivalents; every model when the ANOVA
    /// finds no difference.
    pub winners: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelComparison {
    pub alpha: f64,
    pub models: Vec<u8>,
    pub deviation: ObjectiveComparison,
    pub mae: ObjectiveComparison,
    /// Models among the winners for both objectives.
    pub both: Vec<u8>,
}

pub fn model_label(id: u8) -> String {
    format!("model {id}")
}

fn compare_objective(ids: &[u8], samples: Vec<Vec<f64>>, alpha: f64) -> Result<ObjectiveComparison, StatsError> {
    let groups: Vec<SampleGroup> = ids
        .iter()
        .zip(samples)
        .map(|(&id, v)| SampleGroup::new(model_label(id), v))
        .collect();
    let report = compare_groups(&groups, alpha)?;
    let differs = report.anova.p < alpha;
    let winners = if differs {
        ids.iter()
            .copied()
            .filter(|&id| {
                let label = model_label(id);
                report.best_group == label || report.best_equivalents.contains(&label)
            })
            .collect()
    } else {
        ids.to_vec()
    };
    Ok(ObjectiveComparison {
        report,
        differs,
        winners,
    })
}

/// Sorted intersection of two winner sets.
pub fn intersect_winners(a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut both: Vec<u8> = a.iter().copied().filter(|m| b.contains(m)).collect();
    both.sort_unstable();
    both.dedup();
    both
}

/// ANOVA and Tukey HSD per objective. The result does not depend on the
/// order of `samples`.
pub fn compare_models(samples: &[ModelSample], alpha: f64) -> Result<ModelComparison, StatsError> {
    let mut sorted: Vec<&ModelSample> = samples.iter().collect();
    sorted.sort_by_key(|s| s.model);
    let ids: Vec<u8> = sorted.iter().map(|s| s.model).collect();
    let deviation = compare_objective(&ids, sorted.iter().map(|s| s.deviation.clone()).collect(), alpha)?;
    let mae = compare_objective(&ids, sorted.iter().map(|s| s.mae.clone()).collect(), alpha)?;
    let both = intersect_winners(&deviation.winners, &mae.winners);
    Ok(ModelComparison {
        alpha,
        models: ids,
        deviation,
        mae,
        both,
    })
}

/// Multi- vs single-objective MAE for one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiVsSingleColumn {
    pub model: u8,
    pub multi_mean: f64,
    pub single_mean: f64,
    pub t: f64,
    pub p: f64,
    pub df: usize,
    /// Replicates whose multi-objective final mean MAE is below the
    /// single-objective one.
    pub multi_wins: usize,
    pub replicates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiVsSingleReport {
    pub replicate_mode: ReplicateMode,
    pub columns: Vec<MultiVsSingleColumn>,
}

impl MultiVsSingleReport {
    /// Plain-text table: one column per model; rows for the two means and
    /// the t-test significance.
    pub fn to_table(&self) -> String {
        let mut out = format!("{:<18}", "");
        for c in &self.columns {
            out.push_str(&format!("{:>12}", format!("Model {}", c.model)));
        }
        out.push('\n');
        let mut row = |name: &str, f: &dyn Fn(&MultiVsSingleColumn) -> String| {
            out.push_str(&format!("{name:<18}"));
            for c in &self.columns {
                out.push_str(&format!("{:>12}", f(c)));
            }
            out.push('\n');
        };
        row("Multi-objective", &|c| format!("{:.3}", c.multi_mean));
        row("Single-objective", &|c| format!("{:.3}", c.single_mean));
        row("Sig.", &|c| format!("{:.3}", c.p));
        out
    }
}

/// Builds one column from the final MAE values of paired runs (one vector
/// per replicate on each side).
pub fn multi_vs_single_column(
    model: u8,
    multi: &[Vec<f64>],
    single: &[Vec<f64>],
    mode: ReplicateMode,
) -> Result<MultiVsSingleColumn, StatsError> {
    let collapse = |runs: &[Vec<f64>]| -> Vec<f64> {
        match mode {
            ReplicateMode::Pool => runs.concat(),
            ReplicateMode::PerReplicate => runs.iter().map(|r| mean(r)).collect(),
        }
    };
    let a = SampleGroup::new("multi", collapse(multi));
    let b = SampleGroup::new("single", collapse(single));
    let t = ttest_ind(&a, &b)?;
    let multi_wins = multi
        .iter()
        .zip(single)
        .filter(|(m, s)| mean(m) < mean(s))
        .count();
    Ok(MultiVsSingleColumn {
        model,
        multi_mean: mean(&a.values),
        single_mean: mean(&b.values),
        t: t.t,
        p: t.p,
        df: t.df,
        multi_wins,
        replicates: multi.len(),
    })
}

#[derive(Debug, Clone)]
pub struct MultiVsSingleOutcome {
    pub report: MultiVsSingleReport,
    pub multi: Vec<RunResult>,
    pub single: Vec<RunResult>,
}

/// Runs each crossover/mutation model and the deviation-only GA with
/// identical seeds and budgets, then t-tests their final MAE values.
pub fn compare_multi_vs_single(
    dataset: &Dataset,
    base: &EvolutionConfig,
    models: &[u8],
    replicates: usize,
    mode: ReplicateMode,
    jobs: usize,
) -> Result<MultiVsSingleOutcome, ExperimentError> {
    if replicates == 0 {
        return Err(ExperimentError::InvalidConfig("replicates must be at least 1".into()));
    }
    let specs: Vec<ModelSpec> = models.iter().map(|&m| model_spec(m)).collect::<Result<_, _>>()?;
    if let Some(m) = specs.iter().find(|m| m.update != UpdateMethod::Cm) {
        return Err(ExperimentError::InvalidConfig(format!(
            "model {} does not use crossover and mutation; choose among 1-4",
            m.id
        )));
    }
    base.validate()?;
    let tasks: Vec<(ModelSpec, usize)> = specs
        .iter()
        .flat_map(|&s| (0..replicates).map(move |r| (s, r)))
        .collect();
    let pool = thread_pool(jobs)?;
    let pairs: Vec<(RunResult, RunResult)> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(spec, r)| {
                let multi = run_model(dataset, &spec, base, &SgdParams::default(), r)?;
                let single = run_single_objective(dataset, &spec, base, r)?;
                Ok((multi, single))
            })
            .collect::<Result<_, EvolutionError>>()
    })?;

    let mut columns = Vec::with_capacity(specs.len());
    for spec in &specs {
        let (m, s): (Vec<_>, Vec<_>) = pairs
            .iter()
            .filter(|(m, _)| m.model.id == spec.id)
            .map(|(m, s)| (m.final_maes(), s.final_maes()))
            .unzip();
        columns.push(multi_vs_single_column(spec.id, &m, &s, mode)?);
    }
    let (multi, single) = pairs.into_iter().unzip();
    Ok(MultiVsSingleOutcome {
        report: MultiVsSingleReport {
            replicate_mode: mode,
            columns,
        },
        multi,
        single,
    })
}
