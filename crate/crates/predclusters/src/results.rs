//! On-disk layout of a run: `result.json`, `generations.csv` and
//! `final_population.csv`.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use predclusters_core::{
    EvolutionConfig, EvolutionOutcome, GenerationStats, InitMethod, Normalization, RegressionMode, SgdParams,
};
use serde::{Deserialize, Serialize};

pub const RESULT_FILE: &str = "result.json";
pub const GENERATIONS_FILE: &str = "generations.csv";
pub const FINAL_POPULATION_FILE: &str = "final_population.csv";

#[derive(Debug, thiserror::Error)]
pub enum ResultsError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

/// How the next generation is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UpdateMethod {
    /// Crossover and mutation under NSGA-II selection.
    #[serde(rename = "CM")]
    Cm,
    /// SGD k-medians improvement of dominated solutions.
    #[serde(rename = "SGD")]
    Sgd,
}

impl fmt::Display for UpdateMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UpdateMethod::Cm => "CM",
            UpdateMethod::Sgd => "SGD",
        })
    }
}

/// One of the eight model variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelSpec {
    pub id: u8,
    pub init: InitMethod,
    pub regression: RegressionMode,
    pub update: UpdateMethod,
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "model {} ({}, {}, {})", self.id, self.init, self.regression, self.update)
    }
}

/// Search procedure that produced a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Nsga2,
    SgdEvolution,
    /// Single-objective GA on deviation only.
    DeviationGa,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub source: String,
    pub n: usize,
    pub d: usize,
    pub outcome: String,
    pub normalization: Normalization,
}

/// Final-population member as written to `final_population.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalRow {
    pub id: usize,
    pub k: usize,
    pub deviation: f64,
    pub mae: f64,
    pub rank: usize,
    /// Boundary members of a front have infinite crowding, written `inf`.
    #[serde(with = "maybe_infinite")]
    pub crowding: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalIndividual {
    #[serde(flatten)]
    pub row: FinalRow,
    /// 1-based alleles.
    pub genotype: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub model: ModelSpec,
    pub algorithm: Algorithm,
    pub replicate: usize,
    pub seed: u64,
    pub dataset: DatasetInfo,
    pub config: EvolutionConfig,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sgd: Option<SgdParams>,
    pub generations: Vec<GenerationStats>,
    pub final_population: Vec<FinalIndividual>,
    /// The only field that differs between repeated runs with one seed.
    pub wall_time_secs: f64,
}

impl RunResult {
    #[allow(clippy::too_many_arguments)]
    pub fn from_outcome(
        model: ModelSpec,
        algorithm: Algorithm,
        replicate: usize,
        dataset: DatasetInfo,
        config: EvolutionConfig,
        sgd: Option<SgdParams>,
        outcome: EvolutionOutcome,
        wall_time_secs: f64,
    ) -> Self {
        let final_population = outcome
            .population
            .iter()
            .enumerate()
            .map(|(id, ind)| FinalIndividual {
                row: FinalRow {
                    id,
                    k: ind.k,
                    deviation: ind.objectives.deviation,
                    mae: ind.objectives.mae,
                    rank: ind.rank,
                    crowding: ind.crowding,
                },
                genotype: ind.genotype.to_one_based(),
            })
            .collect();
        Self {
            model,
            algorithm,
            replicate,
            seed: config.seed,
            dataset,
            config,
            sgd,
            generations: outcome.generations,
            final_population,
            wall_time_secs,
        }
    }

    pub fn final_deviations(&self) -> Vec<f64> {
        self.final_population.iter().map(|i| i.row.deviation).collect()
    }

    pub fn final_maes(&self) -> Vec<f64> {
        self.final_population.iter().map(|i| i.row.mae).collect()
    }

    pub fn mean_final_mae(&self) -> f64 {
        mean(&self.final_maes())
    }

    pub fn mean_final_deviation(&self) -> f64 {
        mean(&self.final_deviations())
    }
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ResultsError + '_ {
    move |source| ResultsError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> ResultsError + '_ {
    move |source| ResultsError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), ResultsError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| ResultsError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, ResultsError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| ResultsError::Json {
        path: path.to_path_buf(),
        source,
    })
}

fn write_rows<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<(), ResultsError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    for row in rows {
        w.serialize(row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn read_rows<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, ResultsError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize().collect::<Result<_, _>>().map_err(csv_err(path))
}

/// Writes the three files of a run into `dir`, creating it if needed.
pub fn write_run(dir: &Path, result: &RunResult) -> Result<(), ResultsError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    write_json(&dir.join(RESULT_FILE), result)?;
    write_rows(&dir.join(GENERATIONS_FILE), &result.generations)?;
    write_rows(
        &dir.join(FINAL_POPULATION_FILE),
        result.final_population.iter().map(|i| &i.row),
    )
}

pub fn read_run(dir: &Path) -> Result<RunResult, ResultsError> {
    read_json(&dir.join(RESULT_FILE))
}

pub fn read_generations(dir: &Path) -> Result<Vec<GenerationStats>, ResultsError> {
    read_rows(&dir.join(GENERATIONS_FILE))
}

pub fn read_final_population(dir: &Path) -> Result<Vec<FinalRow>, ResultsError> {
    read_rows(&dir.join(FINAL_POPULATION_FILE))
}

/// Serializes `f64` as a number when finite and as `"inf"`, `"-inf"` or
/// `"nan"` otherwise, so JSON keeps infinite crowding distances.
pub(crate) mod maybe_infinite {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Number(v) => Ok(v),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Replicates are pooled into one sample per model, or each replicate
/// contributes its final-population mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReplicateMode {
    #[default]
    Pool,
    PerReplicate,
}

impl FromStr for ReplicateMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pool" => Ok(ReplicateMode::Pool),
            "per-replicate" => Ok(ReplicateMode::PerReplicate),
            other => Err(format!("unknown replicate mode `{other}` (pool | per-replicate)")),
        }
    }
}

impl fmt::Display for ReplicateMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReplicateMode::Pool => "pool",
            ReplicateMode::PerReplicate => "per-replicate",
        })
    }
}
