//! Command-line front end.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use predclusters_core::{EvolutionConfig, Normalization, SgdParams};

use crate::data::{load_csv, TargetColumn};
use crate::experiments::{
    compare_models, compare_multi_vs_single, model_spec, run_dir_name, run_experiment, run_model,
    samples_from_results, DataSource, ExperimentConfig, Manifest, ModelComparison, COMPARISON_FILE, MANIFEST_FILE,
};
use crate::plot::{discover_runs, plot_results};
use crate::results::{read_run, write_json, write_run, ReplicateMode, RunResult};

type BoxError = Box<dyn std::error::Error + Send + Sync>;

#[derive(Debug, Parser)]
#[command(name = "predclusters", version, about = "Multi-objective predictive clustering experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one model once.
    Run(RunArgs),
    /// Run all selected models (default: all eight) and compare them.
    Matrix(MatrixArgs),
    /// Compare crossover/mutation models against the deviation-only GA.
    Baseline(BaselineArgs),
    /// Recompute statistics over existing result directories.
    Compare(CompareArgs),
    /// Render SVG charts from result directories.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// CSV file with a header row.
    #[arg(long, value_name = "PATH")]
    pub data: PathBuf,
    /// Outcome column: `last`, a 0-based index, or a header name.
    #[arg(long, default_value = "last", value_name = "NAME|IDX|last")]
    pub target: TargetColumn,
    /// Feature scaling: none, zscore or minmax.
    #[arg(long = "normalize", default_value_t = Normalization::None)]
    pub normalization: Normalization,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    /// Population size.
    #[arg(long, default_value_t = 100)]
    pub pop: usize,
    /// Number of generations after the initial one.
    #[arg(long, default_value_t = 100)]
    pub iters: usize,
    /// Share of the population produced by crossover, in percent.
    #[arg(long, default_value_t = 90.0)]
    pub crossover_pct: f64,
    /// Share of the population produced by mutation, in percent.
    #[arg(long, default_value_t = 3.0)]
    pub mutation_pct: f64,
    /// Base random seed.
    #[arg(long, env = "PREDCLUSTERS_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Reassign members of clusters smaller than this (off by default).
    #[arg(long, value_name = "N")]
    pub min_cluster_size: Option<usize>,
}

impl SearchArgs {
    fn evolution(&self) -> EvolutionConfig {
        EvolutionConfig {
            population_size: self.pop,
            iterations: self.iters,
            crossover_pct: self.crossover_pct,
            mutation_pct: self.mutation_pct,
            seed: self.seed,
            min_cluster_size: self.min_cluster_size,
            ..EvolutionConfig::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SgdArgs {
    /// SGD step-size scale.
    #[arg(long = "sgd-cgamma", default_value_t = 2000.0)]
    pub c_gamma: f64,
    /// SGD step-size cluster-size factor.
    #[arg(long = "sgd-calpha", default_value_t = 1.0)]
    pub c_alpha: f64,
    /// SGD step-size decay exponent.
    #[arg(long = "sgd-alpha", default_value_t = 0.75)]
    pub decay: f64,
}

impl SgdArgs {
    fn params(&self) -> SgdParams {
        SgdParams {
            c_gamma: self.c_gamma,
            c_alpha: self.c_alpha,
            alpha: self.decay,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Model number, 1 to 8.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=8))]
    pub model: u8,
    /// Replicate index; enters the run seed.
    #[arg(long, default_value_t = 0)]
    pub replicate: usize,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    #[command(flatten)]
    pub sgd: SgdArgs,
    /// Output directory.
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
}

/// Comma-separated model numbers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelList(pub Vec<u8>);

fn parse_models(s: &str) -> Result<ModelList, String> {
    let models: Vec<u8> = s
        .split(',')
        .map(|m| {
            m.trim()
                .parse::<u8>()
                .ok()
                .filter(|m| (1..=8).contains(m))
                .ok_or_else(|| format!("`{m}` is not a model number 1-8"))
        })
        .collect::<Result<_, _>>()?;
    if models.is_empty() {
        return Err("no models given".into());
    }
    Ok(ModelList(models))
}

#[derive(Debug, Clone, Args)]
pub struct MatrixArgs {
    /// Comma-separated model numbers.
    #[arg(long, default_value = "1,2,3,4,5,6,7,8", value_parser = parse_models)]
    pub models: ModelList,
    /// Runs per model.
    #[arg(long, default_value_t = 1)]
    pub replicates: usize,
    /// How replicates enter the statistics: pool or per-replicate.
    #[arg(long, default_value_t = ReplicateMode::Pool)]
    pub replicate_mode: ReplicateMode,
    /// Significance level.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Parallel runs; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    #[command(flatten)]
    pub sgd: SgdArgs,
    /// Output directory.
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct BaselineArgs {
    /// Comma-separated crossover/mutation model numbers (1-4).
    #[arg(long, default_value = "1,2,3,4", value_parser = parse_models)]
    pub models: ModelList,
    /// Seed pairs per model.
    #[arg(long, default_value_t = 1)]
    pub replicates: usize,
    /// How replicates enter the t-test: pool or per-replicate.
    #[arg(long, default_value_t = ReplicateMode::Pool)]
    pub replicate_mode: ReplicateMode,
    /// Parallel runs; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Output directory.
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// Experiment or run directories; repeat to combine.
    #[arg(long = "in", required = true, value_name = "DIR")]
    pub inputs: Vec<PathBuf>,
    /// Significance level.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// How replicates enter the statistics: pool or per-replicate.
    #[arg(long, default_value_t = ReplicateMode::Pool)]
    pub replicate_mode: ReplicateMode,
    /// Output file (default: comparison.json in the first input).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    /// Experiment or run directory.
    #[arg(long = "in", value_name = "DIR")]
    pub input: PathBuf,
    /// Directory for the SVG files.
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses the process arguments and runs; usage errors exit with 2,
/// failures with 1.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

pub fn execute(cli: Cli) -> Result<(), BoxError> {
    match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Matrix(a) => cmd_matrix(a),
        Command::Baseline(a) => cmd_baseline(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Plot(a) => cmd_plot(a),
    }
}

fn cmd_run(a: RunArgs) -> Result<(), BoxError> {
    let dataset = load_csv(&a.data.data, &a.data.target, a.data.normalization)?;
    let spec = model_spec(a.model)?;
    let result = run_model(&dataset, &spec, &a.search.evolution(), &a.sgd.params(), a.replicate)?;
    write_run(&a.out, &result)?;
    println!("{spec}: seed {}", result.seed);
    print_final(&result);
    println!("results written to {}", a.out.display());
    Ok(())
}

fn print_final(r: &RunResult) {
    let last = r.generations.last().expect("generation 0 is always recorded");
    println!(
        "generation {}: mean deviation {:.4}, min deviation {:.4}, mean MAE {:.4}, min MAE {:.4}, front 1 size {}",
        last.generation, last.mean_deviation, last.min_deviation, last.mean_mae, last.min_mae, last.front1_size
    );
}

fn print_comparison(c: &ModelComparison) {
    for (name, obj) in [("deviation", &c.deviation), ("MAE", &c.mae)] {
        println!(
            "{name}: ANOVA F = {:.4}, p = {:.4}; best {}; winners {:?}",
            obj.report.anova.f, obj.report.anova.p, obj.report.best_group, obj.winners
        );
    }
    println!("best for both objectives: {:?}", c.both);
}

fn cmd_matrix(a: MatrixArgs) -> Result<(), BoxError> {
    let mut config = ExperimentConfig::new(
        DataSource {
            path: a.data.data.clone(),
            target: a.data.target.clone(),
            normalization: a.data.normalization,
        },
        &a.out,
    );
    config.models = a.models.0.clone();
    config.replicates = a.replicates;
    config.evolution = a.search.evolution();
    config.sgd = a.sgd.params();
    config.replicate_mode = a.replicate_mode;
    config.alpha = a.alpha;
    config.jobs = a.jobs;
    let outcome = run_experiment(&config)?;
    for e in &outcome.manifest.runs {
        match &e.error {
            None => println!("{} replicate {}: ok ({:.1}s)", e.model, e.replicate, e.wall_time_secs),
            Some(err) => eprintln!("{} replicate {}: FAILED: {err}", e.model, e.replicate),
        }
    }
    let samples = samples_from_results(&outcome.results, config.replicate_mode);
    if samples.len() < 2 {
        return Err("fewer than two models produced results; no comparison written".into());
    }
    let comparison = compare_models(&samples, config.alpha)?;
    write_json(&a.out.join(COMPARISON_FILE), &comparison)?;
    print_comparison(&comparison);
    if outcome.manifest.runs.iter().any(|e| e.error.is_some()) {
        return Err("some runs failed; see manifest.json".into());
    }
    Ok(())
}

fn cmd_baseline(a: BaselineArgs) -> Result<(), BoxError> {
    let dataset = load_csv(&a.data.data, &a.data.target, a.data.normalization)?;
    let outcome = compare_multi_vs_single(
        &dataset,
        &a.search.evolution(),
        &a.models.0,
        a.replicates,
        a.replicate_mode,
        a.jobs,
    )?;
    for (m, s) in outcome.multi.iter().zip(&outcome.single) {
        let name = run_dir_name(m.model.id, m.replicate);
        write_run(&a.out.join(format!("{name}_multi")), m)?;
        write_run(&a.out.join(format!("{name}_single")), s)?;
    }
    write_json(&a.out.join("baseline.json"), &outcome.report)?;
    let table = outcome.report.to_table();
    std::fs::write(a.out.join("baseline.txt"), &table)?;
    print!("{table}");
    Ok(())
}

fn cmd_compare(a: CompareArgs) -> Result<(), BoxError> {
    let mut results = Vec::new();
    for dir in &a.inputs {
        if dir.join(MANIFEST_FILE).is_file() {
            results.extend(Manifest::read(dir)?.load_results(dir)?);
        } else {
            for run in discover_runs(dir)? {
                results.push(read_run(&run)?);
            }
        }
    }
    let samples = samples_from_results(&results, a.replicate_mode);
    if samples.len() < 2 {
        return Err(format!("need results for at least two models, found {}", samples.len()).into());
    }
    let comparison = compare_models(&samples, a.alpha)?;
    let out = a.out.unwrap_or_else(|| a.inputs[0].join(COMPARISON_FILE));
    write_json(&out, &comparison)?;
    print_comparison(&comparison);
    println!("comparison written to {}", out.display());
    Ok(())
}

fn cmd_plot(a: PlotArgs) -> Result<(), BoxError> {
    for path in plot_results(&a.input, &a.out)? {
        println!("{}", path.display());
    }
    Ok(())
}
