//! Command-line interface.
//!
//! Exit codes: 0 success, 1 corpus parse/IO failures, 2 configuration
//! problems (bad flags, unusable values, unsatisfiable fixture specs).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rolecooc::pipeline::{run_pipeline, PartialRunConfig, PipelineError, RunConfig, Stage};
use rolecooc::{fixture, oracle, report, FixtureError, OracleError};

#[derive(Parser)]
#[command(
    name = "rolecooc",
    version,
    about = "Thematic-role co-occurrence analysis over VerbNet-style class lexicons"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct StageArgs {
    /// Directory of class XML files
    #[arg(long = "in", value_name = "DIR")]
    input: Option<PathBuf>,
    /// Directory for the generated artifacts (created if missing)
    #[arg(long = "out", value_name = "DIR")]
    output: Option<PathBuf>,
    /// JSON config file; explicit flags override its values
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// RNG seed for perturbation, k-means, and t-SNE
    #[arg(long)]
    seed: Option<u64>,
    /// Dependence threshold in percent (0, 100]
    #[arg(long)]
    threshold: Option<f64>,
    /// t-SNE perplexity
    #[arg(long)]
    perplexity: Option<f64>,
    /// t-SNE gradient-descent iterations
    #[arg(long = "tsne-iters", value_name = "N")]
    tsne_iters: Option<usize>,
    /// k-means restarts per k
    #[arg(long = "kmeans-restarts", value_name = "N")]
    kmeans_restarts: Option<usize>,
    /// Number of principal components kept before clustering
    #[arg(long = "pca-dims", value_name = "N")]
    pca_dims: Option<usize>,
    /// Run t-SNE on PCA scores instead of the raw perturbed matrix
    #[arg(long = "tsne-pre-pca")]
    tsne_pre_pca: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and compress the class lexicon
    Ingest(StageArgs),
    /// Emit the binary class-role matrix and frame counts
    Matrix(StageArgs),
    /// Emit the conditional occurrence matrix and dependence pairs
    Occurrence(StageArgs),
    /// Sweep k-means over the perturbed role embedding
    Cluster(StageArgs),
    /// Embed the roles in 2-D with exact t-SNE
    Tsne(StageArgs),
    /// Run every stage
    All(StageArgs),
    /// Generate a synthetic corpus from a JSON spec
    Fixture {
        /// Fixture spec (JSON)
        #[arg(long = "in", value_name = "FILE")]
        spec: PathBuf,
        /// Directory for the generated class files
        #[arg(long = "out", value_name = "DIR")]
        output: PathBuf,
        /// Seed for invented member lemmas
        #[arg(long, default_value_t = RunConfig::DEFAULT_SEED)]
        seed: u64,
    },
    /// Recompute the occurrence matrix by brute force (small corpora only)
    Oracle {
        /// Directory of class XML files
        #[arg(long = "in", value_name = "DIR")]
        input: PathBuf,
        /// Directory for oracle.csv (created if missing)
        #[arg(long = "out", value_name = "DIR")]
        output: PathBuf,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Failure {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn data(message: impl Into<String>) -> Failure {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Failure {
        Failure {
            code: e.exit_code() as u8,
            message: e.to_string(),
        }
    }
}

fn run_stage(stage: Stage, args: StageArgs) -> Result<(), Failure> {
    let file = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                Failure::config(format!("cannot read config {}: {e}", path.display()))
            })?;
            let partial: PartialRunConfig = serde_json::from_str(&text).map_err(|e| {
                Failure::config(format!("invalid config {}: {e}", path.display()))
            })?;
            Some(partial)
        }
        None => None,
    };
    let flags = PartialRunConfig {
        input_dir: args.input,
        output_dir: args.output,
        seed: args.seed,
        dependence_threshold: args.threshold,
        perplexity: args.perplexity,
        tsne_iterations: args.tsne_iters,
        kmeans_restarts: args.kmeans_restarts,
        pca_dims: args.pca_dims,
        tsne_pre_pca: args.tsne_pre_pca.then_some(true),
    };
    let config = RunConfig::resolve(stage, file, flags)?;
    let written = run_pipeline(&config)?;
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn run_fixture(spec_path: PathBuf, output: PathBuf, seed: u64) -> Result<(), Failure> {
    let text = fs::read_to_string(&spec_path).map_err(|e| {
        Failure::config(format!("cannot read spec {}: {e}", spec_path.display()))
    })?;
    let spec: fixture::FixtureSpec = serde_json::from_str(&text)
        .map_err(|e| Failure::config(format!("invalid spec {}: {e}", spec_path.display())))?;
    let written = fixture::write_fixture(&spec, seed, &output).map_err(|e| match e {
        FixtureError::UnsatisfiableSpec { .. } => Failure::config(e.to_string()),
        FixtureError::Io { .. } => Failure::data(e.to_string()),
    })?;
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn run_oracle(input: PathBuf, output: PathBuf) -> Result<(), Failure> {
    let m = oracle::oracle_occurrence(&input).map_err(|e| match e {
        OracleError::ScaleExceeded { .. } => Failure::config(e.to_string()),
        OracleError::Parse(_) => Failure::data(e.to_string()),
    })?;
    fs::create_dir_all(&output)
        .map_err(|e| Failure::data(format!("cannot create {}: {e}", output.display())))?;
    let path = output.join("oracle.csv");
    fs::write(&path, report::percent_table_csv(&m.roles, &m.percent))
        .map_err(|e| Failure::data(format!("cannot write {}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ingest(args) => run_stage(Stage::Ingest, args),
        Command::Matrix(args) => run_stage(Stage::Matrix, args),
        Command::Occurrence(args) => run_stage(Stage::Occurrence, args),
        Command::Cluster(args) => run_stage(Stage::Cluster, args),
        Command::Tsne(args) => run_stage(Stage::Tsne, args),
        Command::All(args) => run_stage(Stage::All, args),
        Command::Fixture { spec, output, seed } => run_fixture(spec, output, seed),
        Command::Oracle { input, output } => run_oracle(input, output),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
