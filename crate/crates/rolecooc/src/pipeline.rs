//! End-to-end pipeline: resolved configuration, stage selection, and atomic
//! artifact writing.
//!
//! All artifacts are computed in memory first; only when every stage has
//! succeeded are files written (each via a temp file and rename). A failure
//! mid-write removes everything written for this run, so an output directory
//! never holds a partial result set. Reruns with the same config are
//! byte-identical.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::{self, Embedding2D};
use crate::lexicon::{self, LexiconError};
use crate::matrix;
use crate::occurrence;
use crate::report;

/// Which artifacts to produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Ingest,
    Matrix,
    Occurrence,
    Cluster,
    Tsne,
    All,
}

/// Fully resolved run parameters; serialized next to the artifacts as
/// `run_config.json` so every output directory records how it was produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input_dir: PathBuf,
    pub output_dir: PathBuf,
    pub stage: Stage,
    pub seed: u64,
    pub dependence_threshold: f64,
    pub perplexity: f64,
    pub tsne_iterations: usize,
    pub kmeans_restarts: usize,
    pub pca_dims: usize,
    pub tsne_pre_pca: bool,
}

/// Config-file / flag fragment: every field optional. Flags take precedence
/// over the file, the file over built-in defaults.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialRunConfig {
    pub input_dir: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub dependence_threshold: Option<f64>,
    pub perplexity: Option<f64>,
    pub tsne_iterations: Option<usize>,
    pub kmeans_restarts: Option<usize>,
    pub pca_dims: Option<usize>,
    pub tsne_pre_pca: Option<bool>,
}

impl RunConfig {
    pub const DEFAULT_SEED: u64 = 42;
    pub const DEFAULT_THRESHOLD: f64 = 95.0;
    pub const DEFAULT_PERPLEXITY: f64 = 5.0;
    pub const DEFAULT_TSNE_ITERATIONS: usize = 1000;
    pub const DEFAULT_KMEANS_RESTARTS: usize = 10;
    pub const DEFAULT_PCA_DIMS: usize = 30;

    /// Merges command-line flags over an optional config file over defaults.
    /// The stage always comes from the subcommand.
    pub fn resolve(
        stage: Stage,
        file: Option<PartialRunConfig>,
        flags: PartialRunConfig,
    ) -> Result<RunConfig, PipelineError> {
        let file = file.unwrap_or_default();
        let input_dir = flags.input_dir.or(file.input_dir).ok_or_else(|| {
            PipelineError::Config(
                "no input directory: pass --in or set input_dir in the config file".into(),
            )
        })?;
        let output_dir = flags.output_dir.or(file.output_dir).ok_or_else(|| {
            PipelineError::Config(
                "no output directory: pass --out or set output_dir in the config file".into(),
            )
        })?;
        Ok(RunConfig {
            input_dir,
            output_dir,
            stage,
            seed: flags.seed.or(file.seed).unwrap_or(Self::DEFAULT_SEED),
            dependence_threshold: flags
                .dependence_threshold
                .or(file.dependence_threshold)
                .unwrap_or(Self::DEFAULT_THRESHOLD),
            perplexity: flags
                .perplexity
                .or(file.perplexity)
                .unwrap_or(Self::DEFAULT_PERPLEXITY),
            tsne_iterations: flags
                .tsne_iterations
                .or(file.tsne_iterations)
                .unwrap_or(Self::DEFAULT_TSNE_ITERATIONS),
            kmeans_restarts: flags
                .kmeans_restarts
                .or(file.kmeans_restarts)
                .unwrap_or(Self::DEFAULT_KMEANS_RESTARTS),
            pca_dims: flags.pca_dims.or(file.pca_dims).unwrap_or(Self::DEFAULT_PCA_DIMS),
            tsne_pre_pca: flags.tsne_pre_pca.or(file.tsne_pre_pca).unwrap_or(false),
        })
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    /// Unusable configuration or input that cannot satisfy it (exit code 2).
    #[error("{0}")]
    Config(String),
    /// The corpus itself is malformed (exit code 1).
    #[error(transparent)]
    Parse(LexiconError),
    #[error("failed to write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 2,
            PipelineError::Parse(_) | PipelineError::Io { .. } => 1,
        }
    }
}

fn validate(config: &RunConfig) -> Result<(), PipelineError> {
    let bad = |msg: String| Err(PipelineError::Config(msg));
    if !config.dependence_threshold.is_finite()
        || config.dependence_threshold <= 0.0
        || config.dependence_threshold > 100.0
    {
        return bad(format!(
            "dependence threshold must lie in (0, 100], got {}",
            config.dependence_threshold
        ));
    }
    if !config.perplexity.is_finite() || config.perplexity <= 0.0 {
        return bad(format!("perplexity must be positive, got {}", config.perplexity));
    }
    if config.tsne_iterations == 0 {
        return bad("t-SNE iteration count must be at least 1".into());
    }
    if config.kmeans_restarts == 0 {
        return bad("k-means restart count must be at least 1".into());
    }
    if config.pca_dims == 0 {
        return bad("PCA dimension count must be at least 1".into());
    }
    Ok(())
}

fn config_json(config: &RunConfig) -> String {
    let mut s = serde_json::to_string_pretty(config).expect("config serializes");
    s.push('\n');
    s
}

/// Runs the configured stage(s) and writes the artifacts. Returns the paths
/// written, `run_config.json` first.
pub fn run_pipeline(config: &RunConfig) -> Result<Vec<PathBuf>, PipelineError> {
    validate(config)?;

    let lexicon = lexicon::ingest_dir(&config.input_dir).map_err(|e| match e {
        LexiconError::EmptyInput { .. } | LexiconError::Io { .. } => {
            PipelineError::Config(e.to_string())
        }
        other => PipelineError::Parse(other),
    })?;
    for warning in &lexicon.warnings {
        eprintln!("warning: {warning}");
    }

    let stage = config.stage;
    let want = |s: Stage| stage == s || stage == Stage::All;
    let config_err = |e: &dyn std::fmt::Display| PipelineError::Config(e.to_string());

    let mut outputs: Vec<(&'static str, String)> = Vec::new();
    outputs.push(("run_config.json", config_json(config)));

    if want(Stage::Ingest) {
        outputs.push(("lexicon.json", report::lexicon_json(&lexicon)));
    }

    if stage == Stage::Ingest {
        return write_all(&config.output_dir, outputs);
    }

    // Every later stage builds on the vocabulary and class matrix.
    let vocab = matrix::build_vocabulary(&lexicon).map_err(|e| config_err(&e))?;
    let cm = matrix::class_matrix(&lexicon, &vocab).map_err(|e| config_err(&e))?;

    if want(Stage::Matrix) {
        let (_, frames) = matrix::unique_frames(&cm);
        let max_frame_size = frames.iter().map(|f| f.len()).max().unwrap_or(0);
        let possible =
            matrix::frame_combination_count(vocab.len() as u64, max_frame_size as u64)
                .map_err(|e| config_err(&e))?;
        outputs.push(("matrix.csv", report::matrix_csv(&cm)));
        outputs.push((
            "frames.json",
            report::frames_json(vocab.len(), max_frame_size, possible, &frames),
        ));
    }

    let rvs = matrix::expand_to_verbs(&cm);

    if want(Stage::Occurrence) {
        let om = occurrence::occurrence_matrix(&rvs).map_err(|e| config_err(&e))?;
        let pairs = occurrence::dependence_pairs(&om, config.dependence_threshold);
        outputs.push(("occurrence.csv", report::occurrence_csv(&om)));
        outputs.push((
            "dependence.json",
            report::dependence_json(&pairs, config.dependence_threshold),
        ));
    }

    if want(Stage::Cluster) || want(Stage::Tsne) {
        let pm = embedding::perturb(&rvs, config.seed);

        let reduced = if want(Stage::Cluster) || config.tsne_pre_pca {
            Some(embedding::pca_reduce(&pm, config.pca_dims).map_err(|e| config_err(&e))?)
        } else {
            None
        };

        if want(Stage::Cluster) {
            let sweep = embedding::cluster_sweep(
                reduced.as_ref().expect("reduced matrix computed above"),
                config.seed,
                config.kmeans_restarts,
            )
            .map_err(|e| config_err(&e))?;
            outputs.push(("clusters.json", report::clusters_json(&sweep)));
        }

        if want(Stage::Tsne) {
            let emb = if config.tsne_pre_pca {
                let rm = reduced.as_ref().expect("reduced matrix computed above");
                let run = embedding::tsne_rows(
                    &rm.values,
                    config.perplexity,
                    config.seed,
                    config.tsne_iterations,
                )
                .map_err(|e| config_err(&e))?;
                Embedding2D {
                    role_order: pm.role_order.clone(),
                    coords: run.coords,
                    seed: config.seed,
                    perplexity: config.perplexity,
                    kl_after_exaggeration: run.kl_after_exaggeration,
                    final_kl: run.final_kl,
                }
            } else {
                embedding::tsne(&pm, config.perplexity, config.seed, config.tsne_iterations)
                    .map_err(|e| config_err(&e))?
            };
            outputs.push(("tsne.csv", report::tsne_csv(&emb)));
            outputs.push(("tsne.svg", report::tsne_svg(&emb)));
        }
    }

    write_all(&config.output_dir, outputs)
}

fn write_all(
    dir: &Path,
    outputs: Vec<(&'static str, String)>,
) -> Result<Vec<PathBuf>, PipelineError> {
    let io_err = |path: &Path, source: std::io::Error| PipelineError::Io {
        path: path.display().to_string(),
        source,
    };
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut written: Vec<PathBuf> = Vec::with_capacity(outputs.len());
    for (name, content) in &outputs {
        let tmp = dir.join(format!(".{name}.tmp"));
        let target = dir.join(name);
        let result = fs::write(&tmp, content)
            .map_err(|e| io_err(&tmp, e))
            .and_then(|()| fs::rename(&tmp, &target).map_err(|e| io_err(&target, e)));
        match result {
            Ok(()) => written.push(target),
            Err(e) => {
                let _ = fs::remove_file(&tmp);
                for path in &written {
                    let _ = fs::remove_file(path);
                }
                return Err(e);
            }
        }
    }
    Ok(written)
}
