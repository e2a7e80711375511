//! Thematic-role co-occurrence analysis over VerbNet-style class lexicons.
//!
//! The pipeline runs in five steps:
//!
//! 1. **lexicon** — parse class XML files, apply role inheritance, and
//!    compress the subclass hierarchy into effective classes.
//! 2. **matrix** — order the role vocabulary, build the binary class-role
//!    matrix, expand it to per-verb role vectors, and count frames.
//! 3. **occurrence** — compute the conditional co-occurrence matrix
//!    ("of the verbs carrying role r, what percentage also carry role c")
//!    and extract high-dependence pairs.
//! 4. **embedding** — perturb the role columns with seeded noise, reduce with
//!    PCA, sweep k-means for merge structure, and embed in 2-D with exact
//!    t-SNE.
//! 5. **report** — emit everything as deterministic CSV / JSON / SVG files.
//!
//! The `fixture` module generates synthetic corpora with planted role
//! dependencies; `oracle` recomputes occurrence percentages by brute force so
//! the pipeline's answers can be checked independently end to end.
//!
//! Everything is deterministic: file ingestion order is sorted, collections
//! with iteration order are B-tree based, and all randomness flows from
//! explicit `ChaCha8Rng` seeds.

pub mod embedding;
pub mod fixture;
pub mod lexicon;
pub mod matrix;
pub mod occurrence;
pub mod oracle;
pub mod pipeline;
pub mod report;

pub use embedding::{
    cluster_sweep, kmeans, kmeans_points, lloyd_trace, pca_reduce, pca_rows, perturb, tsne,
    tsne_rows, ClusterSweepReport, Clustering, Embedding2D, EmbeddingError, MergeEvent,
    PerturbedMatrix, ReducedMatrix, TsneRun,
};
pub use fixture::{
    generate_fixture, write_fixture, FixtureClass, FixtureError, FixtureSpec, PlantedDependency,
};
pub use lexicon::{
    compress, effective_frame, ingest_dir, parse_class_file, EffectiveClass, Lexicon,
    LexiconError, Role, SourceStats, VerbClassNode,
};
pub use matrix::{
    build_vocabulary, class_matrix, expand_to_verbs, frame_combination_count, unique_frames,
    ClassMatrix, MatrixError, RoleVectorSet, RoleVocabulary,
};
pub use occurrence::{
    common_count, dependence_pairs, occurrence_matrix, occurrence_matrix_weighted,
    DependencePair, OccurrenceError, OccurrenceMatrix,
};
pub use oracle::{oracle_occurrence, OracleError, OracleMatrix};
pub use pipeline::{run_pipeline, PartialRunConfig, PipelineError, RunConfig, Stage};
