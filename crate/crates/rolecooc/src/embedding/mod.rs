//! Structure-revealing embeddings over role columns.
//!
//! The occurrence matrix says which role pairs co-occur; this module makes
//! the grouping visible. Binary role columns are perturbed (zeros replaced by
//! uniform noise so identical columns stay close while everything else
//! scatters), optionally PCA-reduced, then swept with k-means and embedded in
//! 2-D with exact t-SNE.

mod kmeans;
mod pca;
mod tsne;

pub use kmeans::{cluster_sweep, kmeans, kmeans_points, lloyd_trace, ClusterSweepReport, Clustering, MergeEvent};
pub use pca::{pca_reduce, pca_rows, ReducedMatrix};
pub use tsne::{tsne, tsne_rows, Embedding2D, TsneRun};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::lexicon::Role;
use crate::matrix::RoleVectorSet;

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("input is degenerate: {detail}")]
    DegenerateInput { detail: String },
    #[error("k={k} is out of range for {samples} samples (need 2 <= k < samples)")]
    BadK { k: usize, samples: usize },
    #[error("perplexity {perplexity} is invalid for {samples} samples: {detail}")]
    BadPerplexity {
        perplexity: f64,
        samples: usize,
        detail: String,
    },
}

/// Role-by-verb matrix after noise perturbation: rows are roles (transposed
/// from the verb vectors), ones kept, zeros replaced by uniform noise.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbedMatrix {
    pub role_order: Vec<Role>,
    /// `values[role][verb]`.
    pub values: Vec<Vec<f64>>,
    pub seed: u64,
}

/// Transposes verb vectors into role rows and perturbs: entries equal to 1
/// stay exactly 1.0, entries equal to 0 become independent draws from the
/// open interval (-1, 1).
///
/// Draws come from a `ChaCha8Rng` seeded with `seed` and are consumed in
/// row-major order over the zero cells, so the output is a pure function of
/// the input and the seed.
pub fn perturb(rvs: &RoleVectorSet, seed: u64) -> PerturbedMatrix {
    let n_roles = rvs.role_order.len();
    let n_verbs = rvs.vectors.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = vec![vec![0.0f64; n_verbs]; n_roles];
    for (r, row) in values.iter_mut().enumerate() {
        for (v, cell) in row.iter_mut().enumerate() {
            if rvs.vectors[v][r] == 1 {
                *cell = 1.0;
            } else {
                // random_range on -1.0..1.0 is half-open: 1.0 is excluded,
                // -1.0 is possible and rejected to keep the interval open.
                *cell = loop {
                    let draw = rng.random_range(-1.0..1.0);
                    if draw != -1.0 {
                        break draw;
                    }
                };
            }
        }
    }
    PerturbedMatrix {
        role_order: rvs.role_order.clone(),
        values,
        seed,
    }
}
