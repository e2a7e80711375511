//! Exact t-SNE in two dimensions.
//!
//! Textbook gradient descent on the KL divergence between the high-dimensional
//! Gaussian neighbor distribution (bandwidths fit per row by binary search on
//! entropy) and the 2-D Student-t distribution. No tree approximation: the
//! inputs here are a few dozen role rows, so the exact n-squared gradient is
//! cheap and keeps the output reproducible bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{EmbeddingError, PerturbedMatrix};
use crate::lexicon::Role;

const EXAGGERATION: f64 = 12.0;
const SWITCH_ITER: usize = 250;
const LEARNING_RATE: f64 = 100.0;
const PROB_FLOOR: f64 = 1e-12;
const ENTROPY_TOL: f64 = 1e-5;
const MAX_BISECTIONS: usize = 50;

/// A finished 2-D embedding with its convergence bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding2D {
    pub role_order: Vec<Role>,
    pub coords: Vec<[f64; 2]>,
    pub seed: u64,
    pub perplexity: f64,
    /// KL divergence against the plain (unexaggerated) P at the moment early
    /// exaggeration was removed; equals `final_kl` for runs that end sooner.
    pub kl_after_exaggeration: f64,
    pub final_kl: f64,
}

/// Raw t-SNE output before role labels are attached.
#[derive(Clone, Debug, PartialEq)]
pub struct TsneRun {
    pub coords: Vec<[f64; 2]>,
    pub kl_after_exaggeration: f64,
    pub final_kl: f64,
}

/// Embeds the perturbed role rows (one sample per role) in 2-D.
pub fn tsne(
    pm: &PerturbedMatrix,
    perplexity: f64,
    seed: u64,
    iterations: usize,
) -> Result<Embedding2D, EmbeddingError> {
    let run = tsne_rows(&pm.values, perplexity, seed, iterations)?;
    Ok(Embedding2D {
        role_order: pm.role_order.clone(),
        coords: run.coords,
        seed,
        perplexity,
        kl_after_exaggeration: run.kl_after_exaggeration,
        final_kl: run.final_kl,
    })
}

/// Exact t-SNE over unlabeled rows.
pub fn tsne_rows(
    rows: &[Vec<f64>],
    perplexity: f64,
    seed: u64,
    iterations: usize,
) -> Result<TsneRun, EmbeddingError> {
    let n = rows.len();
    if n < 4 {
        return Err(EmbeddingError::BadPerplexity {
            perplexity,
            samples: n,
            detail: "need at least 4 samples".into(),
        });
    }
    if !(perplexity > 0.0) || perplexity >= (n - 1) as f64 / 3.0 {
        return Err(EmbeddingError::BadPerplexity {
            perplexity,
            samples: n,
            detail: format!("perplexity must lie in (0, {})", (n - 1) as f64 / 3.0),
        });
    }
    let dim = rows[0].len();
    assert!(rows.iter().all(|r| r.len() == dim), "ragged row set");

    // Pairwise squared distances in the original space.
    let mut d2 = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d: f64 = rows[i]
                .iter()
                .zip(&rows[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            d2[i][j] = d;
            d2[j][i] = d;
        }
    }

    // Symmetrized, floored joint distribution.
    let mut p = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        let row = conditional_row(&d2[i], i, perplexity);
        for j in 0..n {
            p[i][j] += row[j] / (2.0 * n as f64);
            p[j][i] += row[j] / (2.0 * n as f64);
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i != j {
                p[i][j] = p[i][j].max(PROB_FLOOR);
            }
        }
    }

    // Small Gaussian start so early exaggeration drives the layout.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y: Vec<[f64; 2]> = (0..n)
        .map(|_| {
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            [1e-4 * a, 1e-4 * b]
        })
        .collect();
    let mut vel = vec![[0.0f64; 2]; n];
    let mut grad = vec![[0.0f64; 2]; n];
    let mut kl_after_exaggeration = None;

    for iter in 0..iterations {
        if iter == SWITCH_ITER {
            kl_after_exaggeration = Some(kl_divergence(&p, &y));
        }
        let exaggeration = if iter < SWITCH_ITER { EXAGGERATION } else { 1.0 };
        let momentum = if iter < SWITCH_ITER { 0.5 } else { 0.8 };

        let (num, sum_q) = student_t_numerators(&y);
        for i in 0..n {
            let mut g = [0.0f64; 2];
            for j in 0..n {
                if j == i {
                    continue;
                }
                let q = (num[i][j] / sum_q).max(PROB_FLOOR);
                let mult = (exaggeration * p[i][j] - q) * num[i][j];
                g[0] += mult * (y[i][0] - y[j][0]);
                g[1] += mult * (y[i][1] - y[j][1]);
            }
            grad[i] = [4.0 * g[0], 4.0 * g[1]];
        }
        for i in 0..n {
            vel[i][0] = momentum * vel[i][0] - LEARNING_RATE * grad[i][0];
            vel[i][1] = momentum * vel[i][1] - LEARNING_RATE * grad[i][1];
            y[i][0] += vel[i][0];
            y[i][1] += vel[i][1];
        }
        recenter(&mut y);
    }

    recenter(&mut y);
    let final_kl = kl_divergence(&p, &y);
    Ok(TsneRun {
        coords: y,
        kl_after_exaggeration: kl_after_exaggeration.unwrap_or(final_kl),
        final_kl,
    })
}

/// Conditional Gaussian distribution for one row, its bandwidth bisected
/// until the entropy matches `ln(perplexity)` within `ENTROPY_TOL` (at most
/// `MAX_BISECTIONS` steps).
fn conditional_row(d2_row: &[f64], i: usize, perplexity: f64) -> Vec<f64> {
    let n = d2_row.len();
    let target = perplexity.ln();
    // Shifting by the smallest off-diagonal distance keeps exp() away from
    // total underflow; entropy and the normalized row are shift-invariant.
    let shift = d2_row
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &d)| d)
        .fold(f64::INFINITY, f64::min);
    let mut beta = 1.0f64;
    let mut beta_min = f64::NEG_INFINITY;
    let mut beta_max = f64::INFINITY;
    let mut p = vec![0.0f64; n];
    for _ in 0..MAX_BISECTIONS {
        let mut z = 0.0;
        let mut weighted = 0.0;
        for j in 0..n {
            if j == i {
                p[j] = 0.0;
                continue;
            }
            let d = d2_row[j] - shift;
            let w = (-beta * d).exp();
            p[j] = w;
            z += w;
            weighted += w * d;
        }
        let entropy = z.ln() + beta * weighted / z;
        let diff = entropy - target;
        if diff.abs() < ENTROPY_TOL {
            break;
        }
        if diff > 0.0 {
            beta_min = beta;
            beta = if beta_max.is_infinite() {
                beta * 2.0
            } else {
                (beta + beta_max) / 2.0
            };
        } else {
            beta_max = beta;
            beta = if beta_min.is_infinite() {
                beta / 2.0
            } else {
                (beta + beta_min) / 2.0
            };
        }
    }
    let z: f64 = p.iter().sum();
    if z > 0.0 {
        for v in &mut p {
            *v /= z;
        }
    }
    p
}

/// Student-t kernel numerators `1 / (1 + |y_i - y_j|^2)` and their total.
fn student_t_numerators(y: &[[f64; 2]]) -> (Vec<Vec<f64>>, f64) {
    let n = y.len();
    let mut num = vec![vec![0.0f64; n]; n];
    let mut sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = y[i][0] - y[j][0];
            let dy = y[i][1] - y[j][1];
            let v = 1.0 / (1.0 + dx * dx + dy * dy);
            num[i][j] = v;
            num[j][i] = v;
            sum += 2.0 * v;
        }
    }
    (num, sum)
}

fn kl_divergence(p: &[Vec<f64>], y: &[[f64; 2]]) -> f64 {
    let n = y.len();
    let (num, sum_q) = student_t_numerators(y);
    let mut kl = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let q = (num[i][j] / sum_q).max(PROB_FLOOR);
                kl += p[i][j] * (p[i][j] / q).ln();
            }
        }
    }
    kl
}

fn recenter(y: &mut [[f64; 2]]) {
    let n = y.len() as f64;
    let mut mean = [0.0f64; 2];
    for yi in y.iter() {
        mean[0] += yi[0];
        mean[1] += yi[1];
    }
    mean[0] /= n;
    mean[1] /= n;
    for yi in y.iter_mut() {
        yi[0] -= mean[0];
        yi[1] -= mean[1];
    }
}
