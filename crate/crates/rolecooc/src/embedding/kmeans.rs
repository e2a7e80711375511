//! Lloyd's k-means with kmeans++ seeding, and the k-sweep that surfaces
//! role-merge structure.
//!
//! Determinism and robustness rules: points are reassigned only when strictly
//! closer (so coincident points cannot oscillate), empty clusters are repaired
//! by reseeding them on the farthest point, and restarts differ only in the
//! seed offset with best inertia winning (earliest restart on ties).

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::pca::ReducedMatrix;
use super::EmbeddingError;
use crate::lexicon::Role;

/// One k-means solution.
#[derive(Clone, Debug, PartialEq)]
pub struct Clustering {
    pub k: usize,
    /// `assignment[sample]` is a cluster id in `0..k`; every id is used.
    pub assignment: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Sum of squared distances of each point to its assigned centroid.
    pub inertia: f64,
}

/// A role set first observed sharing a cluster at count `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeEvent {
    pub k: usize,
    pub roles: BTreeSet<Role>,
}

/// Clusterings for every k from n-1 down to 2 plus the merge order.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterSweepReport {
    pub role_order: Vec<Role>,
    /// Indexed by decreasing k: `clusterings[0]` has k = n-1.
    pub clusterings: Vec<Clustering>,
    pub merge_events: Vec<MergeEvent>,
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Inertia of an assignment against centroids recomputed as cluster means.
/// Used by tests so the solver and an exhaustive partition search are
/// measured with the same arithmetic.
#[cfg(test)]
pub(crate) fn partition_inertia(points: &[Vec<f64>], assignment: &[usize], k: usize) -> f64 {
    let dim = points.first().map_or(0, |p| p.len());
    let mut sums = vec![vec![0.0f64; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &a) in points.iter().zip(assignment) {
        counts[a] += 1;
        for (s, &x) in sums[a].iter_mut().zip(p) {
            *s += x;
        }
    }
    let centroids: Vec<Vec<f64>> = sums
        .into_iter()
        .zip(&counts)
        .map(|(s, &c)| {
            if c == 0 {
                s
            } else {
                s.into_iter().map(|x| x / c as f64).collect()
            }
        })
        .collect();
    points
        .iter()
        .zip(assignment)
        .map(|(p, &a)| dist2(p, &centroids[a]))
        .sum()
}

/// kmeans++ seeding: first centroid uniform, later ones sampled with
/// probability proportional to squared distance from the nearest chosen one.
fn seed_centroids(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(k);
    centroids.push(points[rng.random_range(0..n)].clone());
    let mut d2: Vec<f64> = points.iter().map(|p| dist2(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let chosen = if total > 0.0 {
            let x = rng.random_range(0.0..total);
            let mut acc = 0.0;
            let mut idx = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                acc += w;
                if x < acc {
                    idx = i;
                    break;
                }
            }
            idx
        } else {
            // All remaining mass is zero (coincident points): fall back to a
            // uniform draw so seeding still terminates.
            rng.random_range(0..n)
        };
        centroids.push(points[chosen].clone());
        for (i, p) in points.iter().enumerate() {
            let d = dist2(p, centroids.last().unwrap());
            if d < d2[i] {
                d2[i] = d;
            }
        }
    }
    centroids
}

/// One Lloyd run to the assignment fixpoint (at most `max_iter` rounds).
/// Returns the clustering plus the inertia measured after every assignment
/// step, in order.
fn lloyd(
    points: &[Vec<f64>],
    mut centroids: Vec<Vec<f64>>,
    max_iter: usize,
) -> (Clustering, Vec<f64>) {
    let n = points.len();
    let k = centroids.len();
    let dim = points[0].len();
    let mut assignment: Vec<usize> = vec![usize::MAX; n];
    let mut series = Vec::new();

    for _ in 0..max_iter {
        // Assignment: move a point only when strictly closer than its current
        // centroid, breaking fresh ties toward the lowest cluster id.
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let mut best = 0usize;
            let mut best_d = dist2(p, &centroids[0]);
            for (j, c) in centroids.iter().enumerate().skip(1) {
                let d = dist2(p, c);
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
            if assignment[i] == usize::MAX || best_d < dist2(p, &centroids[assignment[i]]) {
                assignment[i] = best;
                changed = true;
            }
        }
        series.push(
            points
                .iter()
                .zip(&assignment)
                .map(|(p, &a)| dist2(p, &centroids[a]))
                .sum(),
        );
        if !changed {
            break;
        }

        // Update: means, then repair any empty cluster by reseeding it on the
        // point farthest from its current centroid.
        let mut sums = vec![vec![0.0f64; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &a) in points.iter().zip(&assignment) {
            counts[a] += 1;
            for (s, &x) in sums[a].iter_mut().zip(p) {
                *s += x;
            }
        }
        for j in 0..k {
            if counts[j] > 0 {
                for (c, s) in centroids[j].iter_mut().zip(&sums[j]) {
                    *c = s / counts[j] as f64;
                }
            }
        }
        for j in 0..k {
            if counts[j] == 0 {
                // Only points whose cluster keeps another member are
                // candidates, so repairing one cluster never empties another;
                // such a point always exists because k < n.
                let farthest = points
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| counts[assignment[*i]] > 1)
                    .map(|(i, p)| (i, dist2(p, &centroids[assignment[i]])))
                    .max_by(|(_, a), (_, b)| a.partial_cmp(b).unwrap())
                    .map(|(i, _)| i)
                    .expect("a donatable point exists whenever k < n");
                centroids[j] = points[farthest].clone();
                counts[assignment[farthest]] -= 1;
                assignment[farthest] = j;
                counts[j] = 1;
            }
        }
    }

    let inertia = points
        .iter()
        .zip(&assignment)
        .map(|(p, &a)| dist2(p, &centroids[a]))
        .sum();
    (
        Clustering {
            k,
            assignment,
            centroids,
            inertia,
        },
        series,
    )
}

/// Seeded k-means over raw points with restarts; the lowest-inertia run wins,
/// ties going to the earliest restart.
pub fn kmeans_points(
    points: &[Vec<f64>],
    k: usize,
    seed: u64,
    restarts: usize,
) -> Result<Clustering, EmbeddingError> {
    let n = points.len();
    if k < 2 || k >= n {
        return Err(EmbeddingError::BadK { k, samples: n });
    }
    let dim = points[0].len();
    assert!(points.iter().all(|p| p.len() == dim), "ragged point set");
    let restarts = restarts.max(1);
    let mut best: Option<Clustering> = None;
    for r in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(r as u64));
        let init = seed_centroids(points, k, &mut rng);
        let (clustering, _) = lloyd(points, init, 300);
        if best.as_ref().is_none_or(|b| clustering.inertia < b.inertia) {
            best = Some(clustering);
        }
    }
    Ok(best.expect("at least one restart runs"))
}

/// Single seeded Lloyd run, exposing the per-assignment inertia series.
pub fn lloyd_trace(points: &[Vec<f64>], k: usize, seed: u64) -> Result<(Clustering, Vec<f64>), EmbeddingError> {
    let n = points.len();
    if k < 2 || k >= n {
        return Err(EmbeddingError::BadK { k, samples: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let init = seed_centroids(points, k, &mut rng);
    Ok(lloyd(points, init, 300))
}

/// k-means over PCA scores.
pub fn kmeans(
    rm: &ReducedMatrix,
    k: usize,
    seed: u64,
    restarts: usize,
) -> Result<Clustering, EmbeddingError> {
    kmeans_points(&rm.values, k, seed, restarts)
}

/// Runs k-means for every k from n-1 down to 2 and records, per k, which
/// multi-role cluster contents appear for the first time.
pub fn cluster_sweep(
    rm: &ReducedMatrix,
    seed: u64,
    restarts: usize,
) -> Result<ClusterSweepReport, EmbeddingError> {
    let n = rm.values.len();
    if rm.role_order.len() != n {
        return Err(EmbeddingError::DegenerateInput {
            detail: format!(
                "sweep needs one role label per sample, got {} labels for {} samples",
                rm.role_order.len(),
                n
            ),
        });
    }
    if n < 3 {
        return Err(EmbeddingError::BadK { k: 2, samples: n });
    }

    let mut clusterings = Vec::with_capacity(n - 2);
    let mut merge_events = Vec::new();
    let mut seen: BTreeSet<BTreeSet<Role>> = BTreeSet::new();
    for k in (2..=n - 1).rev() {
        let clustering = kmeans_points(&rm.values, k, seed, restarts)?;
        let mut groups: BTreeMap<usize, BTreeSet<Role>> = BTreeMap::new();
        for (i, &a) in clustering.assignment.iter().enumerate() {
            groups.entry(a).or_default().insert(rm.role_order[i].clone());
        }
        // New multi-role sets at this k, in lexicographic order of the sets.
        let mut fresh: Vec<BTreeSet<Role>> = groups
            .into_values()
            .filter(|set| set.len() >= 2 && !seen.contains(set))
            .collect();
        fresh.sort();
        for set in fresh {
            seen.insert(set.clone());
            merge_events.push(MergeEvent { k, roles: set });
        }
        clusterings.push(clustering);
    }

    Ok(ClusterSweepReport {
        role_order: rm.role_order.clone(),
        clusterings,
        merge_events,
    })
}
