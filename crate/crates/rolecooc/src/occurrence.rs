//! Conditional role co-occurrence.
//!
//! For every ordered role pair (r, c): of the verbs whose frame carries r,
//! the percentage whose frame also carries c. Counts are exact integers and
//! the single division happens last, so the verb-expanded and member-weighted
//! routes produce bit-identical floats.

use thiserror::Error;

use crate::lexicon::Role;
use crate::matrix::{ClassMatrix, RoleVectorSet};

/// Conditional occurrence percentages over a role alphabet.
///
/// `percent[r][c]` answers: of the verbs carrying role `r`, what percentage
/// also carry role `c`. Rows with zero support are all zero.
#[derive(Clone, Debug, PartialEq)]
pub struct OccurrenceMatrix {
    pub role_order: Vec<Role>,
    pub percent: Vec<Vec<f64>>,
    /// Verbs carrying each role (row denominators).
    pub support: Vec<u64>,
    /// Verbs carrying both roles (numerators before scaling).
    pub common: Vec<Vec<u64>>,
}

/// One high-dependence pair: `dependent` nearly never occurs without
/// `context`.
#[derive(Clone, Debug, PartialEq)]
pub struct DependencePair {
    pub dependent: Role,
    pub context: Role,
    pub percent: f64,
}

#[derive(Debug, Error)]
pub enum OccurrenceError {
    #[error("column length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("occurrence matrix requires a non-empty role alphabet")]
    EmptyVocabulary,
}

/// Number of positions where both binary columns are 1.
pub fn common_count(a: &[u8], b: &[u8]) -> Result<u64, OccurrenceError> {
    if a.len() != b.len() {
        return Err(OccurrenceError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.iter().zip(b).filter(|(&x, &y)| x == 1 && y == 1).count() as u64)
}

fn from_counts(
    role_order: Vec<Role>,
    common: Vec<Vec<u64>>,
) -> Result<OccurrenceMatrix, OccurrenceError> {
    if role_order.is_empty() {
        return Err(OccurrenceError::EmptyVocabulary);
    }
    let support: Vec<u64> = (0..role_order.len()).map(|r| common[r][r]).collect();
    let percent = common
        .iter()
        .zip(&support)
        .map(|(row, &s)| {
            row.iter()
                .map(|&n| {
                    if s == 0 {
                        0.0
                    } else {
                        (100.0 * n as f64) / (s as f64)
                    }
                })
                .collect()
        })
        .collect();
    Ok(OccurrenceMatrix {
        role_order,
        percent,
        support,
        common,
    })
}

/// Builds the occurrence matrix from expanded per-verb role vectors.
pub fn occurrence_matrix(rvs: &RoleVectorSet) -> Result<OccurrenceMatrix, OccurrenceError> {
    if rvs.role_order.is_empty() {
        return Err(OccurrenceError::EmptyVocabulary);
    }
    let k = rvs.role_order.len();
    let mut common = vec![vec![0u64; k]; k];
    for v in &rvs.vectors {
        for r in 0..k {
            if v[r] == 1 {
                for c in 0..k {
                    if v[c] == 1 {
                        common[r][c] += 1;
                    }
                }
            }
        }
    }
    from_counts(rvs.role_order.clone(), common)
}

/// Builds the same matrix without expansion, weighting each class row by its
/// member count. Produces floats bit-identical to [`occurrence_matrix`].
pub fn occurrence_matrix_weighted(cm: &ClassMatrix) -> Result<OccurrenceMatrix, OccurrenceError> {
    if cm.role_order.is_empty() {
        return Err(OccurrenceError::EmptyVocabulary);
    }
    let k = cm.role_order.len();
    let mut common = vec![vec![0u64; k]; k];
    for (row, &m) in cm.bits.iter().zip(&cm.member_counts) {
        if m == 0 {
            continue;
        }
        for r in 0..k {
            if row[r] == 1 {
                for c in 0..k {
                    if row[c] == 1 {
                        common[r][c] += m as u64;
                    }
                }
            }
        }
    }
    from_counts(cm.role_order.clone(), common)
}

/// Off-diagonal entries at or above `threshold`, sorted by percentage
/// descending, then by dependent and context label.
pub fn dependence_pairs(om: &OccurrenceMatrix, threshold: f64) -> Vec<DependencePair> {
    let k = om.role_order.len();
    let mut pairs = Vec::new();
    for r in 0..k {
        for c in 0..k {
            if r != c && om.percent[r][c] >= threshold {
                pairs.push(DependencePair {
                    dependent: om.role_order[r].clone(),
                    context: om.role_order[c].clone(),
                    percent: om.percent[r][c],
                });
            }
        }
    }
    pairs.sort_by(|a, b| {
        b.percent
            .partial_cmp(&a.percent)
            .expect("occurrence percentages are finite")
            .then_with(|| a.dependent.cmp(&b.dependent))
            .then_with(|| a.context.cmp(&b.context))
    });
    pairs
}
