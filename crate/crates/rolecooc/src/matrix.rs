//! Role vectorization.
//!
//! Turns a compressed lexicon into a binary class-by-role matrix, expands
//! class rows into per-verb role vectors, and counts frames: the distinct
//! role combinations observed versus the combinatorially possible ones.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::lexicon::{Lexicon, Role};

/// The role alphabet of a lexicon, in lexicographic order of the labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoleVocabulary {
    roles: Vec<Role>,
    index: HashMap<Role, usize>,
}

impl RoleVocabulary {
    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn len(&self) -> usize {
        self.roles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roles.is_empty()
    }

    /// Index of `role` in lexicographic order, if present.
    pub fn position(&self, role: &Role) -> Option<usize> {
        self.index.get(role).copied()
    }
}

/// Binary class-by-role incidence: one row per effective class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassMatrix {
    pub class_ids: Vec<String>,
    pub member_counts: Vec<usize>,
    /// Vocabulary order, copied so the matrix is self-describing.
    pub role_order: Vec<Role>,
    /// `bits[class][role]` is 1 when the class frame carries the role.
    pub bits: Vec<Vec<u8>>,
}

/// Per-verb role vectors: each class row repeated once per member token.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoleVectorSet {
    pub role_order: Vec<Role>,
    pub vectors: Vec<Vec<u8>>,
}

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("lexicon has no classes")]
    EmptyLexicon,
    #[error("class {class:?} carries role {role:?} which is not in the vocabulary")]
    UnknownRole { class: String, role: String },
    #[error("frame combination count is undefined for n={n}, k_max={k_max}")]
    DomainError { n: u64, k_max: u64 },
}

/// Collects every role occurring in any class frame, sorted lexicographically.
pub fn build_vocabulary(lexicon: &Lexicon) -> Result<RoleVocabulary, MatrixError> {
    if lexicon.classes.is_empty() {
        return Err(MatrixError::EmptyLexicon);
    }
    let set: BTreeSet<&Role> = lexicon.classes.iter().flat_map(|c| c.frame.iter()).collect();
    let roles: Vec<Role> = set.into_iter().cloned().collect();
    let index = roles
        .iter()
        .enumerate()
        .map(|(i, r)| (r.clone(), i))
        .collect();
    Ok(RoleVocabulary { roles, index })
}

/// Builds the binary class-by-role matrix in lexicon class order.
pub fn class_matrix(lexicon: &Lexicon, vocab: &RoleVocabulary) -> Result<ClassMatrix, MatrixError> {
    if lexicon.classes.is_empty() {
        return Err(MatrixError::EmptyLexicon);
    }
    let mut bits = Vec::with_capacity(lexicon.classes.len());
    for class in &lexicon.classes {
        let mut row = vec![0u8; vocab.len()];
        for role in &class.frame {
            let Some(i) = vocab.position(role) else {
                return Err(MatrixError::UnknownRole {
                    class: class.id.clone(),
                    role: role.name().to_string(),
                });
            };
            row[i] = 1;
        }
        bits.push(row);
    }
    Ok(ClassMatrix {
        class_ids: lexicon.classes.iter().map(|c| c.id.clone()).collect(),
        member_counts: lexicon.classes.iter().map(|c| c.member_count).collect(),
        role_order: vocab.roles().to_vec(),
        bits,
    })
}

/// Expands class rows to verb tokens: each row repeated `member_count` times,
/// in class order. Classes with zero members contribute nothing.
pub fn expand_to_verbs(cm: &ClassMatrix) -> RoleVectorSet {
    let total: usize = cm.member_counts.iter().sum();
    let mut vectors = Vec::with_capacity(total);
    for (row, &count) in cm.bits.iter().zip(&cm.member_counts) {
        for _ in 0..count {
            vectors.push(row.clone());
        }
    }
    RoleVectorSet {
        role_order: cm.role_order.clone(),
        vectors,
    }
}

/// Distinct role frames among the classes, ordered by their sorted role lists.
pub fn unique_frames(cm: &ClassMatrix) -> (usize, BTreeSet<BTreeSet<Role>>) {
    let mut frames: BTreeSet<BTreeSet<Role>> = BTreeSet::new();
    for row in &cm.bits {
        let frame: BTreeSet<Role> = row
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == 1)
            .map(|(i, _)| cm.role_order[i].clone())
            .collect();
        frames.insert(frame);
    }
    (frames.len(), frames)
}

/// Number of non-empty role combinations of size at most `k_max` drawn from
/// `n` roles: the sum over k of C(n, k).
///
/// Exact integer arithmetic; `n` up to 64 is supported without overflow.
pub fn frame_combination_count(n: u64, k_max: u64) -> Result<u64, MatrixError> {
    if n == 0 || k_max == 0 || k_max > n || n > 64 {
        return Err(MatrixError::DomainError { n, k_max });
    }
    let mut total: u128 = 0;
    let mut binom: u128 = 1; // C(n, 0)
    for k in 1..=k_max as u128 {
        // C(n, k) = C(n, k-1) * (n - k + 1) / k, exact at every step.
        binom = binom * (n as u128 - k + 1) / k;
        total += binom;
    }
    u64::try_from(total).map_err(|_| MatrixError::DomainError { n, k_max })
}
