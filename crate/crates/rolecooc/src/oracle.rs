//! Independent occurrence oracle for small corpora.
//!
//! Recomputes the conditional occurrence percentages straight from the class
//! files by materializing one explicit role set per verb slot and counting
//! with a double loop over role pairs. No compression, no matrices, no code
//! shared with the occurrence module beyond the XML parser itself. Capped to
//! small inputs so the naive route stays obviously correct.

use std::collections::BTreeSet;
use std::path::Path;

use thiserror::Error;

use crate::lexicon::{self, LexiconError, Role, VerbClassNode};

const MAX_ROLES: usize = 10;
const MAX_SLOTS: usize = 200;

/// Occurrence percentages computed the slow, transparent way.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleMatrix {
    pub roles: Vec<Role>,
    pub percent: Vec<Vec<f64>>,
    pub support: Vec<u64>,
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error(transparent)]
    Parse(#[from] LexiconError),
    #[error("oracle limits exceeded: {roles} roles (max {MAX_ROLES}), {slots} verb slots (max {MAX_SLOTS})")]
    ScaleExceeded { roles: usize, slots: usize },
}

fn collect_slots(
    node: &VerbClassNode,
    inherited: &BTreeSet<Role>,
    slots: &mut Vec<BTreeSet<Role>>,
    alphabet: &mut BTreeSet<Role>,
) {
    let mut frame = inherited.clone();
    frame.extend(node.declared_roles.iter().cloned());
    alphabet.extend(frame.iter().cloned());
    for _ in &node.members {
        slots.push(frame.clone());
    }
    for child in &node.children {
        collect_slots(child, &frame, slots, alphabet);
    }
}

/// Reads a corpus directory and recomputes the occurrence matrix by brute
/// force: every member verb becomes one slot holding its full inherited role
/// set, and each (row, column) percentage is counted over the slot list.
pub fn oracle_occurrence(dir: &Path) -> Result<OracleMatrix, OracleError> {
    let nodes = lexicon::read_class_files(dir)?;
    let mut slots: Vec<BTreeSet<Role>> = Vec::new();
    let mut alphabet: BTreeSet<Role> = BTreeSet::new();
    for (_, node) in &nodes {
        collect_slots(node, &BTreeSet::new(), &mut slots, &mut alphabet);
    }
    if alphabet.len() > MAX_ROLES || slots.len() > MAX_SLOTS {
        return Err(OracleError::ScaleExceeded {
            roles: alphabet.len(),
            slots: slots.len(),
        });
    }
    let roles: Vec<Role> = alphabet.into_iter().collect();
    let mut percent = vec![vec![0.0f64; roles.len()]; roles.len()];
    let mut support = vec![0u64; roles.len()];
    for (r, row_role) in roles.iter().enumerate() {
        let with_row: u64 = slots.iter().filter(|s| s.contains(row_role)).count() as u64;
        support[r] = with_row;
        if with_row == 0 {
            continue;
        }
        for (c, col_role) in roles.iter().enumerate() {
            let with_both: u64 = slots
                .iter()
                .filter(|s| s.contains(row_role) && s.contains(col_role))
                .count() as u64;
            percent[r][c] = (100.0 * with_both as f64) / (with_row as f64);
        }
    }
    Ok(OracleMatrix {
        roles,
        percent,
        support,
    })
}
