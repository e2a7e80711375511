//! Synthetic corpus generation.
//!
//! Takes a declarative spec (roles, class frames with member counts, planted
//! role dependencies), validates that it is realizable, and emits class XML
//! files the ingestion pipeline accepts. Frames are realized exactly as
//! specified; the seed only varies the invented member lemmas.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One generated class: a role frame and how many member verbs to invent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureClass {
    pub frame: Vec<String>,
    pub members: usize,
}

/// Claim that `dependent` never occurs without `context`; every class frame
/// containing the dependent must contain the context.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedDependency {
    pub dependent: String,
    pub context: String,
}

/// Declarative description of a synthetic corpus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureSpec {
    pub roles: Vec<String>,
    pub classes: Vec<FixtureClass>,
    #[serde(default)]
    pub planted_dependencies: Vec<PlantedDependency>,
}

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("unsatisfiable fixture spec: {reason}")]
    UnsatisfiableSpec { reason: String },
    #[error("failed to write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn unsat(reason: impl Into<String>) -> FixtureError {
    FixtureError::UnsatisfiableSpec {
        reason: reason.into(),
    }
}

fn role_label_ok(label: &str) -> bool {
    !label.is_empty()
        && label
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.' | '+'))
}

fn validate(spec: &FixtureSpec) -> Result<(), FixtureError> {
    if spec.roles.is_empty() {
        return Err(unsat("no roles declared"));
    }
    let mut seen = HashSet::new();
    for label in &spec.roles {
        if !role_label_ok(label) {
            return Err(unsat(format!(
                "role label {label:?} is not plain (letters, digits, '_', '-', '.', '+')"
            )));
        }
        if !seen.insert(label.as_str()) {
            return Err(unsat(format!("role {label:?} declared twice")));
        }
    }
    if spec.classes.is_empty() {
        return Err(unsat("no classes declared"));
    }
    for (i, class) in spec.classes.iter().enumerate() {
        if class.frame.is_empty() {
            return Err(unsat(format!("class {i} has an empty frame")));
        }
        let mut in_frame = HashSet::new();
        for role in &class.frame {
            if !seen.contains(role.as_str()) {
                return Err(unsat(format!(
                    "class {i} uses role {role:?} which is not declared"
                )));
            }
            if !in_frame.insert(role.as_str()) {
                return Err(unsat(format!("class {i} lists role {role:?} twice")));
            }
        }
    }
    for dep in &spec.planted_dependencies {
        if dep.dependent == dep.context {
            return Err(unsat(format!(
                "dependency of {0:?} on itself is meaningless",
                dep.dependent
            )));
        }
        for label in [&dep.dependent, &dep.context] {
            if !seen.contains(label.as_str()) {
                return Err(unsat(format!(
                    "dependency references undeclared role {label:?}"
                )));
            }
        }
        let mut support = 0usize;
        for (i, class) in spec.classes.iter().enumerate() {
            let has_dep = class.frame.iter().any(|r| r == &dep.dependent);
            let has_ctx = class.frame.iter().any(|r| r == &dep.context);
            if has_dep && !has_ctx {
                return Err(unsat(format!(
                    "class {i} carries {0:?} without {1:?}, breaking the planted dependency",
                    dep.dependent, dep.context
                )));
            }
            if has_dep {
                support += class.members;
            }
        }
        if support == 0 {
            return Err(unsat(format!(
                "dependent role {0:?} has no member verbs, so the dependency cannot be observed",
                dep.dependent
            )));
        }
    }
    Ok(())
}

const ONSETS: &[&str] = &[
    "b", "bl", "br", "cl", "cr", "d", "dr", "fl", "g", "gl", "gr", "h", "j", "k", "l", "m", "n",
    "p", "pl", "pr", "r", "s", "sk", "sl", "sn", "sp", "st", "str", "sw", "t", "tr", "v", "w",
];
const NUCLEI: &[&str] = &["a", "e", "i", "o", "u", "ai", "ea", "ee", "oo", "ou"];
const CODAS: &[&str] = &[
    "b", "ck", "d", "g", "k", "l", "ll", "m", "n", "nd", "ng", "nk", "p", "r", "rk", "sh", "sk",
    "st", "t", "tch", "x",
];

fn pseudo_verb(rng: &mut ChaCha8Rng, taken: &mut HashSet<String>) -> String {
    loop {
        let mut word = String::new();
        word.push_str(ONSETS[rng.random_range(0..ONSETS.len())]);
        word.push_str(NUCLEI[rng.random_range(0..NUCLEI.len())]);
        if rng.random_range(0..3) == 0 {
            word.push_str(ONSETS[rng.random_range(0..ONSETS.len())]);
            word.push_str(NUCLEI[rng.random_range(0..NUCLEI.len())]);
        }
        word.push_str(CODAS[rng.random_range(0..CODAS.len())]);
        if taken.insert(word.clone()) {
            return word;
        }
        // Collision: salt with a counter so generation always terminates.
        let salted = format!("{word}_{}", taken.len());
        if taken.insert(salted.clone()) {
            return salted;
        }
    }
}

/// Generates `(file_name, xml)` pairs realizing the spec. Class ids follow
/// file-name order, so ingestion sees the classes in spec order.
pub fn generate_fixture(
    spec: &FixtureSpec,
    seed: u64,
) -> Result<Vec<(String, String)>, FixtureError> {
    validate(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut taken = HashSet::new();
    let width = spec.classes.len().to_string().len().max(3);
    let mut files = Vec::with_capacity(spec.classes.len());
    for (i, class) in spec.classes.iter().enumerate() {
        let id = format!("class-{i:0width$}");
        let mut xml = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        xml.push_str(&format!("<VNCLASS ID=\"{id}\">\n"));
        xml.push_str("  <THEMROLES>\n");
        for role in &class.frame {
            xml.push_str(&format!("    <THEMROLE type=\"{role}\"/>\n"));
        }
        xml.push_str("  </THEMROLES>\n");
        if class.members == 0 {
            xml.push_str("  <MEMBERS/>\n");
        } else {
            xml.push_str("  <MEMBERS>\n");
            for _ in 0..class.members {
                let lemma = pseudo_verb(&mut rng, &mut taken);
                xml.push_str(&format!("    <MEMBER name=\"{lemma}\"/>\n"));
            }
            xml.push_str("  </MEMBERS>\n");
        }
        xml.push_str("</VNCLASS>\n");
        files.push((format!("{id}.xml"), xml));
    }
    Ok(files)
}

/// Generates the fixture and writes it into `dir` (created if missing).
pub fn write_fixture(
    spec: &FixtureSpec,
    seed: u64,
    dir: &Path,
) -> Result<Vec<PathBuf>, FixtureError> {
    let files = generate_fixture(spec, seed)?;
    fs::create_dir_all(dir).map_err(|source| FixtureError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut paths = Vec::with_capacity(files.len());
    for (name, content) in files {
        let path = dir.join(&name);
        fs::write(&path, content).map_err(|source| FixtureError::Io {
            path: path.display().to_string(),
            source,
        })?;
        paths.push(path);
    }
    Ok(paths)
}
