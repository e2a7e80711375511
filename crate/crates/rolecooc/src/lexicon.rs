//! Verb-class lexicon ingestion.
//!
//! Parses VerbNet-style XML class files into a class tree, computes inherited
//! role frames and compresses the hierarchy: a subclass whose effective frame
//! equals its parent's is folded into the parent, a subclass with additional
//! roles becomes an effective class of its own.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use serde::Serialize;
use thiserror::Error;

/// A thematic role label such as `Agent` or `Patient`.
///
/// Labels are trimmed of surrounding whitespace and compared case-sensitively.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Role(String);

impl Role {
    /// Returns `None` if the label is empty after trimming.
    pub fn new(name: impl AsRef<str>) -> Option<Role> {
        let trimmed = name.as_ref().trim();
        if trimmed.is_empty() {
            None
        } else {
            Some(Role(trimmed.to_string()))
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One node of the raw class hierarchy, before compression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerbClassNode {
    pub id: String,
    /// Roles declared at this node only; inheritance is applied later.
    pub declared_roles: BTreeSet<Role>,
    /// Member lemmas in document order. Counted as tokens, not deduplicated.
    pub members: Vec<String>,
    pub children: Vec<VerbClassNode>,
}

/// A class after hierarchy compression: a role frame with an aggregated
/// member count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EffectiveClass {
    pub id: String,
    pub frame: BTreeSet<Role>,
    pub member_count: usize,
}

/// Raw/merged/retained class counts recorded during compression.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SourceStats {
    pub raw_root_classes: usize,
    pub raw_subclasses: usize,
    pub merged_subclasses: usize,
    pub retained_subclasses: usize,
}

/// A compressed lexicon: effective classes in document order of first
/// occurrence, plus source statistics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lexicon {
    pub classes: Vec<EffectiveClass>,
    pub total_members: usize,
    pub stats: SourceStats,
    /// Oddities worth surfacing but not failing on, e.g. unusually large
    /// frames. One human-readable line each.
    pub warnings: Vec<String>,
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("malformed XML at {path}: {detail}")]
    MalformedXml { path: String, detail: String },
    #[error("schema violation at {path}: {detail}")]
    SchemaViolation { path: String, detail: String },
    #[error("class id {id:?} encountered more than once; the hierarchy is not a tree")]
    CycleDetected { id: String },
    #[error("class {id:?} has an empty role frame")]
    EmptyFrame { id: String },
    #[error("no .xml class files found in {dir}")]
    EmptyInput { dir: String },
    #[error("{file}: {source}")]
    InFile {
        file: String,
        #[source]
        source: Box<LexiconError>,
    },
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Element-path bookkeeping for error messages, e.g.
/// `VNCLASS[destroy-44]/SUBCLASSES[1]/VNSUBCLASS[destroy-44.1]/THEMROLES[1]/THEMROLE[2]`.
struct PathTracker {
    frames: Vec<(String, HashMap<String, usize>)>,
}

impl PathTracker {
    fn new() -> Self {
        PathTracker { frames: Vec::new() }
    }

    /// Display name for a child element about to be entered.
    fn child_display(&mut self, name: &str, id: Option<&str>) -> String {
        let ordinal = match self.frames.last_mut() {
            Some((_, counts)) => {
                let c = counts.entry(name.to_string()).or_insert(0);
                *c += 1;
                *c
            }
            None => 1,
        };
        match id {
            Some(id) => format!("{name}[{id}]"),
            None => format!("{name}[{ordinal}]"),
        }
    }

    fn push(&mut self, display: String) {
        self.frames.push((display, HashMap::new()));
    }

    fn pop(&mut self) {
        self.frames.pop();
    }

    fn at(&self, leaf: Option<&str>) -> String {
        let mut parts: Vec<&str> = self.frames.iter().map(|(d, _)| d.as_str()).collect();
        if let Some(leaf) = leaf {
            parts.push(leaf);
        }
        if parts.is_empty() {
            "document root".to_string()
        } else {
            parts.join("/")
        }
    }
}

struct NodeBuilder {
    id: String,
    declared_roles: BTreeSet<Role>,
    members: Vec<String>,
    children: Vec<VerbClassNode>,
}

impl NodeBuilder {
    fn finish(self) -> VerbClassNode {
        VerbClassNode {
            id: self.id,
            declared_roles: self.declared_roles,
            members: self.members,
            children: self.children,
        }
    }
}

fn attr_value(start: &BytesStart<'_>, key: &[u8]) -> Result<Option<String>, String> {
    for attr in start.attributes() {
        let attr = attr.map_err(|e| e.to_string())?;
        if attr.key.as_ref() == key {
            let value = attr.unescape_value().map_err(|e| e.to_string())?;
            return Ok(Some(value.into_owned()));
        }
    }
    Ok(None)
}

fn class_id(start: &BytesStart<'_>) -> Result<Option<String>, String> {
    Ok(match attr_value(start, b"ID")? {
        Some(v) => Some(v),
        None => attr_value(start, b"id")?,
    })
}

/// Parses one class file into its raw class tree.
///
/// Only `VNCLASS`/`VNSUBCLASS` structure, `THEMROLE` type attributes and
/// `MEMBER` name attributes are read; selectional restrictions and syntactic
/// frame content are skipped.
pub fn parse_class_file(xml_bytes: &[u8]) -> Result<VerbClassNode, LexiconError> {
    let mut reader = Reader::from_reader(xml_bytes);
    let mut buf = Vec::new();
    let mut path = PathTracker::new();
    let mut stack: Vec<NodeBuilder> = Vec::new();
    let mut seen_ids: HashSet<String> = HashSet::new();
    let mut root: Option<VerbClassNode> = None;

    let malformed = |path: &PathTracker, detail: String| LexiconError::MalformedXml {
        path: path.at(None),
        detail,
    };

    loop {
        let event = match reader.read_event_into(&mut buf) {
            Ok(ev) => ev,
            Err(e) => return Err(malformed(&path, e.to_string())),
        };
        match event {
            Event::Start(ref start) | Event::Empty(ref start) => {
                let self_closing = matches!(event, Event::Empty(_));
                let name = String::from_utf8_lossy(start.name().as_ref()).into_owned();
                match name.as_str() {
                    "VNCLASS" | "VNSUBCLASS" => {
                        let is_root_el = name == "VNCLASS";
                        if is_root_el && (!stack.is_empty() || root.is_some()) {
                            let display = path.child_display(&name, None);
                            return Err(LexiconError::SchemaViolation {
                                path: path.at(Some(&display)),
                                detail: "VNCLASS must be the single document root".into(),
                            });
                        }
                        if !is_root_el && stack.is_empty() {
                            let display = path.child_display(&name, None);
                            return Err(LexiconError::SchemaViolation {
                                path: path.at(Some(&display)),
                                detail: "VNSUBCLASS outside of a class".into(),
                            });
                        }
                        let id = class_id(start)
                            .map_err(|detail| malformed(&path, detail))?
                            .map(|v| v.trim().to_string())
                            .filter(|v| !v.is_empty());
                        let display = path.child_display(&name, id.as_deref());
                        let id = match id {
                            Some(id) => id,
                            None => {
                                return Err(LexiconError::SchemaViolation {
                                    path: path.at(Some(&display)),
                                    detail: format!("missing {name} id"),
                                })
                            }
                        };
                        if !seen_ids.insert(id.clone()) {
                            return Err(LexiconError::SchemaViolation {
                                path: path.at(Some(&display)),
                                detail: format!("duplicate class id {id:?}"),
                            });
                        }
                        let builder = NodeBuilder {
                            id,
                            declared_roles: BTreeSet::new(),
                            members: Vec::new(),
                            children: Vec::new(),
                        };
                        if self_closing {
                            let node = builder.finish();
                            match stack.last_mut() {
                                Some(parent) => parent.children.push(node),
                                None => root = Some(node),
                            }
                        } else {
                            path.push(display);
                            stack.push(builder);
                        }
                    }
                    "THEMROLE" => {
                        let display = path.child_display(&name, None);
                        let Some(builder) = stack.last_mut() else {
                            return Err(LexiconError::SchemaViolation {
                                path: path.at(Some(&display)),
                                detail: "THEMROLE outside of a class".into(),
                            });
                        };
                        let value = attr_value(start, b"type")
                            .map_err(|detail| malformed(&path, detail))?;
                        match value.as_deref().and_then(Role::new) {
                            Some(role) => {
                                builder.declared_roles.insert(role);
                            }
                            None => {
                                return Err(LexiconError::SchemaViolation {
                                    path: path.at(Some(&display)),
                                    detail: "THEMROLE without a type".into(),
                                })
                            }
                        }
                        if !self_closing {
                            path.push(display);
                        }
                    }
                    "MEMBER" => {
                        let display = path.child_display(&name, None);
                        let Some(builder) = stack.last_mut() else {
                            return Err(LexiconError::SchemaViolation {
                                path: path.at(Some(&display)),
                                detail: "MEMBER outside of a class".into(),
                            });
                        };
                        let value = attr_value(start, b"name")
                            .map_err(|detail| malformed(&path, detail))?;
                        match value.map(|v| v.trim().to_string()).filter(|v| !v.is_empty()) {
                            Some(lemma) => builder.members.push(lemma),
                            None => {
                                return Err(LexiconError::SchemaViolation {
                                    path: path.at(Some(&display)),
                                    detail: "MEMBER without a name".into(),
                                })
                            }
                        }
                        if !self_closing {
                            path.push(display);
                        }
                    }
                    _ => {
                        // Containers (THEMROLES, MEMBERS, SUBCLASSES) and all
                        // skipped content (FRAMES, SELRESTRS, ...).
                        if !self_closing {
                            let display = path.child_display(&name, None);
                            path.push(display);
                        } else {
                            path.child_display(&name, None);
                        }
                    }
                }
            }
            Event::End(ref end) => {
                let name = String::from_utf8_lossy(end.name().as_ref()).into_owned();
                if name == "VNCLASS" || name == "VNSUBCLASS" {
                    let Some(builder) = stack.pop() else {
                        return Err(malformed(&path, format!("unexpected closing {name}")));
                    };
                    let node = builder.finish();
                    match stack.last_mut() {
                        Some(parent) => parent.children.push(node),
                        None => root = Some(node),
                    }
                }
                path.pop();
            }
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }

    if !stack.is_empty() {
        return Err(malformed(&path, "unexpected end of document".into()));
    }
    root.ok_or_else(|| LexiconError::SchemaViolation {
        path: "document root".into(),
        detail: "no VNCLASS root element".into(),
    })
}

/// The frame a node contributes to the corpus: the parent's effective frame
/// plus the roles declared at the node itself.
pub fn effective_frame(node: &VerbClassNode, inherited: &BTreeSet<Role>) -> BTreeSet<Role> {
    inherited.union(&node.declared_roles).cloned().collect()
}

/// Compresses raw class trees into a lexicon of effective classes.
///
/// Depth-first over each tree in document order: a subclass whose effective
/// frame equals its parent's is merged into the nearest retained ancestor
/// (its member tokens are added there), a subclass with a strictly larger
/// frame is retained as its own class.
pub fn compress(root_nodes: &[VerbClassNode]) -> Result<Lexicon, LexiconError> {
    let mut classes: Vec<EffectiveClass> = Vec::new();
    let mut stats = SourceStats::default();
    let mut seen_ids: HashSet<String> = HashSet::new();
    let mut warnings: Vec<String> = Vec::new();

    fn visit(
        node: &VerbClassNode,
        inherited: &BTreeSet<Role>,
        target: Option<usize>,
        classes: &mut Vec<EffectiveClass>,
        stats: &mut SourceStats,
        seen_ids: &mut HashSet<String>,
        warnings: &mut Vec<String>,
    ) -> Result<(), LexiconError> {
        if !seen_ids.insert(node.id.clone()) {
            return Err(LexiconError::CycleDetected {
                id: node.id.clone(),
            });
        }
        let frame = effective_frame(node, inherited);
        let target_idx = match target {
            None => {
                stats.raw_root_classes += 1;
                if frame.is_empty() {
                    return Err(LexiconError::EmptyFrame {
                        id: node.id.clone(),
                    });
                }
                note_large_frame(&node.id, &frame, warnings);
                classes.push(EffectiveClass {
                    id: node.id.clone(),
                    frame: frame.clone(),
                    member_count: node.members.len(),
                });
                classes.len() - 1
            }
            Some(parent_idx) => {
                stats.raw_subclasses += 1;
                if frame == classes[parent_idx].frame {
                    stats.merged_subclasses += 1;
                    classes[parent_idx].member_count += node.members.len();
                    parent_idx
                } else {
                    stats.retained_subclasses += 1;
                    note_large_frame(&node.id, &frame, warnings);
                    classes.push(EffectiveClass {
                        id: node.id.clone(),
                        frame: frame.clone(),
                        member_count: node.members.len(),
                    });
                    classes.len() - 1
                }
            }
        };
        for child in &node.children {
            visit(
                child,
                &frame,
                Some(target_idx),
                classes,
                stats,
                seen_ids,
                warnings,
            )?;
        }
        Ok(())
    }

    for node in root_nodes {
        visit(
            node,
            &BTreeSet::new(),
            None,
            &mut classes,
            &mut stats,
            &mut seen_ids,
            &mut warnings,
        )?;
    }

    let total_members = classes.iter().map(|c| c.member_count).sum();
    Ok(Lexicon {
        classes,
        total_members,
        stats,
        warnings,
    })
}

/// Role frames larger than this are legal but unusual for verb lexicons;
/// they get a warning instead of a rejection.
const LARGE_FRAME: usize = 6;

fn note_large_frame(id: &str, frame: &BTreeSet<Role>, warnings: &mut Vec<String>) {
    if frame.len() > LARGE_FRAME {
        warnings.push(format!(
            "class {id}: frame has {} roles, more than the usual maximum of {LARGE_FRAME}",
            frame.len()
        ));
    }
}

/// Reads and parses every `.xml` file in `dir`, sorted by file name.
pub fn read_class_files(dir: &Path) -> Result<Vec<(String, VerbClassNode)>, LexiconError> {
    let entries = fs::read_dir(dir).map_err(|source| LexiconError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut paths = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|source| LexiconError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        let path = entry.path();
        if path.extension().and_then(|e| e.to_str()) == Some("xml") && path.is_file() {
            paths.push(path);
        }
    }
    if paths.is_empty() {
        return Err(LexiconError::EmptyInput {
            dir: dir.display().to_string(),
        });
    }
    paths.sort_by(|a, b| a.file_name().cmp(&b.file_name()));

    let mut nodes = Vec::with_capacity(paths.len());
    for path in paths {
        let file = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        let bytes = fs::read(&path).map_err(|source| LexiconError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let node = parse_class_file(&bytes).map_err(|source| LexiconError::InFile {
            file,
            source: Box::new(source),
        })?;
        nodes.push((
            path.file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default(),
            node,
        ));
    }
    Ok(nodes)
}

/// Parses a directory of class files and compresses them into a lexicon.
pub fn ingest_dir(dir: &Path) -> Result<Lexicon, LexiconError> {
    let nodes = read_class_files(dir)?;
    let roots: Vec<VerbClassNode> = nodes.into_iter().map(|(_, node)| node).collect();
    compress(&roots)
}
