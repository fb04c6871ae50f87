//! JSON file format for weighted quivers, with an optional potential.
//!
//! ```json
//! {"group": {"kind": "free", "rank": 2},
//!  "vertices": [{"id": 1, "frozen": false}, {"id": 2, "frozen": false}],
//!  "arrows": [{"src": 1, "dst": 2, "weight": "x1"}],
//!  "potential": [{"cycle": [1, 2, 3], "coeff": "1/2"}]}
//! ```
//!
//! Arrows may carry an integer `id`; without ids they are numbered from 1 in
//! file order, which is what potential cycles then refer to. Canonical output
//! sorts vertices by id and arrows by `(src, dst, weight)` and omits arrow ids
//! unless a potential is present.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{GroupElement, GroupError, GroupKind};
use crate::linalg::Rational;
use crate::potential::{potential_from_terms, Potential, PotentialError};
use crate::quiver::{Arrow, ArrowId, Vertex, VertexId, Violation, WeightedQuiver};

/// Version stamped into every JSON report.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("JSON error at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid group: {0}")]
    Group(GroupError),
    #[error("arrow {index} ({src}→{dst}): bad weight {text:?}: {source}")]
    Weight {
        index: usize,
        src: VertexId,
        dst: VertexId,
        text: String,
        #[source]
        source: GroupError,
    },
    #[error("either every arrow has an id or none does (arrow {0} differs)")]
    MixedIds(usize),
    #[error("invalid quiver: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("potential term {index}: bad coefficient {text:?}")]
    Coefficient { index: usize, text: String },
    #[error("potential: {0}")]
    Potential(#[from] PotentialError),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexEntry {
    pub id: VertexId,
    #[serde(default)]
    pub frozen: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<u32>,
    pub src: VertexId,
    pub dst: VertexId,
    pub weight: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermEntry {
    pub cycle: Vec<u32>,
    pub coeff: String,
}

/// The on-disk shape of a quiver file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuiverFile {
    pub group: GroupKind,
    pub vertices: Vec<VertexEntry>,
    #[serde(default)]
    pub arrows: Vec<ArrowEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<Vec<TermEntry>>,
}

/// A quiver and, when the file has one, its potential.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuiverDocument {
    pub quiver: WeightedQuiver,
    pub potential: Option<Potential>,
}

impl QuiverFile {
    pub fn into_document(self) -> Result<QuiverDocument, IoError> {
        self.group.validate().map_err(IoError::Group)?;
        let with_ids = self.arrows.first().is_some_and(|a| a.id.is_some());
        let mut arrows = Vec::with_capacity(self.arrows.len());
        for (index, a) in self.arrows.iter().enumerate() {
            if a.id.is_some() != with_ids {
                return Err(IoError::MixedIds(index));
            }
            let weight = GroupElement::parse(self.group, &a.weight).map_err(|source| IoError::Weight {
                index,
                src: a.src,
                dst: a.dst,
                text: a.weight.clone(),
                source,
            })?;
            arrows.push(Arrow {
                id: ArrowId(a.id.unwrap_or(index as u32 + 1)),
                src: a.src,
                dst: a.dst,
                weight,
            });
        }
        let vertices = self
            .vertices
            .iter()
            .map(|v| Vertex {
                id: v.id,
                frozen: v.frozen,
            })
            .collect();
        let quiver = WeightedQuiver::from_parts(self.group, vertices, arrows);
        let violations = quiver.validate();
        if !violations.is_empty() {
            return Err(IoError::Invalid(violations));
        }
        let potential = match self.potential {
            None => None,
            Some(terms) => {
                let mut parsed = Vec::with_capacity(terms.len());
                for (index, t) in terms.iter().enumerate() {
                    let c: Rational = t.coeff.trim().parse().map_err(|_| IoError::Coefficient {
                        index,
                        text: t.coeff.clone(),
                    })?;
                    parsed.push((t.cycle.iter().map(|&i| ArrowId(i)).collect(), c));
                }
                Some(potential_from_terms(&quiver, parsed)?)
            }
        };
        Ok(QuiverDocument { quiver, potential })
    }

    /// Canonical form; arrow ids are written only alongside a potential.
    pub fn from_document(q: &WeightedQuiver, potential: Option<&Potential>) -> Self {
        let mut arrows: Vec<ArrowEntry> = q
            .arrows()
            .iter()
            .map(|a| ArrowEntry {
                id: potential.map(|_| a.id.0),
                src: a.src,
                dst: a.dst,
                weight: a.weight.to_string(),
            })
            .collect();
        arrows.sort_by(|a, b| (a.src, a.dst, &a.weight, a.id).cmp(&(b.src, b.dst, &b.weight, b.id)));
        QuiverFile {
            group: q.group(),
            vertices: q
                .vertices()
                .iter()
                .map(|v| VertexEntry {
                    id: v.id,
                    frozen: v.frozen,
                })
                .collect(),
            arrows,
            potential: potential.map(|p| {
                p.terms()
                    .iter()
                    .map(|(w, c)| TermEntry {
                        cycle: w.iter().map(|a| a.0).collect(),
                        coeff: c.to_string(),
                    })
                    .collect()
            }),
        }
    }
}

impl Serialize for WeightedQuiver {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        QuiverFile::from_document(self, None).serialize(serializer)
    }
}

pub fn parse_document(text: &str) -> Result<QuiverDocument, IoError> {
    let file: QuiverFile = serde_json::from_str(text)?;
    file.into_document()
}

pub fn parse_quiver(text: &str) -> Result<WeightedQuiver, IoError> {
    Ok(parse_document(text)?.quiver)
}

/// Pretty-printed canonical JSON with a trailing newline.
pub fn document_to_json(q: &WeightedQuiver, potential: Option<&Potential>) -> String {
    let mut s = serde_json::to_string_pretty(&QuiverFile::from_document(q, potential))
        .expect("quiver files serialize");
    s.push('\n');
    s
}

/// Compact canonical JSON; equal exactly for labeled-equal quivers.
pub fn canonical_json(q: &WeightedQuiver) -> String {
    serde_json::to_string(&QuiverFile::from_document(q, None)).expect("quiver files serialize")
}

fn read(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_document(path: impl AsRef<Path>) -> Result<QuiverDocument, IoError> {
    parse_document(&read(path.as_ref())?)
}

pub fn load_quiver(path: impl AsRef<Path>) -> Result<WeightedQuiver, IoError> {
    Ok(load_document(path)?.quiver)
}

pub fn save_quiver(q: &WeightedQuiver, path: impl AsRef<Path>) -> Result<(), IoError> {
    write(path.as_ref(), &document_to_json(q, None))
}

pub fn save_document(
    q: &WeightedQuiver,
    potential: Option<&Potential>,
    path: impl AsRef<Path>,
) -> Result<(), IoError> {
    write(path.as_ref(), &document_to_json(q, potential))
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOUBLED_TRIANGLE: &str = r#"{
        "group": {"kind": "free", "rank": 1},
        "vertices": [{"id": 1}, {"id": 2}, {"id": 3}],
        "arrows": [
            {"src": 1, "dst": 2, "weight": "e"},
            {"src": 2, "dst": 3, "weight": "e"},
            {"src": 3, "dst": 1, "weight": "e"},
            {"src": 3, "dst": 1, "weight": "x1"}
        ],
        "potential": [{"cycle": [2, 3, 1], "coeff": "3/2"}]
    }"#;

    #[test]
    fn parse_and_round_trip() {
        let doc = parse_document(DOUBLED_TRIANGLE).unwrap();
        assert_eq!(doc.quiver.arrow_count(), 4);
        let p = doc.potential.as_ref().unwrap();
        assert_eq!(p.len(), 1);
        let text = document_to_json(&doc.quiver, doc.potential.as_ref());
        let again = parse_document(&text).unwrap();
        assert_eq!(again, doc);
        assert_eq!(document_to_json(&again.quiver, again.potential.as_ref()), text);

        let plain = document_to_json(&doc.quiver, None);
        assert!(!plain.contains("\"id\": 1,\n      \"src\""));
        let q = parse_quiver(&plain).unwrap();
        assert_eq!(document_to_json(&q, None), plain);
    }

    #[test]
    fn errors_name_the_arrow() {
        let bad = DOUBLED_TRIANGLE.replace("\"x1\"", "\"x7\"");
        let err = parse_document(&bad).unwrap_err();
        assert!(matches!(err, IoError::Weight { index: 3, .. }), "{err}");
        assert!(err.to_string().contains("arrow 3"));

        let json = parse_document("{\"group\": {\"kind\": \"free\"}}").unwrap_err();
        assert!(matches!(json, IoError::Json { line: 1, .. }));

        let mixed = r#"{"group": {"kind": "trivial"}, "vertices": [{"id": 1}, {"id": 2}],
            "arrows": [{"id": 4, "src": 1, "dst": 2, "weight": "e"}, {"src": 1, "dst": 2, "weight": "e"}]}"#;
        assert!(matches!(parse_document(mixed), Err(IoError::MixedIds(1))));

        let looped = r#"{"group": {"kind": "trivial"}, "vertices": [{"id": 1}],
            "arrows": [{"src": 1, "dst": 1, "weight": "e"}]}"#;
        assert!(matches!(parse_document(looped), Err(IoError::Invalid(_))));
    }

    #[test]
    fn canonical_json_ignores_arrow_order() {
        let mut a = WeightedQuiver::with_vertices(GroupKind::Free { rank: 1 }, 2);
        let x = GroupElement::parse(GroupKind::Free { rank: 1 }, "x1").unwrap();
        a.add_arrow(1, 2, x.clone()).unwrap();
        a.add_plain_arrow(1, 2).unwrap();
        let mut b = WeightedQuiver::with_vertices(GroupKind::Free { rank: 1 }, 2);
        b.add_plain_arrow(1, 2).unwrap();
        b.add_arrow(1, 2, x).unwrap();
        assert_eq!(canonical_json(&a), canonical_json(&b));
    }
}
