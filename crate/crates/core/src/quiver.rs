//! Weighted quivers: vertices with frozen flags and a multiset of arrows,
//! each carrying an element of the weight group.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{GroupElement, GroupKind};

pub type VertexId = u32;

/// Stable arrow label. Parallel arrows are distinct objects with distinct ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ArrowId(pub u32);

impl fmt::Display for ArrowId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub id: VertexId,
    pub frozen: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub id: ArrowId,
    pub src: VertexId,
    pub dst: VertexId,
    pub weight: GroupElement,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuiverError {
    #[error("invalid quiver: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("unknown arrow {0}")]
    UnknownArrow(ArrowId),
    #[error("duplicate vertex {0}")]
    DuplicateVertex(VertexId),
    #[error("duplicate arrow id {0}")]
    DuplicateArrow(ArrowId),
    #[error("quiver has an oriented 2-cycle between {0} and {1}")]
    TwoCycle(VertexId, VertexId),
    #[error(transparent)]
    Group(#[from] crate::group::GroupError),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// One broken invariant, as reported by [`WeightedQuiver::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "kebab-case")]
pub enum Violation {
    Loop { arrow: ArrowId, vertex: VertexId },
    WeightKindMismatch { arrow: ArrowId, found: GroupKind },
    UnknownEndpoint { arrow: ArrowId, vertex: VertexId },
    DuplicateVertex { vertex: VertexId },
    DuplicateArrowId { arrow: ArrowId },
    InvalidGroup { reason: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Loop { arrow, vertex } => write!(f, "loop at {vertex} (arrow {arrow})"),
            Violation::WeightKindMismatch { arrow, found } => {
                write!(f, "weight kind mismatch on arrow {arrow} ({found})")
            }
            Violation::UnknownEndpoint { arrow, vertex } => {
                write!(f, "arrow {arrow} uses unknown vertex {vertex}")
            }
            Violation::DuplicateVertex { vertex } => write!(f, "duplicate vertex {vertex}"),
            Violation::DuplicateArrowId { arrow } => write!(f, "duplicate arrow id {arrow}"),
            Violation::InvalidGroup { reason } => write!(f, "invalid group: {reason}"),
        }
    }
}

/// A pair of opposite arrows `a: i→j`, `b: j→i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoCycle {
    pub first: ArrowId,
    pub second: ArrowId,
    pub vertices: (VertexId, VertexId),
    /// Whether `wt(first)·wt(second)` is the identity.
    pub trivial: bool,
}

/// Signed arrow counts `b_ij = #(i→j) − #(j→i)`, rows and columns indexed by
/// vertex ids in ascending order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExchangeMatrix {
    pub vertices: Vec<VertexId>,
    pub entries: Vec<Vec<i64>>,
}

impl ExchangeMatrix {
    pub fn index_of(&self, v: VertexId) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    pub fn get(&self, i: VertexId, j: VertexId) -> i64 {
        let (Some(a), Some(b)) = (self.index_of(i), self.index_of(j)) else {
            panic!("vertex not in exchange matrix");
        };
        self.entries[a][b]
    }

    pub fn is_skew_symmetric(&self) -> bool {
        let n = self.entries.len();
        (0..n).all(|i| (0..n).all(|j| self.entries[i][j] == -self.entries[j][i]))
    }
}

/// A loop-free quiver whose arrows carry weights in a fixed group.
///
/// Equality is labeled equality: same group, same vertices and frozen flags,
/// same multiset of `(src, dst, weight)` triples. Arrow ids are ignored.
#[derive(Debug, Clone)]
pub struct WeightedQuiver {
    group: GroupKind,
    vertices: Vec<Vertex>,
    arrows: Vec<Arrow>,
}

impl WeightedQuiver {
    pub fn new(group: GroupKind) -> Self {
        WeightedQuiver {
            group,
            vertices: Vec::new(),
            arrows: Vec::new(),
        }
    }

    /// Unfrozen vertices `1..=n`, no arrows.
    pub fn with_vertices(group: GroupKind, n: u32) -> Self {
        let mut q = WeightedQuiver::new(group);
        for id in 1..=n {
            q.vertices.push(Vertex { id, frozen: false });
        }
        q
    }

    /// Assembles a quiver without checking invariants; call [`validate`](Self::validate)
    /// afterwards. Vertices and arrows are sorted by id.
    pub fn from_parts(group: GroupKind, mut vertices: Vec<Vertex>, mut arrows: Vec<Arrow>) -> Self {
        vertices.sort();
        arrows.sort_by_key(|a| a.id);
        WeightedQuiver {
            group,
            vertices,
            arrows,
        }
    }

    pub fn group(&self) -> GroupKind {
        self.group
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().map(|v| v.id)
    }

    pub fn vertex(&self, id: VertexId) -> Option<&Vertex> {
        self.vertices
            .binary_search_by_key(&id, |v| v.id)
            .ok()
            .map(|i| &self.vertices[i])
    }

    pub fn has_vertex(&self, id: VertexId) -> bool {
        self.vertex(id).is_some()
    }

    pub fn is_frozen(&self, id: VertexId) -> bool {
        self.vertex(id).is_some_and(|v| v.frozen)
    }

    pub fn frozen_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().filter(|v| v.frozen).map(|v| v.id)
    }

    pub fn mutable_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().filter(|v| !v.frozen).map(|v| v.id)
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow(&self, id: ArrowId) -> Option<&Arrow> {
        self.arrows
            .binary_search_by_key(&id, |a| a.id)
            .ok()
            .map(|i| &self.arrows[i])
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn next_arrow_id(&self) -> ArrowId {
        ArrowId(self.arrows.last().map_or(1, |a| a.id.0 + 1))
    }

    pub fn add_vertex(&mut self, id: VertexId, frozen: bool) -> Result<(), QuiverError> {
        match self.vertices.binary_search_by_key(&id, |v| v.id) {
            Ok(_) => Err(QuiverError::DuplicateVertex(id)),
            Err(pos) => {
                self.vertices.insert(pos, Vertex { id, frozen });
                Ok(())
            }
        }
    }

    pub fn set_frozen(&mut self, id: VertexId, frozen: bool) -> Result<(), QuiverError> {
        let pos = self
            .vertices
            .binary_search_by_key(&id, |v| v.id)
            .map_err(|_| QuiverError::UnknownVertex(id))?;
        self.vertices[pos].frozen = frozen;
        Ok(())
    }

    /// Adds an arrow with the next free id.
    pub fn add_arrow(
        &mut self,
        src: VertexId,
        dst: VertexId,
        weight: GroupElement,
    ) -> Result<ArrowId, QuiverError> {
        let id = self.next_arrow_id();
        self.insert_arrow(Arrow {
            id,
            src,
            dst,
            weight,
        })?;
        Ok(id)
    }

    /// Adds an arrow with the group identity as weight.
    pub fn add_plain_arrow(&mut self, src: VertexId, dst: VertexId) -> Result<ArrowId, QuiverError> {
        self.add_arrow(src, dst, GroupElement::identity(self.group))
    }

    pub fn insert_arrow(&mut self, arrow: Arrow) -> Result<(), QuiverError> {
        for v in [arrow.src, arrow.dst] {
            if !self.has_vertex(v) {
                return Err(QuiverError::UnknownVertex(v));
            }
        }
        if arrow.weight.kind() != self.group {
            return Err(crate::group::GroupError::KindMismatch {
                left: self.group,
                right: arrow.weight.kind(),
            }
            .into());
        }
        match self.arrows.binary_search_by_key(&arrow.id, |a| a.id) {
            Ok(_) => Err(QuiverError::DuplicateArrow(arrow.id)),
            Err(pos) => {
                self.arrows.insert(pos, arrow);
                Ok(())
            }
        }
    }

    pub fn remove_arrows(&mut self, ids: &BTreeSet<ArrowId>) {
        self.arrows.retain(|a| !ids.contains(&a.id));
    }

    /// Replaces every weight through `f`; the group kind may change.
    pub fn map_weights(
        &self,
        group: GroupKind,
        mut f: impl FnMut(&Arrow) -> GroupElement,
    ) -> WeightedQuiver {
        WeightedQuiver {
            group,
            vertices: self.vertices.clone(),
            arrows: self
                .arrows
                .iter()
                .map(|a| Arrow {
                    weight: f(a),
                    ..a.clone()
                })
                .collect(),
        }
    }

    /// The same quiver with every weight replaced by the identity of `group`.
    pub fn with_trivial_weights(&self, group: GroupKind) -> WeightedQuiver {
        self.map_weights(group, |_| GroupElement::identity(group))
    }

    /// Underlying graph degree: number of arrow endpoints at `v`.
    pub fn degree(&self, v: VertexId) -> usize {
        self.arrows
            .iter()
            .map(|a| usize::from(a.src == v) + usize::from(a.dst == v))
            .sum()
    }

    pub fn arrows_at(&self, v: VertexId) -> impl Iterator<Item = &Arrow> + '_ {
        self.arrows.iter().filter(move |a| a.src == v || a.dst == v)
    }

    /// Every violated invariant; empty iff the quiver is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if let Err(e) = self.group.validate() {
            out.push(Violation::InvalidGroup {
                reason: e.to_string(),
            });
        }
        for w in self.vertices.windows(2) {
            if w[0].id == w[1].id {
                out.push(Violation::DuplicateVertex { vertex: w[0].id });
            }
        }
        for w in self.arrows.windows(2) {
            if w[0].id == w[1].id {
                out.push(Violation::DuplicateArrowId { arrow: w[0].id });
            }
        }
        for a in &self.arrows {
            for v in [a.src, a.dst] {
                if !self.has_vertex(v) {
                    out.push(Violation::UnknownEndpoint {
                        arrow: a.id,
                        vertex: v,
                    });
                }
            }
            if a.src == a.dst {
                out.push(Violation::Loop {
                    arrow: a.id,
                    vertex: a.src,
                });
            }
            if a.weight.kind() != self.group {
                out.push(Violation::WeightKindMismatch {
                    arrow: a.id,
                    found: a.weight.kind(),
                });
            }
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<(), QuiverError> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(QuiverError::Invalid(v))
        }
    }

    /// All unordered pairs of opposite arrows, ordered by `(first, second)` id.
    pub fn two_cycles(&self) -> Vec<TwoCycle> {
        let mut out = Vec::new();
        for (x, a) in self.arrows.iter().enumerate() {
            for b in &self.arrows[x + 1..] {
                if a.src == b.dst && a.dst == b.src && a.src != a.dst {
                    out.push(TwoCycle {
                        first: a.id,
                        second: b.id,
                        vertices: (a.src, a.dst),
                        trivial: (&a.weight * &b.weight).is_identity(),
                    });
                }
            }
        }
        out
    }

    /// First pair of vertices joined by arrows in both directions, if any.
    pub fn find_two_cycle(&self) -> Option<(VertexId, VertexId)> {
        let mut seen = BTreeSet::new();
        for a in &self.arrows {
            if seen.contains(&(a.dst, a.src)) {
                return Some((a.dst.min(a.src), a.dst.max(a.src)));
            }
            seen.insert((a.src, a.dst));
        }
        None
    }

    pub fn has_two_cycle_at(&self, v: VertexId) -> bool {
        let outs: BTreeSet<VertexId> = self
            .arrows
            .iter()
            .filter(|a| a.src == v)
            .map(|a| a.dst)
            .collect();
        self.arrows
            .iter()
            .any(|a| a.dst == v && outs.contains(&a.src))
    }

    pub fn exchange_matrix(&self) -> Result<ExchangeMatrix, QuiverError> {
        if let Some((i, j)) = self.find_two_cycle() {
            return Err(QuiverError::TwoCycle(i, j));
        }
        let vertices: Vec<VertexId> = self.vertex_ids().collect();
        let n = vertices.len();
        let mut entries = vec![vec![0i64; n]; n];
        let index = |v: VertexId| {
            vertices
                .binary_search(&v)
                .map_err(|_| QuiverError::UnknownVertex(v))
        };
        for a in &self.arrows {
            let (i, j) = (index(a.src)?, index(a.dst)?);
            entries[i][j] += 1;
            entries[j][i] -= 1;
        }
        Ok(ExchangeMatrix { vertices, entries })
    }

    /// Sorted `(src, dst, formatted weight)` triples: the canonical arrow list.
    pub fn canonical_arrows(&self) -> Vec<(VertexId, VertexId, String)> {
        let mut t: Vec<_> = self
            .arrows
            .iter()
            .map(|a| (a.src, a.dst, a.weight.to_string()))
            .collect();
        t.sort();
        t
    }

    /// Arrow counts per `(src, dst, weight)` class.
    pub fn arrow_classes(&self) -> BTreeMap<(VertexId, VertexId, GroupElement), usize> {
        let mut m = BTreeMap::new();
        for a in &self.arrows {
            *m.entry((a.src, a.dst, a.weight.clone())).or_insert(0) += 1;
        }
        m
    }

    /// Renumbers arrows `1..` in canonical order.
    pub fn renumbered(&self) -> WeightedQuiver {
        let mut arrows = self.arrows.clone();
        arrows.sort_by(|a, b| {
            (a.src, a.dst, a.weight.to_string()).cmp(&(b.src, b.dst, b.weight.to_string()))
        });
        for (i, a) in arrows.iter_mut().enumerate() {
            a.id = ArrowId(i as u32 + 1);
        }
        WeightedQuiver {
            group: self.group,
            vertices: self.vertices.clone(),
            arrows,
        }
    }

    /// Connected components of the underlying graph, each sorted.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let ids: Vec<VertexId> = self.vertex_ids().collect();
        let mut parent: Vec<usize> = (0..ids.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut c = x;
            while p[c] != r {
                let n = p[c];
                p[c] = r;
                c = n;
            }
            r
        }
        for a in &self.arrows {
            if let (Ok(i), Ok(j)) = (ids.binary_search(&a.src), ids.binary_search(&a.dst)) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<VertexId>> = BTreeMap::new();
        for i in 0..ids.len() {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(ids[i]);
        }
        groups.into_values().collect()
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Restriction to the given vertices and the arrows between them.
    pub fn induced(&self, keep: &BTreeSet<VertexId>) -> WeightedQuiver {
        WeightedQuiver {
            group: self.group,
            vertices: self
                .vertices
                .iter()
                .filter(|v| keep.contains(&v.id))
                .copied()
                .collect(),
            arrows: self
                .arrows
                .iter()
                .filter(|a| keep.contains(&a.src) && keep.contains(&a.dst))
                .cloned()
                .collect(),
        }
    }
}

impl PartialEq for WeightedQuiver {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group
            && self.vertices == other.vertices
            && self.arrows.len() == other.arrows.len()
            && self.arrow_classes() == other.arrow_classes()
    }
}

impl Eq for WeightedQuiver {}
