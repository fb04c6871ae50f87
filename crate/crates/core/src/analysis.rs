//! Oriented-cycle weights, nondegeneracy search, framing and c-vectors.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compact::CompactQuiver;
use crate::group::GroupElement;
use crate::mutation::MutationOptions;
use crate::quiver::{ArrowId, QuiverError, VertexId, WeightedQuiver};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("quiver already has frozen vertices")]
    AlreadyFramed,
    #[error("arrow {arrow} joins frozen vertices {src} and {dst}")]
    FrozenArrow {
        arrow: ArrowId,
        src: VertexId,
        dst: VertexId,
    },
    #[error("probe arrow would be a loop at {0}")]
    ProbeLoop(VertexId),
    #[error("probe arrow would form a trivial-weight 2-cycle with arrow {0}")]
    ProbeCancels(ArrowId),
    #[error("no frame weight given for vertex {0}")]
    MissingFrameWeight(VertexId),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
}

/// Verdict on "every oriented cycle has trivial weight".
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleWeightCheck {
    pub trivial: bool,
    /// A simple oriented cycle (arrow ids in order) with nontrivial weight.
    pub witness: Option<Vec<ArrowId>>,
}

/// Decides whether every closed directed walk has weight 1.
///
/// Arrows between strongly connected components lie on no directed cycle.
/// Inside a component every vertex gets the weight of a BFS-tree path from
/// the component's smallest vertex; the condition holds iff every internal
/// arrow `a: i→j` satisfies `pot(i)·wt(a) = pot(j)`.
pub fn oriented_cycles_trivial(q: &WeightedQuiver) -> CycleWeightCheck {
    let mut graph: DiGraph<VertexId, ()> = DiGraph::new();
    let mut node: BTreeMap<VertexId, NodeIndex> = BTreeMap::new();
    for v in q.vertex_ids() {
        node.insert(v, graph.add_node(v));
    }
    for a in q.arrows() {
        graph.add_edge(node[&a.src], node[&a.dst], ());
    }
    let mut sccs: Vec<Vec<VertexId>> = tarjan_scc(&graph)
        .into_iter()
        .filter(|c| c.len() > 1)
        .map(|c| {
            let mut ids: Vec<VertexId> = c.into_iter().map(|n| graph[n]).collect();
            ids.sort();
            ids
        })
        .collect();
    sccs.sort();

    for scc in sccs {
        let inside = |v: VertexId| scc.binary_search(&v).is_ok();
        let internal: Vec<_> = q
            .arrows()
            .iter()
            .filter(|a| inside(a.src) && inside(a.dst))
            .collect();
        let base = scc[0];
        // forward tree: path base → v; backward tree: path v → base
        let mut pot: HashMap<VertexId, GroupElement> = HashMap::new();
        let mut fwd_parent: HashMap<VertexId, ArrowId> = HashMap::new();
        let mut bwd_parent: HashMap<VertexId, ArrowId> = HashMap::new();
        pot.insert(base, GroupElement::identity(q.group()));
        let mut queue = VecDeque::from([base]);
        while let Some(v) = queue.pop_front() {
            for a in internal.iter().filter(|a| a.src == v) {
                if !pot.contains_key(&a.dst) {
                    pot.insert(a.dst, &pot[&v] * &a.weight);
                    fwd_parent.insert(a.dst, a.id);
                    queue.push_back(a.dst);
                }
            }
        }
        let mut reached = HashSet::from([base]);
        let mut queue = VecDeque::from([base]);
        while let Some(v) = queue.pop_front() {
            for a in internal.iter().filter(|a| a.dst == v) {
                if reached.insert(a.src) {
                    bwd_parent.insert(a.src, a.id);
                    queue.push_back(a.src);
                }
            }
        }
        for a in &internal {
            if &pot[&a.src] * &a.weight == pot[&a.dst] {
                continue;
            }
            let to = |v: VertexId| {
                let mut path = Vec::new();
                let mut cur = v;
                while cur != base {
                    let id = fwd_parent[&cur];
                    path.push(id);
                    cur = q.arrow(id).expect("tree arrow").src;
                }
                path.reverse();
                path
            };
            let back = |v: VertexId| {
                let mut path = Vec::new();
                let mut cur = v;
                while cur != base {
                    let id = bwd_parent[&cur];
                    path.push(id);
                    cur = q.arrow(id).expect("tree arrow").dst;
                }
                path
            };
            let mut via_a = to(a.src);
            via_a.push(a.id);
            via_a.extend(back(a.dst));
            let mut direct = to(a.dst);
            direct.extend(back(a.dst));
            let walk = if walk_weight(q, &direct).is_identity() {
                via_a
            } else {
                direct
            };
            return CycleWeightCheck {
                trivial: false,
                witness: Some(simple_nontrivial_cycle(q, walk)),
            };
        }
    }
    CycleWeightCheck {
        trivial: true,
        witness: None,
    }
}

/// Ordered product of arrow weights along a path.
pub fn walk_weight(q: &WeightedQuiver, arrows: &[ArrowId]) -> GroupElement {
    arrows.iter().fold(GroupElement::identity(q.group()), |acc, id| {
        &acc * &q.arrow(*id).expect("arrow in quiver").weight
    })
}

/// Shrinks a closed walk of nontrivial weight to a simple cycle of nontrivial
/// weight by splitting at repeated vertices.
fn simple_nontrivial_cycle(q: &WeightedQuiver, mut walk: Vec<ArrowId>) -> Vec<ArrowId> {
    loop {
        let src = |i: usize| q.arrow(walk[i]).expect("arrow").src;
        let mut seen: HashMap<VertexId, usize> = HashMap::new();
        let mut split = None;
        for t in 0..walk.len() {
            let v = src(t);
            if let Some(&s) = seen.get(&v) {
                split = Some((s, t));
                break;
            }
            seen.insert(v, t);
        }
        let Some((s, t)) = split else {
            return walk;
        };
        let inner: Vec<ArrowId> = walk[s..t].to_vec();
        if walk_weight(q, &inner).is_identity() {
            walk.drain(s..t);
        } else {
            walk = inner;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum NondegeneracyOutcome {
    /// No mutation sequence of length at most `depth` produced a 2-cycle.
    CleanToDepth,
    /// Replaying `sequence` leaves an oriented 2-cycle of nontrivial weight
    /// between the two vertices.
    Counterexample {
        sequence: Vec<VertexId>,
        two_cycle: (VertexId, VertexId),
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NondegeneracyVerdict {
    pub depth: usize,
    pub states_visited: usize,
    #[serde(flatten)]
    pub outcome: NondegeneracyOutcome,
}

impl NondegeneracyVerdict {
    pub fn is_clean(&self) -> bool {
        self.outcome == NondegeneracyOutcome::CleanToDepth
    }
}

/// Result of a breadth-first mutation search.
#[derive(Debug, Clone)]
pub struct Exploration<W> {
    pub states_visited: usize,
    /// The first state (in BFS order, ties broken lexicographically by
    /// sequence) where the inspector reported something.
    pub found: Option<(Vec<VertexId>, W)>,
}

/// Breadth-first search over mutation sequences of length `<= depth` at
/// unfrozen vertices, skipping immediate repeats and states already seen.
/// `inspect` runs once on every distinct reachable state, starting with `start`;
/// states it flags are not expanded further.
pub fn explore<W, F>(
    start: &CompactQuiver,
    depth: usize,
    options: MutationOptions,
    inspect: F,
) -> Exploration<W>
where
    W: Send,
    F: Fn(&CompactQuiver) -> Option<W> + Sync,
{
    let mutable: Vec<VertexId> = start
        .vertices()
        .iter()
        .filter(|v| !v.frozen)
        .map(|v| v.id)
        .collect();
    if let Some(w) = inspect(start) {
        return Exploration {
            states_visited: 1,
            found: Some((Vec::new(), w)),
        };
    }
    let mut visited: HashSet<CompactQuiver> = HashSet::from([start.clone()]);
    let mut frontier: Vec<(Vec<VertexId>, CompactQuiver)> = vec![(Vec::new(), start.clone())];
    for _ in 0..depth {
        let children: Vec<Vec<(Vec<VertexId>, CompactQuiver)>> = frontier
            .par_iter()
            .map(|(seq, state)| {
                mutable
                    .iter()
                    .filter(|&&k| seq.last() != Some(&k))
                    .filter_map(|&k| {
                        let next = state.mutate(k, options).ok()?;
                        let mut s = seq.clone();
                        s.push(k);
                        Some((s, next))
                    })
                    .collect()
            })
            .collect();
        let mut fresh = Vec::new();
        for (seq, state) in children.into_iter().flatten() {
            if !visited.contains(&state) {
                visited.insert(state.clone());
                fresh.push((seq, state));
            }
        }
        let verdicts: Vec<Option<W>> = fresh.par_iter().map(|(_, s)| inspect(s)).collect();
        let mut next = Vec::with_capacity(fresh.len());
        for ((seq, state), verdict) in fresh.into_iter().zip(verdicts) {
            if let Some(w) = verdict {
                return Exploration {
                    states_visited: visited.len(),
                    found: Some((seq, w)),
                };
            }
            next.push((seq, state));
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    Exploration {
        states_visited: visited.len(),
        found: None,
    }
}

/// Searches mutation sequences of length `<= depth` for one that leaves an
/// oriented 2-cycle after weight reduction. A clean verdict only covers the
/// searched depth.
pub fn check_nondegenerate(q: &WeightedQuiver, depth: usize) -> NondegeneracyVerdict {
    let start = CompactQuiver::from_quiver(q);
    let ex = explore(&start, depth, MutationOptions::STRICT, |s| s.find_two_cycle());
    let outcome = match ex.found {
        None => NondegeneracyOutcome::CleanToDepth,
        Some((sequence, two_cycle)) => NondegeneracyOutcome::Counterexample {
            sequence,
            two_cycle,
        },
    };
    NondegeneracyVerdict {
        depth,
        states_visited: ex.states_visited,
        outcome,
    }
}

/// Runs `walks` random mutation sequences of length `length` (no vertex twice
/// in a row), walk `i` seeded with `seed + i`, and returns the first walk (by
/// index) that reaches an oriented 2-cycle, truncated at that point.
pub fn sample_nondegenerate(
    q: &WeightedQuiver,
    walks: usize,
    length: usize,
    seed: u64,
) -> Option<(Vec<VertexId>, (VertexId, VertexId))> {
    let start = CompactQuiver::from_quiver(q);
    let mutable: Vec<VertexId> = q.mutable_vertices().collect();
    if let Some(c) = start.find_two_cycle() {
        return Some((Vec::new(), c));
    }
    if mutable.is_empty() {
        return None;
    }
    (0..walks)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let mut state = start.clone();
            let mut seq: Vec<VertexId> = Vec::with_capacity(length);
            for _ in 0..length {
                let choices: Vec<VertexId> =
                    mutable.iter().copied().filter(|&k| seq.last() != Some(&k)).collect();
                let k = *choices.choose(&mut rng)?;
                state = state.mutate(k, MutationOptions::STRICT).ok()?;
                seq.push(k);
                if let Some(c) = state.find_two_cycle() {
                    return Some((seq, c));
                }
            }
            None
        })
        .find_first(|_| true)
}

/// Id of the frozen copy of the vertex at `position` (0-based) in a quiver
/// whose largest vertex id is `max_id`.
fn frozen_copy(max_id: VertexId, position: usize) -> VertexId {
    max_id + 1 + position as VertexId
}

/// Adds a frozen source `i'` with one identity-weight arrow `i'→i` for every vertex `i`.
/// Frozen copies are numbered after the existing vertices, in vertex order.
pub fn frame(q: &WeightedQuiver) -> Result<WeightedQuiver, AnalysisError> {
    frame_with(q, &BTreeMap::new())
}

/// Like [`frame`], but arrow `i'→i` gets `weights[i]` when present.
pub fn frame_with(
    q: &WeightedQuiver,
    weights: &BTreeMap<VertexId, GroupElement>,
) -> Result<WeightedQuiver, AnalysisError> {
    q.ensure_valid()?;
    if q.frozen_vertices().next().is_some() {
        return Err(AnalysisError::AlreadyFramed);
    }
    let ids: Vec<VertexId> = q.vertex_ids().collect();
    let max_id = ids.iter().copied().max().unwrap_or(0);
    let mut out = q.clone();
    for (pos, &v) in ids.iter().enumerate() {
        let f = frozen_copy(max_id, pos);
        out.add_vertex(f, true)?;
        let w = weights
            .get(&v)
            .cloned()
            .unwrap_or_else(|| GroupElement::identity(q.group()));
        out.add_arrow(f, v, w)?;
    }
    Ok(out)
}

/// `c_kj = #(k→j') − #(j'→k)`; rows are unfrozen vertices, columns frozen
/// vertices, both ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CVectorMatrix {
    pub rows: Vec<VertexId>,
    pub columns: Vec<VertexId>,
    pub entries: Vec<Vec<i64>>,
}

impl CVectorMatrix {
    pub fn row(&self, k: VertexId) -> Option<&[i64]> {
        self.rows
            .iter()
            .position(|&r| r == k)
            .map(|i| self.entries[i].as_slice())
    }
}

pub fn c_vectors(q: &WeightedQuiver) -> Result<CVectorMatrix, AnalysisError> {
    q.ensure_valid()?;
    if let Some(a) = q
        .arrows()
        .iter()
        .find(|a| q.is_frozen(a.src) && q.is_frozen(a.dst))
    {
        return Err(AnalysisError::FrozenArrow {
            arrow: a.id,
            src: a.src,
            dst: a.dst,
        });
    }
    let rows: Vec<VertexId> = q.mutable_vertices().collect();
    let columns: Vec<VertexId> = q.frozen_vertices().collect();
    let mut entries = vec![vec![0i64; columns.len()]; rows.len()];
    for a in q.arrows() {
        if let (Ok(r), Ok(c)) = (rows.binary_search(&a.src), columns.binary_search(&a.dst)) {
            entries[r][c] += 1;
        }
        if let (Ok(r), Ok(c)) = (rows.binary_search(&a.dst), columns.binary_search(&a.src)) {
            entries[r][c] -= 1;
        }
    }
    Ok(CVectorMatrix {
        rows,
        columns,
        entries,
    })
}

/// Rows, columns and exact entries of the c-vector matrix of a
/// multiplicity-form quiver; `None` if frozen vertices are joined.
fn c_vector_entries(q: &CompactQuiver) -> Option<(Vec<VertexId>, Vec<VertexId>, Vec<Vec<BigInt>>)> {
    if !q.frozen_frozen_arrows().is_empty() {
        return None;
    }
    let rows: Vec<VertexId> = q.vertices().iter().filter(|v| !v.frozen).map(|v| v.id).collect();
    let columns: Vec<VertexId> = q.vertices().iter().filter(|v| v.frozen).map(|v| v.id).collect();
    let mut entries = vec![vec![BigInt::zero(); columns.len()]; rows.len()];
    for ((s, d, _), c) in q.classes() {
        let c = BigInt::from(c.clone());
        if let (Ok(r), Ok(col)) = (rows.binary_search(s), columns.binary_search(d)) {
            entries[r][col] += &c;
        }
        if let (Ok(r), Ok(col)) = (rows.binary_search(d), columns.binary_search(s)) {
            entries[r][col] -= &c;
        }
    }
    Some((rows, columns, entries))
}

/// c-vectors of a multiplicity-form quiver; `None` if frozen vertices are
/// joined or an entry does not fit in `i64`.
pub fn c_vectors_compact(q: &CompactQuiver) -> Option<CVectorMatrix> {
    let (rows, columns, big) = c_vector_entries(q)?;
    let entries = big
        .iter()
        .map(|r| r.iter().map(ToPrimitive::to_i64).collect::<Option<Vec<i64>>>())
        .collect::<Option<Vec<_>>>()?;
    Some(CVectorMatrix {
        rows,
        columns,
        entries,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignCoherence {
    pub coherent: bool,
    /// Per row: entries all `>= 0` or all `<= 0`.
    pub rows: Vec<bool>,
    pub offending_row: Option<VertexId>,
}

pub fn is_sign_coherent(m: &CVectorMatrix) -> SignCoherence {
    let rows: Vec<bool> = m
        .entries
        .iter()
        .map(|r| r.iter().all(|&x| x >= 0) || r.iter().all(|&x| x <= 0))
        .collect();
    let offending_row = rows.iter().position(|ok| !ok).map(|i| m.rows[i]);
    SignCoherence {
        coherent: offending_row.is_none(),
        rows,
        offending_row,
    }
}

/// Adds the probe arrow `a: j→i` of weight `w`, the reverse of a hypothetical
/// arrow `i→j` produced by mutation.
pub fn attach_probe_arrow(
    q: &WeightedQuiver,
    i: VertexId,
    j: VertexId,
    w: GroupElement,
) -> Result<WeightedQuiver, AnalysisError> {
    if i == j {
        return Err(AnalysisError::ProbeLoop(i));
    }
    if let Some(a) = q
        .arrows()
        .iter()
        .find(|a| a.src == i && a.dst == j && (&a.weight * &w).is_identity())
    {
        return Err(AnalysisError::ProbeCancels(a.id));
    }
    let mut out = q.clone();
    out.add_arrow(j, i, w)?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SignViolation {
    /// Counts are decimal strings since they can exceed 64 bits.
    FrozenArrow { src: VertexId, dst: VertexId, count: String },
    IncoherentRow { row: VertexId, entries: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignCoherenceCase {
    pub name: String,
    pub mutable_vertices: usize,
    pub states_visited: usize,
    pub passed: bool,
    pub violation: Option<SignViolation>,
    pub sequence: Option<Vec<VertexId>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignCoherenceReport {
    pub schema_version: u32,
    pub max_len: usize,
    pub cases: Vec<SignCoherenceCase>,
    pub passed: bool,
}

/// Frames each quiver (unless it already has frozen vertices) and checks every
/// state reachable by at most `max_len` mutations at unfrozen vertices: no
/// arrow may join two frozen vertices and every c-vector must be sign coherent.
pub fn sign_coherence_experiment(
    cases: &[(String, WeightedQuiver)],
    max_len: usize,
) -> Result<SignCoherenceReport, AnalysisError> {
    let framed: Vec<(String, WeightedQuiver)> = cases
        .iter()
        .map(|(name, q)| {
            let f = if q.frozen_vertices().next().is_some() {
                q.clone()
            } else {
                frame(q)?
            };
            Ok((name.clone(), f))
        })
        .collect::<Result<_, AnalysisError>>()?;
    let results: Vec<SignCoherenceCase> = framed
        .par_iter()
        .map(|(name, q)| {
            let start = CompactQuiver::from_quiver(q);
            let ex = explore(&start, max_len, MutationOptions::STRICT, sign_violation);
            let (sequence, violation) = match ex.found {
                Some((s, v)) => (Some(s), Some(v)),
                None => (None, None),
            };
            SignCoherenceCase {
                name: name.clone(),
                mutable_vertices: q.mutable_vertices().count(),
                states_visited: ex.states_visited,
                passed: violation.is_none(),
                violation,
                sequence,
            }
        })
        .collect();
    let passed = results.iter().all(|c| c.passed);
    Ok(SignCoherenceReport {
        schema_version: 1,
        max_len,
        cases: results,
        passed,
    })
}

fn sign_violation(q: &CompactQuiver) -> Option<SignViolation> {
    if let Some((src, dst, count)) = q.frozen_frozen_arrows().into_iter().next() {
        return Some(SignViolation::FrozenArrow {
            src,
            dst,
            count: count.to_string(),
        });
    }
    let (rows, _, entries) = c_vector_entries(q)?;
    let i = entries
        .iter()
        .position(|r| !(r.iter().all(|x| !x.is_negative()) || r.iter().all(|x| !x.is_positive())))?;
    Some(SignViolation::IncoherentRow {
        row: rows[i],
        entries: entries[i].iter().map(ToString::to_string).collect(),
    })
}
