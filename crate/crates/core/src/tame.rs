//! Triangles, Δ-free cycles and the weighted classes `C_n(t)` of type Ã.
//!
//! A triangle is an oriented 3-cycle of trivial weight. A Δ-free cycle is a
//! simple cycle of the underlying multigraph using at most one edge of every
//! triangle. `C_n(t)` collects the connected quivers on `n` vertices where no
//! arrow lies on two triangles, `|Q0| − |Q1| + |Q2| = 0`, the unique Δ-free
//! cycle is unoriented of weight `t^±1`, and every vertex has degree at most 4
//! (degree 3 on exactly one triangle, degree 4 on exactly two).

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::equivalence::{are_equivalent, cycle_weight, GaugeFunction, WalkCycle, WalkStep};
use crate::group::GroupElement;
use crate::mutation::{mutate, MutationError};
use crate::quiver::{ArrowId, VertexId, WeightedQuiver};

/// Exhaustive cycle enumeration is used up to this many vertices...
pub const EXHAUSTIVE_MAX_VERTICES: usize = 24;
/// ...and this many independent cycles (`|Q1| − |Q0| + 1`).
pub const EXHAUSTIVE_MAX_CYCLOMATIC: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Triangle {
    /// Arrows in cycle order, starting with the smallest id.
    pub arrows: [ArrowId; 3],
    /// `vertices[i]` is the tail of `arrows[i]`.
    pub vertices: [VertexId; 3],
}

impl Triangle {
    pub fn contains(&self, a: ArrowId) -> bool {
        self.arrows.contains(&a)
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    /// The vertex not on arrow `a`.
    pub fn opposite(&self, a: ArrowId) -> Option<VertexId> {
        let i = self.arrows.iter().position(|&x| x == a)?;
        Some(self.vertices[(i + 2) % 3])
    }
}

pub fn triangles(q: &WeightedQuiver) -> Vec<Triangle> {
    let mut out = Vec::new();
    for a in q.arrows() {
        for b in q.arrows().iter().filter(|b| b.src == a.dst && b.dst != a.src) {
            for c in q.arrows().iter().filter(|c| c.src == b.dst && c.dst == a.src) {
                if a.src == a.dst || b.src == b.dst {
                    continue;
                }
                if a.id < b.id && a.id < c.id && (&(&a.weight * &b.weight) * &c.weight).is_identity() {
                    out.push(Triangle {
                        arrows: [a.id, b.id, c.id],
                        vertices: [a.src, b.src, c.src],
                    });
                }
            }
        }
    }
    out.sort();
    out
}

pub fn euler_characteristic(q: &WeightedQuiver) -> i64 {
    q.vertices().len() as i64 - q.arrow_count() as i64 + triangles(q).len() as i64
}

/// `|Q1| − |Q0| + (number of components)`.
pub fn cyclomatic_number(q: &WeightedQuiver) -> usize {
    (q.arrow_count() + q.components().len()).saturating_sub(q.vertices().len())
}

fn is_oriented(c: &WalkCycle) -> bool {
    c.steps.iter().all(|s| s.forward) || c.steps.iter().all(|s| !s.forward)
}

/// Vertices of the walk without the closing repeat.
fn walk_vertices(q: &WeightedQuiver, c: &WalkCycle) -> Vec<VertexId> {
    let mut v = c.vertices(q).expect("closed walk");
    v.pop();
    v
}

fn rotate(c: &WalkCycle, q: &WeightedQuiver, by: usize) -> WalkCycle {
    let vs = walk_vertices(q, c);
    let mut steps = c.steps.clone();
    steps.rotate_left(by);
    WalkCycle {
        start: vs[by],
        steps,
    }
}

/// Rotates to the smallest vertex and picks the direction whose second
/// vertex is smaller (first arrow id for 2-cycles).
pub fn canonical_cycle(q: &WeightedQuiver, c: &WalkCycle) -> WalkCycle {
    let vs = walk_vertices(q, c);
    let m = (0..vs.len()).min_by_key(|&i| vs[i]).expect("nonempty cycle");
    let fwd = rotate(c, q, m);
    let rev = fwd.reversed();
    let key = |w: &WalkCycle| {
        let vs = walk_vertices(q, w);
        (vs.get(1).copied(), w.steps[0].arrow)
    };
    if key(&rev) < key(&fwd) {
        rev
    } else {
        fwd
    }
}

/// Every simple cycle of the underlying multigraph (length ≥ 2), each once in
/// canonical form.
pub fn simple_cycles(q: &WeightedQuiver) -> Vec<WalkCycle> {
    let mut adj: BTreeMap<VertexId, Vec<(VertexId, ArrowId, bool)>> = BTreeMap::new();
    for a in q.arrows().iter().filter(|a| a.src != a.dst) {
        adj.entry(a.src).or_default().push((a.dst, a.id, true));
        adj.entry(a.dst).or_default().push((a.src, a.id, false));
    }
    for list in adj.values_mut() {
        list.sort();
    }
    let mut out = Vec::new();
    for s in q.vertex_ids() {
        let mut path = vec![s];
        let mut steps: Vec<WalkStep> = Vec::new();
        cycles_from(s, &adj, &mut path, &mut steps, &mut out);
    }
    out
}

fn cycles_from(
    s: VertexId,
    adj: &BTreeMap<VertexId, Vec<(VertexId, ArrowId, bool)>>,
    path: &mut Vec<VertexId>,
    steps: &mut Vec<WalkStep>,
    out: &mut Vec<WalkCycle>,
) {
    let v = *path.last().expect("nonempty path");
    for &(u, arrow, forward) in adj.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
        if u == s && !steps.is_empty() {
            let len = steps.len() + 1;
            let canonical = if len == 2 {
                steps[0].arrow < arrow
            } else {
                path[1] < v
            };
            if canonical {
                let mut st = steps.clone();
                st.push(WalkStep { arrow, forward });
                out.push(WalkCycle { start: s, steps: st });
            }
        } else if u > s && !path.contains(&u) {
            path.push(u);
            steps.push(WalkStep { arrow, forward });
            cycles_from(s, adj, path, steps, out);
            path.pop();
            steps.pop();
        }
    }
}

/// Uses at most one edge of every triangle.
pub fn is_delta_free(c: &WalkCycle, tris: &[Triangle]) -> bool {
    tris.iter()
        .all(|t| c.steps.iter().filter(|s| t.contains(s.arrow)).count() <= 1)
}

pub fn delta_free_cycles(q: &WeightedQuiver) -> Vec<WalkCycle> {
    let tris = triangles(q);
    simple_cycles(q)
        .into_iter()
        .filter(|c| is_delta_free(c, &tris))
        .collect()
}

fn within_exhaustive_cap(q: &WeightedQuiver) -> bool {
    q.vertices().len() <= EXHAUSTIVE_MAX_VERTICES && cyclomatic_number(q) <= EXHAUSTIVE_MAX_CYCLOMATIC
}

/// The Δ-free cycle of a connected quiver with `χ = 0` whose triangles share
/// no arrows, found without enumerating cycles: delete one edge of every
/// triangle, take the unique cycle of what remains, and while that cycle uses
/// two edges of a triangle swap which edge is deleted (shortening the cycle).
pub fn delta_free_cycle_shortcut(q: &WeightedQuiver) -> Option<WalkCycle> {
    let tris = triangles(q);
    let mut deleted: Vec<ArrowId> = tris.iter().map(|t| t.arrows[0]).collect();
    loop {
        let gone: BTreeSet<ArrowId> = deleted.iter().copied().collect();
        let cycle = unique_cycle(q, &gone)?;
        let on_cycle: BTreeSet<ArrowId> = cycle.steps.iter().map(|s| s.arrow).collect();
        let swap = tris.iter().enumerate().find_map(|(i, t)| {
            let used: Vec<ArrowId> = t.arrows.iter().copied().filter(|a| on_cycle.contains(a)).collect();
            (used.len() == 2).then(|| (i, used[0]))
        });
        match swap {
            None => return Some(canonical_cycle(q, &cycle)),
            Some((i, a)) => deleted[i] = a,
        }
    }
}

/// The only cycle of a connected unicyclic graph (the quiver minus `gone`).
fn unique_cycle(q: &WeightedQuiver, gone: &BTreeSet<ArrowId>) -> Option<WalkCycle> {
    let mut edges: BTreeMap<ArrowId, (VertexId, VertexId)> = q
        .arrows()
        .iter()
        .filter(|a| !gone.contains(&a.id))
        .map(|a| (a.id, (a.src, a.dst)))
        .collect();
    if edges.len() != q.vertices().len() {
        return None;
    }
    // strip leaves
    loop {
        let mut deg: BTreeMap<VertexId, usize> = BTreeMap::new();
        for (s, d) in edges.values() {
            *deg.entry(*s).or_default() += 1;
            *deg.entry(*d).or_default() += 1;
        }
        let leaf = edges
            .iter()
            .find(|(_, (s, d))| deg[s] == 1 || deg[d] == 1)
            .map(|(id, _)| *id);
        match leaf {
            Some(id) => {
                edges.remove(&id);
            }
            None => break,
        }
    }
    let (&first, &(start, _)) = edges.iter().next()?;
    let mut steps = vec![WalkStep {
        arrow: first,
        forward: true,
    }];
    let mut cur = edges[&first].1;
    let mut last = first;
    while cur != start {
        let (&id, &(s, d)) = edges
            .iter()
            .find(|(id, (s, d))| **id != last && (*s == cur || *d == cur))?;
        let forward = s == cur;
        steps.push(WalkStep { arrow: id, forward });
        cur = if forward { d } else { s };
        last = id;
        if steps.len() > edges.len() {
            return None;
        }
    }
    if steps.len() != edges.len() {
        return None;
    }
    Some(WalkCycle { start, steps })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleReduction {
    pub cycle: WalkCycle,
    /// The reduction ended in a triangle rather than a Δ-free cycle.
    pub triangle: bool,
    /// Cycle after every replacement, starting with the input.
    pub trace: Vec<WalkCycle>,
}

/// Replaces two consecutive edges on a common triangle by its third edge
/// until the cycle is a triangle or Δ-free. The leftmost pair not wrapping
/// around the basepoint goes first, so the weight read at the basepoint is
/// unchanged; a wrapping replacement moves the basepoint one step along and
/// conjugates the weight by the weight of the first step.
pub fn reduce_cycle(q: &WeightedQuiver, c: &WalkCycle) -> CycleReduction {
    let tris = triangles(q);
    let mut cur = c.clone();
    let mut trace = vec![cur.clone()];
    loop {
        let ids: BTreeSet<ArrowId> = cur.steps.iter().map(|s| s.arrow).collect();
        if cur.steps.len() == 3 && tris.iter().any(|t| t.arrows.iter().all(|a| ids.contains(a))) {
            return CycleReduction {
                cycle: cur,
                triangle: true,
                trace,
            };
        }
        let len = cur.steps.len();
        let common = |i: usize, j: usize| {
            tris.iter()
                .find(|t| t.contains(cur.steps[i].arrow) && t.contains(cur.steps[j].arrow))
        };
        let pair = (0..len.saturating_sub(1))
            .find_map(|i| common(i, i + 1).map(|t| (i, t)))
            .or_else(|| if len >= 3 { common(len - 1, 0).map(|t| (len - 1, t)) } else { None });
        let Some((i, t)) = pair else {
            return CycleReduction {
                cycle: cur,
                triangle: false,
                trace,
            };
        };
        let vs = walk_vertices(q, &cur);
        let from = vs[i];
        let third = *t
            .arrows
            .iter()
            .find(|a| **a != cur.steps[i].arrow && **a != cur.steps[(i + 1) % len].arrow)
            .expect("triangle has three arrows");
        let forward = q.arrow(third).expect("arrow").src == from;
        let step = WalkStep {
            arrow: third,
            forward,
        };
        if i + 1 < len {
            cur.steps.splice(i..i + 2, [step]);
        } else {
            // wrap: the new cycle starts at the end of the old first step
            let mut steps: Vec<WalkStep> = cur.steps[1..len - 1].to_vec();
            steps.push(step);
            cur = WalkCycle {
                start: vs[1],
                steps,
            };
        }
        trace.push(cur.clone());
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CycleRoute {
    Exhaustive,
    Shortcut,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CnViolation {
    /// Condition 1.
    SharedArrow {
        arrow: ArrowId,
        triangles: [Triangle; 2],
    },
    /// Condition 2.
    EulerCharacteristic { chi: i64 },
    /// Condition 3: not exactly one Δ-free cycle.
    DeltaFreeCount { count: usize },
    /// Condition 3.
    OrientedTwoCycle { between: (VertexId, VertexId) },
    /// Condition 3.
    OrientedCycle { cycle: WalkCycle },
    /// Condition 3.
    TrivialWeight { cycle: WalkCycle },
    /// Condition 4.
    DegreeTooLarge { vertex: VertexId, degree: usize },
    /// Condition 4(a) or 4(b).
    TriangleCount {
        vertex: VertexId,
        degree: usize,
        triangles: usize,
    },
}

impl CnViolation {
    pub fn condition(&self) -> u8 {
        match self {
            CnViolation::SharedArrow { .. } => 1,
            CnViolation::EulerCharacteristic { .. } => 2,
            CnViolation::DeltaFreeCount { .. }
            | CnViolation::OrientedTwoCycle { .. }
            | CnViolation::OrientedCycle { .. }
            | CnViolation::TrivialWeight { .. } => 3,
            CnViolation::DegreeTooLarge { .. } | CnViolation::TriangleCount { .. } => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum CnMembership {
    /// `t` is the weight of `cycle` read from its start vertex.
    Member {
        n: usize,
        t: GroupElement,
        cycle: WalkCycle,
        route: CycleRoute,
    },
    NonMember {
        condition: u8,
        violation: CnViolation,
    },
}

impl CnMembership {
    pub fn is_member(&self) -> bool {
        matches!(self, CnMembership::Member { .. })
    }

    pub fn cycle(&self) -> Option<&WalkCycle> {
        match self {
            CnMembership::Member { cycle, .. } => Some(cycle),
            _ => None,
        }
    }

    pub fn weight(&self) -> Option<&GroupElement> {
        match self {
            CnMembership::Member { t, .. } => Some(t),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TameError {
    #[error("quiver is not connected")]
    Disconnected,
    #[error("quiver is not in any C_n(t): condition {} fails", .0.condition())]
    NotMember(CnViolation),
    #[error("membership lost along canonicalization: {0}")]
    InvariantBreach(String),
    #[error(transparent)]
    Mutation(#[from] MutationError),
}

pub fn cn_membership(q: &WeightedQuiver) -> Result<CnMembership, TameError> {
    let route = if within_exhaustive_cap(q) {
        CycleRoute::Exhaustive
    } else {
        CycleRoute::Shortcut
    };
    cn_membership_with(q, route)
}

/// Membership with an explicit choice of how the Δ-free cycle is found.
pub fn cn_membership_with(q: &WeightedQuiver, route: CycleRoute) -> Result<CnMembership, TameError> {
    if !q.is_connected() {
        return Err(TameError::Disconnected);
    }
    let fail = |violation: CnViolation| {
        Ok(CnMembership::NonMember {
            condition: violation.condition(),
            violation,
        })
    };
    let tris = triangles(q);
    for a in q.arrows() {
        let on: Vec<&Triangle> = tris.iter().filter(|t| t.contains(a.id)).collect();
        if on.len() > 1 {
            return fail(CnViolation::SharedArrow {
                arrow: a.id,
                triangles: [on[0].clone(), on[1].clone()],
            });
        }
    }
    let chi = q.vertices().len() as i64 - q.arrow_count() as i64 + tris.len() as i64;
    if chi != 0 {
        return fail(CnViolation::EulerCharacteristic { chi });
    }
    if let Some(between) = q.find_two_cycle() {
        return fail(CnViolation::OrientedTwoCycle { between });
    }
    let cycle = match route {
        CycleRoute::Exhaustive => {
            let mut all: Vec<WalkCycle> = simple_cycles(q)
                .into_iter()
                .filter(|c| is_delta_free(c, &tris))
                .collect();
            if all.len() != 1 {
                return fail(CnViolation::DeltaFreeCount { count: all.len() });
            }
            all.pop().expect("one cycle")
        }
        CycleRoute::Shortcut => match delta_free_cycle_shortcut(q) {
            Some(c) => c,
            None => return fail(CnViolation::DeltaFreeCount { count: 0 }),
        },
    };
    if is_oriented(&cycle) {
        return fail(CnViolation::OrientedCycle { cycle });
    }
    let t = cycle_weight(q, &cycle).expect("cycle of q");
    if t.is_identity() {
        return fail(CnViolation::TrivialWeight { cycle });
    }
    for v in q.vertex_ids() {
        let degree = q.degree(v);
        let on = tris.iter().filter(|t| t.has_vertex(v)).count();
        let need = match degree {
            0..=2 => None,
            3 => Some(1),
            4 => Some(2),
            _ => return fail(CnViolation::DegreeTooLarge { vertex: v, degree }),
        };
        if need.is_some_and(|k| k != on) {
            return fail(CnViolation::TriangleCount {
                vertex: v,
                degree,
                triangles: on,
            });
        }
    }
    Ok(CnMembership::Member {
        n: q.vertices().len(),
        t,
        cycle,
        route,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CanonicalStep {
    pub vertex: VertexId,
    /// Length of the Δ-free cycle after this mutation.
    pub cycle_length: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Canonicalization {
    pub sequence: Vec<VertexId>,
    pub steps: Vec<CanonicalStep>,
    pub initial_cycle_length: usize,
    pub result: WeightedQuiver,
    pub cycle: WalkCycle,
    pub t: GroupElement,
}

/// Mutates a member of `C_n(t)` to an unoriented `n`-cycle. Each step takes
/// the triangle with exactly one side on the Δ-free cycle (smallest such
/// arrow id, opposite vertex off the cycle) and mutates at its opposite
/// vertex, which lengthens the cycle by one.
pub fn canonicalize_to_cycle(q: &WeightedQuiver) -> Result<Canonicalization, TameError> {
    let n = q.vertices().len();
    let membership = cn_membership(q)?;
    let CnMembership::Member { cycle, .. } = membership else {
        let CnMembership::NonMember { violation, .. } = membership else {
            unreachable!()
        };
        return Err(TameError::NotMember(violation));
    };
    let initial_cycle_length = cycle.steps.len();
    let mut cur = q.clone();
    let mut cycle = cycle;
    let mut sequence = Vec::new();
    let mut steps = Vec::new();
    while cycle.steps.len() < n {
        let on_cycle: BTreeSet<VertexId> = walk_vertices(&cur, &cycle).into_iter().collect();
        let cycle_arrows: BTreeSet<ArrowId> = cycle.steps.iter().map(|s| s.arrow).collect();
        let choice = triangles(&cur)
            .into_iter()
            .filter_map(|t| {
                let sides: Vec<ArrowId> =
                    t.arrows.iter().copied().filter(|a| cycle_arrows.contains(a)).collect();
                if sides.len() != 1 {
                    return None;
                }
                let v = t.opposite(sides[0])?;
                (!on_cycle.contains(&v)).then_some((sides[0], v))
            })
            .min();
        let Some((_, v)) = choice else {
            return Err(TameError::InvariantBreach(format!(
                "no triangle with one side on a Δ-free cycle of length {} < {n}",
                cycle.steps.len()
            )));
        };
        let before = cycle.steps.len();
        cur = mutate(&cur, v)?.result;
        sequence.push(v);
        match cn_membership(&cur)? {
            CnMembership::Member { cycle: c, .. } => cycle = c,
            CnMembership::NonMember { violation, .. } => {
                return Err(TameError::InvariantBreach(format!(
                    "after mutation at {v}: condition {} fails",
                    violation.condition()
                )))
            }
        }
        if cycle.steps.len() != before + 1 {
            return Err(TameError::InvariantBreach(format!(
                "mutation at {v} changed the cycle length from {before} to {}",
                cycle.steps.len()
            )));
        }
        steps.push(CanonicalStep {
            vertex: v,
            cycle_length: cycle.steps.len(),
        });
    }
    let t = cycle_weight(&cur, &cycle).expect("cycle of the result");
    Ok(Canonicalization {
        sequence,
        steps,
        initial_cycle_length,
        result: cur,
        cycle,
        t,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum TameClass {
    /// Gauge equivalent to the trivial weight; `apply_gauge(Q, gauge)` is trivial.
    GaugeTrivial { gauge: GaugeFunction },
    CnMember {
        n: usize,
        t: GroupElement,
        cycle: WalkCycle,
    },
    Unknown { reason: String },
}

pub fn classify_tame(q: &WeightedQuiver) -> TameClass {
    let trivial = q.with_trivial_weights(q.group());
    if let Ok(eq) = are_equivalent(q, &trivial) {
        if let Some(g) = eq.witness() {
            return TameClass::GaugeTrivial { gauge: g.clone() };
        }
    }
    match cn_membership(q) {
        Ok(CnMembership::Member { n, t, cycle, .. }) => TameClass::CnMember { n, t, cycle },
        Ok(CnMembership::NonMember { violation, .. }) => TameClass::Unknown {
            reason: format!(
                "weights are not gauge trivial and condition {} for C_n(t) fails",
                violation.condition()
            ),
        },
        Err(e) => TameClass::Unknown {
            reason: e.to_string(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupKind;

    const F1: GroupKind = GroupKind::Free { rank: 1 };

    fn x1() -> GroupElement {
        GroupElement::generator(F1, 1).unwrap()
    }

    fn e() -> GroupElement {
        GroupElement::identity(F1)
    }

    /// 1→2→…→n and 1→n, the last arrow weighted.
    fn unoriented_cycle(n: u32, w: GroupElement) -> WeightedQuiver {
        let mut q = WeightedQuiver::with_vertices(F1, n);
        for i in 1..n {
            q.add_plain_arrow(i, i + 1).unwrap();
        }
        q.add_arrow(1, n, w).unwrap();
        q
    }

    #[test]
    fn triangle_detection() {
        let mut q = WeightedQuiver::with_vertices(F1, 3);
        q.add_arrow(1, 2, x1()).unwrap();
        q.add_arrow(2, 3, x1().inverse()).unwrap();
        q.add_plain_arrow(3, 1).unwrap();
        let t = triangles(&q);
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].opposite(ArrowId(1)), Some(3));
        assert_eq!(euler_characteristic(&q), 1);
        assert!(delta_free_cycles(&q).is_empty());

        let mut r = WeightedQuiver::with_vertices(F1, 3);
        r.add_arrow(1, 2, x1()).unwrap();
        r.add_plain_arrow(2, 3).unwrap();
        r.add_plain_arrow(3, 1).unwrap();
        assert!(triangles(&r).is_empty());
        assert!(triangles(&unoriented_cycle(3, e())).is_empty());
    }

    #[test]
    fn cycles_of_an_unoriented_cycle() {
        let q = unoriented_cycle(5, x1());
        assert_eq!(euler_characteristic(&q), 0);
        let c = delta_free_cycles(&q);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].start, 1);
        assert_eq!(c[0].steps.len(), 5);
        let m = cn_membership(&q).unwrap();
        assert!(m.is_member());
        let t = m.weight().unwrap();
        assert!(*t == x1() || *t == x1().inverse());
        let short = delta_free_cycle_shortcut(&q).unwrap();
        assert_eq!(short, c[0]);
    }

    #[test]
    fn double_arrow_cycle() {
        let mut q = WeightedQuiver::with_vertices(F1, 2);
        q.add_plain_arrow(1, 2).unwrap();
        q.add_arrow(1, 2, x1()).unwrap();
        let c = simple_cycles(&q);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].steps[0].arrow, ArrowId(1));
        assert!(cn_membership(&q).unwrap().is_member());
    }

    #[test]
    fn non_members() {
        let mut tree = WeightedQuiver::with_vertices(F1, 3);
        tree.add_arrow(1, 2, x1()).unwrap();
        tree.add_plain_arrow(3, 2).unwrap();
        let m = cn_membership(&tree).unwrap();
        assert!(matches!(
            m,
            CnMembership::NonMember {
                condition: 2,
                violation: CnViolation::EulerCharacteristic { chi: 1 }
            }
        ));

        let mut oriented = WeightedQuiver::with_vertices(F1, 4);
        for i in 1..=4 {
            oriented.add_plain_arrow(i, i % 4 + 1).unwrap();
        }
        let m = cn_membership(&oriented).unwrap();
        assert!(matches!(
            m,
            CnMembership::NonMember {
                condition: 3,
                violation: CnViolation::OrientedCycle { .. }
            }
        ));

        let trivial = unoriented_cycle(4, e());
        assert!(matches!(
            cn_membership(&trivial).unwrap(),
            CnMembership::NonMember {
                violation: CnViolation::TrivialWeight { .. },
                ..
            }
        ));
        assert_eq!(
            cn_membership(&WeightedQuiver::with_vertices(F1, 2)).unwrap_err(),
            TameError::Disconnected
        );
    }

    /// Square 1-2-3-4 with a triangle on edge 1→2 through 5.
    fn square_with_triangle() -> WeightedQuiver {
        let mut q = WeightedQuiver::with_vertices(F1, 5);
        q.add_plain_arrow(1, 2).unwrap();
        q.add_plain_arrow(2, 3).unwrap();
        q.add_plain_arrow(3, 4).unwrap();
        q.add_arrow(1, 4, x1()).unwrap();
        q.add_plain_arrow(2, 5).unwrap();
        q.add_plain_arrow(5, 1).unwrap();
        q
    }

    #[test]
    fn reduction_and_canonicalization() {
        let q = square_with_triangle();
        assert_eq!(triangles(&q).len(), 1);
        let m = cn_membership(&q).unwrap();
        assert!(m.is_member(), "{m:?}");
        assert_eq!(m.cycle().unwrap().steps.len(), 4);
        assert_eq!(
            cn_membership_with(&q, CycleRoute::Shortcut).unwrap().cycle(),
            m.cycle()
        );

        // the 5-cycle through the triangle reduces to the square
        let long: Vec<WalkCycle> = simple_cycles(&q)
            .into_iter()
            .filter(|c| c.steps.len() == 5)
            .collect();
        assert_eq!(long.len(), 1);
        let red = reduce_cycle(&q, &long[0]);
        assert!(!red.triangle);
        assert_eq!(red.cycle.steps.len(), 4);
        for w in red.trace.windows(2) {
            let a = cycle_weight(&q, &w[0]).unwrap();
            let b = cycle_weight(&q, &w[1]).unwrap();
            assert!(a == b || w[1].start != w[0].start);
        }

        let c = canonicalize_to_cycle(&q).unwrap();
        assert_eq!(c.sequence, vec![5]);
        assert_eq!(c.cycle.steps.len(), 5);
        assert!(c.t == x1() || c.t == x1().inverse());
        assert!(triangles(&c.result).is_empty());
    }

    #[test]
    fn classification() {
        let mut tree = WeightedQuiver::with_vertices(F1, 3);
        tree.add_arrow(1, 2, x1()).unwrap();
        tree.add_arrow(3, 2, x1()).unwrap();
        assert!(matches!(classify_tame(&tree), TameClass::GaugeTrivial { .. }));
        assert!(matches!(
            classify_tame(&unoriented_cycle(4, x1())),
            TameClass::CnMember { n: 4, .. }
        ));
        let mut wild = WeightedQuiver::with_vertices(F1, 3);
        for _ in 0..3 {
            wild.add_plain_arrow(1, 2).unwrap();
        }
        wild.add_arrow(2, 3, x1()).unwrap();
        wild.add_plain_arrow(3, 1).unwrap();
        assert!(matches!(classify_tame(&wild), TameClass::Unknown { .. }));
    }
}
