//! Vertex (gauge) equivalence of weight systems on a fixed quiver.
//!
//! A gauge `g` assigns a group element to every vertex and acts on weights by
//! `wt'(a) = g(i)^-1 · wt(a) · g(j)` for `a: i→j`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{free, GroupElement, GroupKind};
use crate::quiver::{ArrowId, VertexId, WeightedQuiver};

/// Exponent range searched when the free-group solution set is infinite.
pub const DEFAULT_EXPONENT_BOUND: i64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivalenceError {
    #[error("gauge has no value at vertex {0}")]
    MissingVertex(VertexId),
    #[error("gauge value at vertex {0} has the wrong group kind")]
    KindMismatch(VertexId),
    #[error("quiver is not connected")]
    Disconnected,
    #[error("vertex {0} does not exist")]
    UnknownVertex(VertexId),
    #[error("walk is broken at step {0}")]
    BrokenWalk(usize),
    #[error("quivers have different shapes: {0}")]
    ShapeMismatch(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct GaugeFunction(pub BTreeMap<VertexId, GroupElement>);

impl GaugeFunction {
    pub fn identity(q: &WeightedQuiver) -> Self {
        GaugeFunction(
            q.vertex_ids()
                .map(|v| (v, GroupElement::identity(q.group())))
                .collect(),
        )
    }

    pub fn get(&self, v: VertexId) -> Option<&GroupElement> {
        self.0.get(&v)
    }

    pub fn is_identity(&self) -> bool {
        self.0.values().all(GroupElement::is_identity)
    }

    /// Pointwise inverse `i ↦ g(i)^-1`.
    pub fn inverse(&self) -> Self {
        GaugeFunction(self.0.iter().map(|(v, g)| (*v, g.inverse())).collect())
    }

    /// `i ↦ g(i)·h(i)`: applying `self` and then `other`.
    pub fn then(&self, other: &GaugeFunction) -> Self {
        GaugeFunction(
            self.0
                .iter()
                .filter_map(|(v, g)| other.0.get(v).map(|h| (*v, g * h)))
                .collect(),
        )
    }
}

pub fn apply_gauge(
    q: &WeightedQuiver,
    g: &GaugeFunction,
) -> Result<WeightedQuiver, EquivalenceError> {
    for v in q.vertex_ids() {
        let x = g.get(v).ok_or(EquivalenceError::MissingVertex(v))?;
        if x.kind() != q.group() {
            return Err(EquivalenceError::KindMismatch(v));
        }
    }
    Ok(q.map_weights(q.group(), |a| {
        &(&g.0[&a.src].inverse() * &a.weight) * &g.0[&a.dst]
    }))
}

/// The same gauge witnesses equivalence of the mutated quivers.
pub fn mutate_gauge(g: &GaugeFunction, _k: VertexId) -> GaugeFunction {
    g.clone()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkStep {
    pub arrow: ArrowId,
    /// `false` when the arrow is traversed from head to tail.
    pub forward: bool,
}

/// Closed walk in the underlying graph, arrows possibly traversed backwards.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkCycle {
    pub start: VertexId,
    pub steps: Vec<WalkStep>,
}

impl WalkCycle {
    /// Visited vertices, starting and ending at `start`.
    pub fn vertices(&self, q: &WeightedQuiver) -> Result<Vec<VertexId>, EquivalenceError> {
        let mut out = vec![self.start];
        let mut cur = self.start;
        for (i, s) in self.steps.iter().enumerate() {
            let a = q.arrow(s.arrow).ok_or(EquivalenceError::BrokenWalk(i))?;
            let (from, to) = if s.forward { (a.src, a.dst) } else { (a.dst, a.src) };
            if from != cur {
                return Err(EquivalenceError::BrokenWalk(i));
            }
            cur = to;
            out.push(cur);
        }
        if cur != self.start {
            return Err(EquivalenceError::BrokenWalk(self.steps.len()));
        }
        Ok(out)
    }

    pub fn reversed(&self) -> WalkCycle {
        WalkCycle {
            start: self.start,
            steps: self
                .steps
                .iter()
                .rev()
                .map(|s| WalkStep {
                    arrow: s.arrow,
                    forward: !s.forward,
                })
                .collect(),
        }
    }
}

/// Ordered product of `wt(a)` over forward steps and `wt(a)^-1` over backward steps.
pub fn cycle_weight(q: &WeightedQuiver, c: &WalkCycle) -> Result<GroupElement, EquivalenceError> {
    c.vertices(q)?;
    Ok(c.steps.iter().fold(GroupElement::identity(q.group()), |acc, s| {
        let w = &q.arrow(s.arrow).expect("checked").weight;
        if s.forward {
            &acc * w
        } else {
            &acc * &w.inverse()
        }
    }))
}

/// BFS spanning forest, roots at the smallest vertex of each component and
/// neighbours visited by ascending vertex id (then arrow id).
#[derive(Debug, Clone)]
pub struct SpanningForest {
    pub roots: Vec<VertexId>,
    /// Tree step from the parent into each non-root vertex.
    pub parent: BTreeMap<VertexId, (VertexId, WalkStep)>,
    pub root_of: BTreeMap<VertexId, VertexId>,
}

impl SpanningForest {
    pub fn new(q: &WeightedQuiver) -> Self {
        let mut forest = SpanningForest {
            roots: Vec::new(),
            parent: BTreeMap::new(),
            root_of: BTreeMap::new(),
        };
        for v in q.vertex_ids() {
            if !forest.root_of.contains_key(&v) {
                forest.grow(q, v);
            }
        }
        forest
    }

    fn rooted(q: &WeightedQuiver, root: VertexId) -> Self {
        let mut forest = SpanningForest {
            roots: Vec::new(),
            parent: BTreeMap::new(),
            root_of: BTreeMap::new(),
        };
        forest.grow(q, root);
        forest
    }

    fn grow(&mut self, q: &WeightedQuiver, root: VertexId) {
        self.roots.push(root);
        self.root_of.insert(root, root);
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            let mut steps: Vec<(VertexId, ArrowId, bool)> = q
                .arrows_at(v)
                .filter(|a| a.src != a.dst)
                .map(|a| {
                    if a.src == v {
                        (a.dst, a.id, true)
                    } else {
                        (a.src, a.id, false)
                    }
                })
                .collect();
            steps.sort();
            for (u, arrow, forward) in steps {
                if !self.root_of.contains_key(&u) {
                    self.root_of.insert(u, root);
                    self.parent.insert(u, (v, WalkStep { arrow, forward }));
                    queue.push_back(u);
                }
            }
        }
    }

    pub fn tree_arrows(&self) -> BTreeSet<ArrowId> {
        self.parent.values().map(|(_, s)| s.arrow).collect()
    }

    /// Tree path from the root of `v`'s component to `v`.
    pub fn path_from_root(&self, v: VertexId) -> Vec<WalkStep> {
        let mut steps = Vec::new();
        let mut cur = v;
        while let Some((p, s)) = self.parent.get(&cur) {
            steps.push(*s);
            cur = *p;
        }
        steps.reverse();
        steps
    }

    /// Root → src(b), then `b`, then back to the root along the tree.
    pub fn fundamental_cycle(&self, q: &WeightedQuiver, b: ArrowId) -> Option<WalkCycle> {
        let a = q.arrow(b)?;
        let root = *self.root_of.get(&a.src)?;
        let mut steps = self.path_from_root(a.src);
        steps.push(WalkStep {
            arrow: b,
            forward: true,
        });
        let back = WalkCycle {
            start: root,
            steps: self.path_from_root(a.dst),
        }
        .reversed();
        steps.extend(back.steps);
        Some(WalkCycle { start: root, steps })
    }

    /// `g(i)` = weight of the tree path from the root to `i`.
    fn path_gauge(&self, q: &WeightedQuiver) -> GaugeFunction {
        let mut g = BTreeMap::new();
        for v in q.vertex_ids() {
            let w = self.path_from_root(v).iter().fold(
                GroupElement::identity(q.group()),
                |acc, s| {
                    let w = &q.arrow(s.arrow).expect("tree arrow").weight;
                    if s.forward {
                        &acc * w
                    } else {
                        &acc * &w.inverse()
                    }
                },
            );
            g.insert(v, w);
        }
        GaugeFunction(g)
    }
}

/// Normalizes on the BFS tree from `root`. Returns the path gauge `g`
/// (`g(i)` = weight of the tree path from `root` to `i`) and the normalized
/// quiver `N`, with every tree arrow of weight 1 and `apply_gauge(N, g) = Q`.
pub fn tree_normalize(
    q: &WeightedQuiver,
    root: VertexId,
) -> Result<(GaugeFunction, WeightedQuiver), EquivalenceError> {
    if !q.has_vertex(root) {
        return Err(EquivalenceError::UnknownVertex(root));
    }
    let forest = SpanningForest::rooted(q, root);
    if forest.root_of.len() != q.vertices().len() {
        return Err(EquivalenceError::Disconnected);
    }
    let g = forest.path_gauge(q);
    let normalized = apply_gauge(q, &g.inverse())?;
    Ok((g, normalized))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Equivalence {
    /// `apply_gauge(left, gauge) = right`.
    Equivalent { gauge: GaugeFunction },
    /// `cycle` has the given weights on the two sides, and these cannot be
    /// matched by one gauge.
    NotEquivalent {
        reason: String,
        cycle: WalkCycle,
        left: GroupElement,
        right: GroupElement,
    },
    Undecided { reason: String },
}

impl Equivalence {
    pub fn witness(&self) -> Option<&GaugeFunction> {
        match self {
            Equivalence::Equivalent { gauge } => Some(gauge),
            _ => None,
        }
    }
}

fn check_shape(a: &WeightedQuiver, b: &WeightedQuiver) -> Result<(), EquivalenceError> {
    if a.group() != b.group() {
        return Err(EquivalenceError::ShapeMismatch(format!(
            "groups {} and {}",
            a.group(),
            b.group()
        )));
    }
    if a.vertex_ids().collect::<Vec<_>>() != b.vertex_ids().collect::<Vec<_>>() {
        return Err(EquivalenceError::ShapeMismatch("vertex sets differ".into()));
    }
    let shape = |q: &WeightedQuiver| -> Vec<(ArrowId, VertexId, VertexId)> {
        q.arrows().iter().map(|x| (x.id, x.src, x.dst)).collect()
    };
    if shape(a) != shape(b) {
        return Err(EquivalenceError::ShapeMismatch("arrows differ".into()));
    }
    Ok(())
}

pub fn are_equivalent(
    left: &WeightedQuiver,
    right: &WeightedQuiver,
) -> Result<Equivalence, EquivalenceError> {
    are_equivalent_bounded(left, right, DEFAULT_EXPONENT_BOUND)
}

/// Decides whether some gauge carries `left`'s weights to `right`'s on the
/// same arrows. Each component is normalized on the same spanning tree on
/// both sides; a witness is then `i ↦ g(i)^-1 · h · g'(i)` for a constant `h`
/// with `h^-1 u_b h = v_b` on every non-tree arrow `b`.
pub fn are_equivalent_bounded(
    left: &WeightedQuiver,
    right: &WeightedQuiver,
    bound: i64,
) -> Result<Equivalence, EquivalenceError> {
    check_shape(left, right)?;
    let forest = SpanningForest::new(left);
    let g = forest.path_gauge(left);
    let g2 = forest.path_gauge(right);
    let n = apply_gauge(left, &g.inverse())?;
    let n2 = apply_gauge(right, &g2.inverse())?;
    let tree = forest.tree_arrows();
    let kind = left.group();

    let mut constant: BTreeMap<VertexId, GroupElement> = BTreeMap::new();
    for &root in &forest.roots {
        let equations: Vec<(ArrowId, GroupElement, GroupElement)> = n
            .arrows()
            .iter()
            .zip(n2.arrows())
            .filter(|(a, _)| !tree.contains(&a.id) && forest.root_of[&a.src] == root)
            .map(|(a, b)| (a.id, a.weight.clone(), b.weight.clone()))
            .collect();
        let fail = |id: ArrowId, reason: String| -> Equivalence {
            let cycle = forest.fundamental_cycle(left, id).expect("arrow in forest");
            Equivalence::NotEquivalent {
                reason,
                left: cycle_weight(left, &cycle).expect("valid cycle"),
                right: cycle_weight(right, &cycle).expect("valid cycle"),
                cycle,
            }
        };
        let h = match solve_conjugation(kind, &equations, bound) {
            Solution::Found(h) => h,
            Solution::Unsolvable { arrow, reason } => return Ok(fail(arrow, reason)),
            Solution::Undecided(reason) => return Ok(Equivalence::Undecided { reason }),
        };
        constant.insert(root, h);
    }
    let gauge = GaugeFunction(
        left.vertex_ids()
            .map(|v| {
                let h = &constant[&forest.root_of[&v]];
                (v, &(&g.0[&v].inverse() * h) * &g2.0[&v])
            })
            .collect(),
    );
    debug_assert_eq!(apply_gauge(left, &gauge).as_ref(), Ok(right));
    Ok(Equivalence::Equivalent { gauge })
}

enum Solution {
    Found(GroupElement),
    Unsolvable { arrow: ArrowId, reason: String },
    Undecided(String),
}

/// Finds `h` with `h^-1 u h = v` for all equations `(arrow, u, v)`.
fn solve_conjugation(
    kind: GroupKind,
    equations: &[(ArrowId, GroupElement, GroupElement)],
    bound: i64,
) -> Solution {
    let identity = GroupElement::identity(kind);
    if kind.is_abelian() {
        return match equations.iter().find(|(_, u, v)| u != v) {
            None => Solution::Found(identity),
            Some((arrow, _, _)) => Solution::Unsolvable {
                arrow: *arrow,
                reason: "cycle weights differ".into(),
            },
        };
    }
    let GroupKind::Free { rank } = kind else {
        unreachable!("non-abelian kinds are free groups");
    };
    let word = |g: &GroupElement| g.word().expect("free group element").to_vec();
    let elem = |w: &[i32]| GroupElement::free_word(rank, w).expect("valid word");

    // individual conjugacy classes first: this gives a single distinguishing cycle
    for (arrow, u, v) in equations {
        if free::conjugator(&word(u), &word(v)).is_none() {
            return Solution::Unsolvable {
                arrow: *arrow,
                reason: "cycle weights are not conjugate".into(),
            };
        }
    }
    let Some((_, u0, v0)) = equations.iter().find(|(_, u, _)| !u.is_identity()) else {
        return Solution::Found(identity);
    };
    let h0 = elem(&free::conjugator(&word(u0), &word(v0)).expect("checked"));
    let r = elem(&free::root(&word(u0)));
    let holds = |h: &GroupElement, u: &GroupElement, v: &GroupElement| &u.conjugate_by(h) == v;

    // solutions of the first equation are r^k h0; an equation whose u commutes
    // with r is decided by h0 alone
    let mut open = Vec::new();
    for (arrow, u, v) in equations {
        if &(&r * u) == &(u * &r) {
            if !holds(&h0, u, v) {
                return Solution::Unsolvable {
                    arrow: *arrow,
                    reason: "cycle weights cannot be conjugated simultaneously".into(),
                };
            }
        } else {
            open.push((u, v));
        }
    }
    if open.is_empty() {
        return Solution::Found(h0);
    }
    for k in (0..=bound).flat_map(|k| if k == 0 { vec![0] } else { vec![k, -k] }) {
        let h = &r.pow(k) * &h0;
        if open.iter().all(|(u, v)| holds(&h, u, v)) {
            return Solution::Found(h);
        }
    }
    Solution::Undecided(format!(
        "no simultaneous conjugator r^k·h with |k| <= {bound}"
    ))
}

/// Fundamental cycles of the BFS spanning forest, one per non-tree arrow.
pub fn fundamental_cycles(q: &WeightedQuiver) -> Vec<(ArrowId, WalkCycle)> {
    let forest = SpanningForest::new(q);
    let tree = forest.tree_arrows();
    q.arrows()
        .iter()
        .filter(|a| !tree.contains(&a.id))
        .filter_map(|a| forest.fundamental_cycle(q, a.id).map(|c| (a.id, c)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const F2: GroupKind = GroupKind::Free { rank: 2 };

    fn el(s: &str) -> GroupElement {
        GroupElement::parse(F2, s).unwrap()
    }

    fn triangle(w: [&str; 3]) -> WeightedQuiver {
        let mut q = WeightedQuiver::with_vertices(F2, 3);
        q.add_arrow(1, 2, el(w[0])).unwrap();
        q.add_arrow(2, 3, el(w[1])).unwrap();
        q.add_arrow(1, 3, el(w[2])).unwrap();
        q
    }

    #[test]
    fn gauge_on_single_arrow() {
        let mut q = WeightedQuiver::with_vertices(F2, 2);
        q.add_plain_arrow(1, 2).unwrap();
        let g = GaugeFunction(BTreeMap::from([(1, el("x1")), (2, el(""))]));
        let out = apply_gauge(&q, &g).unwrap();
        assert_eq!(out.arrows()[0].weight, el("x1^-1"));
        assert_eq!(apply_gauge(&out, &g.inverse()).unwrap(), q);
        let partial = GaugeFunction(BTreeMap::from([(1, el("x1"))]));
        assert_eq!(
            apply_gauge(&q, &partial).unwrap_err(),
            EquivalenceError::MissingVertex(2)
        );
    }

    #[test]
    fn normalize_single_arrow() {
        let mut q = WeightedQuiver::with_vertices(F2, 2);
        q.add_arrow(1, 2, el("x1")).unwrap();
        let (g, n) = tree_normalize(&q, 1).unwrap();
        assert_eq!(g.get(1), Some(&el("")));
        assert_eq!(g.get(2), Some(&el("x1")));
        assert!(n.arrows()[0].weight.is_identity());
        let (g2, _) = tree_normalize(&n, 1).unwrap();
        assert!(g2.is_identity());
    }

    #[test]
    fn walk_cycles() {
        let q = triangle(["x1", "x2", "x1 x2 x1"]);
        let c = fundamental_cycles(&q);
        assert_eq!(c.len(), 1);
        let w = cycle_weight(&q, &c[0].1).unwrap();
        // tree arrows leave 1; 2→3 closes the loop
        assert_eq!(w, el("x1 x2 x1^-1 x2^-1 x1^-1"));
        let rev = cycle_weight(&q, &c[0].1.reversed()).unwrap();
        assert_eq!(rev, w.inverse());
        let broken = WalkCycle {
            start: 1,
            steps: vec![WalkStep {
                arrow: ArrowId(2),
                forward: true,
            }],
        };
        assert_eq!(cycle_weight(&q, &broken), Err(EquivalenceError::BrokenWalk(0)));
    }

    #[test]
    fn conjugate_triangles() {
        let a = triangle(["x1", "x2", ""]);
        let g = GaugeFunction(BTreeMap::from([
            (1, el("x2 x1")),
            (2, el("x1^-1")),
            (3, el("x2 x2")),
        ]));
        let b = apply_gauge(&a, &g).unwrap();
        let verdict = are_equivalent(&a, &b).unwrap();
        let w = verdict.witness().expect("equivalent");
        assert_eq!(apply_gauge(&a, w).unwrap(), b);
    }

    #[test]
    fn free_non_equivalence() {
        let a = triangle(["x1", "", ""]);
        let b = triangle(["x2", "", ""]);
        assert!(matches!(
            are_equivalent(&a, &b).unwrap(),
            Equivalence::NotEquivalent { .. }
        ));
    }

    #[test]
    fn two_loops_need_simultaneous_conjugation() {
        // two cycles through 1: weights (x1, x2) vs (x1, x1 x2 x1^-1)... not jointly conjugate
        let mut a = WeightedQuiver::with_vertices(F2, 3);
        a.add_plain_arrow(1, 2).unwrap();
        a.add_arrow(1, 2, el("x1")).unwrap();
        a.add_plain_arrow(1, 3).unwrap();
        a.add_arrow(1, 3, el("x2")).unwrap();
        let b = a.map_weights(F2, |x| {
            if x.id == ArrowId(4) {
                el("x1 x2 x1^-1")
            } else {
                x.weight.clone()
            }
        });
        // conjugating by x1^-1 would fix x1 and send x2 to x1 x2 x1^-1
        let v = are_equivalent(&a, &b).unwrap();
        let w = v.witness().expect("equivalent via x1^-1");
        assert_eq!(apply_gauge(&a, w).unwrap(), b);

        // fixing x1 forces h = x1^k, which never carries x2 to this conjugate
        let c = a.map_weights(F2, |x| {
            if x.id == ArrowId(4) {
                el("x2 x1 x2 x1^-1 x2^-1")
            } else {
                x.weight.clone()
            }
        });
        assert!(matches!(
            are_equivalent_bounded(&a, &c, 8).unwrap(),
            Equivalence::Undecided { .. }
        ));

        // (x1, x1) against (x1, x2 x1 x2^-1): both equations involve powers of x1
        let d = a.map_weights(F2, |x| match x.id.0 {
            4 => el("x1"),
            _ => x.weight.clone(),
        });
        let e = a.map_weights(F2, |x| match x.id.0 {
            4 => el("x2 x1 x2^-1"),
            _ => x.weight.clone(),
        });
        assert!(matches!(
            are_equivalent(&d, &e).unwrap(),
            Equivalence::NotEquivalent { .. }
        ));
    }

    #[test]
    fn abelian_cycle_invariant() {
        let k = GroupKind::FreeAbelian { rank: 2 };
        let mut a = WeightedQuiver::with_vertices(k, 3);
        a.add_arrow(1, 2, GroupElement::free_abelian(vec![1, 0])).unwrap();
        a.add_arrow(2, 3, GroupElement::identity(k)).unwrap();
        a.add_arrow(3, 1, GroupElement::identity(k)).unwrap();
        let b = a.map_weights(k, |x| {
            if x.id == ArrowId(1) {
                GroupElement::free_abelian(vec![0, 1])
            } else {
                x.weight.clone()
            }
        });
        match are_equivalent(&a, &b).unwrap() {
            Equivalence::NotEquivalent { left, right, .. } => {
                assert_ne!(left, right);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn shape_and_connectivity_errors() {
        let a = triangle(["", "", ""]);
        let mut b = WeightedQuiver::with_vertices(F2, 3);
        b.add_plain_arrow(2, 1).unwrap();
        b.add_plain_arrow(2, 3).unwrap();
        b.add_plain_arrow(1, 3).unwrap();
        assert!(matches!(
            are_equivalent(&a, &b),
            Err(EquivalenceError::ShapeMismatch(_))
        ));
        let split = WeightedQuiver::with_vertices(F2, 2);
        assert_eq!(
            tree_normalize(&split, 1).unwrap_err(),
            EquivalenceError::Disconnected
        );
    }
}
