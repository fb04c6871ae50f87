//! Seeded generation of test quivers and the small-quiver catalog.
//!
//! Every generator draws from a caller-supplied RNG; [`generate_corpus`] seeds a
//! `ChaCha8Rng`, so the same parameters always yields the same files byte for byte.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_traits::Zero;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::oriented_cycles_trivial;
use crate::equivalence::{apply_gauge, GaugeFunction};
use crate::group::{GroupElement, GroupKind, Letter};
use crate::io::{save_quiver, IoError};
use crate::linalg::Rational;
use crate::mutation::{mutate, MutationError};
use crate::potential::{min_rotation, path_endpoints, path_weight, potential_from_terms, Potential, Word};
use crate::quiver::{VertexId, WeightedQuiver};
use crate::tame::{cn_membership, CnMembership};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("unsatisfiable corpus spec: {0}")]
    Unsatisfiable(String),
    #[error("generated quiver {name} breaks the {policy} postcondition: {reason}")]
    Postcondition {
        name: String,
        policy: WeightPolicy,
        reason: String,
    },
    #[error(transparent)]
    Mutation(#[from] MutationError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{path}: {source}")]
    Dir {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightPolicy {
    /// Every weight is the identity.
    Trivial,
    /// Weights `g(i)^-1 g(j)` for a random vertex function `g`.
    Gauge,
    /// Every oriented cycle has weight 1; arrows between strongly connected
    /// components get arbitrary weights.
    OrientedCycleTrivial,
    /// Random mutations of an unoriented `n`-cycle carrying one generator.
    Cn,
    /// Independent random weights.
    FreeRandom,
}

impl WeightPolicy {
    pub const ALL: [WeightPolicy; 5] = [
        WeightPolicy::Trivial,
        WeightPolicy::Gauge,
        WeightPolicy::OrientedCycleTrivial,
        WeightPolicy::Cn,
        WeightPolicy::FreeRandom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WeightPolicy::Trivial => "trivial",
            WeightPolicy::Gauge => "gauge",
            WeightPolicy::OrientedCycleTrivial => "oriented-cycle-trivial",
            WeightPolicy::Cn => "cn",
            WeightPolicy::FreeRandom => "free-random",
        }
    }
}

impl fmt::Display for WeightPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WeightPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        WeightPolicy::ALL
            .into_iter()
            .find(|p| p.name() == s.trim())
            .ok_or_else(|| {
                let names: Vec<&str> = WeightPolicy::ALL.iter().map(|p| p.name()).collect();
                format!("unknown policy {s:?}; expected one of {}", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub count: usize,
    /// Vertex counts are drawn uniformly from `min_vertices..=max_vertices`.
    pub min_vertices: usize,
    pub max_vertices: usize,
    pub group: GroupKind,
    pub policy: WeightPolicy,
    pub seed: u64,
    /// Largest number of parallel arrows between two vertices.
    pub max_parallel: usize,
    /// For [`WeightPolicy::Cn`]: the number of random mutations is drawn from `0..=max_steps`.
    pub max_steps: usize,
}

impl CorpusSpec {
    pub fn new(policy: WeightPolicy, group: GroupKind, count: usize, vertices: usize, seed: u64) -> Self {
        CorpusSpec {
            count,
            min_vertices: vertices,
            max_vertices: vertices,
            group,
            policy,
            seed,
            max_parallel: 2,
            max_steps: 2 * vertices,
        }
    }

    fn check(&self) -> Result<(), CorpusError> {
        let bad = |m: &str| Err(CorpusError::Unsatisfiable(m.to_string()));
        if self.group.validate().is_err() {
            return bad("invalid group");
        }
        if self.min_vertices > self.max_vertices {
            return bad("min_vertices exceeds max_vertices");
        }
        if self.min_vertices == 0 {
            return bad("quivers need at least one vertex");
        }
        if self.max_parallel == 0 {
            return bad("max_parallel must be at least 1");
        }
        if self.policy == WeightPolicy::Cn {
            if self.group.is_trivial_group() {
                return bad("C_n(t) needs a nontrivial weight t, but the group is trivial");
            }
            if self.min_vertices < 3 {
                return bad("C_n(t) corpora start from cycles on at least 3 vertices");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub name: String,
    pub quiver: WeightedQuiver,
}

pub fn generate_corpus(spec: &CorpusSpec) -> Result<Vec<CorpusEntry>, CorpusError> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = Vec::with_capacity(spec.count);
    for index in 0..spec.count {
        let n = rng.gen_range(spec.min_vertices..=spec.max_vertices);
        let name = format!("{}-{index:04}", spec.policy);
        let quiver = match spec.policy {
            WeightPolicy::Trivial => random_shape(&mut rng, spec.group, n, spec.max_parallel),
            WeightPolicy::Gauge => gauge_weighted(&mut rng, spec.group, n, spec.max_parallel),
            WeightPolicy::OrientedCycleTrivial => {
                oriented_cycle_trivial_quiver(&mut rng, spec.group, n, spec.max_parallel)
            }
            WeightPolicy::FreeRandom => free_random(&mut rng, spec.group, n, spec.max_parallel),
            WeightPolicy::Cn => {
                let t = GroupElement::generator(spec.group, 1)
                    .map_err(|e| CorpusError::Unsatisfiable(e.to_string()))?;
                let steps = rng.gen_range(0..=spec.max_steps);
                cn_member(&mut rng, n, &t, steps)?.0
            }
        };
        check_postcondition(spec.policy, &name, &quiver)?;
        out.push(CorpusEntry { name, quiver });
    }
    Ok(out)
}

fn check_postcondition(policy: WeightPolicy, name: &str, q: &WeightedQuiver) -> Result<(), CorpusError> {
    let fail = |reason: String| {
        Err(CorpusError::Postcondition {
            name: name.to_string(),
            policy,
            reason,
        })
    };
    let violations = q.validate();
    if !violations.is_empty() {
        return fail(violations[0].to_string());
    }
    match policy {
        WeightPolicy::Trivial if q.arrows().iter().any(|a| !a.weight.is_identity()) => {
            fail("nontrivial weight".into())
        }
        WeightPolicy::OrientedCycleTrivial | WeightPolicy::Gauge if !oriented_cycles_trivial(q).trivial => {
            fail("an oriented cycle has nontrivial weight".into())
        }
        WeightPolicy::Cn => match cn_membership(q) {
            Ok(CnMembership::Member { .. }) => Ok(()),
            Ok(CnMembership::NonMember { condition, .. }) => fail(format!("condition {condition} fails")),
            Err(e) => fail(e.to_string()),
        },
        _ => Ok(()),
    }
}

/// Writes `<dir>/<name>.json` for every entry and returns the paths in order.
pub fn write_corpus(entries: &[CorpusEntry], dir: impl AsRef<Path>) -> Result<Vec<PathBuf>, CorpusError> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|source| CorpusError::Dir {
        path: dir.display().to_string(),
        source,
    })?;
    let mut paths = Vec::with_capacity(entries.len());
    for e in entries {
        let path = dir.join(format!("{}.json", e.name));
        save_quiver(&e.quiver, &path)?;
        paths.push(path);
    }
    Ok(paths)
}

/// A random element: uniform residues, coordinates in `-2..=2`, reduced free
/// words of length at most 3.
pub fn random_element<R: Rng>(rng: &mut R, kind: GroupKind) -> GroupElement {
    match kind {
        GroupKind::Trivial => GroupElement::identity(kind),
        GroupKind::Cyclic { modulus } => GroupElement::residue(modulus, rng.gen_range(0..modulus) as i128),
        GroupKind::FreeAbelian { rank } => {
            GroupElement::free_abelian((0..rank).map(|_| rng.gen_range(-2..=2)).collect())
        }
        GroupKind::Free { rank } => {
            let len = rng.gen_range(0..=3);
            let letters: Vec<Letter> = (0..len)
                .map(|_| {
                    let g = rng.gen_range(1..=rank as Letter);
                    if rng.gen_bool(0.5) {
                        g
                    } else {
                        -g
                    }
                })
                .collect();
            GroupElement::free_word(rank, &letters).expect("letters in range")
        }
    }
}

pub fn random_gauge<R: Rng>(rng: &mut R, q: &WeightedQuiver) -> GaugeFunction {
    GaugeFunction(q.vertex_ids().map(|v| (v, random_element(rng, q.group()))).collect())
}

/// Random 2-cycle-free quiver on vertices `1..=n` with identity weights: each
/// pair of vertices is joined with probability 1/2 by `1..=max_parallel`
/// arrows in a random direction.
pub fn random_shape<R: Rng>(rng: &mut R, group: GroupKind, n: usize, max_parallel: usize) -> WeightedQuiver {
    let mut q = WeightedQuiver::with_vertices(group, n as u32);
    for i in 1..=n as VertexId {
        for j in i + 1..=n as VertexId {
            if !rng.gen_bool(0.5) {
                continue;
            }
            let m = rng.gen_range(1..=max_parallel);
            let (s, d) = if rng.gen_bool(0.5) { (i, j) } else { (j, i) };
            for _ in 0..m {
                q.add_plain_arrow(s, d).expect("vertices exist");
            }
        }
    }
    q
}

pub fn free_random<R: Rng>(rng: &mut R, group: GroupKind, n: usize, max_parallel: usize) -> WeightedQuiver {
    let shape = random_shape(rng, group, n, max_parallel);
    shape.map_weights(group, |_| random_element(rng, group))
}

pub fn gauge_weighted<R: Rng>(rng: &mut R, group: GroupKind, n: usize, max_parallel: usize) -> WeightedQuiver {
    let shape = random_shape(rng, group, n, max_parallel);
    let g = random_gauge(rng, &shape);
    apply_gauge(&shape, &g).expect("gauge covers every vertex")
}

/// Gauge weights inside strongly connected components, random weights on the
/// arrows between them.
pub fn oriented_cycle_trivial_quiver<R: Rng>(
    rng: &mut R,
    group: GroupKind,
    n: usize,
    max_parallel: usize,
) -> WeightedQuiver {
    let shape = random_shape(rng, group, n, max_parallel);
    let component = strong_components(&shape);
    let g = random_gauge(rng, &shape);
    shape.map_weights(group, |a| {
        if component[&a.src] == component[&a.dst] {
            &g.0[&a.src].inverse() * &g.0[&a.dst]
        } else {
            random_element(rng, group)
        }
    })
}

/// Component index of every vertex.
fn strong_components(q: &WeightedQuiver) -> BTreeMap<VertexId, usize> {
    let mut graph: DiGraph<VertexId, ()> = DiGraph::new();
    let nodes: BTreeMap<VertexId, _> = q.vertex_ids().map(|v| (v, graph.add_node(v))).collect();
    for a in q.arrows() {
        graph.add_edge(nodes[&a.src], nodes[&a.dst], ());
    }
    let mut out = BTreeMap::new();
    for (c, scc) in tarjan_scc(&graph).into_iter().enumerate() {
        for node in scc {
            out.insert(graph[node], c);
        }
    }
    out
}

/// Unoriented cycle `1 - 2 - … - n - 1` with random edge directions (not all
/// alike) and weight `t` on one random edge, identity elsewhere.
pub fn unoriented_cycle<R: Rng>(rng: &mut R, n: usize, t: &GroupElement) -> WeightedQuiver {
    assert!(n >= 3, "cycles need at least 3 vertices");
    let group = t.kind();
    let mut forward: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    if forward.iter().all(|&f| f == forward[0]) {
        let i = rng.gen_range(0..n);
        forward[i] = !forward[i];
    }
    let marked = rng.gen_range(0..n);
    let mut q = WeightedQuiver::with_vertices(group, n as u32);
    for (i, &f) in forward.iter().enumerate() {
        let u = i as VertexId + 1;
        let v = (i + 1) as VertexId % n as VertexId + 1;
        let (s, d) = if f { (u, v) } else { (v, u) };
        let w = if i == marked {
            t.clone()
        } else {
            GroupElement::identity(group)
        };
        q.add_arrow(s, d, w).expect("vertices exist");
    }
    q
}

/// An unoriented `n`-cycle of weight `t` followed by `steps` mutations at
/// random vertices (no vertex twice in a row). Returns the quiver and the
/// mutation sequence.
pub fn cn_member<R: Rng>(
    rng: &mut R,
    n: usize,
    t: &GroupElement,
    steps: usize,
) -> Result<(WeightedQuiver, Vec<VertexId>), MutationError> {
    let mut q = unoriented_cycle(rng, n, t);
    let mut sequence: Vec<VertexId> = Vec::with_capacity(steps);
    for _ in 0..steps {
        let choices: Vec<VertexId> = (1..=n as VertexId).filter(|&v| sequence.last() != Some(&v)).collect();
        let k = *choices.choose(rng).expect("n >= 3");
        q = mutate(&q, k)?.result;
        sequence.push(k);
    }
    Ok((q, sequence))
}

/// Every 2-cycle-free quiver on `1..=max_vertices` vertices with at most
/// `max_parallel` parallel arrows, one per isomorphism class, with trivial
/// weights. Names are `cat-n<vertices>-<index>`.
pub fn sign_coherence_catalog(max_vertices: usize, max_parallel: usize) -> Vec<(String, WeightedQuiver)> {
    let mut out = Vec::new();
    for n in 1..=max_vertices {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let perms = permutations(n);
        let m = max_parallel as i8;
        let values: Vec<i8> = (-m..=m).collect();
        let base = values.len();
        let total = base.pow(pairs.len() as u32);
        let mut index = 0;
        for code in 0..total {
            let mut c = code;
            let config: Vec<i8> = pairs
                .iter()
                .map(|_| {
                    let v = values[c % base];
                    c /= base;
                    v
                })
                .collect();
            let relabel = |p: &[usize]| -> Vec<i8> {
                let mut out = vec![0i8; pairs.len()];
                for (&(i, j), &v) in pairs.iter().zip(&config) {
                    let (a, b) = (p[i], p[j]);
                    let (a, b, v) = if a < b { (a, b, v) } else { (b, a, -v) };
                    let slot = pairs.iter().position(|&x| x == (a, b)).expect("pair");
                    out[slot] = v;
                }
                out
            };
            if perms.iter().any(|p| relabel(p) < config) {
                continue;
            }
            let mut q = WeightedQuiver::with_vertices(GroupKind::Trivial, n as u32);
            for (&(i, j), &v) in pairs.iter().zip(&config) {
                let (s, d) = if v > 0 { (i, j) } else { (j, i) };
                for _ in 0..v.unsigned_abs() {
                    q.add_plain_arrow(s as VertexId + 1, d as VertexId + 1).expect("vertices exist");
                }
            }
            out.push((format!("cat-n{n}-{index:04}"), q));
            index += 1;
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Cycles of length `2..=max_len` whose weight is the identity, each once in
/// minimal rotation.
pub fn trivial_weight_cycles(q: &WeightedQuiver, max_len: usize) -> Vec<Word> {
    let mut found: BTreeSet<Word> = BTreeSet::new();
    let mut stack: Vec<Word> = q.arrows().iter().map(|a| vec![a.id]).collect();
    while let Some(w) = stack.pop() {
        let (src, dst) = path_endpoints(q, &w).expect("composable");
        if w.len() >= 2 && src == dst && path_weight(q, &w).is_ok_and(|g| g.is_identity()) {
            found.insert(min_rotation(&w));
        }
        if w.len() == max_len {
            continue;
        }
        for a in q.arrows().iter().filter(|a| a.src == dst && a.id > w[0]) {
            let mut next = w.clone();
            next.push(a.id);
            stack.push(next);
        }
        // the first arrow is the smallest; allow it to recur later in the word
        for a in q.arrows().iter().filter(|a| a.src == dst && a.id == w[0]) {
            let mut next = w.clone();
            next.push(a.id);
            stack.push(next);
        }
    }
    found.into_iter().collect()
}

/// Random potential on `q`: every trivial-weight cycle of length
/// `min_len..=max_len` is kept with probability `density`, with a random
/// nonzero coefficient in `{±1, ±2, ±1/2, ±3}`.
pub fn random_potential<R: Rng>(
    rng: &mut R,
    q: &WeightedQuiver,
    min_len: usize,
    max_len: usize,
    density: f64,
) -> Potential {
    let coeffs: [(i64, i64); 4] = [(1, 1), (2, 1), (1, 2), (3, 1)];
    let mut terms = Vec::new();
    for w in trivial_weight_cycles(q, max_len) {
        if w.len() < min_len || !rng.gen_bool(density) {
            continue;
        }
        let (num, den) = *coeffs.choose(rng).expect("nonempty");
        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
        terms.push((w, Rational::new((sign * num).into(), den.into())));
    }
    let p = potential_from_terms(q, terms).expect("cycles of weight 1");
    debug_assert!(p.terms().values().all(|c| !c.is_zero()));
    p
}

/// Random quiver for potentials: each ordered pair gets `0..=max_parallel`
/// arrows independently (so 2-cycles occur), and each arrow gets the gauge
/// weight `g(i)^-1 g(j)` with probability 3/4 and a random weight otherwise.
pub fn random_wqp_quiver<R: Rng>(rng: &mut R, group: GroupKind, n: usize, max_parallel: usize) -> WeightedQuiver {
    let mut q = WeightedQuiver::with_vertices(group, n as u32);
    let g: Vec<GroupElement> = (0..=n).map(|_| random_element(rng, group)).collect();
    for i in 1..=n as VertexId {
        for j in 1..=n as VertexId {
            if i == j || !rng.gen_bool(0.4) {
                continue;
            }
            for _ in 0..rng.gen_range(1..=max_parallel) {
                let w = if rng.gen_bool(0.75) {
                    &g[i as usize].inverse() * &g[j as usize]
                } else {
                    random_element(rng, group)
                };
                q.add_arrow(i, j, w).expect("vertices exist");
            }
        }
    }
    q
}

/// Like [`random_wqp_quiver`] but 2-cycle-free, so every vertex can be mutated.
pub fn random_reduced_wqp_quiver<R: Rng>(
    rng: &mut R,
    group: GroupKind,
    n: usize,
    max_parallel: usize,
) -> WeightedQuiver {
    let shape = random_shape(rng, group, n, max_parallel);
    let g = random_gauge(rng, &shape);
    shape.map_weights(group, |a| {
        if rng.gen_bool(0.75) {
            &g.0[&a.src].inverse() * &g.0[&a.dst]
        } else {
            random_element(rng, group)
        }
    })
}
