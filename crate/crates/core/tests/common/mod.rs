//! Independent reference implementations used as test oracles. None of these
//! call into the library beyond reading quiver data.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use wquiv_core::linalg::Rational;
use wquiv_core::potential::{min_rotation, path_weight, GradedAutomorphism, Potential, Series, Word};

use wquiv_core::quiver::{ArrowId, VertexId};
use wquiv_core::{GroupElement, WeightedQuiver};

/// Signed arrow counts over the given vertex order.
pub fn b_matrix(q: &WeightedQuiver, order: &[VertexId]) -> Vec<Vec<i64>> {
    let idx: BTreeMap<VertexId, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = order.len();
    let mut b = vec![vec![0i64; n]; n];
    for a in q.arrows() {
        b[idx[&a.src]][idx[&a.dst]] += 1;
        b[idx[&a.dst]][idx[&a.src]] -= 1;
    }
    b
}

/// Classical matrix mutation at index `k`.
pub fn matrix_mutation(b: &[Vec<i64>], k: usize) -> Vec<Vec<i64>> {
    let n = b.len();
    let mut out = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = if i == k || j == k {
                -b[i][j]
            } else {
                b[i][j] + b[i][k].signum() * (b[i][k] * b[k][j]).max(0)
            };
        }
    }
    out
}

fn product(ws: impl IntoIterator<Item = GroupElement>, q: &WeightedQuiver) -> GroupElement {
    ws.into_iter()
        .fold(GroupElement::identity(q.group()), |acc, w| &acc * &w)
}

/// Every simple directed cycle as a sequence of arrow ids, by brute-force
/// depth-first search from every arrow.
pub fn directed_simple_cycles(q: &WeightedQuiver) -> Vec<Vec<ArrowId>> {
    let mut out = Vec::new();
    fn go(
        q: &WeightedQuiver,
        start: VertexId,
        cur: VertexId,
        seen: &mut Vec<VertexId>,
        path: &mut Vec<ArrowId>,
        out: &mut Vec<Vec<ArrowId>>,
    ) {
        for a in q.arrows().iter().filter(|a| a.src == cur) {
            if a.dst == start {
                let mut c = path.clone();
                c.push(a.id);
                out.push(c);
            } else if a.dst > start && !seen.contains(&a.dst) {
                seen.push(a.dst);
                path.push(a.id);
                go(q, start, a.dst, seen, path, out);
                path.pop();
                seen.pop();
            }
        }
    }
    for v in q.vertex_ids() {
        go(q, v, v, &mut vec![v], &mut Vec::new(), &mut out);
    }
    out
}

/// Every oriented cycle has trivial weight, decided from the simple cycles.
pub fn oriented_cycles_trivial_brute(q: &WeightedQuiver) -> bool {
    directed_simple_cycles(q).iter().all(|c| {
        product(c.iter().map(|id| q.arrow(*id).unwrap().weight.clone()), q).is_identity()
    })
}

/// A simple cycle of the underlying graph: arrows with traversal direction.
pub type UndirectedCycle = Vec<(ArrowId, bool)>;

/// Every simple cycle of the underlying multigraph (length 2 included, for
/// parallel or antiparallel arrows), each once, identified by its arrow set.
pub fn undirected_simple_cycles(q: &WeightedQuiver) -> Vec<UndirectedCycle> {
    let mut seen: BTreeSet<BTreeSet<ArrowId>> = BTreeSet::new();
    let mut out = Vec::new();
    fn go(
        q: &WeightedQuiver,
        start: VertexId,
        cur: VertexId,
        visited: &mut Vec<VertexId>,
        path: &mut UndirectedCycle,
        seen: &mut BTreeSet<BTreeSet<ArrowId>>,
        out: &mut Vec<UndirectedCycle>,
    ) {
        for a in q.arrows() {
            let (fwd, next) = if a.src == cur {
                (true, a.dst)
            } else if a.dst == cur {
                (false, a.src)
            } else {
                continue;
            };
            if path.iter().any(|(id, _)| *id == a.id) {
                continue;
            }
            if next == start && !path.is_empty() {
                let mut c = path.clone();
                c.push((a.id, fwd));
                if seen.insert(c.iter().map(|(id, _)| *id).collect()) {
                    out.push(c);
                }
            } else if next > start && !visited.contains(&next) {
                visited.push(next);
                path.push((a.id, fwd));
                go(q, start, next, visited, path, seen, out);
                path.pop();
                visited.pop();
            }
        }
    }
    for v in q.vertex_ids() {
        go(q, v, v, &mut vec![v], &mut Vec::new(), &mut seen, &mut out);
    }
    out
}

pub fn undirected_cycle_weight(q: &WeightedQuiver, c: &UndirectedCycle) -> GroupElement {
    product(
        c.iter().map(|(id, fwd)| {
            let w = q.arrow(*id).unwrap().weight.clone();
            if *fwd {
                w
            } else {
                w.inverse()
            }
        }),
        q,
    )
}

/// Number of oriented 3-cycles of trivial weight, by brute force over arrow triples.
pub fn triangle_count(q: &WeightedQuiver) -> usize {
    let arrows = q.arrows();
    let mut n = 0;
    for a in arrows {
        for b in arrows.iter().filter(|b| b.src == a.dst) {
            for c in arrows.iter().filter(|c| c.src == b.dst && c.dst == a.src) {
                let smallest = a.id < b.id && a.id < c.id;
                if smallest && (&(&a.weight * &b.weight) * &c.weight).is_identity() {
                    n += 1;
                }
            }
        }
    }
    n
}

/// Multiset of `(src, dst, weight)` triples, independent of arrow ids.
pub fn labeled(q: &WeightedQuiver) -> Vec<(VertexId, VertexId, String)> {
    let mut v: Vec<_> = q
        .arrows()
        .iter()
        .map(|a| (a.src, a.dst, a.weight.to_string()))
        .collect();
    v.sort();
    v
}

pub fn r(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Paths of length `2..=max_len` from `src` to `dst`.
pub fn paths(q: &WeightedQuiver, src: VertexId, dst: VertexId, max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut stack: Vec<(VertexId, Word)> = vec![(src, Vec::new())];
    while let Some((v, w)) = stack.pop() {
        if w.len() >= 2 && v == dst {
            out.push(w.clone());
        }
        if w.len() == max_len {
            continue;
        }
        for a in q.arrows().iter().filter(|a| a.src == v) {
            let mut next = w.clone();
            next.push(a.id);
            stack.push((a.dst, next));
        }
    }
    out
}

/// A random weight-compatible automorphism `a ↦ a + (higher terms)`.
pub fn random_unitriangular(rng: &mut ChaCha8Rng, q: &WeightedQuiver) -> GradedAutomorphism {
    let mut phi = GradedAutomorphism::identity();
    for a in q.arrows() {
        let options: Vec<Word> = paths(q, a.src, a.dst, 3)
            .into_iter()
            .filter(|w| path_weight(q, w).is_ok_and(|g| g == a.weight))
            .collect();
        if options.is_empty() || rng.gen_bool(0.3) {
            continue;
        }
        let mut img = Series::word(vec![a.id], usize::MAX);
        for w in options.choose_multiple(rng, 2) {
            img.add_term(w.clone(), r(rng.gen_range(-2..=2)));
        }
        phi.images.insert(a.id, img);
    }
    phi
}

/// `(φ1 ⊗ φ1)(S^(2))` from the linear parts of the images, merged up to rotation.
pub fn linear_image_of_degree_two(phi: &GradedAutomorphism, s: &Potential) -> BTreeMap<Word, Rational> {
    let linear = |a: ArrowId| -> Vec<(ArrowId, Rational)> {
        match phi.images.get(&a) {
            None => vec![(a, r(1))],
            Some(img) => img
                .terms()
                .iter()
                .filter(|(w, _)| w.len() == 1)
                .map(|(w, c)| (w[0], c.clone()))
                .collect(),
        }
    };
    let mut out: BTreeMap<Word, Rational> = BTreeMap::new();
    for (w, c) in s.terms().iter().filter(|(w, _)| w.len() == 2) {
        for (x, cx) in linear(w[0]) {
            for (y, cy) in linear(w[1]) {
                let slot = out.entry(min_rotation(&[x, y])).or_insert_with(Rational::zero);
                *slot += c * &cx * &cy;
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

pub fn degree_two(s: &Potential) -> BTreeMap<Word, Rational> {
    s.homogeneous(2).terms().clone()
}
