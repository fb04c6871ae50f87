//! Weighted quivers with potential over the rationals.
//!
//! Paths are words of arrow ids composed left to right. A potential is a
//! finite rational combination of oriented cycles of weight 1, stored with
//! every cycle rotated to its lexicographically smallest rotation. All
//! computations are truncated at a caller-chosen degree `N`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::group::GroupElement;
use crate::linalg::{Matrix, Rational};
use crate::mutation::{mutate_with, premutate_unchecked, weight_reduce, MutationOptions, Provenance};
use crate::quiver::{ArrowId, VertexId, WeightedQuiver};

pub type Word = Vec<ArrowId>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PotentialError {
    #[error("arrow {0} does not exist")]
    UnknownArrow(ArrowId),
    #[error("{} is not a path", fmt_word(.0))]
    NotComposable(Word),
    #[error("{} is not a cycle", fmt_word(.0))]
    NotCyclic(Word),
    #[error("{} is a loop", fmt_word(.0))]
    Loop(Word),
    #[error("empty word in a potential")]
    EmptyWord,
    #[error("{} has weight {weight}, not 1", fmt_word(.word))]
    NontrivialWeight { word: Word, weight: GroupElement },
    #[error("vertex {0} is frozen")]
    Frozen(VertexId),
    #[error("vertex {0} does not exist")]
    UnknownVertex(VertexId),
    #[error("2-cycle through {vertex}: {}", fmt_word(.word))]
    TwoCycleThrough { vertex: VertexId, word: Word },
    #[error("oriented 2-cycle between {} and {} passes through the mutation vertex", .0.0, .0.1)]
    QuiverTwoCycle((VertexId, VertexId)),
    #[error("truncation degree {degree} is below the potential's degree {needed}")]
    DegreeTooSmall { degree: usize, needed: usize },
    #[error("splitting did not stabilize below degree {degree}; contaminated terms remain at degree {reached}")]
    NotStabilized { degree: usize, reached: usize },
    #[error("image of arrow {arrow} is incompatible: {reason}")]
    Incompatible { arrow: ArrowId, reason: String },
}

fn fmt_word(w: &[ArrowId]) -> String {
    w.iter().map(|a| a.to_string()).collect::<Vec<_>>().join("·")
}

/// Source and target of a composable word.
pub fn path_endpoints(q: &WeightedQuiver, w: &[ArrowId]) -> Result<(VertexId, VertexId), PotentialError> {
    let first = w.first().ok_or(PotentialError::EmptyWord)?;
    let mut cur = q.arrow(*first).ok_or(PotentialError::UnknownArrow(*first))?;
    let src = cur.src;
    for id in &w[1..] {
        let next = q.arrow(*id).ok_or(PotentialError::UnknownArrow(*id))?;
        if next.src != cur.dst {
            return Err(PotentialError::NotComposable(w.to_vec()));
        }
        cur = next;
    }
    Ok((src, cur.dst))
}

/// Ordered product of the weights along a word.
pub fn path_weight(q: &WeightedQuiver, w: &[ArrowId]) -> Result<GroupElement, PotentialError> {
    w.iter().try_fold(GroupElement::identity(q.group()), |acc, id| {
        let a = q.arrow(*id).ok_or(PotentialError::UnknownArrow(*id))?;
        Ok(&acc * &a.weight)
    })
}

/// Smallest rotation of a cyclic word.
pub fn min_rotation(w: &[ArrowId]) -> Word {
    (0..w.len())
        .map(|i| {
            let mut r = w.to_vec();
            r.rotate_left(i);
            r
        })
        .min()
        .unwrap_or_default()
}

/// Finite rational combination of words, truncated at `degree`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Series {
    degree: usize,
    terms: BTreeMap<Word, Rational>,
}

impl Series {
    pub fn zero(degree: usize) -> Self {
        Series {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn word(w: Word, degree: usize) -> Self {
        let mut s = Series::zero(degree);
        s.add_term(w, Rational::one());
        s
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Word, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c·w`; words longer than the truncation degree are dropped.
    pub fn add_term(&mut self, w: Word, c: Rational) {
        if w.len() > self.degree || c.is_zero() {
            return;
        }
        let slot = self.terms.entry(w).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&mut self, other: &Series, scale: &Rational) {
        for (w, c) in &other.terms {
            self.add_term(w.clone(), c * scale);
        }
    }

    /// Concatenation product, truncated.
    pub fn mul(&self, other: &Series) -> Series {
        let mut out = Series::zero(self.degree.min(other.degree));
        for (u, c) in &self.terms {
            for (v, d) in &other.terms {
                if u.len() + v.len() > out.degree {
                    continue;
                }
                let mut w = u.clone();
                w.extend_from_slice(v);
                out.add_term(w, c * d);
            }
        }
        out
    }
}

/// A potential in cyclic normal form.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Potential {
    terms: BTreeMap<Word, Rational>,
}

impl Potential {
    pub fn zero() -> Self {
        Potential::default()
    }

    pub fn terms(&self) -> &BTreeMap<Word, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.terms.keys().map(Vec::len).min()
    }

    pub fn coefficient(&self, w: &[ArrowId]) -> Rational {
        self.terms
            .get(&min_rotation(w))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn arrows(&self) -> BTreeSet<ArrowId> {
        self.terms.keys().flatten().copied().collect()
    }

    /// Terms of the given degree.
    pub fn homogeneous(&self, d: usize) -> Potential {
        Potential {
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.len() == d)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn as_series(&self, degree: usize) -> Series {
        let mut s = Series::zero(degree);
        for (w, c) in &self.terms {
            s.add_term(w.clone(), c.clone());
        }
        s
    }

    /// Default truncation degree `2·(max degree) + 2`.
    pub fn default_truncation(&self) -> usize {
        2 * self.max_degree() + 2
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            let a = c.abs();
            if !a.is_one() {
                write!(f, "{a}·")?;
            }
            write!(f, "{}", fmt_word(w))?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct TermView {
    cycle: Vec<ArrowId>,
    coeff: String,
}

impl Serialize for Potential {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let terms: Vec<TermView> = self
            .terms
            .iter()
            .map(|(w, c)| TermView {
                cycle: w.clone(),
                coeff: c.to_string(),
            })
            .collect();
        terms.serialize(serializer)
    }
}

/// Checks every term (cyclic, weight 1, no loops), rotates it to normal form
/// and merges rotations.
pub fn cyclic_normal_form(q: &WeightedQuiver, s: &Series) -> Result<Potential, PotentialError> {
    let mut terms: BTreeMap<Word, Rational> = BTreeMap::new();
    for (w, c) in s.terms() {
        check_cycle(q, w)?;
        let slot = terms.entry(min_rotation(w)).or_insert_with(Rational::zero);
        *slot += c;
    }
    terms.retain(|_, c| !c.is_zero());
    Ok(Potential { terms })
}

/// Builds a normal-form potential from `(cycle, coefficient)` pairs.
pub fn potential_from_terms(
    q: &WeightedQuiver,
    terms: impl IntoIterator<Item = (Word, Rational)>,
) -> Result<Potential, PotentialError> {
    let mut s = Series::zero(usize::MAX);
    for (w, c) in terms {
        s.add_term(w, c);
    }
    cyclic_normal_form(q, &s)
}

fn check_cycle(q: &WeightedQuiver, w: &[ArrowId]) -> Result<(), PotentialError> {
    let (src, dst) = path_endpoints(q, w)?;
    if src != dst {
        return Err(PotentialError::NotCyclic(w.to_vec()));
    }
    if w.len() == 1 {
        return Err(PotentialError::Loop(w.to_vec()));
    }
    let weight = path_weight(q, w)?;
    if !weight.is_identity() {
        return Err(PotentialError::NontrivialWeight {
            word: w.to_vec(),
            weight,
        });
    }
    Ok(())
}

/// Every term is a path of weight 1.
pub fn weight_compatible(q: &WeightedQuiver, s: &Series) -> bool {
    s.terms()
        .keys()
        .all(|w| path_weight(q, w).is_ok_and(|g| g.is_identity()))
}

/// One `(i, j, g)` block of the degree-2 part: rows are the arrows `i→j` of
/// weight `g` (`i < j`), columns the arrows `j→i` of weight `g^-1`, both by id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub i: VertexId,
    pub j: VertexId,
    pub weight: GroupElement,
    pub forward: Vec<ArrowId>,
    pub backward: Vec<ArrowId>,
    pub matrix: Matrix,
}

impl Block {
    pub fn is_square_invertible(&self) -> bool {
        self.forward.len() == self.backward.len() && self.matrix.rank() == self.forward.len()
    }
}

/// Forward–backward blocks of `S^(2)`, one for every class `(i<j, g)` carrying
/// at least one arrow in either direction.
pub fn degree2_forward_backward(q: &WeightedQuiver, s: &Potential) -> Vec<Block> {
    let mut classes: BTreeMap<(VertexId, VertexId, GroupElement), (Vec<ArrowId>, Vec<ArrowId>)> =
        BTreeMap::new();
    for a in q.arrows() {
        if a.src < a.dst {
            classes
                .entry((a.src, a.dst, a.weight.clone()))
                .or_default()
                .0
                .push(a.id);
        } else if a.src > a.dst {
            classes
                .entry((a.dst, a.src, a.weight.inverse()))
                .or_default()
                .1
                .push(a.id);
        }
    }
    let mut blocks = Vec::new();
    for ((i, j, weight), (forward, backward)) in classes {
        let mut matrix = Matrix::zeros(forward.len(), backward.len());
        for (w, c) in s.terms().iter().filter(|(w, _)| w.len() == 2) {
            let (x, y) = (w[0], w[1]);
            let (f, b) = if forward.contains(&x) { (x, y) } else { (y, x) };
            if let (Some(p), Some(r)) = (
                forward.iter().position(|&a| a == f),
                backward.iter().position(|&a| a == b),
            ) {
                let v = matrix.get(p, r) + c;
                matrix.set(p, r, v);
            }
        }
        blocks.push(Block {
            i,
            j,
            weight,
            forward,
            backward,
            matrix,
        });
    }
    blocks
}

/// `(A, S)` is trivial when every block is square and invertible and `S` has
/// no terms of degree 3 or more.
pub fn is_trivial(q: &WeightedQuiver, s: &Potential) -> bool {
    s.terms().keys().all(|w| w.len() == 2)
        && degree2_forward_backward(q, s)
            .iter()
            .all(Block::is_square_invertible)
}

/// Algebra map given on arrows; arrows without an image are fixed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GradedAutomorphism {
    pub images: BTreeMap<ArrowId, Series>,
}

impl GradedAutomorphism {
    pub fn identity() -> Self {
        GradedAutomorphism::default()
    }

    /// Every image term has degree at least 2 apart from the arrow itself
    /// with coefficient 1.
    pub fn is_unitriangular(&self) -> bool {
        self.images.iter().all(|(a, img)| {
            img.terms().iter().all(|(w, c)| {
                if w.len() == 1 {
                    w[0] == *a && c.is_one()
                } else {
                    w.len() >= 2
                }
            }) && img.terms().get(&vec![*a]).is_some_and(One::is_one)
        })
    }

    /// Image terms must run between the arrow's endpoints with the arrow's weight.
    pub fn check_compatible(&self, q: &WeightedQuiver) -> Result<(), PotentialError> {
        for (id, img) in &self.images {
            let a = q.arrow(*id).ok_or(PotentialError::UnknownArrow(*id))?;
            for w in img.terms().keys() {
                let bad = |reason: String| PotentialError::Incompatible { arrow: *id, reason };
                let (s, d) = path_endpoints(q, w).map_err(|e| bad(e.to_string()))?;
                if (s, d) != (a.src, a.dst) {
                    return Err(bad(format!("{} runs {s}→{d}", fmt_word(w))));
                }
                let g = path_weight(q, w)?;
                if g != a.weight {
                    return Err(bad(format!("{} has weight {g}", fmt_word(w))));
                }
            }
        }
        Ok(())
    }

    fn image(&self, a: ArrowId, degree: usize) -> Series {
        match self.images.get(&a) {
            Some(s) => {
                let mut t = Series::zero(degree);
                t.add(s, &Rational::one());
                t
            }
            None => Series::word(vec![a], degree),
        }
    }
}

/// Substitutes arrow images into every term, truncating above `degree`.
pub fn apply_automorphism(
    q: &WeightedQuiver,
    phi: &GradedAutomorphism,
    s: &Series,
    degree: usize,
) -> Result<Series, PotentialError> {
    phi.check_compatible(q)?;
    let mut out = Series::zero(degree);
    let mut cache: BTreeMap<ArrowId, Series> = BTreeMap::new();
    for (w, c) in s.terms() {
        let mut acc = Series::word(Vec::new(), degree);
        for a in w {
            let img = cache.entry(*a).or_insert_with(|| phi.image(*a, degree));
            acc = acc.mul(img);
            if acc.is_zero() {
                break;
            }
        }
        out.add(&acc, c);
    }
    Ok(out)
}

fn apply_to_potential(
    q: &WeightedQuiver,
    phi: &GradedAutomorphism,
    s: &Potential,
    degree: usize,
) -> Result<Potential, PotentialError> {
    let image = apply_automorphism(q, phi, &s.as_series(degree), degree)?;
    cyclic_normal_form(q, &image)
}

#[derive(Debug, Clone)]
pub struct SplitResult {
    pub degree: usize,
    /// Pairs `(a_p, b_p)` with `S_triv = Σ a_p b_p`; `a_p` goes from the
    /// smaller vertex to the larger.
    pub pairs: Vec<(ArrowId, ArrowId)>,
    pub trivial_quiver: WeightedQuiver,
    pub trivial_potential: Potential,
    pub reduced_quiver: WeightedQuiver,
    pub reduced_potential: Potential,
    /// Linear change of arrows bringing `S^(2)` to `Σ a_p b_p`.
    pub change_of_arrows: GradedAutomorphism,
    /// Unitriangular substitutions applied after the change of arrows, in order.
    pub substitutions: Vec<GradedAutomorphism>,
    /// `change_of_arrows` and then every substitution, applied to `S`.
    pub transformed: Potential,
}

/// Splits `(A, S)` into a trivial part and a reduced part (no terms of degree
/// below 3) up to a graded automorphism, computed to degree `degree`.
pub fn split(q: &WeightedQuiver, s: &Potential, degree: usize) -> Result<SplitResult, PotentialError> {
    for w in s.terms().keys() {
        check_cycle(q, w)?;
    }
    if degree < s.max_degree() {
        return Err(PotentialError::DegreeTooSmall {
            degree,
            needed: s.max_degree(),
        });
    }

    let mut change = GradedAutomorphism::identity();
    let mut pairs = Vec::new();
    for block in degree2_forward_backward(q, s) {
        let c = &block.matrix;
        let (_, rows) = c.transpose().rref();
        let (_, cols) = c.rref();
        if rows.is_empty() {
            continue;
        }
        let m_inv = c.select(&rows, &cols).inverse().expect("pivot submatrix is invertible");
        let all_cols: Vec<usize> = (0..c.cols()).collect();
        let y = m_inv.mul(&c.select(&rows, &all_cols));

        // new_k = Σ_p T[k][p] old_p; the substitution is old = T^-1 new
        let mut tf = Matrix::identity(block.forward.len());
        let mut tb = Matrix::identity(block.backward.len());
        for (s_idx, (&r, &col)) in rows.iter().zip(&cols).enumerate() {
            for p in 0..block.forward.len() {
                tf.set(r, p, c.get(p, col).clone());
            }
            for qq in 0..block.backward.len() {
                tb.set(col, qq, y.get(s_idx, qq).clone());
            }
            pairs.push((block.forward[r], block.backward[col]));
        }
        for (arrows, t) in [(&block.forward, tf), (&block.backward, tb)] {
            let inv = t.inverse().expect("basis change is invertible");
            for (p, &old) in arrows.iter().enumerate() {
                let mut img = Series::zero(usize::MAX);
                for (k, &new) in arrows.iter().enumerate() {
                    img.add_term(vec![new], inv.get(p, k).clone());
                }
                if img != Series::word(vec![old], usize::MAX) {
                    change.images.insert(old, img);
                }
            }
        }
    }
    pairs.sort();
    let mut cur = apply_to_potential(q, &change, s, degree)?;

    let partner: BTreeMap<ArrowId, (usize, bool)> = pairs
        .iter()
        .enumerate()
        .flat_map(|(p, (a, b))| [(*a, (p, true)), (*b, (p, false))])
        .collect();
    let contaminated = |pot: &Potential| -> Option<usize> {
        pot.terms()
            .keys()
            .filter(|w| w.len() >= 3 && w.iter().any(|a| partner.contains_key(a)))
            .map(Vec::len)
            .min()
    };
    let mut substitutions = Vec::new();
    while let Some(reached) = contaminated(&cur) {
        if substitutions.len() > degree {
            return Err(PotentialError::NotStabilized { degree, reached });
        }
        // S = Σ a_p b_p + Σ a_p u_p + Σ v_p b_p + (terms free of trivial arrows)
        let mut u: BTreeMap<usize, Series> = BTreeMap::new();
        let mut v: BTreeMap<usize, Series> = BTreeMap::new();
        for (w, c) in cur.terms().iter().filter(|(w, _)| w.len() >= 3) {
            let Some(i) = w.iter().position(|a| partner.contains_key(a)) else {
                continue;
            };
            let (p, is_a) = partner[&w[i]];
            let mut r = w.clone();
            if is_a {
                r.rotate_left(i);
                u.entry(p)
                    .or_insert_with(|| Series::zero(degree))
                    .add_term(r[1..].to_vec(), c.clone());
            } else {
                r.rotate_left(i + 1);
                r.pop();
                v.entry(p)
                    .or_insert_with(|| Series::zero(degree))
                    .add_term(r, c.clone());
            }
        }
        // φ(a_p) = a_p − v_p, φ(b_p) = b_p − u_p
        let mut phi = GradedAutomorphism::identity();
        for (p, (a, b)) in pairs.iter().enumerate() {
            if let Some(vp) = v.get(&p) {
                let mut img = Series::word(vec![*a], degree);
                img.add(vp, &-Rational::one());
                phi.images.insert(*a, img);
            }
            if let Some(up) = u.get(&p) {
                let mut img = Series::word(vec![*b], degree);
                img.add(up, &-Rational::one());
                phi.images.insert(*b, img);
            }
        }
        let next = apply_to_potential(q, &phi, &cur, degree)?;
        debug_assert_eq!(next.homogeneous(2), cur.homogeneous(2));
        substitutions.push(phi);
        if let Some(after) = contaminated(&next) {
            if after <= reached {
                return Err(PotentialError::NotStabilized { degree, reached: after });
            }
        }
        cur = next;
    }

    let trivial_arrows: BTreeSet<ArrowId> = partner.keys().copied().collect();
    let (triv_terms, red_terms): (Vec<_>, Vec<_>) = cur
        .terms()
        .iter()
        .map(|(w, c)| (w.clone(), c.clone()))
        .partition(|(w, _)| w.iter().any(|a| trivial_arrows.contains(a)));
    let trivial_potential = Potential {
        terms: triv_terms.into_iter().collect(),
    };
    let reduced_potential = Potential {
        terms: red_terms.into_iter().collect(),
    };
    assert!(
        reduced_potential.min_degree().is_none_or(|d| d >= 3),
        "reduced potential has a term of degree below 3"
    );
    assert!(
        trivial_potential.terms().keys().all(|w| w.len() == 2),
        "trivial potential has a term of degree above 2"
    );
    let reduced_arrows: BTreeSet<ArrowId> = q
        .arrows()
        .iter()
        .map(|a| a.id)
        .filter(|a| !trivial_arrows.contains(a))
        .collect();
    let mut reduced_quiver = q.clone();
    reduced_quiver.remove_arrows(&trivial_arrows);
    let mut trivial_quiver = q.clone();
    trivial_quiver.remove_arrows(&reduced_arrows);
    Ok(SplitResult {
        degree,
        pairs,
        trivial_quiver,
        trivial_potential,
        reduced_quiver,
        reduced_potential,
        change_of_arrows: change,
        substitutions,
        transformed: cur,
    })
}

#[derive(Debug, Clone)]
pub struct QpPremutation {
    pub vertex: VertexId,
    pub quiver: WeightedQuiver,
    pub potential: Potential,
    pub provenance: BTreeMap<ArrowId, Provenance>,
    /// The added 3-cycles `[ab]·b*·a*`.
    pub delta: Vec<Word>,
}

/// `Ã` and `[S] + Δ_k`.
pub fn qp_premutate(
    q: &WeightedQuiver,
    s: &Potential,
    k: VertexId,
) -> Result<QpPremutation, PotentialError> {
    let v = q.vertex(k).ok_or(PotentialError::UnknownVertex(k))?;
    if v.frozen {
        return Err(PotentialError::Frozen(k));
    }
    if let Some(c) = q
        .two_cycles()
        .into_iter()
        .find(|c| c.vertices.0 == k || c.vertices.1 == k)
    {
        return Err(PotentialError::QuiverTwoCycle(c.vertices));
    }
    for w in s.terms().keys() {
        check_cycle(q, w)?;
        if w.len() == 2 && w.iter().any(|a| q.arrow(*a).is_some_and(|x| x.src == k || x.dst == k)) {
            return Err(PotentialError::TwoCycleThrough {
                vertex: k,
                word: w.clone(),
            });
        }
    }
    let pre = premutate_unchecked(q, k);
    let mut composite: BTreeMap<(ArrowId, ArrowId), ArrowId> = BTreeMap::new();
    let mut reversed: BTreeMap<ArrowId, ArrowId> = BTreeMap::new();
    for (id, p) in &pre.provenance {
        match p {
            Provenance::Composite { first, second } => {
                composite.insert((*first, *second), *id);
            }
            Provenance::Reversed { original } => {
                reversed.insert(*original, *id);
            }
        }
    }

    let mut out = Series::zero(usize::MAX);
    for (w, c) in s.terms() {
        let src = |a: &ArrowId| q.arrow(*a).expect("checked").src;
        let start = w.iter().position(|a| src(a) != k).expect("a cycle leaves k");
        let mut r = w.clone();
        r.rotate_left(start);
        let mut rewritten = Vec::with_capacity(r.len());
        let mut i = 0;
        while i < r.len() {
            let a = q.arrow(r[i]).expect("checked");
            if a.dst == k {
                rewritten.push(composite[&(r[i], r[i + 1])]);
                i += 2;
            } else {
                rewritten.push(r[i]);
                i += 1;
            }
        }
        out.add_term(rewritten, c.clone());
    }
    let mut delta = Vec::new();
    for ((a, b), ab) in &composite {
        let w = vec![*ab, reversed[b], reversed[a]];
        debug_assert!(path_weight(&pre.quiver, &w).is_ok_and(|g| g.is_identity()));
        out.add_term(w.clone(), Rational::one());
        delta.push(w);
    }
    let potential = cyclic_normal_form(&pre.quiver, &out)?;
    Ok(QpPremutation {
        vertex: k,
        quiver: pre.quiver,
        potential,
        provenance: pre.provenance,
        delta,
    })
}

#[derive(Debug, Clone)]
pub struct QpMutation {
    pub premutation: QpPremutation,
    pub split: SplitResult,
    /// `weight_reduce` of the reduced quiver equals the weighted quiver
    /// mutation of the input (lenient mode); `None` when that mutation is undefined.
    pub matches_weighted_mutation: Option<bool>,
}

impl QpMutation {
    pub fn quiver(&self) -> &WeightedQuiver {
        &self.split.reduced_quiver
    }

    pub fn potential(&self) -> &Potential {
        &self.split.reduced_potential
    }
}

pub fn qp_mutate(
    q: &WeightedQuiver,
    s: &Potential,
    k: VertexId,
    degree: usize,
) -> Result<QpMutation, PotentialError> {
    let premutation = qp_premutate(q, s, k)?;
    let split = split(&premutation.quiver, &premutation.potential, degree)?;
    let matches_weighted_mutation = mutate_with(q, k, MutationOptions::LENIENT)
        .ok()
        .map(|m| weight_reduce(&split.reduced_quiver).quiver == m.result);
    Ok(QpMutation {
        premutation,
        split,
        matches_weighted_mutation,
    })
}
