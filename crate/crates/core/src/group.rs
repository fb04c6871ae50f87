//! Exact arithmetic in the weight group.
//!
//! Four kinds of group are supported, all with a solvable word problem: the
//! trivial group, finite cyclic groups `Z/m`, free abelian groups `Z^r` and
//! free groups `F_r`. Every element is stored in a canonical form, so
//! structural equality is equality in the group.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

/// A letter of a free-group word: `+k` stands for `x_k` and `-k` for `x_k^-1`
/// (generators are 1-based, zero never occurs).
pub type Letter = i32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("group kind mismatch: {left} vs {right}")]
    KindMismatch { left: GroupKind, right: GroupKind },
    #[error("cannot parse {text:?} as an element of {kind}: {reason}")]
    Syntax {
        kind: GroupKind,
        text: String,
        reason: String,
    },
    #[error("generator x{index} out of range for rank {rank}")]
    GeneratorOutOfRange { index: i64, rank: usize },
    #[error("invalid group kind: {0}")]
    InvalidKind(String),
}

/// The group the weights live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GroupKind {
    Trivial,
    Cyclic { modulus: u64 },
    FreeAbelian { rank: usize },
    Free { rank: usize },
}

impl GroupKind {
    pub fn validate(&self) -> Result<(), GroupError> {
        match self {
            GroupKind::Cyclic { modulus: 0 } => Err(GroupError::InvalidKind(
                "cyclic modulus must be at least 1".into(),
            )),
            _ => Ok(()),
        }
    }

    /// True when the group has exactly one element.
    pub fn is_trivial_group(&self) -> bool {
        matches!(
            self,
            GroupKind::Trivial
                | GroupKind::Cyclic { modulus: 1 }
                | GroupKind::FreeAbelian { rank: 0 }
                | GroupKind::Free { rank: 0 }
        )
    }

    pub fn is_abelian(&self) -> bool {
        !matches!(self, GroupKind::Free { rank } if *rank >= 2)
    }

    /// Number of generators used by [`GroupElement::generator`].
    pub fn generator_count(&self) -> usize {
        match self {
            GroupKind::Trivial => 0,
            GroupKind::Cyclic { modulus } => usize::from(*modulus > 1),
            GroupKind::FreeAbelian { rank } | GroupKind::Free { rank } => *rank,
        }
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::Trivial => write!(f, "trivial"),
            GroupKind::Cyclic { modulus } => write!(f, "cyclic:{modulus}"),
            GroupKind::FreeAbelian { rank } => write!(f, "free-abelian:{rank}"),
            GroupKind::Free { rank } => write!(f, "free:{rank}"),
        }
    }
}

impl FromStr for GroupKind {
    type Err = GroupError;

    /// Accepts `trivial`, `cyclic:M`, `free-abelian:R` and `free:R`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (s, None),
        };
        let number = |arg: Option<&str>| -> Result<u64, GroupError> {
            arg.ok_or_else(|| GroupError::InvalidKind(format!("{s}: missing parameter")))?
                .parse::<u64>()
                .map_err(|e| GroupError::InvalidKind(format!("{s}: {e}")))
        };
        let kind = match name {
            "trivial" if arg.is_none() => GroupKind::Trivial,
            "cyclic" => GroupKind::Cyclic {
                modulus: number(arg)?,
            },
            "free-abelian" => GroupKind::FreeAbelian {
                rank: number(arg)? as usize,
            },
            "free" => GroupKind::Free {
                rank: number(arg)? as usize,
            },
            _ => return Err(GroupError::InvalidKind(s.to_string())),
        };
        kind.validate()?;
        Ok(kind)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Repr {
    Unit,
    Residue(u64),
    Vector(Vec<i64>),
    Word(Vec<Letter>),
}

/// An element of a [`GroupKind`] in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    kind: GroupKind,
    repr: Repr,
}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GroupElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.kind
            .cmp(&other.kind)
            .then_with(|| self.repr.cmp(&other.repr))
    }
}

impl GroupElement {
    pub fn identity(kind: GroupKind) -> Self {
        let repr = match kind {
            GroupKind::Trivial => Repr::Unit,
            GroupKind::Cyclic { .. } => Repr::Residue(0),
            GroupKind::FreeAbelian { rank } => Repr::Vector(vec![0; rank]),
            GroupKind::Free { .. } => Repr::Word(Vec::new()),
        };
        GroupElement { kind, repr }
    }

    /// The `index`-th generator (1-based): `x_index` for free groups, the unit
    /// vector for free abelian groups and the residue 1 for cyclic groups.
    pub fn generator(kind: GroupKind, index: usize) -> Result<Self, GroupError> {
        let out_of_range = || GroupError::GeneratorOutOfRange {
            index: index as i64,
            rank: kind.generator_count(),
        };
        if index == 0 || index > kind.generator_count() {
            return Err(out_of_range());
        }
        let repr = match kind {
            GroupKind::Trivial => unreachable!("trivial group has no generators"),
            GroupKind::Cyclic { modulus } => Repr::Residue(1 % modulus),
            GroupKind::FreeAbelian { rank } => {
                let mut v = vec![0; rank];
                v[index - 1] = 1;
                Repr::Vector(v)
            }
            GroupKind::Free { .. } => Repr::Word(vec![index as Letter]),
        };
        Ok(GroupElement { kind, repr })
    }

    /// Builds a cyclic-group element from any integer, reducing it mod `m`.
    pub fn residue(modulus: u64, value: i128) -> Self {
        assert!(modulus >= 1, "cyclic modulus must be at least 1");
        GroupElement {
            kind: GroupKind::Cyclic { modulus },
            repr: Repr::Residue(value.rem_euclid(modulus as i128) as u64),
        }
    }

    pub fn free_abelian(coords: Vec<i64>) -> Self {
        GroupElement {
            kind: GroupKind::FreeAbelian { rank: coords.len() },
            repr: Repr::Vector(coords),
        }
    }

    /// Builds a free-group element from an arbitrary (possibly unreduced) word.
    pub fn free_word(rank: usize, letters: &[Letter]) -> Result<Self, GroupError> {
        for &l in letters {
            if l == 0 || l.unsigned_abs() as usize > rank {
                return Err(GroupError::GeneratorOutOfRange {
                    index: l.unsigned_abs() as i64,
                    rank,
                });
            }
        }
        Ok(GroupElement {
            kind: GroupKind::Free { rank },
            repr: Repr::Word(free::reduce(letters.iter().copied())),
        })
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn is_identity(&self) -> bool {
        match &self.repr {
            Repr::Unit => true,
            Repr::Residue(r) => *r == 0,
            Repr::Vector(v) => v.iter().all(|&c| c == 0),
            Repr::Word(w) => w.is_empty(),
        }
    }

    /// The reduced word of a free-group element, `None` for other kinds.
    pub fn word(&self) -> Option<&[Letter]> {
        match &self.repr {
            Repr::Word(w) => Some(w),
            _ => None,
        }
    }

    pub fn coordinates(&self) -> Option<&[i64]> {
        match &self.repr {
            Repr::Vector(v) => Some(v),
            _ => None,
        }
    }

    pub fn residue_value(&self) -> Option<u64> {
        match &self.repr {
            Repr::Residue(r) => Some(*r),
            _ => None,
        }
    }

    pub fn multiply(&self, other: &GroupElement) -> Result<GroupElement, GroupError> {
        if self.kind != other.kind {
            return Err(GroupError::KindMismatch {
                left: self.kind,
                right: other.kind,
            });
        }
        let repr = match (&self.repr, &other.repr) {
            (Repr::Unit, Repr::Unit) => Repr::Unit,
            (Repr::Residue(a), Repr::Residue(b)) => {
                let GroupKind::Cyclic { modulus } = self.kind else {
                    unreachable!()
                };
                Repr::Residue(((*a as u128 + *b as u128) % modulus as u128) as u64)
            }
            (Repr::Vector(a), Repr::Vector(b)) => {
                Repr::Vector(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (Repr::Word(a), Repr::Word(b)) => Repr::Word(free::concat_reduced(a, b)),
            _ => unreachable!("representation does not match kind"),
        };
        Ok(GroupElement {
            kind: self.kind,
            repr,
        })
    }

    pub fn inverse(&self) -> GroupElement {
        let repr = match &self.repr {
            Repr::Unit => Repr::Unit,
            Repr::Residue(r) => {
                let GroupKind::Cyclic { modulus } = self.kind else {
                    unreachable!()
                };
                Repr::Residue((modulus - r) % modulus)
            }
            Repr::Vector(v) => Repr::Vector(v.iter().map(|c| -c).collect()),
            Repr::Word(w) => Repr::Word(free::invert(w)),
        };
        GroupElement {
            kind: self.kind,
            repr,
        }
    }

    pub fn pow(&self, exponent: i64) -> GroupElement {
        let base = if exponent < 0 {
            self.inverse()
        } else {
            self.clone()
        };
        let mut acc = GroupElement::identity(self.kind);
        for _ in 0..exponent.unsigned_abs() {
            acc = &acc * &base;
        }
        acc
    }

    /// `h^-1 · self · h`
    pub fn conjugate_by(&self, h: &GroupElement) -> GroupElement {
        &(&h.inverse() * self) * h
    }

    pub fn parse(kind: GroupKind, text: &str) -> Result<GroupElement, GroupError> {
        let syntax = |reason: &str| GroupError::Syntax {
            kind,
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let t = text.trim();
        match kind {
            GroupKind::Trivial => {
                if t == "e" {
                    Ok(GroupElement::identity(kind))
                } else {
                    Err(syntax("the trivial group only has `e`"))
                }
            }
            GroupKind::Cyclic { modulus } => {
                let v: i128 = t.parse().map_err(|_| syntax("expected a decimal integer"))?;
                Ok(GroupElement::residue(modulus, v))
            }
            GroupKind::FreeAbelian { rank } => {
                let inner = t
                    .strip_prefix('(')
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| syntax("expected `(c1,...,cr)`"))?;
                let coords: Vec<i64> = if inner.trim().is_empty() {
                    Vec::new()
                } else {
                    inner
                        .split(',')
                        .map(|c| c.trim().parse::<i64>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| syntax("coordinates must be integers"))?
                };
                if coords.len() != rank {
                    return Err(syntax(&format!(
                        "expected {rank} coordinates, found {}",
                        coords.len()
                    )));
                }
                Ok(GroupElement::free_abelian(coords))
            }
            GroupKind::Free { rank } => {
                if t == "e" {
                    return Ok(GroupElement::identity(kind));
                }
                let mut letters = Vec::new();
                for token in t.split_whitespace() {
                    let body = token
                        .strip_prefix('x')
                        .ok_or_else(|| syntax("tokens look like `x3`, `x3^-1` or `x3^2`"))?;
                    let (index, exponent) = match body.split_once('^') {
                        Some((i, e)) => (
                            i,
                            e.parse::<i64>()
                                .map_err(|_| syntax("exponent must be an integer"))?,
                        ),
                        None => (body, 1),
                    };
                    let index: i64 = index
                        .parse()
                        .map_err(|_| syntax("generator index must be a positive integer"))?;
                    if index < 1 || index as usize > rank {
                        return Err(GroupError::GeneratorOutOfRange { index, rank });
                    }
                    let letter = index as Letter;
                    let l = if exponent < 0 { -letter } else { letter };
                    letters.extend(std::iter::repeat(l).take(exponent.unsigned_abs() as usize));
                }
                GroupElement::free_word(rank, &letters)
            }
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Unit => write!(f, "e"),
            Repr::Residue(r) => write!(f, "{r}"),
            Repr::Vector(v) => {
                write!(f, "(")?;
                for (i, c) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
            Repr::Word(w) => {
                for (i, l) in w.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    if *l > 0 {
                        write!(f, "x{l}")?;
                    } else {
                        write!(f, "x{}^-1", -l)?;
                    }
                }
                Ok(())
            }
        }
    }
}

/// Serialized as its display string; parsing back needs the group kind.
impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Group product. Panics on mixed kinds; use [`GroupElement::multiply`] when
/// the operands are not known to share a kind.
impl Mul for &GroupElement {
    type Output = GroupElement;

    fn mul(self, rhs: &GroupElement) -> GroupElement {
        self.multiply(rhs).expect("group kind mismatch")
    }
}

/// Word algorithms for free groups.
pub mod free {
    use super::Letter;

    /// Free reduction by stack cancellation.
    pub fn reduce(letters: impl IntoIterator<Item = Letter>) -> Vec<Letter> {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        out
    }

    /// Product of two reduced words.
    pub fn concat_reduced(a: &[Letter], b: &[Letter]) -> Vec<Letter> {
        let mut cancel = 0;
        while cancel < a.len() && cancel < b.len() && a[a.len() - 1 - cancel] == -b[cancel] {
            cancel += 1;
        }
        let mut out = Vec::with_capacity(a.len() + b.len() - 2 * cancel);
        out.extend_from_slice(&a[..a.len() - cancel]);
        out.extend_from_slice(&b[cancel..]);
        out
    }

    pub fn invert(w: &[Letter]) -> Vec<Letter> {
        w.iter().rev().map(|l| -l).collect()
    }

    pub fn is_reduced(w: &[Letter]) -> bool {
        w.windows(2).all(|p| p[0] != -p[1]) && !w.contains(&0)
    }

    /// Splits a reduced word as `p · core · p^-1` with `core` cyclically reduced.
    pub fn cyclic_reduction(w: &[Letter]) -> (Vec<Letter>, Vec<Letter>) {
        let mut lo = 0;
        let mut hi = w.len();
        while hi - lo >= 2 && w[lo] == -w[hi - 1] {
            lo += 1;
            hi -= 1;
        }
        (w[..lo].to_vec(), w[lo..hi].to_vec())
    }

    /// The primitive root `r` of a reduced word, with `w = r^m` and `m` maximal.
    /// The centralizer of a nontrivial `w` is the cyclic group generated by `r`.
    pub fn root(w: &[Letter]) -> Vec<Letter> {
        if w.is_empty() {
            return Vec::new();
        }
        let (p, core) = cyclic_reduction(w);
        let n = core.len();
        let period = (1..=n)
            .find(|&d| n % d == 0 && (d..n).all(|i| core[i] == core[i - d]))
            .unwrap_or(n);
        let mut r = p.clone();
        r.extend_from_slice(&core[..period]);
        concat_reduced(&r, &invert(&p))
    }

    /// Some `h` with `h^-1 · u · h = v`, if `u` and `v` are conjugate.
    pub fn conjugator(u: &[Letter], v: &[Letter]) -> Option<Vec<Letter>> {
        let (p, uc) = cyclic_reduction(u);
        let (q, vc) = cyclic_reduction(v);
        if uc.len() != vc.len() {
            return None;
        }
        let n = uc.len();
        let shift = if n == 0 {
            0
        } else {
            (0..n).find(|&i| (0..n).all(|j| uc[(i + j) % n] == vc[j]))?
        };
        // uc = s·t and vc = t·s with s = uc[..shift], so vc = s^-1·uc·s.
        let s = &uc[..shift];
        let ps = concat_reduced(&p, s);
        Some(concat_reduced(&ps, &invert(&q)))
    }
}
