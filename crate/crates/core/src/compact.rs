//! Multiplicity form of a weighted quiver for long mutation searches.
//!
//! Arrow multiplicities grow quickly under mutation of wild quivers, so the
//! searches in [`crate::analysis`] store one count per `(src, dst, weight)`
//! class instead of individual arrows. Mutation here follows exactly the same
//! rule as [`crate::mutation`]; the two are cross-checked in tests.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::group::{GroupElement, GroupKind};
use crate::mutation::{MutationError, MutationOptions};
use crate::quiver::{Arrow, ArrowId, Vertex, VertexId, WeightedQuiver};

type Class = (VertexId, VertexId, GroupElement);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompactQuiver {
    group: GroupKind,
    vertices: Vec<Vertex>,
    classes: BTreeMap<Class, BigUint>,
}

impl CompactQuiver {
    pub fn from_quiver(q: &WeightedQuiver) -> Self {
        let classes = q
            .arrow_classes()
            .into_iter()
            .map(|(k, v)| (k, BigUint::from(v)))
            .collect();
        CompactQuiver {
            group: q.group(),
            vertices: q.vertices().to_vec(),
            classes,
        }
    }

    /// Expands to individual arrows, numbered `1..` in class order.
    ///
    /// # Panics
    /// If a multiplicity does not fit in `u64`.
    pub fn to_quiver(&self) -> WeightedQuiver {
        let mut arrows = Vec::new();
        let mut id = 1;
        for ((s, d, w), c) in &self.classes {
            let c = c.to_u64().expect("multiplicity too large to expand");
            for _ in 0..c {
                arrows.push(Arrow {
                    id: ArrowId(id),
                    src: *s,
                    dst: *d,
                    weight: w.clone(),
                });
                id += 1;
            }
        }
        WeightedQuiver::from_parts(self.group, self.vertices.clone(), arrows)
    }

    pub fn group(&self) -> GroupKind {
        self.group
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn classes(&self) -> impl Iterator<Item = (&Class, &BigUint)> + '_ {
        self.classes.iter()
    }

    fn is_frozen(&self, v: VertexId) -> bool {
        self.vertices.iter().any(|x| x.id == v && x.frozen)
    }

    /// Number of arrows `src→dst`, all weights together.
    pub fn count(&self, src: VertexId, dst: VertexId) -> BigUint {
        self.classes
            .iter()
            .filter(|((s, d, _), _)| *s == src && *d == dst)
            .map(|(_, c)| c)
            .sum()
    }

    /// First pair of vertices joined in both directions (in class order).
    pub fn find_two_cycle(&self) -> Option<(VertexId, VertexId)> {
        self.classes
            .keys()
            .find(|(s, d, _)| self.classes.keys().any(|(s2, d2, _)| s2 == d && d2 == s))
            .map(|(s, d, _)| (*s.min(d), *s.max(d)))
    }

    fn two_cycle_at(&self, k: VertexId) -> Option<(VertexId, VertexId)> {
        self.classes
            .keys()
            .filter(|(s, d, _)| *s == k || *d == k)
            .find(|(s, d, _)| self.classes.keys().any(|(s2, d2, _)| s2 == d && d2 == s))
            .map(|(s, d, _)| (*s.min(d), *s.max(d)))
    }

    /// Arrows joining two frozen vertices, as `(src, dst, count)`.
    pub fn frozen_frozen_arrows(&self) -> Vec<(VertexId, VertexId, BigUint)> {
        self.classes
            .iter()
            .filter(|((s, d, _), _)| self.is_frozen(*s) && self.is_frozen(*d))
            .map(|((s, d, _), c)| (*s, *d, c.clone()))
            .collect()
    }

    pub fn mutate(&self, k: VertexId, options: MutationOptions) -> Result<Self, MutationError> {
        let v = self
            .vertices
            .iter()
            .find(|v| v.id == k)
            .ok_or(MutationError::UnknownVertex(k))?;
        if v.frozen {
            return Err(MutationError::Frozen(k));
        }
        let blocking = if options.lenient {
            self.two_cycle_at(k)
        } else {
            self.find_two_cycle()
        };
        if let Some(between) = blocking {
            return Err(MutationError::TwoCycle { vertex: k, between });
        }

        let mut next: BTreeMap<Class, BigUint> = BTreeMap::new();
        let add = |m: &mut BTreeMap<Class, BigUint>, class: Class, c: BigUint| {
            *m.entry(class).or_default() += c;
        };
        let mut incoming = Vec::new();
        let mut outgoing = Vec::new();
        for ((s, d, w), c) in &self.classes {
            if *d == k {
                incoming.push((*s, w, c));
                add(&mut next, (k, *s, w.inverse()), c.clone());
            } else if *s == k {
                outgoing.push((*d, w, c));
                add(&mut next, (*d, k, w.inverse()), c.clone());
            } else {
                add(&mut next, (*s, *d, w.clone()), c.clone());
            }
        }
        for (i, x, c1) in &incoming {
            for (j, y, c2) in &outgoing {
                add(&mut next, (*i, *j, *x * *y), *c1 * *c2);
            }
        }
        Ok(CompactQuiver {
            group: self.group,
            vertices: self.vertices.clone(),
            classes: reduce(next),
        })
    }
}

/// Per-class cancellation of opposite arrows with inverse weights.
fn reduce(classes: BTreeMap<Class, BigUint>) -> BTreeMap<Class, BigUint> {
    let mut out = classes.clone();
    for ((s, d, w), c) in &classes {
        if s < d {
            let opposite = (*d, *s, w.inverse());
            if let Some(o) = classes.get(&opposite) {
                let m = c.min(o);
                *out.get_mut(&(*s, *d, w.clone())).expect("present") -= m;
                *out.get_mut(&opposite).expect("present") -= m;
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}
