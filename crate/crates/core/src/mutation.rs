//! Weighted quiver mutation.
//!
//! Mutation at `k` is premutation (compose every `a: i→k`, `b: k→j` into
//! `[ab]: i→j` with weight `wt(a)wt(b)`, then reverse every arrow at `k` and
//! invert its weight) followed by weight reduction (cancel oriented 2-cycles
//! whose weight product is the identity, as many as possible).

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::GroupElement;
use crate::quiver::{Arrow, ArrowId, QuiverError, VertexId, Violation, WeightedQuiver};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MutationError {
    #[error("vertex {0} does not exist")]
    UnknownVertex(VertexId),
    #[error("vertex {0} is frozen")]
    Frozen(VertexId),
    #[error("oriented 2-cycle between {} and {} blocks mutation at {vertex}", .between.0, .between.1)]
    TwoCycle {
        vertex: VertexId,
        between: (VertexId, VertexId),
    },
    #[error("invalid quiver: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

/// Mutation at a vertex that lies on no 2-cycle is allowed in lenient mode
/// even when 2-cycles survive elsewhere; strict mode refuses any 2-cycle.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutationOptions {
    pub lenient: bool,
}

impl MutationOptions {
    pub const STRICT: MutationOptions = MutationOptions { lenient: false };
    pub const LENIENT: MutationOptions = MutationOptions { lenient: true };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "origin", rename_all = "kebab-case")]
pub enum Provenance {
    /// `[ab]` for `a` into the mutation vertex and `b` out of it.
    Composite { first: ArrowId, second: ArrowId },
    /// `a*`, the reversal of `a`.
    Reversed { original: ArrowId },
}

#[derive(Debug, Clone)]
pub struct PremutationResult {
    pub vertex: VertexId,
    pub quiver: WeightedQuiver,
    /// Origin of every arrow that is not carried over unchanged.
    pub provenance: BTreeMap<ArrowId, Provenance>,
}

#[derive(Debug, Clone)]
pub struct Reduction {
    pub quiver: WeightedQuiver,
    /// Cancelled pairs `(i→j arrow, j→i arrow)` with `i < j`.
    pub cancelled: Vec<(ArrowId, ArrowId)>,
}

#[derive(Debug, Clone)]
pub struct MutationRecord {
    pub vertex: VertexId,
    pub cancelled: Vec<(ArrowId, ArrowId)>,
    pub result: WeightedQuiver,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("mutation {index} (at vertex {vertex}) failed: {source}")]
pub struct SequenceError {
    pub index: usize,
    pub vertex: VertexId,
    #[source]
    pub source: MutationError,
}

impl From<QuiverError> for MutationError {
    fn from(e: QuiverError) -> Self {
        match e {
            QuiverError::Invalid(v) => MutationError::Invalid(v),
            QuiverError::UnknownVertex(v) => MutationError::UnknownVertex(v),
            other => MutationError::Invalid(vec![Violation::InvalidGroup {
                reason: other.to_string(),
            }]),
        }
    }
}

/// Checks that mutation at `k` is defined.
pub fn check_mutable(
    q: &WeightedQuiver,
    k: VertexId,
    options: MutationOptions,
) -> Result<(), MutationError> {
    let violations = q.validate();
    if !violations.is_empty() {
        return Err(MutationError::Invalid(violations));
    }
    let v = q.vertex(k).ok_or(MutationError::UnknownVertex(k))?;
    if v.frozen {
        return Err(MutationError::Frozen(k));
    }
    let blocking = if options.lenient {
        q.two_cycles()
            .into_iter()
            .map(|c| c.vertices)
            .find(|&(i, j)| i == k || j == k)
    } else {
        q.find_two_cycle()
    };
    if let Some(between) = blocking {
        return Err(MutationError::TwoCycle { vertex: k, between });
    }
    Ok(())
}

pub fn premutate(q: &WeightedQuiver, k: VertexId) -> Result<PremutationResult, MutationError> {
    premutate_with(q, k, MutationOptions::STRICT)
}

pub fn premutate_with(
    q: &WeightedQuiver,
    k: VertexId,
    options: MutationOptions,
) -> Result<PremutationResult, MutationError> {
    check_mutable(q, k, options)?;
    Ok(premutate_unchecked(q, k))
}

/// Premutation without precondition checks. Reversed arrows get fresh ids in
/// the order of their originals, followed by composites in `(a, b)` order.
pub(crate) fn premutate_unchecked(q: &WeightedQuiver, k: VertexId) -> PremutationResult {
    let mut next = q.next_arrow_id().0;
    let mut fresh = || {
        let id = ArrowId(next);
        next += 1;
        id
    };
    let incoming: Vec<&Arrow> = q.arrows().iter().filter(|a| a.dst == k).collect();
    let outgoing: Vec<&Arrow> = q.arrows().iter().filter(|a| a.src == k).collect();

    let mut arrows: Vec<Arrow> = q
        .arrows()
        .iter()
        .filter(|a| a.src != k && a.dst != k)
        .cloned()
        .collect();
    let mut provenance = BTreeMap::new();
    for a in q.arrows().iter().filter(|a| a.src == k || a.dst == k) {
        let id = fresh();
        provenance.insert(id, Provenance::Reversed { original: a.id });
        arrows.push(Arrow {
            id,
            src: a.dst,
            dst: a.src,
            weight: a.weight.inverse(),
        });
    }
    for a in &incoming {
        for b in &outgoing {
            let id = fresh();
            provenance.insert(
                id,
                Provenance::Composite {
                    first: a.id,
                    second: b.id,
                },
            );
            arrows.push(Arrow {
                id,
                src: a.src,
                dst: b.dst,
                weight: &a.weight * &b.weight,
            });
        }
    }
    PremutationResult {
        vertex: k,
        quiver: WeightedQuiver::from_parts(q.group(), q.vertices().to_vec(), arrows),
        provenance,
    }
}

/// Removes oriented 2-cycles of trivial weight as often as possible.
///
/// `a: i→j` cancels `b: j→i` exactly when `wt(b) = wt(a)^-1`, so each class
/// `(i, j, g)` loses `min(#(i→j of weight g), #(j→i of weight g^-1))` pairs;
/// within a class the lowest ids go first.
pub fn weight_reduce(q: &WeightedQuiver) -> Reduction {
    type Class = (VertexId, VertexId, GroupElement);
    let mut classes: BTreeMap<Class, (Vec<ArrowId>, Vec<ArrowId>)> = BTreeMap::new();
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
    let mut cancelled = Vec::new();
    let mut removed = BTreeSet::new();
    for (forward, backward) in classes.values() {
        for (f, b) in forward.iter().zip(backward) {
            cancelled.push((*f, *b));
            removed.insert(*f);
            removed.insert(*b);
        }
    }
    let mut quiver = q.clone();
    quiver.remove_arrows(&removed);
    Reduction { quiver, cancelled }
}

pub fn mutate(q: &WeightedQuiver, k: VertexId) -> Result<MutationRecord, MutationError> {
    mutate_with(q, k, MutationOptions::STRICT)
}

pub fn mutate_with(
    q: &WeightedQuiver,
    k: VertexId,
    options: MutationOptions,
) -> Result<MutationRecord, MutationError> {
    let pre = premutate_with(q, k, options)?;
    let red = weight_reduce(&pre.quiver);
    Ok(MutationRecord {
        vertex: k,
        cancelled: red.cancelled,
        result: red.quiver,
    })
}

pub fn mutate_sequence(
    q: &WeightedQuiver,
    ks: &[VertexId],
) -> Result<Vec<MutationRecord>, SequenceError> {
    mutate_sequence_with(q, ks, MutationOptions::STRICT)
}

pub fn mutate_sequence_with(
    q: &WeightedQuiver,
    ks: &[VertexId],
    options: MutationOptions,
) -> Result<Vec<MutationRecord>, SequenceError> {
    let mut records: Vec<MutationRecord> = Vec::with_capacity(ks.len());
    for (index, &k) in ks.iter().enumerate() {
        let current = records.last().map_or(q, |r| &r.result);
        let rec = mutate_with(current, k, options).map_err(|source| SequenceError {
            index,
            vertex: k,
            source,
        })?;
        records.push(rec);
    }
    Ok(records)
}

/// Final quiver after a sequence; `q` itself for the empty sequence.
pub fn mutate_along(
    q: &WeightedQuiver,
    ks: &[VertexId],
    options: MutationOptions,
) -> Result<WeightedQuiver, SequenceError> {
    Ok(mutate_sequence_with(q, ks, options)?
        .pop()
        .map_or_else(|| q.clone(), |r| r.result))
}
