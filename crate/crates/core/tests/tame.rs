mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wquiv_core::corpus::{cn_member, free_random, unoriented_cycle};
use wquiv_core::equivalence::cycle_weight;
use wquiv_core::quiver::{ArrowId, VertexId};
use wquiv_core::tame::{
    canonicalize_to_cycle, classify_tame, cn_membership, cn_membership_with, delta_free_cycles,
    euler_characteristic, simple_cycles, triangles, CnMembership, CycleRoute, TameClass,
};
use wquiv_core::{mutate, GroupElement, GroupKind, WeightedQuiver};

fn x1() -> GroupElement {
    GroupElement::generator(GroupKind::Free { rank: 1 }, 1).unwrap()
}

fn is_t_up_to_inversion(w: &GroupElement) -> bool {
    *w == x1() || *w == x1().inverse()
}

fn member(seed: u64, n: usize) -> WeightedQuiver {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let steps = rng.gen_range(0..=2 * n);
    cn_member(&mut rng, n, &x1(), steps).unwrap().0
}

fn arrow_set(c: &[ArrowId]) -> BTreeSet<ArrowId> {
    c.iter().copied().collect()
}

#[test]
fn non_members_name_the_failing_condition() {
    let f1 = GroupKind::Free { rank: 1 };
    // oriented 4-cycle: its only cycle is oriented
    let mut q = WeightedQuiver::with_vertices(f1, 4);
    for (s, d) in [(1, 2), (2, 3), (3, 4)] {
        q.add_plain_arrow(s, d).unwrap();
    }
    q.add_arrow(4, 1, x1()).unwrap();
    match cn_membership(&q).unwrap() {
        CnMembership::NonMember { condition, .. } => assert_eq!(condition, 3),
        other => panic!("{other:?}"),
    }
    // a tree has χ = 1
    let mut t = WeightedQuiver::with_vertices(f1, 3);
    t.add_plain_arrow(1, 2).unwrap();
    t.add_plain_arrow(2, 3).unwrap();
    match cn_membership(&t).unwrap() {
        CnMembership::NonMember { condition, .. } => assert_eq!(condition, 2),
        other => panic!("{other:?}"),
    }
    assert!(matches!(classify_tame(&t), TameClass::GaugeTrivial { .. }));
    // trivial weight on the cycle
    let c = unoriented_cycle(&mut ChaCha8Rng::seed_from_u64(1), 4, &GroupElement::identity(f1));
    assert!(!cn_membership(&c).unwrap().is_member());
}

#[test]
fn unoriented_cycles_canonicalize_in_zero_steps() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in 3..=8 {
        let q = unoriented_cycle(&mut rng, n, &x1());
        let c = canonicalize_to_cycle(&q).unwrap();
        assert!(c.sequence.is_empty());
        assert_eq!(c.result, q);
        assert!(is_t_up_to_inversion(&c.t));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn triangles_and_cycles_match_brute_force(seed in any::<u64>(), n in 1usize..=6, kind in 0usize..3) {
        let kinds = [GroupKind::Trivial, GroupKind::Cyclic { modulus: 2 }, GroupKind::Free { rank: 1 }];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = free_random(&mut rng, kinds[kind], n, 2);
        prop_assert_eq!(triangles(&q).len(), common::triangle_count(&q));
        let fast: BTreeSet<BTreeSet<ArrowId>> = simple_cycles(&q)
            .iter()
            .map(|c| arrow_set(&c.steps.iter().map(|s| s.arrow).collect::<Vec<_>>()))
            .collect();
        let brute: BTreeSet<BTreeSet<ArrowId>> = common::undirected_simple_cycles(&q)
            .iter()
            .map(|c| arrow_set(&c.iter().map(|(a, _)| *a).collect::<Vec<_>>()))
            .collect();
        prop_assert_eq!(simple_cycles(&q).len(), fast.len());
        prop_assert_eq!(fast, brute);
    }

    #[test]
    fn members_satisfy_every_condition(seed in any::<u64>(), n in 3usize..=8) {
        let q = member(seed, n);
        let m = cn_membership(&q).unwrap();
        let CnMembership::Member { n: size, t, cycle, .. } = &m else {
            return Err(TestCaseError::fail(format!("{m:?}")));
        };
        prop_assert_eq!(*size, n);
        prop_assert!(is_t_up_to_inversion(t));
        prop_assert_eq!(euler_characteristic(&q), 0);
        let dfree = delta_free_cycles(&q);
        prop_assert_eq!(dfree.len(), 1);
        prop_assert_eq!(&dfree[0], cycle);
        let shortcut = cn_membership_with(&q, CycleRoute::Shortcut).unwrap();
        let exhaustive = cn_membership_with(&q, CycleRoute::Exhaustive).unwrap();
        prop_assert_eq!(shortcut.cycle(), exhaustive.cycle());
        prop_assert_eq!(shortcut.weight(), exhaustive.weight());
    }

    #[test]
    fn membership_is_mutation_invariant(seed in any::<u64>(), n in 3usize..=8) {
        let q = member(seed, n);
        for k in 1..=n as VertexId {
            let m = cn_membership(&mutate(&q, k).unwrap().result).unwrap();
            prop_assert!(m.is_member(), "mutation at {}: {:?}", k, m);
            prop_assert!(is_t_up_to_inversion(m.weight().unwrap()));
        }
    }

    /// Independent enumeration: every simple cycle of trivial weight is an
    /// oriented triangle.
    #[test]
    fn only_triangles_have_trivial_weight(seed in any::<u64>(), n in 3usize..=8) {
        let q = member(seed, n);
        for c in common::undirected_simple_cycles(&q) {
            if common::undirected_cycle_weight(&q, &c).is_identity() {
                prop_assert_eq!(c.len(), 3);
                prop_assert!(c.iter().all(|s| s.1) || c.iter().all(|s| !s.1));
            }
        }
    }

    #[test]
    fn canonicalization_reaches_an_unoriented_cycle(seed in any::<u64>(), n in 3usize..=8) {
        let q = member(seed, n);
        let c = canonicalize_to_cycle(&q).unwrap();
        prop_assert_eq!(c.sequence.len(), n - c.initial_cycle_length);
        prop_assert!(c.initial_cycle_length >= 2);
        prop_assert_eq!(c.result.arrow_count(), n);
        prop_assert!(triangles(&c.result).is_empty());
        prop_assert_eq!(c.cycle.steps.len(), n);
        let forward = c.cycle.steps.iter().filter(|s| s.forward).count();
        prop_assert!(forward > 0 && forward < n);
        prop_assert!(is_t_up_to_inversion(&cycle_weight(&c.result, &c.cycle).unwrap()));
        let mut replay = q.clone();
        for k in &c.sequence {
            replay = mutate(&replay, *k).unwrap().result;
        }
        prop_assert_eq!(replay, c.result);
    }
}
