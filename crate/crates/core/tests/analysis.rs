mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wquiv_core::analysis::{
    attach_probe_arrow, c_vectors, c_vectors_compact, check_nondegenerate, frame, is_sign_coherent,
    oriented_cycles_trivial, sample_nondegenerate, sign_coherence_experiment, walk_weight, AnalysisError,
};
use wquiv_core::compact::CompactQuiver;
use wquiv_core::corpus::{free_random, oriented_cycle_trivial_quiver, random_shape, sign_coherence_catalog};
use wquiv_core::quiver::VertexId;
use wquiv_core::{mutate, GroupElement, GroupKind, WeightedQuiver};

fn check_against_brute(q: &WeightedQuiver) {
    let fast = oriented_cycles_trivial(q);
    assert_eq!(fast.trivial, common::oriented_cycles_trivial_brute(q), "{q:?}");
    if let Some(w) = &fast.witness {
        assert!(!walk_weight(q, w).is_identity());
        let first = q.arrow(w[0]).unwrap().src;
        let last = q.arrow(*w.last().unwrap()).unwrap().dst;
        assert_eq!(first, last);
        for pair in w.windows(2) {
            assert_eq!(q.arrow(pair[0]).unwrap().dst, q.arrow(pair[1]).unwrap().src);
        }
    } else {
        assert!(fast.trivial);
    }
}

/// Every catalog shape on at most 4 vertices and at most 8 arrows, with every `Z/2` weighting.
#[test]
fn cycle_check_agrees_with_brute_force_exhaustively() {
    let z2 = GroupKind::Cyclic { modulus: 2 };
    let mut cases = 0;
    for (_, shape) in sign_coherence_catalog(4, 2) {
        let m = shape.arrow_count();
        if m > 8 {
            continue;
        }
        for mask in 0u32..(1 << m) {
            let q = shape.map_weights(z2, |a| {
                let i = shape.arrows().iter().position(|b| b.id == a.id).unwrap();
                GroupElement::residue(2, ((mask >> i) & 1) as i128)
            });
            check_against_brute(&q);
            cases += 1;
        }
    }
    assert!(cases > 10_000, "{cases}");
}

#[test]
fn frame_numbers_frozen_copies_after_the_largest_id() {
    let mut q = WeightedQuiver::new(GroupKind::Trivial);
    for v in [2, 7, 4] {
        q.add_vertex(v, false).unwrap();
    }
    q.add_plain_arrow(2, 7).unwrap();
    let f = frame(&q).unwrap();
    assert_eq!(f.frozen_vertices().collect::<Vec<_>>(), vec![8, 9, 10]);
    let m = c_vectors(&f).unwrap();
    assert_eq!(m.rows, vec![2, 4, 7]);
    assert_eq!(m.entries, vec![vec![-1, 0, 0], vec![0, -1, 0], vec![0, 0, -1]]);
    assert_eq!(frame(&f).unwrap_err(), AnalysisError::AlreadyFramed);
}

#[test]
fn probe_arrow_reverses_the_hypothetical_arrow() {
    let f1 = GroupKind::Free { rank: 1 };
    let x = GroupElement::generator(f1, 1).unwrap();
    let mut q = WeightedQuiver::with_vertices(f1, 2);
    q.add_arrow(1, 2, x.clone()).unwrap();
    let p = attach_probe_arrow(&q, 1, 2, x.clone()).unwrap();
    assert_eq!(p.arrows().last().map(|a| (a.src, a.dst)), Some((2, 1)));
    assert_eq!(
        attach_probe_arrow(&q, 1, 2, x.inverse()).unwrap_err(),
        AnalysisError::ProbeCancels(wquiv_core::ArrowId(1))
    );
    assert!(attach_probe_arrow(&q, 1, 1, x).is_err());
}

/// A framed catalog quiver plus a nontrivial arrow between two frozen
/// vertices lies on no oriented cycle, so it stays nondegenerate.
#[test]
fn probes_on_small_catalog_are_clean() {
    let f1 = GroupKind::Free { rank: 1 };
    let x = GroupElement::generator(f1, 1).unwrap();
    for (name, q) in sign_coherence_catalog(3, 1) {
        let f = frame(&q.with_trivial_weights(f1)).unwrap();
        let frozen: Vec<VertexId> = f.frozen_vertices().collect();
        if frozen.len() < 2 {
            continue;
        }
        let p = attach_probe_arrow(&f, frozen[0], frozen[1], x.clone()).unwrap();
        assert!(oriented_cycles_trivial(&p).trivial);
        let v = check_nondegenerate(&p, 4);
        assert!(v.is_clean(), "{name}: {v:?}");
    }
}

#[test]
fn random_walks_are_reproducible() {
    let f1 = GroupKind::Free { rank: 1 };
    let mut q = WeightedQuiver::with_vertices(f1, 3);
    q.add_arrow(1, 2, GroupElement::generator(f1, 1).unwrap()).unwrap();
    q.add_plain_arrow(2, 3).unwrap();
    q.add_plain_arrow(3, 1).unwrap();
    let a = sample_nondegenerate(&q, 50, 4, 17);
    assert_eq!(a, sample_nondegenerate(&q, 50, 4, 17));
    let (seq, pair) = a.unwrap();
    let mut cur = q.clone();
    for k in &seq {
        cur = wquiv_core::mutation::mutate_with(&cur, *k, wquiv_core::MutationOptions::STRICT).unwrap().result;
    }
    assert_eq!(cur.find_two_cycle(), Some(pair));
}

#[test]
fn catalog_sign_coherence_to_depth_four() {
    let catalog = sign_coherence_catalog(3, 2);
    let report = sign_coherence_experiment(&catalog, 4).unwrap();
    assert!(report.passed);
    assert_eq!(report.cases.len(), catalog.len());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn cycle_check_agrees_with_brute_force(seed in any::<u64>(), n in 1usize..=5, kind in 0usize..3) {
        let kinds = [GroupKind::Cyclic { modulus: 3 }, GroupKind::FreeAbelian { rank: 1 }, GroupKind::Free { rank: 2 }];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = loop {
            let q = if rng.gen_bool(0.5) {
                oriented_cycle_trivial_quiver(&mut rng, kinds[kind], n, 2)
            } else {
                free_random(&mut rng, kinds[kind], n, 2)
            };
            if q.arrow_count() <= 8 {
                break q;
            }
        };
        check_against_brute(&q);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// c-vectors of the framed quiver are the bottom block of the extended
    /// exchange matrix under classical matrix mutation.
    #[test]
    fn c_vectors_follow_extended_matrix_mutation(seed in any::<u64>(), n in 1usize..=5, len in 0usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_shape(&mut rng, GroupKind::Trivial, n, 2);
        let mut cur = frame(&q).unwrap();
        let order: Vec<VertexId> = cur.vertex_ids().collect();
        let mut b = common::b_matrix(&cur, &order);
        let mutable: Vec<VertexId> = q.vertex_ids().collect();
        for _ in 0..len {
            let k = *mutable.choose(&mut rng).unwrap();
            cur = mutate(&cur, k).unwrap().result;
            b = common::matrix_mutation(&b, order.iter().position(|&v| v == k).unwrap());
        }
        let m = c_vectors(&cur).unwrap();
        for (r, &k) in m.rows.iter().enumerate() {
            let i = order.iter().position(|&v| v == k).unwrap();
            for (c, &f) in m.columns.iter().enumerate() {
                let j = order.iter().position(|&v| v == f).unwrap();
                prop_assert_eq!(m.entries[r][c], b[i][j]);
            }
        }
        let compact = c_vectors_compact(&CompactQuiver::from_quiver(&cur));
        prop_assert_eq!(Some(&m), compact.as_ref());
        prop_assert!(is_sign_coherent(&m).coherent);
    }

    #[test]
    fn oriented_cycle_trivial_quivers_stay_nondegenerate(seed in any::<u64>(), n in 2usize..=4, kind in 0usize..2) {
        let kinds = [GroupKind::Free { rank: 2 }, GroupKind::FreeAbelian { rank: 2 }];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = oriented_cycle_trivial_quiver(&mut rng, kinds[kind], n, 2);
        prop_assert!(oriented_cycles_trivial(&q).trivial);
        let v = check_nondegenerate(&q, 3);
        prop_assert!(v.is_clean(), "{:?}", v);
    }
}
