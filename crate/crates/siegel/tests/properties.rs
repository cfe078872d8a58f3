//! Property tests: structural invariants of the link cascade, reduction
//! invariance of the degree-2 table, Dirichlet multiplicativity, and
//! serialization round trips.

use std::collections::BTreeMap;

use num_rational::BigRational;
use proptest::prelude::*;

use siegel::harmonic::{compute_q, HarmonicPolynomial, SplitShape};
use siegel::link::{
    expand_delta_e, expand_operator, expand_operator_ordered, Expansion, Index, Link, LinkSet,
};
use siegel::modular::eisenstein2::{reduce_form, siegel_eisenstein2};
use siegel::rat::qi;

/// A random matching on labels drawn from 1..=12: pick 2r distinct labels
/// and pair them up in order of the shuffle.
fn arb_matching(max_links: usize) -> impl Strategy<Value = LinkSet> {
    (1..=max_links)
        .prop_flat_map(|r| Just(r).prop_perturb(move |r, _| r).prop_flat_map(move |r| {
            proptest::sample::subsequence((1u32..=12).collect::<Vec<_>>(), 2 * r)
                .prop_shuffle()
                .prop_map(|labels| {
                    let links: Vec<Link> = labels
                        .chunks(2)
                        .map(|w| Link::new(Index::plain(w[0]), Index::plain(w[1])).unwrap())
                        .collect();
                    LinkSet::new(links).unwrap()
                })
        }))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn matching_closure_holds(l0 in arb_matching(3)) {
        let e = expand_operator(&l0);
        let want = l0.underlying();
        for ((l1, l2), _) in e.terms() {
            let joined = l1.union(l2).expect("disjoint parts");
            prop_assert_eq!(joined.underlying(), want.clone());
        }
    }

    #[test]
    fn order_independence(l0 in arb_matching(3), seed in any::<u64>()) {
        let mut order = l0.links().to_vec();
        // cheap deterministic shuffle from the seed
        let n = order.len();
        let mut state = seed;
        for i in (1..n).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            let j = (state >> 33) as usize % (i + 1);
            order.swap(i, j);
        }
        prop_assert_eq!(expand_operator_ordered(&order), expand_operator(&l0));
    }

    #[test]
    fn relabeling_equivariance(l0 in arb_matching(3), offset in 1u32..50) {
        let map = |i: Index| Index::plain(i.id + offset);
        let relabeled_then_expanded = expand_operator(&l0.relabel(&map).unwrap());
        let expanded_then_relabeled = expand_operator(&l0).relabel(&map).unwrap();
        prop_assert_eq!(relabeled_then_expanded, expanded_then_relabeled);
    }

    #[test]
    fn e_monomials_carry_s(l0 in arb_matching(3)) {
        for ((_, le), c) in &expand_delta_e(&l0) {
            if !le.is_empty() {
                prop_assert!(c.divisible_by_s());
            }
        }
    }

    #[test]
    fn expansion_json_round_trip(l0 in arb_matching(2)) {
        let e = expand_operator(&l0);
        let json = serde_json::to_string(&e).unwrap();
        let back: Expansion = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(e, back);
    }

    #[test]
    fn reduction_is_unimodular_invariant(
        a in 0i64..6, b in -6i64..6, c in 0i64..6,
        word in proptest::collection::vec(0u8..4, 0..6),
    ) {
        // build a PSD form; skip indefinite draws
        prop_assume!(4 * a * c - b * b >= 0);
        let base = reduce_form(a, b, c);
        // apply a word in the generators to (a, b, c)
        let mut t = (a, b, c);
        for &g in &word {
            t = match g {
                // x -> x + y
                0 => (t.0, t.1 + 2 * t.0, t.0 + t.1 + t.2),
                // x -> x - y
                1 => (t.0, t.1 - 2 * t.0, t.0 - t.1 + t.2),
                // swap
                2 => (t.2, t.1, t.0),
                // y -> -y
                _ => (t.0, -t.1, t.2),
            };
        }
        prop_assert_eq!(reduce_form(t.0, t.1, t.2), base);
    }

    #[test]
    fn compute_q_is_linear(c1 in -9i64..9, c2 in -9i64..9) {
        let shape = SplitShape::new(2, 2, 8, 2).unwrap();
        let m1 = siegel::harmonic::mixed_pair_diagonal().unwrap();
        let m2 = siegel::harmonic::mixed_pair_crossed().unwrap();
        let p1 = HarmonicPolynomial::new(shape, vec![(m1.clone(), qi(1))]).unwrap();
        let p2 = HarmonicPolynomial::new(shape, vec![(m2.clone(), qi(1))]).unwrap();
        let combo = HarmonicPolynomial::new(
            shape,
            vec![(m1, qi(c1)), (m2, qi(c2))],
        ).unwrap();
        let q = compute_q(&combo, false).unwrap();
        let q1 = compute_q(&p1, false).unwrap();
        let q2 = compute_q(&p2, false).unwrap();
        for (l, coeff) in q.terms() {
            let want = q1.coeff(l).scale(&qi(c1)).add(&q2.coeff(l).scale(&qi(c2)));
            prop_assert_eq!(coeff.clone(), want);
        }
    }
}

#[test]
fn table_values_constant_on_orbits() {
    // deterministic orbit walk on a few forms of the weight-6 table
    let table = siegel_eisenstein2(6, 20).unwrap();
    let forms = [(1i64, 0i64, 1i64), (1, 1, 3), (2, 1, 2), (1, 0, 5)];
    for (a, b, c) in forms {
        let want = table.coefficient(a, b, c).unwrap();
        // T-shift orbit
        let mut t = (a, b, c);
        for _ in 0..3 {
            t = (t.0, t.1 + 2 * t.0, t.0 + t.1 + t.2);
            assert_eq!(table.coefficient(t.0, t.1, t.2).unwrap(), want);
        }
    }
}

#[test]
fn dirichlet_multiplicativity_sweep() {
    let d = siegel::modular::cusp_eigenform(12, 40).unwrap().unwrap();
    let ap = |p: u64| Some(d.coeff(p as usize).unwrap().clone());
    let coeffs = siegel::lfunction::dirichlet_coefficients(12, &ap, 36).unwrap();
    let pairs = [(2u64, 3u64), (2, 5), (3, 5), (4, 9), (2, 9), (4, 3), (2, 15)];
    for (m, n) in pairs {
        assert_eq!(
            coeffs[(m * n) as usize],
            &coeffs[m as usize] * &coeffs[n as usize],
            "t = {m} * {n}"
        );
    }
}

#[test]
fn double_expansion_symmetry() {
    let table = siegel_eisenstein2(6, 25).unwrap();
    let dq = siegel::pullback::restrict_diagonal(&table, 5).unwrap();
    let entries: BTreeMap<(u64, u64), BigRational> =
        dq.entries().map(|(&k, v)| (k, v.clone())).collect();
    for (&(m, n), v) in &entries {
        assert_eq!(entries.get(&(n, m)).unwrap(), v);
    }
}
