use num_traits::ToPrimitive;
use pi1_haar::convalg::{convolve, involution, local_unit};
use pi1_haar::cover::{pi1_generators, section, transversal};
use pi1_haar::edgepath::{compose, enumerate_ball};
use pi1_haar::gpdcore::{check_quotient_bijection, EquivalenceBibundle};
use pi1_haar::graphspace::{pi1_rank, spanning_tree};
use pi1_haar::haar::haar_from_base_measure;
use pi1_haar::measures::{compose_family, counting_family, cutoff, recover_base_measure, BaseMeasure};
use pi1_haar::{sampling, DeckAction, MultiGraph, Rational, VertexId};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A seeded random connected graph with at most 5 vertices and 7 edges,
/// plus a base point and the generator that built it.
fn graph_case() -> impl Strategy<Value = (MultiGraph, VertexId, ChaCha8Rng)> {
    (any::<u64>(), 1usize..=5, 0usize..=3, any::<prop::sample::Index>()).prop_map(|(seed, v, extra, base)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = (v - 1 + extra).min(7);
        let g = MultiGraph::random_connected(&mut rng, v, e);
        (g, VertexId(base.index(v)), rng)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn spanning_trees_and_generators((g, x, _rng) in graph_case()) {
        let tree = spanning_tree(&g, x);
        prop_assert_eq!(tree.tree_edges().len(), g.vertex_count() - 1);
        prop_assert_eq!(tree.depth(x), 0);
        let t = transversal(&g, x).unwrap();
        let gens = pi1_generators(&t, &tree).unwrap();
        prop_assert_eq!(gens.len(), pi1_rank(&g));
        prop_assert!(gens.iter().all(|a| a.is_loop_at(x) && a.is_reduced() && !a.is_unit()));
    }

    #[test]
    fn weights_are_source_measure((g, x, mut rng) in graph_case()) {
        let nu: BaseMeasure<Rational> = sampling::positive_measure(&mut rng, g.vertex_count());
        let t = transversal(&g, x).unwrap();
        let sec = section(&t, &t.tree()).unwrap();
        let h = haar_from_base_measure(&nu, &t, &sec).unwrap();
        for gamma in enumerate_ball(&g, 3) {
            prop_assert_eq!(&h.weight(&gamma), nu.get(gamma.source()));
        }
    }

    #[test]
    fn base_measure_round_trip((g, x, mut rng) in graph_case()) {
        let nu: BaseMeasure<Rational> = sampling::positive_measure(&mut rng, g.vertex_count());
        let t = transversal(&g, x).unwrap();
        let sec = section(&t, &t.tree()).unwrap();
        let lam = compose_family(&nu, &counting_family(&t)).unwrap();
        prop_assert_eq!(recover_base_measure(&lam, &cutoff(&sec)).unwrap(), nu);
    }

    #[test]
    fn deck_action_is_free((g, x, _rng) in graph_case()) {
        let t = transversal(&g, x).unwrap();
        let deck = DeckAction::new(&t, &t.tree()).unwrap();
        for rho in deck.symmetric_generators() {
            for y in t.ball(2) {
                let moved = deck.act(&rho, &y).unwrap();
                prop_assert_ne!(&moved, &y);
                prop_assert_eq!(moved.source(), y.source());
            }
        }
    }

    #[test]
    fn quotient_matches_fundamental_groupoid((g, x, _rng) in graph_case()) {
        let t = transversal(&g, x).unwrap();
        let sec = section(&t, &t.tree()).unwrap();
        let b = EquivalenceBibundle::new(t, sec).unwrap();
        let report = check_quotient_bijection(&b, 2);
        prop_assert!(report.is_clean(), "{:?}", report.violations);
    }

    #[test]
    fn convolution_identities((g, x, mut rng) in graph_case()) {
        let nu: BaseMeasure<Rational> = sampling::positive_measure(&mut rng, g.vertex_count());
        let t = transversal(&g, x).unwrap();
        let sec = section(&t, &t.tree()).unwrap();
        let h = haar_from_base_measure(&nu, &t, &sec).unwrap();
        let ball = enumerate_ball(&g, 2);
        let f = sampling::function(&mut rng, &ball, 4);
        let k = sampling::function(&mut rng, &ball, 4);
        let fk = convolve(&f, &k, &h).unwrap();
        prop_assert_eq!(involution(&fk), convolve(&involution(&k), &involution(&f), &h).unwrap());
        prop_assert_eq!(involution(&involution(&f)), f.clone());
        let unit = local_unit(&nu, (0..g.vertex_count()).map(VertexId));
        prop_assert_eq!(convolve(&unit, &f, &h).unwrap(), f.clone());
        prop_assert_eq!(convolve(&f, &unit, &h).unwrap(), f);
    }
}

#[test]
fn composition_is_associative_on_balls() {
    let g = MultiGraph::new(3, &[(0, 1), (1, 2), (2, 0), (1, 1)]).unwrap();
    let ball = enumerate_ball(&g, 2);
    for a in &ball {
        for b in ball.iter().filter(|b| b.range() == a.source()) {
            let ab = compose(a, b).unwrap();
            for c in ball.iter().filter(|c| c.range() == b.source()) {
                assert_eq!(compose(&ab, c).unwrap(), compose(a, &compose(b, c).unwrap()).unwrap());
            }
        }
    }
}

/// The constructions are scalar-generic: dyadic weights give the same
/// system in `f64` as in exact rationals.
#[test]
fn float_scalars_agree_on_dyadic_weights() {
    let g = MultiGraph::dipole(3);
    let t = transversal(&g, VertexId(0)).unwrap();
    let sec = section(&t, &t.tree()).unwrap();
    let exact = haar_from_base_measure(
        &BaseMeasure::new(vec![Rational::new(1.into(), 4.into()), Rational::new(3.into(), 2.into())]).unwrap(),
        &t,
        &sec,
    )
    .unwrap();
    let float = haar_from_base_measure(&BaseMeasure::new(vec![0.25f64, 1.5]).unwrap(), &t, &sec).unwrap();
    for gamma in enumerate_ball(&g, 3) {
        assert_eq!(Some(float.weight(&gamma)), exact.weight(&gamma).to_f64());
    }
}
