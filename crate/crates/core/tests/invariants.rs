mod common;

use common::q;
use fatou_core::game::replay;
use fatou_core::lattice::{Seq, Vector, DEFAULT_SAMPLE_BUDGET};
use fatou_core::psi::{lower_bound_to_branch, DenseSet, GridDense};
use fatou_core::{
    play, psi_check, Element, FiniteTree, Ordinal, Rational, SequenceSpec, SpaceDescriptor, StrategyI, StrategyII,
};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-30i64..=30, 1i64..=9).prop_map(|(a, b)| Rational::new(a, b))
}

fn nonneg() -> impl Strategy<Value = Rational> {
    (0i64..=30, 1i64..=9).prop_map(|(a, b)| Rational::new(a, b))
}

fn seq() -> impl Strategy<Value = Seq> {
    (prop::collection::vec(rational(), 0..5), rational()).prop_map(|(p, t)| Seq::new(p, t))
}

fn space() -> impl Strategy<Value = SpaceDescriptor> {
    (1u64..=4).prop_map(common::stage_space)
}

fn element_pair() -> impl Strategy<Value = (Element, Element)> {
    (space(), seq(), seq()).prop_map(|(sp, a, b)| {
        (Element::from_parts(sp.clone(), Vector::Seq(a)), Element::from_parts(sp, Vector::Seq(b)))
    })
}

fn positive() -> impl Strategy<Value = Element> {
    (prop::collection::vec(nonneg(), 0..4), (1i64..=30, 1i64..=9))
        .prop_map(|(p, (a, b))| common::base(&p, Rational::new(a, b)))
}

/// Ordinals below ω^ω built from CNF terms.
fn ordinal() -> impl Strategy<Value = Ordinal> {
    prop::collection::vec((0u64..4, 1u64..4), 0..4).prop_map(|mut ts| {
        ts.sort_by_key(|t| std::cmp::Reverse(t.0));
        ts.dedup_by_key(|t| t.0);
        Ordinal::from_terms(ts.into_iter().map(|(e, c)| (Ordinal::finite(e), c)).collect()).expect("sorted terms")
    })
}

proptest! {
    #[test]
    fn ordinal_order_is_total_and_successor_is_next(a in ordinal(), b in ordinal()) {
        prop_assert!((a < b) as u8 + (a == b) as u8 + (a > b) as u8 == 1);
        prop_assert!(a.successor() > a);
        prop_assert_eq!(a.successor().predecessor(), Some(a.clone()));
        prop_assert!(a.add(&b) >= b);
    }

    #[test]
    fn ordinal_text_round_trips(a in ordinal()) {
        prop_assert_eq!(a.to_string().parse::<Ordinal>().unwrap(), a);
    }

    #[test]
    fn fundamental_sequences_climb_below_the_limit(a in ordinal(), n in 1u64..6) {
        prop_assume!(a.is_limit());
        let here = a.fundamental_sequence(n).unwrap();
        let next = a.fundamental_sequence(n + 1).unwrap();
        prop_assert!(here < next && next < a);
    }

    #[test]
    fn addition_is_associative(a in ordinal(), b in ordinal(), c in ordinal()) {
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
    }

    #[test]
    fn riesz_decomposition((x, y) in element_pair()) {
        let pos = x.pos_part();
        let neg = x.scale(&q(-1, 1)).pos_part();
        prop_assert_eq!(pos.sub(&neg).unwrap(), x.clone());
        prop_assert_eq!(pos.add(&neg).unwrap(), x.abs());
        prop_assert_eq!(x.join(&y).unwrap().add(&x.meet(&y).unwrap()).unwrap(), x.add(&y).unwrap());
        prop_assert_eq!(y.sub(&x).unwrap().pos_part(), y.sub(&x.meet(&y).unwrap()).unwrap());
    }

    #[test]
    fn norm_is_a_lattice_norm((x, y) in element_pair(), c in rational()) {
        let nx = x.norm().unwrap();
        prop_assert!(!nx.is_negative());
        prop_assert_eq!(x.scale(&c).norm().unwrap(), c.abs() * &nx);
        prop_assert!(x.add(&y).unwrap().norm().unwrap() <= nx.clone() + &y.norm().unwrap());
        let big = x.abs().join(&y.abs()).unwrap();
        prop_assert!(big.norm().unwrap() >= nx);
    }

    #[test]
    fn lifting_shrinks_the_norm_exactly_as_stated((x, _) in element_pair()) {
        let (n, up) = (x.norm().unwrap(), x.lift().norm().unwrap());
        prop_assert!(up <= n);
        prop_assert_eq!(up.clone(), (n.clone() * &q(1, 7)).max(x.phi().abs()));
        prop_assert_eq!(up == n, n == x.phi().abs());
    }

    #[test]
    fn exact_norms_sit_inside_their_bounds((x, _) in element_pair()) {
        prop_assert!(x.norm_bounds(DEFAULT_SAMPLE_BUDGET).contains(&x.norm().unwrap()));
    }

    #[test]
    fn grid_picks_land_in_the_ball(y in positive(), level in 1u32..6) {
        let r = y.norm().unwrap() * Rational::inv_pow(7, level);
        let p = GridDense::default().pick(&y, &r).expect("grid is dense");
        prop_assert!(p.sub(&y).unwrap().norm().unwrap() < r);
    }

    #[test]
    fn passing_strings_have_passing_prefixes(ys in prop::collection::vec(positive(), 1..4), shift in 0i64..3) {
        let z = SequenceSpec::formula(common::base(&[], q(1, 1)), fatou_core::poly::RatFn::reciprocal(2, shift), Some(common::base(&[], q(1, 2)))).unwrap();
        let v = psi_check(&z, &ys, 24).unwrap();
        if v.passes() {
            for k in 1..ys.len() {
                prop_assert!(psi_check(&z, &ys[..k], 24).unwrap().passes());
            }
        }
    }

    #[test]
    fn lower_bounds_give_passing_branches(y in positive(), k in 1usize..5) {
        let z = SequenceSpec::formula(common::base(&[], q(1, 1)), fatou_core::poly::RatFn::reciprocal(1, 0), Some(y.clone())).unwrap();
        let branch = lower_bound_to_branch(&y, &GridDense::default(), k).unwrap();
        prop_assert!(psi_check(&z, &branch, 32).unwrap().passes());
    }

    #[test]
    fn subtrees_never_outrank(strings in prop::collection::vec(prop::collection::vec(0u8..3, 0..5), 0..8), keep in 0usize..8) {
        let t = FiniteTree::prefix_closure(strings.clone());
        let s = FiniteTree::prefix_closure(strings.into_iter().take(keep));
        prop_assert!(s.is_subtree_of(&t));
        prop_assert!(s.finite_rank() <= t.finite_rank());
        let depth = t.nodes().map(Vec::len).max().unwrap_or(0) as u64;
        prop_assert_eq!(t.finite_rank(), Ordinal::finite(depth + 1));
    }

    #[test]
    fn games_replay_and_match_their_verdict(ys in prop::collection::vec(positive(), 1..4), a in 1u64..4) {
        let z = SequenceSpec::z(&SpaceDescriptor::Base);
        let t = play(&Ordinal::finite(a), &z, &StrategyI::Countdown { width: 2 }, &StrategyII::Fixed(ys), 16).unwrap();
        prop_assert_eq!(replay(&t), t.clone());
        let passes = t.verdict.as_ref().is_some_and(|v| v.passes());
        prop_assert_eq!(t.winner == fatou_core::Player::II, passes);
    }

    #[test]
    fn serde_round_trips((x, _) in element_pair(), a in ordinal()) {
        let back: Element = serde_json::from_str(&serde_json::to_string(&x).unwrap()).unwrap();
        prop_assert_eq!(back, x);
        let back: Ordinal = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        prop_assert_eq!(back, a);
    }
}
