//! Property tests over small random rational functions and operators.

use hypertrans::arith::rat::{q, qf};
use hypertrans::arith::{CaseTag, Poly, RatFunc};
use hypertrans::dsl::{parse_operator, parse_ratfunc};
use hypertrans::ore::DiffOperator;
use hypertrans::series::expand_ratfunc;
use proptest::prelude::*;

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec(-4i64..=4, 1..4).prop_map(|c| Poly::from_i64(&c))
}

fn nonzero_poly() -> impl Strategy<Value = Poly> {
    poly().prop_filter("nonzero", |p| !p.is_zero())
}

fn ratfunc() -> impl Strategy<Value = RatFunc> {
    (poly(), nonzero_poly()).prop_map(|(n, d)| RatFunc::new(n, d))
}

fn case() -> impl Strategy<Value = CaseTag> {
    prop_oneof![
        Just(CaseTag::shift(q(1)).unwrap()),
        Just(CaseTag::shift(qf(-1, 2)).unwrap()),
        Just(CaseTag::qdiff(q(3)).unwrap()),
        Just(CaseTag::qdiff(qf(-2, 5)).unwrap()),
        Just(CaseTag::mahler(2).unwrap()),
        Just(CaseTag::mahler(3).unwrap()),
    ]
}

fn operator(c: CaseTag) -> impl Strategy<Value = DiffOperator> {
    prop::collection::vec(ratfunc(), 2..4)
        .prop_map(move |cs| DiffOperator::new(c.clone(), cs))
        .prop_filter("nonzero leading", |op| op.order() >= 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sigma_is_a_ring_homomorphism(c in case(), f in ratfunc(), g in ratfunc()) {
        prop_assert_eq!((&f * &g).sigma(&c), &f.sigma(&c) * &g.sigma(&c));
        prop_assert_eq!((&f + &g).sigma(&c), &f.sigma(&c) + &g.sigma(&c));
    }

    #[test]
    fn rendering_round_trips(f in ratfunc()) {
        prop_assert_eq!(parse_ratfunc(&f.render("x"), None).unwrap(), f);
    }

    #[test]
    fn operator_rendering_round_trips((c, op) in case().prop_flat_map(|c| (Just(c.clone()), operator(c)))) {
        prop_assert_eq!(parse_operator(&op.render(), &c).unwrap(), op);
    }

    #[test]
    fn right_division_recovers_factors(
        (a, b) in case().prop_flat_map(|c| (operator(c.clone()), operator(c)))
    ) {
        let (quot, rem) = a.mul(&b).unwrap().right_divmod(&b).unwrap();
        prop_assert_eq!(quot, a);
        prop_assert!(rem.is_zero());
    }

    #[test]
    fn operator_product_acts_by_composition(
        (a, b) in case().prop_flat_map(|c| (operator(c.clone()), operator(c))),
        f in ratfunc(),
    ) {
        prop_assert_eq!(a.mul(&b).unwrap().apply(&f), a.apply(&b.apply(&f)));
    }

    #[test]
    fn expansion_is_multiplicative(c in case(), f in ratfunc(), g in ratfunc()) {
        let n = 12;
        let lhs = expand_ratfunc(&(&f * &g), &c, n).unwrap();
        let rhs = expand_ratfunc(&f, &c, n).unwrap().mul(&expand_ratfunc(&g, &c, n).unwrap()).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().truncate(lhs.order().min(rhs.order())).is_zero());
    }

    #[test]
    fn sigma_commutes_with_expansion(c in case(), f in ratfunc()) {
        let s = expand_ratfunc(&f, &c, 10).unwrap().sigma().unwrap();
        let t = expand_ratfunc(&f.sigma(&c), &c, s.order()).unwrap();
        prop_assert!(s.sub(&t).unwrap().is_zero());
    }
}
