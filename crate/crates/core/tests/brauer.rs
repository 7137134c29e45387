use mk3_core::brauer::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

fn rat() -> impl Strategy<Value = BigRational> {
    (-2000i64..2000, 1i64..300)
        .prop_filter("nonzero", |(n, _)| *n != 0)
        .prop_map(|(n, d)| BigRational::new(n.into(), d.into()))
}

fn place() -> impl Strategy<Value = Place> {
    prop_oneof![
        Just(Place::Real),
        prop::sample::select(vec![2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]).prop_map(Place::prime),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]
    #[test]
    fn product_formula(a in rat(), b in rat()) {
        prop_assert!(product_formula_check(&a, &b).unwrap());
    }

    #[test]
    fn symmetric_and_bilinear(a in rat(), a2 in rat(), b in rat(), v in place()) {
        let s = |x: &BigRational, y: &BigRational| hilbert_symbol(x, y, &v).unwrap();
        prop_assert_eq!(s(&a, &b), s(&b, &a));
        prop_assert_eq!(s(&(&a * &a2), &b), s(&a, &b) + s(&a2, &b));
    }
}

#[test]
fn odd_units_at_two_against_thirteen() {
    for u in [1i64, 3, 5, 7] {
        for lift in 0..8 {
            let w = BigInt::from(u + 8 * lift);
            assert_eq!(hilbert_symbol_int(&w, &BigInt::from(13), &Place::prime(2)).unwrap(), Invariant::ZERO);
        }
    }
}

#[test]
fn legendre_examples() {
    assert_eq!(legendre(&BigInt::from(1), &BigInt::from(101)).unwrap(), 1);
    let squares: Vec<i64> = (1..13).map(|x| x * x % 13).collect();
    for a in 1..13i64 {
        let expect = if squares.contains(&a) { 1 } else { -1 };
        assert_eq!(legendre(&BigInt::from(a), &BigInt::from(13)).unwrap(), expect);
    }
    assert!(legendre(&BigInt::from(3), &BigInt::from(2)).is_err());
}

#[test]
fn mod13_core_for_k1() {
    let r = obstruction_mod13_core(&BigInt::from(1)).unwrap();
    assert!(r.holds());
    assert!(r.all_units);
    assert!(r.rows.iter().any(|row| row.point == vec![0, 1, 3]));
    // The six classes sum to zero: the product of the arguments is ≡ 1.
    for row in &r.rows {
        assert_eq!(row.invariants.iter().copied().sum::<Invariant>(), Invariant::ZERO, "{:?}", row.point);
    }
    assert!(matches!(obstruction_mod13_core(&BigInt::from(2)), Err(BrauerError::NotOneMod13(2))));
}

#[test]
fn mod13_core_is_fast() {
    let start = std::time::Instant::now();
    obstruction_mod13_core(&BigInt::from(1)).unwrap();
    assert!(start.elapsed().as_millis() < 200);
}

#[test]
fn verdict_hypotheses() {
    assert!(matches!(bm_verdict(&BigInt::from(2)), BmVerdict::HypothesesUnmet { .. }));
    assert!(matches!(bm_verdict(&BigInt::from(1)), BmVerdict::HypothesesUnmet { .. }));
}

#[test]
fn survey_closed_forms() {
    for m in [1u64, 10, 1000, 123_457] {
        assert_eq!(survey_counts(m, 1).count_local, m);
        assert_eq!(survey_counts(m, 24).count_local, (m - 1) / 24 + 1);
    }
    let row = survey_counts(10_000, 1);
    // Primes ℓ ≤ 100 with (13/ℓ) = 1: 3, 17, 23, 29, 43, 53, 61, 79.
    assert_eq!(row.count_obstructed, 8);
    assert!(!BigInt::from(row.count_obstructed).is_zero());
}

#[test]
fn verdict_in_the_progression() {
    let p = mk3_core::padic::star_modulus();
    // ℓ = P + 1 leaves a cofactor that trial division and Pocklington
    // cannot certify, so the verdict refuses.
    match bm_verdict(&(&p + 1u32)) {
        BmVerdict::HypothesesUnmet { reason } => assert!(reason.contains("cofactor"), "{reason}"),
        other => panic!("{other:?}"),
    }
    let ell = &p * 2u32 + 1u32;
    let BmVerdict::Obstructed { transcript } = bm_verdict(&ell) else { panic!("2P + 1 should be obstructed") };
    assert_eq!(transcript.k, &ell * &ell);
    assert_eq!(transcript.residues_13.len(), transcript.totals.len());
    for (row, total) in transcript.residues_13.iter().zip(&transcript.totals) {
        // Only 13 contributes, and some class has total 1/2.
        assert_eq!(row.invariants, *total);
        assert!(total.contains(&Invariant::HALF));
    }
    let json = serde_json::to_value(BmVerdict::Obstructed { transcript }).unwrap();
    assert_eq!(json["verdict"], "obstructed");
    assert_eq!(json["transcript"]["places"]["2"]["invariants"][0], "0");
}
