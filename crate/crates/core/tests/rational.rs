mod common;

use std::collections::BTreeSet;

use mk3_core::forms::{FamilyParams, Mk3Form, Symmetry, TriprojPoint};
use mk3_core::rational::ec::{edwards_residual, fiber_residual, fiber_to_weierstrass, level_m};
use mk3_core::rational::integral::{completed_square, enumeration_bound, symmetric_images, IntegralFamily};
use mk3_core::rational::orbit::{fiber_point_at_infinity, naive_height, normalize, orbit_explore_family};
use mk3_core::rational::*;
use mk3_core::ring::{PrimeField, Rationals, Ring};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[test]
fn seeds_lie_on_their_curves() {
    let (curve, p) = seed_point(&big(2)).unwrap();
    assert_eq!(curve.m, big(-6));
    assert!(curve.contains(&p));
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..50 {
        let ell = loop {
            let l = rng.gen_range(-10_000i64..10_000);
            if l != 0 && l != 1 {
                break l;
            }
        };
        let (curve, p) = seed_point(&big(ell)).unwrap();
        assert!(curve.contains(&p), "l = {ell}");
        assert_eq!(curve.m, level_m(&big(ell)).unwrap());
    }
    assert!(seed_point(&big(0)).is_err());
}

#[test]
fn group_law_on_multiples() {
    let (curve, p) = seed_point(&big(-12)).unwrap();
    let (_, other) = seed_point(&big(-12)).unwrap();
    let pts: Vec<ECPoint> = (1..=4).map(|n| curve.multiple(n, &p).unwrap()).collect();
    assert_eq!(curve.add(&p, &ECPoint::Infinity).unwrap(), p);
    assert_eq!(curve.add(&p, &curve.neg(&p).unwrap()).unwrap(), ECPoint::Infinity);
    // a second independent-looking point: the 2-torsion (0, 0)
    let t = ECPoint::affine(q(0, 1), q(0, 1));
    let mut samples = pts.clone();
    samples.push(t);
    samples.push(other);
    for a in &samples {
        for b in &samples {
            assert_eq!(curve.add(a, b).unwrap(), curve.add(b, a).unwrap());
            for c in &samples {
                let left = curve.add(&curve.add(a, b).unwrap(), c).unwrap();
                let right = curve.add(a, &curve.add(b, c).unwrap()).unwrap();
                assert_eq!(left, right);
            }
        }
    }
    assert_eq!(curve.double(&p).unwrap(), pts[1]);
    let off = ECPoint::affine(q(1, 1), q(1, 1));
    assert!(curve.add(&p, &off).is_err());
}

#[test]
fn multiples_map_onto_the_fiber() {
    let (curve, p) = seed_point(&big(-12)).unwrap();
    assert!(curve.infinite_order_certificate(&p).unwrap());
    let shift = big(6);
    let mut seen = BTreeSet::new();
    for n in 1..=10 {
        let np = curve.multiple(n, &p).unwrap();
        let (x, y) = weierstrass_to_fiber(&curve, &np, &shift).unwrap();
        assert!(fiber_residual(&x, &y, &shift, &curve.m).is_zero(), "n = {n}");
        assert!(edwards_residual(&x, &y, &shift, &curve.m).is_zero());
        assert!(seen.insert((x.clone(), y.clone())), "multiples collide at n = {n}");
        assert_eq!(fiber_to_weierstrass(&curve, &x, &y, &shift).unwrap(), np);
        // the same point is a zero of the family form at z = ∞, whatever C and k are
        for k in [1, 7] {
            let form = FamilyParams::reference(k).expand();
            assert!(form.evaluate(&Rationals, &fiber_point_at_infinity(x.clone(), y.clone())).is_zero());
        }
    }
}

#[test]
fn fiber_round_trip_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let ell = rng.gen_range(2i64..200) * if rng.gen_bool(0.5) { 1 } else { -1 };
        let (curve, p) = seed_point(&big(ell)).unwrap();
        let shift = big(rng.gen_range(1i64..20));
        let np = curve.multiple(rng.gen_range(-3i64..=3).max(1), &p).unwrap();
        let (x, y) = weierstrass_to_fiber(&curve, &np, &shift).unwrap();
        let back = fiber_to_weierstrass(&curve, &x, &y, &shift).unwrap();
        assert_eq!(weierstrass_to_fiber(&curve, &back, &shift).unwrap(), (x, y));
    }
}

/// A random form through a given rational point: choose a..d, solve for e
/// and clear denominators.
fn form_through(coeffs: [i64; 4], pt: [BigRational; 3]) -> Mk3Form {
    let [x, y, z] = pt;
    let (x2, y2, z2) = (&x * &x, &y * &y, &z * &z);
    let [a, b, c, d] = coeffs.map(|v| BigRational::from_integer(v.into()));
    let partial = a * &x2 * &y2 * &z2 + b * (&x2 * &y2 + &x2 * &z2 + &y2 * &z2) + c * &x * &y * &z + d * (&x2 + &y2 + &z2);
    let den = partial.denom().clone();
    let [a, b, c, d] = coeffs.map(|v| BigInt::from(v) * &den);
    Mk3Form::new(a, b, c, d, -partial.numer().clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn vieta_involutions_over_q(
        coeffs in prop::array::uniform4(-9i64..=9),
        nums in prop::array::uniform3(-40i64..=40),
        dens in prop::array::uniform3(1i64..=12),
        axis in 0usize..3,
    ) {
        let pt: [BigRational; 3] = std::array::from_fn(|i| q(nums[i], dens[i]));
        let form = form_through(coeffs, pt.clone());
        let ring = Rationals;
        let p = TriprojPoint::affine(&ring, pt[0].clone(), pt[1].clone(), pt[2].clone());
        match vieta_involution(&ring, &form, &p, axis) {
            Ok(img) => {
                prop_assert!(form.evaluate(&ring, &img).is_zero());
                let back = vieta_involution(&ring, &form, &img, axis).unwrap();
                prop_assert!(back.proj_eq(&ring, &p));
            }
            Err(_) => {
                let quad = form.fiber_at(&ring, &p, axis);
                prop_assert!(quad.alpha.is_zero() && quad.beta.is_zero() && quad.gamma.is_zero());
            }
        }
    }
}

#[test]
fn sigma3_is_an_involution_mod_p() {
    let form = FamilyParams::reference(1).expand();
    let p = 1009u64;
    let field = PrimeField::new(p);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut checked = 0;
    while checked < 100 {
        let (x, y) = (rng.gen_range(0..p), rng.gen_range(0..p));
        let base = TriprojPoint { pairs: [(x, 1), (y, 1), (0, 1)] };
        let quad = form.fiber_at(&field, &base, 2);
        let Some(z) = (0..p).find(|&z| {
            let v = field.add(&field.add(&field.mul(&quad.alpha, &field.mul(&z, &z)), &field.mul(&quad.beta, &z)), &quad.gamma);
            v == 0
        }) else {
            continue;
        };
        let pt = TriprojPoint { pairs: [(x, 1), (y, 1), (z, 1)] };
        let img = vieta_involution(&field, &form, &pt, 2).unwrap();
        assert_eq!(form.evaluate(&field, &img), 0);
        assert!(vieta_involution(&field, &form, &img, 2).unwrap().proj_eq(&field, &pt));
        checked += 1;
    }
}

#[test]
fn seed_orbit_grows_past_the_symmetry_group() {
    let (curve, p) = seed_point(&big(-12)).unwrap();
    let (x, y) = weierstrass_to_fiber(&curve, &p, &big(6)).unwrap();
    let seed = fiber_point_at_infinity(x, y);
    assert_eq!(naive_height(&seed), big(4_166_666));
    let params = FamilyParams::reference(1);
    let bound = BigInt::from(10).pow(30);
    let (state, stats) = orbit_explore_family(&params, &seed, &bound, 5_000).unwrap();
    assert!(stats.orbit_size > 24, "{stats:?}");
    assert!(stats.nondegenerate && stats.family_hypothesis == Some(true) && !stats.hypothesis_disagrees);
    let form = params.expand();
    for pt in &state.points {
        assert!(form.evaluate(&Rationals, pt).is_zero());
        assert!(naive_height(pt) <= bound);
    }
    // Below the seed's own height nothing is recorded.
    let (_, small) = orbit_explore_family(&params, &seed, &big(1_000_000), 5_000).unwrap();
    assert_eq!(small.orbit_size, 0);
}

#[test]
fn hypothesis_and_nondegeneracy_can_disagree() {
    // k = 0 makes −mk = 0 a square while the form stays non-degenerate.
    let params = FamilyParams::reference(0);
    assert!(params.expand().is_nondegenerate());
    assert!(!mk3_core::rational::orbit::family_hypothesis(&params));
}

#[test]
fn symmetry_orbit_is_at_most_24() {
    let ring = Rationals;
    let pt = normalize(&TriprojPoint::affine(&ring, q(1, 2), q(3, 1), q(-5, 7)));
    let images: BTreeSet<_> = Symmetry::all().iter().map(|s| normalize(&s.apply(&ring, &pt))).collect();
    assert!(images.len() <= 24);
    let fixed = normalize(&TriprojPoint::affine(&ring, q(1, 1), q(1, 1), q(1, 1)));
    let images: BTreeSet<_> = Symmetry::all().iter().map(|s| normalize(&s.apply(&ring, &fixed))).collect();
    assert_eq!(images.len(), 4);
}

#[test]
fn zero_coefficients_are_rejected() {
    assert!(integral_points_complete(&Mk3Form::new(1, 0, 1, 1, 1)).is_err());
}

#[test]
fn solutions_are_symmetric_and_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..40 {
        let c = common::random_nonzero_form(&mut rng, 20);
        let form = Mk3Form::from_slice(&c);
        let sol = integral_points_complete(&form).unwrap();
        let cs = completed_square(&form);
        for p in &sol.points {
            assert!(form.eval_affine(&p[0], &p[1], &p[2]).is_zero());
            for img in symmetric_images(p) {
                assert!(sol.points.contains(&img));
            }
            // points with a zero coordinate satisfy A·d(bx²+d)(by²+d) = k − b²c²d²
            if let Some(i) = p.iter().position(|v| v.is_zero()) {
                let others: Vec<&BigInt> = p.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| v).collect();
                let prod: BigInt = others.iter().map(|v| &form.b * *v * *v + &form.d).product();
                let bcd = &form.b * &form.c * &form.d;
                assert_eq!(&cs.scale * &form.d * prod, &cs.k - &bcd * &bcd);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    /// Inside the box the complete solver and brute force agree, even when
    /// the solver also reports points or families beyond it.
    #[test]
    fn agrees_with_box_search(c in prop::array::uniform5(prop_oneof![-20i64..=-1, 1i64..=20])) {
        let form = Mk3Form::from_slice(&c);
        let sol = integral_points_complete(&form).unwrap();
        let bound = (enumeration_bound(&form) * big(2)).to_i64().unwrap();
        prop_assert_eq!(sol.within_box(&big(bound)), common::box_oracle(c, bound));
    }
}

#[test]
fn points_beyond_the_advertised_box() {
    // Each of these has an integral point outside |coords| ≤ 2B*.
    for (c, witness) in [
        ([20, -7, -17, -5, -1], [-1, 18, -1]),
        ([4, -8, 13, -1, -11], [0, 0, 0]),
        ([8, -3, -10, -3, 20], [0, 0, 0]),
    ] {
        let form = Mk3Form::from_slice(&c);
        let sol = integral_points_complete(&form).unwrap();
        let twice = enumeration_bound(&form) * big(2);
        assert!(sol.is_finite());
        assert!(sol.max_coordinate() > twice, "{c:?}");
        assert_eq!(sol.within_box(&twice), common::box_oracle(c, twice.to_i64().unwrap()));
        if witness != [0, 0, 0] {
            let w = witness.map(big);
            assert!(form.eval_affine(&w[0], &w[1], &w[2]).is_zero());
            assert!(sol.points.contains(&w));
        }
    }
}

#[test]
fn infinite_families_are_reported() {
    // a x² + b = 0 at x = ±1 turns the equation into a conic in (y, z)
    let lines = integral_points_complete(&Mk3Form::new(1, -1, 2, 2, -6)).unwrap();
    assert!(lines.families.iter().all(|f| matches!(f, IntegralFamily::Line { .. })));
    assert!(!lines.is_finite());
    let pell = integral_points_complete(&Mk3Form::new(1, -1, 3, 2, -3)).unwrap();
    assert!(pell.families.iter().any(|f| matches!(f, IntegralFamily::Conic(_))));
    for form in [Mk3Form::new(1, -1, 2, 2, -6), Mk3Form::new(1, -1, 3, 2, -3)] {
        let sol = integral_points_complete(&form).unwrap();
        assert!(form.is_nondegenerate());
        let c = [&form.a, &form.b, &form.c, &form.d, &form.e].map(|v| v.to_i64().unwrap());
        for bound in [30i64, 200] {
            let inside = sol.within_box(&big(bound));
            assert_eq!(inside, common::box_oracle(c, bound));
            assert!(inside.len() > 24);
        }
    }
}

#[test]
fn reference_family_has_no_integral_points() {
    let sol = integral_points_complete(&FamilyParams::reference(1).expand()).unwrap();
    assert!(sol.is_finite() && sol.points.is_empty());
}
