//! End-to-end acceptance checks, one line of output per criterion.
//!
//! Runs without the libtest harness so the report is always printed:
//! `cargo test -p mk3-core --test acceptance`. Set `MK3_ACCEPT_SLOW=1` to
//! also count over F_{7^6} and F_{7^7}, which takes hours.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use mk3_core::arith::primes_up_to;
use mk3_core::brauer::{hilbert_symbol_int, obstruction_mod13_core, product_formula_check, survey_counts, Invariant, Place};
use mk3_core::counting::{count_points, CountJob};
use mk3_core::forms::{FamilyParams, Mk3Form, TriprojPoint};
use mk3_core::galois_h1::{sigma_pic_u, sigma_pic_w_case_s, sigma_pic_w_case_sprime, InvolutionModule};
use mk3_core::lattice::{builtin_gram_s, builtin_gram_sprime, half_class_scan, sublattice_index, HalfClassVerdict};
use mk3_core::matrix::IntMatrix;
use mk3_core::padic::{
    adelic_verdict, hasse_weil_certificate, reference_form, search_solutions_mod, smooth_affine_point_mod_p,
    LocalVerdict, PlaceCertificate,
};
use mk3_core::rational::ec::fiber_residual;
use mk3_core::rational::integral::enumeration_bound;
use mk3_core::rational::{integral_points_complete, seed_point, vieta_involution, weierstrass_to_fiber, ECPoint};
use mk3_core::ring::Rationals;
use mk3_core::zeta::{complete_functional_equation, count_unit_roots, newton_partial_charpoly, picard_upper_bound, quotient_traces, TraceData};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn criterion_1_point_counts() -> Check {
    let form = FamilyParams::reference(1).expand();
    let expected: [u64; 7] = [43, 2843, 113191, 5786411, 282458443, 13843757831, 678222249307];
    let start = Instant::now();
    for n in 1..=4 {
        let got = count_points(&CountJob::new(form.clone(), 7, n).with_threads(1)).map_err(|e| e.to_string())?;
        ensure(got == expected[n - 1], format!("n = {n}: got {got}, expected {}", expected[n - 1]))?;
    }
    let small = start.elapsed();
    ensure(small < Duration::from_secs(60), format!("n = 1..4 took {small:?} single-threaded"))?;
    let start = Instant::now();
    let n5 = count_points(&CountJob::new(form.clone(), 7, 5)).map_err(|e| e.to_string())?;
    let t5 = start.elapsed();
    ensure(n5 == expected[4], format!("n = 5: got {n5}"))?;
    ensure(t5 < Duration::from_secs(600), format!("n = 5 took {t5:?}"))?;
    let mut note = format!("n=1..4 in {:.2}s single-threaded, n=5 in {:.1}s", small.as_secs_f64(), t5.as_secs_f64());
    if std::env::var_os("MK3_ACCEPT_SLOW").is_some() {
        for n in 6..=7 {
            let got = count_points(&CountJob::new(form.clone(), 7, n)).map_err(|e| e.to_string())?;
            ensure(got == expected[n - 1], format!("n = {n}: got {got}"))?;
        }
        note.push_str(", n=6,7 verified");
    } else {
        note.push_str(", n=6,7 skipped (MK3_ACCEPT_SLOW unset)");
    }
    Ok(note)
}

fn criterion_2_zeta() -> Check {
    let start = Instant::now();
    let data = TraceData::published();
    let degree = data.quotient_degree();
    let traces = quotient_traces(&data);
    let partial = newton_partial_charpoly(&traces[..traces.len().min(degree)], degree).map_err(|e| e.to_string())?;
    let f = complete_functional_equation(&partial, degree).map_err(|e| e.to_string())?;
    let want: Vec<BigInt> = [1, -1, 0, 4, -4, 0, 6, -6, 6, 0, -4, 4, 0, -1, 1].map(big).to_vec();
    ensure(f.poly.coeffs() == want.as_slice(), format!("charpoly {:?}", f.poly.coeffs()))?;
    ensure(f.sign == 1, format!("sign {}", f.sign))?;
    let units = count_unit_roots(&f.poly);
    ensure(units == 0, format!("{units} roots of unity"))?;
    let bound = picard_upper_bound(&data).map_err(|e| e.to_string())?;
    ensure(bound == 8, format!("bound {bound}"))?;
    let t = start.elapsed();
    ensure(t < Duration::from_secs(1), format!("took {t:?}"))?;
    Ok(format!("f(t) matches, sign +1, no unit roots, bound 8, {:.0} ms", t.as_secs_f64() * 1e3))
}

fn criterion_3_lattice() -> Check {
    let s = builtin_gram_s();
    let sp = builtin_gram_sprime();
    ensure(s.det() == big(-192), format!("det S = {}", s.det()))?;
    ensure(sp.det() == big(-12), format!("det S' = {}", sp.det()))?;
    let index = sublattice_index(&s.det(), &sp.det()).map_err(|e| e.to_string())?;
    ensure(index == big(4), format!("index {index}"))?;
    let scan = half_class_scan(&s).map_err(|e| e.to_string())?;
    let lookup = |v: [u8; 8]| scan.iter().find(|r| r.vector == v);
    let fibers = lookup([1, 1, 1, 0, 0, 0, 0, 0]).ok_or("(D1+D2+D3)/2 missing from the scan")?;
    ensure(
        fibers.verdict == HalfClassVerdict::ExcludedOddSelfIntersection && fibers.self_intersection == q(3, 1),
        format!("(D1+D2+D3)/2: {fibers:?}"),
    )?;
    let pair = lookup([0, 0, 0, 0, 0, 1, 1, 0]).ok_or("(C2++ + C2-+)/2 missing from the scan")?;
    ensure(
        pair.verdict == HalfClassVerdict::ExcludedOddSelfIntersection && pair.self_intersection == q(-1, 1),
        format!("(C2++ + C2-+)/2: {pair:?}"),
    )?;
    Ok("det -192 / -12, index 4, both half classes excluded by parity".into())
}

fn random_unimodular(n: usize, rng: &mut ChaCha8Rng) -> IntMatrix {
    let mut u = IntMatrix::identity(n);
    for _ in 0..3 * n {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            u.negate_row(i);
        } else {
            u.add_row_multiple(i, j, &big(rng.gen_range(-2..=2)));
        }
    }
    u
}

/// Block sum of trivial, sign and swap modules; H¹ has one ℤ/2 per sign block.
fn random_involution(rng: &mut ChaCha8Rng) -> (IntMatrix, usize) {
    let mut blocks = Vec::new();
    let mut rank = 0;
    let target = rng.gen_range(1..=8);
    while rank < target {
        let b = if rank + 2 <= target { rng.gen_range(0..3) } else { rng.gen_range(0..2) };
        rank += if b == 2 { 2 } else { 1 };
        blocks.push(b);
    }
    let mut m = IntMatrix::zeros(rank, rank);
    let mut at = 0;
    for &b in &blocks {
        match b {
            0 => m[(at, at)] = big(1),
            1 => m[(at, at)] = big(-1),
            _ => {
                m[(at, at + 1)] = big(1);
                m[(at + 1, at)] = big(1);
                at += 1;
            }
        }
        at += 1;
    }
    (m, blocks.iter().filter(|&&b| b == 1).count())
}

fn criterion_4_galois() -> Check {
    let two = |n: usize| vec![big(2); n];
    ensure(sigma_pic_w_case_s().h1() == two(2), "caseS")?;
    ensure(sigma_pic_w_case_sprime().h1() == two(2), "caseSprime")?;
    ensure(sigma_pic_u().h1() == two(5), "picU")?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for trial in 0..100 {
        let (sigma, signs) = random_involution(&mut rng);
        let module = InvolutionModule::new(sigma).map_err(|e| e.to_string())?;
        let u = random_unimodular(module.rank(), &mut rng);
        let moved = module.conjugate(&u).ok_or("conjugation by a unimodular matrix failed")?;
        ensure(module.h1() == two(signs), format!("trial {trial}: h1 {:?}, expected {signs} copies", module.h1()))?;
        ensure(moved.h1() == module.h1(), format!("trial {trial}: h1 changed under conjugation"))?;
    }
    Ok("(2,2), (2,2), (2,2,2,2,2); invariant on 100 conjugated modules".into())
}

fn criterion_5_local() -> Check {
    let start = Instant::now();
    let k = big(1);
    let f = reference_form(&k);
    let bundle = adelic_verdict(&k);
    ensure(bundle.verdict == LocalVerdict::Exists, format!("verdict {:?}, missing {:?}", bundle.verdict, bundle.missing))?;
    for place in ["inf", "2", "3", "5", "7", "13"] {
        let cert = bundle.places.get(place).ok_or(format!("no certificate at {place}"))?;
        let valid = match cert {
            PlaceCertificate::Hensel(h) => h.revalidate(&f),
            PlaceCertificate::HasseWeil(h) => h.revalidate(&f),
            PlaceCertificate::Real(r) => r.revalidate(&f),
            other => return Err(format!("{place}: {other:?}")),
        };
        ensure(valid, format!("certificate at {place} does not revalidate"))?;
    }
    for (place, pt) in [("2", [1, 1, 1]), ("5", [0, 2, 2]), ("7", [2, 3, 2]), ("13", [0, 1, 3])] {
        let PlaceCertificate::Hensel(h) = &bundle.places[place] else {
            return Err(format!("{place}: not a Hensel certificate"));
        };
        ensure(h.point == pt.map(big).to_vec(), format!("{place}: witness {:?}", h.point))?;
    }
    ensure(search_solutions_mod(&f, 8).map_err(|e| e.to_string())?.contains(&[1, 1, 1]), "(1,1,1) mod 8")?;
    let mut certified = 0;
    for p in primes_up_to(200).into_iter().filter(|&p| p >= 11) {
        let exhaustive = smooth_affine_point_mod_p(&f, p);
        if let Ok(c) = hasse_weil_certificate(&f, p) {
            ensure(c.revalidate(&f), format!("p = {p}: certificate does not revalidate"))?;
            ensure(exhaustive.is_some(), format!("p = {p}: certificate but no smooth point"))?;
            certified += 1;
        } else {
            ensure(exhaustive.is_some(), format!("p = {p}: neither a certificate nor a smooth point"))?;
        }
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(120), format!("took {t:?}"))?;
    Ok(format!("exists; witnesses match; {certified} Hasse-Weil certificates for 11 <= p <= 200 agree with search; {:.1}s", t.as_secs_f64()))
}

fn criterion_6_obstruction() -> Check {
    let report = obstruction_mod13_core(&big(1)).map_err(|e| e.to_string())?;
    ensure(report.holds(), "mod 13 computation does not obstruct")?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut rat = || loop {
        let n = rng.gen_range(-2000i64..2000);
        if n != 0 {
            break q(n, rng.gen_range(1..300));
        }
    };
    for _ in 0..500 {
        let (a, b) = (rat(), rat());
        ensure(product_formula_check(&a, &b).map_err(|e| e.to_string())?, format!("product formula fails for ({a}, {b})"))?;
    }
    for u in [1i64, 3, 5, 7] {
        let inv = hilbert_symbol_int(&big(u), &big(13), &Place::prime(2)).map_err(|e| e.to_string())?;
        ensure(inv == Invariant::ZERO, format!("({u}, 13)_2 = {inv:?}"))?;
    }
    Ok(format!("{} residue classes mod 13 all obstructed; product formula on 500 pairs; (u,13)_2 = 0", report.rows.len()))
}

fn criterion_7_elliptic() -> Check {
    let ell = big(-12);
    let (curve, p) = seed_point(&ell).map_err(|e| e.to_string())?;
    ensure(p == ECPoint::affine(q(5625, 4), q(-562725, 8)), format!("seed {p:?}"))?;
    ensure(curve.alpha == big(940) && curve.beta == big(219024), format!("curve {curve:?}"))?;
    ensure(curve.contains(&p), "seed is not on the curve")?;
    ensure(curve.infinite_order_certificate(&p).map_err(|e| e.to_string())?, "no Nagell-Lutz certificate")?;
    let mut seen = Vec::new();
    for n in 1..=10 {
        let pt = curve.multiple(n, &p).map_err(|e| e.to_string())?;
        let (x, y) = weierstrass_to_fiber(&curve, &pt, &big(6)).map_err(|e| format!("{n}P: {e}"))?;
        ensure(fiber_residual(&x, &y, &big(6), &curve.m).is_zero(), format!("{n}P misses the fiber"))?;
        ensure(!seen.contains(&(x.clone(), y.clone())), format!("{n}P repeats"))?;
        seen.push((x, y));
    }
    let ring = Rationals;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut degenerate = 0;
    for _ in 0..1000 {
        let pt: [BigRational; 3] = std::array::from_fn(|_| q(rng.gen_range(-40..=40), rng.gen_range(1..=12)));
        let coeffs: [i64; 4] = std::array::from_fn(|_| rng.gen_range(-9..=9));
        let form = form_through(coeffs, &pt);
        let axis = rng.gen_range(0..3);
        let tp = TriprojPoint::affine(&ring, pt[0].clone(), pt[1].clone(), pt[2].clone());
        match vieta_involution(&ring, &form, &tp, axis) {
            Ok(img) => {
                ensure(form.evaluate(&ring, &img).is_zero(), "image leaves the surface")?;
                let back = vieta_involution(&ring, &form, &img, axis).map_err(|e| e.to_string())?;
                ensure(back.proj_eq(&ring, &tp), "involution is not its own inverse")?;
            }
            Err(_) => {
                let quad = form.fiber_at(&ring, &tp, axis);
                ensure(quad.alpha.is_zero() && quad.beta.is_zero() && quad.gamma.is_zero(), "refused a non-degenerate fiber")?;
                degenerate += 1;
            }
        }
    }
    Ok(format!("seed, curve and certificate match; 10 multiples on the fiber; 1000 Vieta checks ({degenerate} whole-line fibers)"))
}

/// A form through `pt` with the given a, b, c, d and e chosen to fit, scaled
/// to integer coefficients.
fn form_through(coeffs: [i64; 4], pt: &[BigRational; 3]) -> Mk3Form {
    let [x, y, z] = pt;
    let (x2, y2, z2) = (x * x, y * y, z * z);
    let [a, b, c, d] = coeffs.map(|v| BigRational::from_integer(v.into()));
    let partial = a * &x2 * &y2 * &z2 + b * (&x2 * &y2 + &x2 * &z2 + &y2 * &z2) + c * x * y * z + d * (&x2 + &y2 + &z2);
    let den = partial.denom().clone();
    let [a, b, c, d] = coeffs.map(|v| BigInt::from(v) * &den);
    Mk3Form::new(a, b, c, d, -partial.numer().clone())
}

fn criterion_8_integral() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut total_points = 0;
    for i in 0..30 {
        let coeffs = common::random_nonzero_form(&mut rng, 20);
        let form = Mk3Form::from_slice(&coeffs);
        let set = integral_points_complete(&form).map_err(|e| format!("{coeffs:?}: {e}"))?;
        ensure(set.is_finite(), format!("form {i} {coeffs:?} has infinite families {:?}", set.families))?;
        let bound = (enumeration_bound(&form) * 2u32).to_i64().ok_or("box too large")?;
        let oracle = common::box_oracle(coeffs, bound);
        ensure(set.points == oracle, format!("form {i} {coeffs:?}: solver {} points, box oracle {}", set.points.len(), oracle.len()))?;
        total_points += oracle.len();
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(300), format!("took {t:?}"))?;
    Ok(format!("30 forms, {total_points} points in total, exact equality, {:.1}s", t.as_secs_f64()))
}

/// Independent prime count: ℓ ≤ √M, ℓ ≡ 1 mod P′, 13 a nonzero square mod ℓ
/// by Euler's criterion.
fn survey_oracle(bound: u64, modulus: u64) -> u64 {
    let root = (bound as f64).sqrt() as u64 + 1;
    let root = (0..=root).rev().find(|r| r * r <= bound).unwrap();
    (3..=root)
        .filter(|&l| (2..l).take_while(|d| d * d <= l).all(|d| l % d != 0))
        .filter(|&l| l % modulus == 1 % modulus)
        .filter(|&l| {
            let mut r = 1u128;
            let (mut b, mut e) = (13u128 % l as u128, (l - 1) / 2);
            while e > 0 {
                if e & 1 == 1 {
                    r = r * b % l as u128;
                }
                b = b * b % l as u128;
                e >>= 1;
            }
            r == 1
        })
        .count() as u64
}

fn criterion_9_survey() -> Check {
    let mut ratios = Vec::new();
    for m in [1_000_000u64, 10_000_000, 100_000_000] {
        let row = survey_counts(m, 1);
        ensure(row.count_local == m, format!("M = {m}: count_local {}", row.count_local))?;
        let root = (m as f64).sqrt();
        let ratio = row.count_obstructed as f64 * root.ln() / root;
        ensure((0.5..=2.0).contains(&ratio), format!("M = {m}: ratio {ratio:.3}"))?;
        ensure(row.count_obstructed == survey_oracle(m, 1), format!("M = {m}: prime count disagrees with trial division"))?;
        ratios.push(format!("{ratio:.3}"));
    }
    for modulus in [6u64, 24, 35, 1001] {
        for m in [1u64, 999, 1_000_000, 12_345_678] {
            let row = survey_counts(m, modulus);
            ensure(row.count_local == (m - 1) / modulus + 1, format!("P' = {modulus}, M = {m}: count_local {}", row.count_local))?;
            ensure(row.count_obstructed == survey_oracle(m, modulus), format!("P' = {modulus}, M = {m}: count_obstructed {}", row.count_obstructed))?;
        }
    }
    Ok(format!("P'=1 ratios {}; composite P' match closed forms", ratios.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("point counts", criterion_1_point_counts),
        ("zeta pipeline", criterion_2_zeta),
        ("lattice", criterion_3_lattice),
        ("galois cohomology", criterion_4_galois),
        ("local solvability", criterion_5_local),
        ("obstruction", criterion_6_obstruction),
        ("elliptic and orbit", criterion_7_elliptic),
        ("integral finiteness", criterion_8_integral),
        ("survey", criterion_9_survey),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(note) => println!("criterion {}: PASS {name}: {note}", i + 1),
            Err(why) => {
                println!("criterion {}: FAIL {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
