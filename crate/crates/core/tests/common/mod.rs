//! Shared brute-force oracles for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use rand::Rng;

/// Every integral point with |x|, |y|, |z| ≤ bound, found by walking the
/// (x, y) square and testing each z in the box directly on the polynomial.
/// The z-scan is cut short by evaluating F as a quadratic in z over i128.
pub fn box_oracle(coeffs: [i64; 5], bound: i64) -> BTreeSet<[BigInt; 3]> {
    let [a, b, c, d, e] = coeffs.map(i128::from);
    let mut out = BTreeSet::new();
    for x in -bound..=bound {
        for y in -bound..=bound {
            let (x, y) = (x as i128, y as i128);
            let (xx, yy) = (x * x, y * y);
            let alpha = a * xx * yy + b * (xx + yy) + d;
            let beta = c * x * y;
            let gamma = b * xx * yy + d * (xx + yy) + e;
            let f = |z: i128| alpha * z * z + beta * z + gamma;
            if alpha == 0 && beta == 0 {
                if gamma == 0 {
                    for z in -bound..=bound {
                        out.insert([x, y, z as i128].map(BigInt::from));
                    }
                }
                continue;
            }
            for z in candidate_roots(alpha, beta, gamma, bound as i128) {
                if f(z) == 0 {
                    out.insert([x, y, z].map(BigInt::from));
                }
            }
        }
    }
    out
}

/// Integers in [−bound, bound] that might be roots: the rounded real roots
/// and their neighbours, or the full range when the quadratic degenerates.
fn candidate_roots(alpha: i128, beta: i128, gamma: i128, bound: i128) -> Vec<i128> {
    let mut reals = Vec::new();
    if alpha == 0 {
        reals.push(-(gamma as f64) / beta as f64);
    } else {
        let disc = (beta * beta - 4 * alpha * gamma) as f64;
        if disc < 0.0 {
            return Vec::new();
        }
        let r = disc.sqrt();
        reals.push((-(beta as f64) + r) / (2.0 * alpha as f64));
        reals.push((-(beta as f64) - r) / (2.0 * alpha as f64));
    }
    let mut out = Vec::new();
    for r in reals {
        let z0 = r.round() as i128;
        for z in z0 - 2..=z0 + 2 {
            if z.abs() <= bound && !out.contains(&z) {
                out.push(z);
            }
        }
    }
    out
}

pub fn random_nonzero_form<R: Rng>(rng: &mut R, max: i64) -> [i64; 5] {
    std::array::from_fn(|_| loop {
        let v = rng.gen_range(-max..=max);
        if v != 0 {
            break v;
        }
    })
}
