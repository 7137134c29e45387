//! MK3 forms: (2,2,2)-forms on ℙ¹×ℙ¹×ℙ¹ invariant under coordinate
//! permutations and even sign changes, determined by five coefficients.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ring::{IntegersMod, Ring};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error("exhaustive smoothness check is limited to p <= {limit}, got {p}")]
    ExhaustiveBoundExceeded { p: u64, limit: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("coordinate pair {0} is (0:0)")]
    ZeroPair(usize),
    #[error("fiber quadratic is identically zero")]
    ZeroFiber,
}

/// Largest prime accepted by [`Mk3Form::is_smooth_mod_p`].
pub const SMOOTHNESS_PRIME_LIMIT: u64 = 101;

/// a x²y²z² + b(x²y² + x²z² + y²z²) + c xyz + d(x² + y² + z²) + e,
/// bihomogenized in the pairs (x:r), (y:s), (z:t).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mk3Form {
    #[serde(with = "crate::serde_big::bigint")]
    pub a: BigInt,
    #[serde(with = "crate::serde_big::bigint")]
    pub b: BigInt,
    #[serde(with = "crate::serde_big::bigint")]
    pub c: BigInt,
    #[serde(with = "crate::serde_big::bigint")]
    pub d: BigInt,
    #[serde(with = "crate::serde_big::bigint")]
    pub e: BigInt,
}

/// Parameters of (x²−A²)(y²−A²)(z²−A²) − m(xyz + C)² − k.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FamilyParams {
    /// A
    #[serde(with = "crate::serde_big::bigint")]
    pub shift: BigInt,
    #[serde(with = "crate::serde_big::bigint")]
    pub m: BigInt,
    /// C
    #[serde(with = "crate::serde_big::bigint")]
    pub offset: BigInt,
    #[serde(with = "crate::serde_big::bigint")]
    pub k: BigInt,
}

impl FamilyParams {
    pub fn new(shift: impl Into<BigInt>, m: impl Into<BigInt>, offset: impl Into<BigInt>, k: impl Into<BigInt>) -> Self {
        FamilyParams { shift: shift.into(), m: m.into(), offset: offset.into(), k: k.into() }
    }

    /// The concrete family A = 6, m = −468, C = −4330 at level k.
    pub fn reference(k: impl Into<BigInt>) -> Self {
        Self::new(6, -468, -4330, k)
    }

    pub fn expand(&self) -> Mk3Form {
        let a2 = &self.shift * &self.shift;
        let a4 = &a2 * &a2;
        let a6 = &a4 * &a2;
        Mk3Form {
            a: BigInt::one() - &self.m,
            b: -&a2,
            c: -BigInt::from(2) * &self.m * &self.offset,
            d: a4,
            e: -(a6 + &self.m * &self.offset * &self.offset + &self.k),
        }
    }

    /// Direct evaluation of the product formula at an affine point.
    pub fn eval_product(&self, x: &BigInt, y: &BigInt, z: &BigInt) -> BigInt {
        let a2 = &self.shift * &self.shift;
        let w = x * y * z + &self.offset;
        (x * x - &a2) * (y * y - &a2) * (z * z - &a2) - &self.m * &w * &w - &self.k
    }
}

/// A point of ℙ¹×ℙ¹×ℙ¹ as three pairs (x:r), (y:s), (z:t).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TriprojPoint<E> {
    pub pairs: [(E, E); 3],
}

impl<E: Clone + PartialEq> TriprojPoint<E> {
    pub fn new<R: Ring<Elem = E>>(ring: &R, pairs: [(E, E); 3]) -> Result<Self, FormError> {
        for (i, (u, v)) in pairs.iter().enumerate() {
            if ring.is_zero(u) && ring.is_zero(v) {
                return Err(FormError::ZeroPair(i));
            }
        }
        Ok(TriprojPoint { pairs })
    }

    pub fn affine<R: Ring<Elem = E>>(ring: &R, x: E, y: E, z: E) -> Self {
        TriprojPoint { pairs: [(x, ring.one()), (y, ring.one()), (z, ring.one())] }
    }

    /// Projective equality: each pair agrees up to a nonzero scalar.
    pub fn proj_eq<R: Ring<Elem = E>>(&self, ring: &R, other: &Self) -> bool {
        self.pairs
            .iter()
            .zip(&other.pairs)
            .all(|((a, b), (c, d))| ring.mul(a, d) == ring.mul(b, c))
    }
}

/// One of the 24 symmetries: coordinate permutation followed by signs whose
/// product is 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Symmetry {
    pub perm: [usize; 3],
    pub signs: [i8; 3],
}

impl Symmetry {
    pub fn all() -> Vec<Symmetry> {
        const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        const SIGNS: [[i8; 3]; 4] = [[1, 1, 1], [-1, -1, 1], [-1, 1, -1], [1, -1, -1]];
        PERMS
            .iter()
            .flat_map(|&perm| SIGNS.iter().map(move |&signs| Symmetry { perm, signs }))
            .collect()
    }

    /// Coordinate i of the image is `signs[i]` times coordinate `perm[i]`.
    pub fn apply<R: Ring>(&self, ring: &R, pt: &TriprojPoint<R::Elem>) -> TriprojPoint<R::Elem> {
        let pair = |i: usize| {
            let (u, v) = &pt.pairs[self.perm[i]];
            let u = if self.signs[i] < 0 { ring.neg(u) } else { u.clone() };
            (u, v.clone())
        };
        TriprojPoint { pairs: [pair(0), pair(1), pair(2)] }
    }
}

/// Coefficients (α, β, γ) of α w² + β w u + γ u² for the pair (w:u) on
/// the chosen axis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberQuadratic<E> {
    pub alpha: E,
    pub beta: E,
    pub gamma: E,
}

impl Mk3Form {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>, d: impl Into<BigInt>, e: impl Into<BigInt>) -> Self {
        Mk3Form { a: a.into(), b: b.into(), c: c.into(), d: d.into(), e: e.into() }
    }

    pub fn from_slice(v: &[i64; 5]) -> Self {
        Self::new(v[0], v[1], v[2], v[3], v[4])
    }

    pub fn coeffs(&self) -> [&BigInt; 5] {
        [&self.a, &self.b, &self.c, &self.d, &self.e]
    }

    /// c ≠ 0, be ≠ d² and ad ≠ b².
    pub fn is_nondegenerate(&self) -> bool {
        !self.c.is_zero() && &self.b * &self.e != &self.d * &self.d && &self.a * &self.d != &self.b * &self.b
    }

    pub fn coeffs_in<R: Ring>(&self, ring: &R) -> [R::Elem; 5] {
        self.coeffs().map(|c| ring.from_bigint(c))
    }

    /// Whether every coefficient vanishes in `ring`.
    pub fn vanishes_in<R: Ring>(&self, ring: &R) -> bool {
        self.coeffs_in(ring).iter().all(|c| ring.is_zero(c))
    }

    pub fn fiber_quadratic<R: Ring>(
        &self,
        ring: &R,
        base: [&(R::Elem, R::Elem); 2],
    ) -> FiberQuadratic<R::Elem> {
        fiber_from_coeffs(ring, &self.coeffs_in(ring), base)
    }

    /// Fiber quadratic along `axis` (0, 1 or 2) at the point's other two pairs.
    pub fn fiber_at<R: Ring>(&self, ring: &R, pt: &TriprojPoint<R::Elem>, axis: usize) -> FiberQuadratic<R::Elem> {
        let [j, k] = other_axes(axis);
        self.fiber_quadratic(ring, [&pt.pairs[j], &pt.pairs[k]])
    }

    pub fn evaluate<R: Ring>(&self, ring: &R, pt: &TriprojPoint<R::Elem>) -> R::Elem {
        let q = self.fiber_at(ring, pt, 2);
        let (w, u) = &pt.pairs[2];
        eval_binary(ring, &q, w, u)
    }

    pub fn eval_affine(&self, x: &BigInt, y: &BigInt, z: &BigInt) -> BigInt {
        let (x2, y2, z2) = (x * x, y * y, z * z);
        &self.a * &x2 * &y2 * &z2
            + &self.b * (&x2 * &y2 + &x2 * &z2 + &y2 * &z2)
            + &self.c * x * y * z
            + &self.d * (&x2 + &y2 + &z2)
            + &self.e
    }

    /// Partial derivatives with respect to (x_i, r_i) for each pair i.
    pub fn gradient<R: Ring>(&self, ring: &R, pt: &TriprojPoint<R::Elem>) -> [(R::Elem, R::Elem); 3] {
        let coeffs = self.coeffs_in(ring);
        let two = ring.from_i64(2);
        std::array::from_fn(|i| {
            let [j, k] = other_axes(i);
            let q = fiber_from_coeffs(ring, &coeffs, [&pt.pairs[j], &pt.pairs[k]]);
            let (w, u) = &pt.pairs[i];
            let dw = ring.add(&ring.mul(&two, &ring.mul(&q.alpha, w)), &ring.mul(&q.beta, u));
            let du = ring.add(&ring.mul(&q.beta, w), &ring.mul(&two, &ring.mul(&q.gamma, u)));
            (dw, du)
        })
    }

    /// Exhaustive smoothness test over F_p on the eight affine charts.
    pub fn is_smooth_mod_p(&self, p: u64) -> Result<bool, FormError> {
        if p > SMOOTHNESS_PRIME_LIMIT {
            return Err(FormError::ExhaustiveBoundExceeded { p, limit: SMOOTHNESS_PRIME_LIMIT });
        }
        if !crate::arith::is_prime_u64(p) {
            return Err(FormError::NotPrime(p));
        }
        Ok((0..8u8).all(|chart| self.singular_points_in_chart(p, chart).is_empty()))
    }

    /// Singular F_p-points in one chart. Bit i of `chart` set means pair i is
    /// written (1 : u_i) rather than (u_i : 1).
    pub fn singular_points_in_chart(&self, p: u64, chart: u8) -> Vec<[u64; 3]> {
        let ring = IntegersMod::new(p);
        let mut out = Vec::new();
        let pair = |i: usize, u: u64| if chart >> i & 1 == 1 { (1, u) } else { (u, 1) };
        for u0 in 0..p {
            for u1 in 0..p {
                for u2 in 0..p {
                    let pt = TriprojPoint { pairs: [pair(0, u0), pair(1, u1), pair(2, u2)] };
                    if !ring.is_zero(&self.evaluate(&ring, &pt)) {
                        continue;
                    }
                    let grad = self.gradient(&ring, &pt);
                    let chart_partials_vanish = (0..3).all(|i| {
                        let (dw, du) = &grad[i];
                        if chart >> i & 1 == 1 {
                            *du == 0
                        } else {
                            *dw == 0
                        }
                    });
                    if chart_partials_vanish {
                        out.push([u0, u1, u2]);
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for Mk3Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}, {}, {}]", self.a, self.b, self.c, self.d, self.e)
    }
}

pub(crate) fn other_axes(axis: usize) -> [usize; 2] {
    match axis {
        0 => [1, 2],
        1 => [0, 2],
        2 => [0, 1],
        _ => panic!("axis must be 0, 1 or 2"),
    }
}

pub(crate) fn fiber_from_coeffs<R: Ring>(
    ring: &R,
    [a, b, c, d, e]: &[R::Elem; 5],
    [(x, r), (y, s)]: [&(R::Elem, R::Elem); 2],
) -> FiberQuadratic<R::Elem> {
    let (xx, rr, yy, ss) = (ring.square(x), ring.square(r), ring.square(y), ring.square(s));
    let xy = ring.mul(&xx, &yy);
    let mixed = ring.add(&ring.mul(&xx, &ss), &ring.mul(&rr, &yy));
    let rs = ring.mul(&rr, &ss);
    let alpha = ring.sum([&ring.mul(a, &xy), &ring.mul(b, &mixed), &ring.mul(d, &rs)]);
    let gamma = ring.sum([&ring.mul(b, &xy), &ring.mul(d, &mixed), &ring.mul(e, &rs)]);
    let beta = ring.mul(c, &ring.mul(&ring.mul(x, y), &ring.mul(r, s)));
    FiberQuadratic { alpha, beta, gamma }
}

pub(crate) fn eval_binary<R: Ring>(ring: &R, q: &FiberQuadratic<R::Elem>, w: &R::Elem, u: &R::Elem) -> R::Elem {
    ring.sum([
        &ring.mul(&q.alpha, &ring.square(w)),
        &ring.mul(&q.beta, &ring.mul(w, u)),
        &ring.mul(&q.gamma, &ring.square(u)),
    ])
}
