//! The elliptic curve V² = U³ + (4−2m)U² + m²U and its birational link with
//! the fiber (x²−A²)(y²−A²) = m x²y² of the family at z = ∞.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EcError {
    #[error("m = {0} gives a singular cubic")]
    SingularCurve(BigInt),
    #[error("l = {0} makes m = 3l(1-l) vanish")]
    DegenerateLevel(BigInt),
    #[error("point ({}, {}) is not on the curve", .0 .0, .0 .1)]
    OffCurve(Box<(BigRational, BigRational)>),
    #[error("shift A must be nonzero")]
    ZeroShift,
    #[error("point lies on the exceptional locus: {0}")]
    Exceptional(ExceptionalLocus),
}

/// Where the birational maps between the fiber and the Weierstrass model
/// are undefined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExceptionalLocus {
    /// v = 0: a 2-torsion point, sent to x = ∞.
    TwoTorsion,
    /// u = −1: sent to y = ∞.
    UMinusOne,
    /// y = A on the fiber, sent to u = ∞.
    YEqualsShift,
    /// x = 0 on the fiber, sent to v = ∞.
    XZero,
    /// The point at infinity of the Weierstrass model.
    Infinity,
}

impl fmt::Display for ExceptionalLocus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ExceptionalLocus::TwoTorsion => "v = 0 (2-torsion, maps to x = infinity)",
            ExceptionalLocus::UMinusOne => "u = -1 (maps to y = infinity)",
            ExceptionalLocus::YEqualsShift => "y = A (maps to u = infinity)",
            ExceptionalLocus::XZero => "x = 0 (maps to v = infinity)",
            ExceptionalLocus::Infinity => "point at infinity",
        };
        f.write_str(s)
    }
}

/// V² = U³ + αU² + βU with α = 4 − 2m and β = m².
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EllipticCurveQ {
    #[serde(with = "crate::serde_big::bigint")]
    pub m: BigInt,
    #[serde(with = "crate::serde_big::bigint")]
    pub alpha: BigInt,
    #[serde(with = "crate::serde_big::bigint")]
    pub beta: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ECPoint {
    Infinity,
    Affine {
        #[serde(with = "crate::serde_big::display")]
        u: BigRational,
        #[serde(with = "crate::serde_big::display")]
        v: BigRational,
    },
}

impl ECPoint {
    pub fn affine(u: BigRational, v: BigRational) -> Self {
        ECPoint::Affine { u, v }
    }
}

impl EllipticCurveQ {
    pub fn new(m: impl Into<BigInt>) -> Result<Self, EcError> {
        let m = m.into();
        // disc(U² + αU + β) = α² − 4β = 16(1 − m), and β = m².
        if m.is_zero() || m.is_one() {
            return Err(EcError::SingularCurve(m));
        }
        let alpha = BigInt::from(4) - BigInt::from(2) * &m;
        let beta = &m * &m;
        Ok(EllipticCurveQ { m, alpha, beta })
    }

    /// The curve for m = 3ℓ(1 − ℓ).
    pub fn for_level(ell: &BigInt) -> Result<Self, EcError> {
        let m = level_m(ell)?;
        Self::new(m)
    }

    fn rhs(&self, u: &BigRational) -> BigRational {
        let a = BigRational::from_integer(self.alpha.clone());
        let b = BigRational::from_integer(self.beta.clone());
        u * u * u + a * u * u + b * u
    }

    pub fn contains(&self, p: &ECPoint) -> bool {
        match p {
            ECPoint::Infinity => true,
            ECPoint::Affine { u, v } => v * v == self.rhs(u),
        }
    }

    fn check(&self, p: &ECPoint) -> Result<(), EcError> {
        match p {
            ECPoint::Affine { u, v } if !self.contains(p) => Err(EcError::OffCurve(Box::new((u.clone(), v.clone())))),
            _ => Ok(()),
        }
    }

    pub fn neg(&self, p: &ECPoint) -> Result<ECPoint, EcError> {
        self.check(p)?;
        Ok(match p {
            ECPoint::Infinity => ECPoint::Infinity,
            ECPoint::Affine { u, v } => ECPoint::affine(u.clone(), -v),
        })
    }

    pub fn add(&self, p: &ECPoint, q: &ECPoint) -> Result<ECPoint, EcError> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.add_unchecked(p, q))
    }

    pub fn double(&self, p: &ECPoint) -> Result<ECPoint, EcError> {
        self.add(p, p)
    }

    /// n·P by double-and-add; negative n uses −P.
    pub fn multiple(&self, n: i64, p: &ECPoint) -> Result<ECPoint, EcError> {
        self.check(p)?;
        let mut base = if n < 0 { self.neg(p)? } else { p.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = ECPoint::Infinity;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add_unchecked(&acc, &base);
            }
            base = self.add_unchecked(&base, &base);
            k >>= 1;
        }
        Ok(acc)
    }

    fn add_unchecked(&self, p: &ECPoint, q: &ECPoint) -> ECPoint {
        let (ECPoint::Affine { u: u1, v: v1 }, ECPoint::Affine { u: u2, v: v2 }) = (p, q) else {
            return if *p == ECPoint::Infinity { q.clone() } else { p.clone() };
        };
        let alpha = BigRational::from_integer(self.alpha.clone());
        let slope = if u1 == u2 {
            if (v1 + v2).is_zero() {
                return ECPoint::Infinity;
            }
            let three = BigRational::from_integer(3.into());
            let two = BigRational::from_integer(2.into());
            let beta = BigRational::from_integer(self.beta.clone());
            (three * u1 * u1 + &two * &alpha * u1 + beta) / (two * v1)
        } else {
            (v2 - v1) / (u2 - u1)
        };
        let u3 = &slope * &slope - alpha - u1 - u2;
        let v3 = slope * (u1 - &u3) - v1;
        ECPoint::affine(u3, v3)
    }

    /// Nagell–Lutz with a Mazur fallback. Non-integral coordinates prove
    /// infinite order outright; otherwise the first 16 multiples must be
    /// pairwise distinct and finite, which is impossible for a torsion point
    /// since rational torsion has order at most 12.
    pub fn infinite_order_certificate(&self, p: &ECPoint) -> Result<bool, EcError> {
        self.check(p)?;
        let ECPoint::Affine { u, v } = p else {
            return Ok(false);
        };
        if !u.is_integer() || !v.is_integer() {
            return Ok(true);
        }
        let mut seen: Vec<ECPoint> = Vec::with_capacity(16);
        let mut cur = p.clone();
        for _ in 0..16 {
            if cur == ECPoint::Infinity || seen.contains(&cur) {
                return Ok(false);
            }
            if let ECPoint::Affine { u, v } = &cur {
                if !u.is_integer() || !v.is_integer() {
                    return Ok(true);
                }
            }
            seen.push(cur.clone());
            cur = self.add_unchecked(&cur, p);
        }
        Ok(true)
    }
}

pub fn level_m(ell: &BigInt) -> Result<BigInt, EcError> {
    if ell.is_zero() || ell.is_one() {
        return Err(EcError::DegenerateLevel(ell.clone()));
    }
    Ok(BigInt::from(3) * ell * (BigInt::one() - ell))
}

/// The point (9/4·(2ℓ−1)², 9/8·(2ℓ−1)(16ℓ²−16ℓ+5)) on the curve for
/// m = 3ℓ(1−ℓ).
pub fn seed_point(ell: &BigInt) -> Result<(EllipticCurveQ, ECPoint), EcError> {
    let curve = EllipticCurveQ::for_level(ell)?;
    let t = BigInt::from(2) * ell - 1;
    let u = BigRational::new(BigInt::from(9) * &t * &t, BigInt::from(4));
    let v = BigRational::new(BigInt::from(9) * &t * (BigInt::from(16) * ell * ell - BigInt::from(16) * ell + 5), BigInt::from(8));
    let p = ECPoint::affine(u, v);
    curve.check(&p)?;
    Ok((curve, p))
}

/// (U, V) ↦ (x, y) via u = U/m, v = V/m, X = 2u/v, Y = (u−1)/(u+1),
/// x = AX, y = AY.
pub fn weierstrass_to_fiber(curve: &EllipticCurveQ, p: &ECPoint, shift: &BigInt) -> Result<(BigRational, BigRational), EcError> {
    curve.check(p)?;
    if shift.is_zero() {
        return Err(EcError::ZeroShift);
    }
    let ECPoint::Affine { u, v } = p else {
        return Err(EcError::Exceptional(ExceptionalLocus::Infinity));
    };
    let m = BigRational::from_integer(curve.m.clone());
    let (u, v) = (u / &m, v / &m);
    if v.is_zero() {
        return Err(EcError::Exceptional(ExceptionalLocus::TwoTorsion));
    }
    let one = BigRational::one();
    if (&u + &one).is_zero() {
        return Err(EcError::Exceptional(ExceptionalLocus::UMinusOne));
    }
    let a = BigRational::from_integer(shift.clone());
    let x = BigRational::from_integer(2.into()) * &u / v;
    let y = (&u - &one) / (u + one);
    Ok((a.clone() * x, a * y))
}

/// Inverse of [`weierstrass_to_fiber`]: u = (1+Y)/(1−Y), v = 2(1+Y)/(X(1−Y)).
pub fn fiber_to_weierstrass(curve: &EllipticCurveQ, x: &BigRational, y: &BigRational, shift: &BigInt) -> Result<ECPoint, EcError> {
    if shift.is_zero() {
        return Err(EcError::ZeroShift);
    }
    let a = BigRational::from_integer(shift.clone());
    let (bx, by) = (x / &a, y / &a);
    let one = BigRational::one();
    if by == one {
        return Err(EcError::Exceptional(ExceptionalLocus::YEqualsShift));
    }
    if bx.is_zero() {
        return Err(EcError::Exceptional(ExceptionalLocus::XZero));
    }
    let u = (&one + &by) / (&one - &by);
    let v = BigRational::from_integer(2.into()) * (&one + &by) / (bx * (one - by));
    let m = BigRational::from_integer(curve.m.clone());
    let p = ECPoint::affine(u * &m, v * m);
    curve.check(&p)?;
    Ok(p)
}

/// (x²−A²)(y²−A²) − m x²y², the z = ∞ fiber of the family.
pub fn fiber_residual(x: &BigRational, y: &BigRational, shift: &BigInt, m: &BigInt) -> BigRational {
    let a2 = BigRational::from_integer(shift * shift);
    let (x2, y2) = (x * x, y * y);
    (&x2 - &a2) * (&y2 - &a2) - BigRational::from_integer(m.clone()) * x2 * y2
}

/// (1−m)X²Y² + 1 − X² − Y² with X = x/A, Y = y/A: the Edwards normalization,
/// kept as a cross-check of [`fiber_residual`].
pub fn edwards_residual(x: &BigRational, y: &BigRational, shift: &BigInt, m: &BigInt) -> BigRational {
    let a = BigRational::from_integer(shift.clone());
    let (bx, by) = (x / &a, y / &a);
    let (x2, y2) = (&bx * &bx, &by * &by);
    let one = BigRational::one();
    (one.clone() - BigRational::from_integer(m.clone())) * &x2 * &y2 + one - x2 - y2
}

pub(crate) fn rational_height(r: &BigRational) -> BigInt {
    r.numer().abs().max(r.denom().abs())
}
