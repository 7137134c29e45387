//! Finite fields F_{p^n} of odd characteristic.
//!
//! [`FieldCtx`] is the reference backend: elements are coefficient vectors
//! modulo an explicit irreducible polynomial. [`ZechField`] represents
//! nonzero elements by discrete logarithms and is what the point counter
//! uses in its inner loop.

mod poly_fp;
mod zech;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::{is_prime_u64, pow_mod};
use crate::ring::{Field, Ring};

pub use zech::{ZechElem, ZechField, ZECH_MAX_ORDER};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("characteristic must be an odd prime below 2^32, got {0}")]
    BadCharacteristic(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("modulus must be monic of degree {expected}")]
    BadModulus { expected: usize },
    #[error("modulus is reducible over F_{0}")]
    Reducible(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("field of order {0} exceeds the table-mode limit")]
    TooLargeForTables(u64),
}

/// The lexicographically smallest monic irreducible polynomial of degree `n`
/// over F_p, comparing coefficient vectors from the constant term upward.
pub fn find_irreducible(p: u64, n: usize) -> Vec<u64> {
    assert!(n >= 1);
    let mut lower = vec![0u64; n];
    if n > 1 {
        // Every candidate with zero constant term is divisible by x.
        lower[0] = 1;
    }
    loop {
        let mut f = lower.clone();
        f.push(1);
        if poly_fp::is_irreducible(&f, p) {
            return f;
        }
        // Increment with the constant term as the most significant digit.
        let mut i = n;
        loop {
            i -= 1;
            lower[i] += 1;
            if lower[i] < p {
                break;
            }
            lower[i] = 0;
            assert!(i > 0, "irreducible polynomials always exist");
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElem(Vec<u64>);

impl FieldElem {
    pub fn coeffs(&self) -> &[u64] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldCtx {
    p: u64,
    n: usize,
    modulus: Vec<u64>,
    q: BigInt,
}

impl FieldCtx {
    /// F_{p^n} with the canonical (lexicographically smallest) modulus.
    pub fn new(p: u64, n: usize) -> Result<Self, GfError> {
        Self::check_base(p, n)?;
        Self::with_modulus(p, find_irreducible(p, n))
    }

    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Self, GfError> {
        let n = modulus.len().saturating_sub(1);
        Self::check_base(p, n)?;
        if modulus.last() != Some(&1) || modulus.iter().any(|&c| c >= p) {
            return Err(GfError::BadModulus { expected: n });
        }
        if !poly_fp::is_irreducible(&modulus, p) {
            return Err(GfError::Reducible(p));
        }
        Ok(FieldCtx { p, n, modulus, q: BigInt::from(p).pow(n as u32) })
    }

    fn check_base(p: u64, n: usize) -> Result<(), GfError> {
        if p == 2 || p >= 1 << 32 || !is_prime_u64(p) {
            return Err(GfError::BadCharacteristic(p));
        }
        if n == 0 {
            return Err(GfError::ZeroDegree);
        }
        Ok(())
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn degree(&self) -> usize {
        self.n
    }
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }
    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn elem(&self, coeffs: &[u64]) -> FieldElem {
        let mut v = vec![0u64; self.n];
        let reduced = poly_fp::rem(&coeffs.iter().map(|c| c % self.p).collect::<Vec<_>>(), &self.modulus, self.p);
        v[..reduced.len()].copy_from_slice(&reduced);
        FieldElem(v)
    }

    /// The class of the polynomial variable.
    pub fn generator_x(&self) -> FieldElem {
        self.elem(&[0, 1])
    }

    pub fn div(&self, a: &FieldElem, b: &FieldElem) -> Result<FieldElem, GfError> {
        let bi = self.inv(b).ok_or(GfError::DivisionByZero)?;
        Ok(self.mul(a, &bi))
    }

    pub fn pow(&self, a: &FieldElem, e: &BigInt) -> FieldElem {
        let mut acc = self.one();
        let bits = e.bits();
        for i in (0..bits).rev() {
            acc = self.mul(&acc, &acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    /// Index of an element in the packed base-p encoding used by the tables
    /// (constant term is the least significant digit).
    pub fn packed_index(&self, a: &FieldElem) -> u64 {
        a.0.iter().rev().fold(0u64, |acc, &c| acc * self.p + c)
    }

    pub fn from_packed_index(&self, mut idx: u64) -> FieldElem {
        let mut v = vec![0u64; self.n];
        for c in v.iter_mut() {
            *c = idx % self.p;
            idx /= self.p;
        }
        FieldElem(v)
    }

    /// All q elements, ordered lexicographically by coefficient vector.
    pub fn enumerate(&self) -> impl Iterator<Item = FieldElem> + '_ {
        let q = self.q.to_u64().expect("enumeration needs q < 2^64");
        (0..q).map(move |mut i| {
            let mut v = vec![0u64; self.n];
            for c in v.iter_mut().rev() {
                *c = i % self.p;
                i /= self.p;
            }
            FieldElem(v)
        })
    }

    /// Quadratic character by Euler's criterion in F_q.
    pub fn chi_by_power(&self, a: &FieldElem) -> i8 {
        if self.is_zero(a) {
            return 0;
        }
        let e = (&self.q - 1u32) >> 1;
        if self.pow(a, &e) == self.one() {
            1
        } else {
            -1
        }
    }

    /// A generator of the multiplicative group (smallest in packed order).
    pub fn primitive_element(&self) -> FieldElem {
        let order = &self.q - 1u32;
        let primes = small_prime_divisors(&order);
        let q = self.q.to_u64().expect("primitive element search needs q < 2^64");
        (2..q)
            .chain(std::iter::once(1))
            .map(|i| self.from_packed_index(i))
            .find(|g| primes.iter().all(|r| self.pow(g, &(&order / r)) != self.one()))
            .expect("multiplicative group is cyclic")
    }
}

fn small_prime_divisors(n: &BigInt) -> Vec<BigInt> {
    let mut m = n.clone();
    let mut out = Vec::new();
    let mut d = BigInt::from(2);
    while &d * &d <= m {
        if (&m % &d).is_zero() {
            out.push(d.clone());
            while (&m % &d).is_zero() {
                m /= &d;
            }
        }
        d += 1u32;
    }
    if m > BigInt::one() {
        out.push(m);
    }
    out
}

impl Ring for FieldCtx {
    type Elem = FieldElem;

    fn zero(&self) -> FieldElem {
        FieldElem(vec![0; self.n])
    }
    fn one(&self) -> FieldElem {
        let mut v = vec![0; self.n];
        v[0] = 1;
        FieldElem(v)
    }
    fn from_bigint(&self, v: &BigInt) -> FieldElem {
        let mut out = vec![0; self.n];
        out[0] = v.mod_floor(&BigInt::from(self.p)).to_u64().expect("residue");
        FieldElem(out)
    }
    fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldElem(a.0.iter().zip(&b.0).map(|(x, y)| (x + y) % self.p).collect())
    }
    fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldElem(a.0.iter().zip(&b.0).map(|(x, y)| (x + self.p - y) % self.p).collect())
    }
    fn neg(&self, a: &FieldElem) -> FieldElem {
        FieldElem(a.0.iter().map(|x| (self.p - x) % self.p).collect())
    }
    fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let prod = poly_fp::mulmod(&a.0, &b.0, &self.modulus, self.p);
        let mut v = vec![0; self.n];
        v[..prod.len()].copy_from_slice(&prod);
        FieldElem(v)
    }
    fn is_zero(&self, a: &FieldElem) -> bool {
        a.0.iter().all(|&c| c == 0)
    }
}

impl Field for FieldCtx {
    fn inv(&self, a: &FieldElem) -> Option<FieldElem> {
        if self.is_zero(a) {
            return None;
        }
        Some(self.pow(a, &(&self.q - 2u32)))
    }
    fn quadratic_character(&self, a: &FieldElem) -> i8 {
        // The norm to F_p is a square there iff `a` is a square in F_q.
        if self.is_zero(a) {
            return 0;
        }
        let e = (&self.q - 1u32) / (self.p - 1);
        let norm = self.pow(a, &e);
        debug_assert!(norm.0[1..].iter().all(|&c| c == 0));
        if pow_mod(norm.0[0], (self.p - 1) / 2, self.p) == 1 {
            1
        } else {
            -1
        }
    }
    fn order(&self) -> Option<u64> {
        self.q.to_u64()
    }
}

/// Packed-index helper shared with the Zech backend: the index of `a + 1`.
#[inline]
pub(crate) fn packed_increment(idx: u64, p: u64) -> u64 {
    if idx % p == p - 1 {
        idx - (p - 1)
    } else {
        idx + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_moduli() {
        assert_eq!(find_irreducible(7, 1), vec![0, 1]);
        assert_eq!(find_irreducible(7, 2), vec![1, 0, 1]);
        let cubic = find_irreducible(7, 3);
        assert_eq!(cubic.len(), 4);
        assert!((0..7u64).all(|x| cubic.iter().rev().fold(0, |acc, &c| (acc * x + c) % 7) != 0));
    }

    #[test]
    fn x_squared_is_minus_one_in_f49() {
        let f = FieldCtx::new(7, 2).unwrap();
        let x = f.generator_x();
        assert_eq!(f.mul(&x, &x), f.from_i64(-1));
        assert_eq!(f.inv(&f.one()), Some(f.one()));
        assert_eq!(f.inv(&f.zero()), None);
    }

    #[test]
    fn enumeration_and_character_counts() {
        let f = FieldCtx::new(7, 2).unwrap();
        let all: Vec<_> = f.enumerate().collect();
        assert_eq!(all.len(), 49);
        assert!(f.is_zero(&all[0]));
        let squares = all.iter().filter(|e| f.quadratic_character(e) == 1).count();
        assert_eq!(squares, 24);
        let p7 = FieldCtx::new(7, 1).unwrap();
        assert_eq!(p7.quadratic_character(&p7.from_i64(3)), -1);
        assert_eq!(p7.quadratic_character(&p7.zero()), 0);
    }

    #[test]
    fn rejects_even_characteristic_and_reducible_moduli() {
        assert_eq!(FieldCtx::new(2, 3), Err(GfError::BadCharacteristic(2)));
        assert_eq!(FieldCtx::with_modulus(7, vec![6, 0, 1]), Err(GfError::Reducible(7)));
    }
}
