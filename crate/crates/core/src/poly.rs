//! Dense integer polynomials, low degree first, with exact division.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct IntPoly {
    #[serde(with = "crate::serde_big::bigint_vec")]
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn one() -> Self {
        Self::from_i64(&[1])
    }

    /// t - r
    pub fn linear_root(r: i64) -> Self {
        Self::from_i64(&[-r, 1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::new(Vec::new());
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    pub fn pow(&self, e: u32) -> IntPoly {
        (0..e).fold(IntPoly::one(), |acc, _| acc.mul(self))
    }

    /// Quotient by a monic divisor if the division is exact.
    pub fn div_exact_monic(&self, divisor: &IntPoly) -> Option<IntPoly> {
        let dd = divisor.degree()?;
        debug_assert!(divisor.coeffs[dd].is_one());
        let Some(dn) = self.degree() else {
            return Some(self.clone());
        };
        if dn < dd {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); dn - dd + 1];
        for i in (0..=dn - dd).rev() {
            let c = rem[i + dd].clone();
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= &c * dc;
            }
            quot[i] = c;
        }
        rem.iter().all(Zero::is_zero).then(|| IntPoly::new(quot))
    }

    pub fn eval(&self, t: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * t + c)
    }

    pub fn eval_rational(&self, t: &num_rational::BigRational) -> num_rational::BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(num_rational::BigRational::zero(), |acc, c| acc * t + num_rational::BigRational::from_integer(c.clone()))
    }

    pub fn is_palindromic(&self) -> bool {
        self.coeffs.iter().eq(self.coeffs.iter().rev())
    }

    /// Multiplicity of the root `r`, dividing out (t - r) repeatedly.
    pub fn root_multiplicity(&self, r: i64) -> (u32, IntPoly) {
        let mut cur = self.clone();
        let mut mult = 0;
        while !cur.is_zero() {
            match cur.div_exact_monic(&IntPoly::linear_root(r)) {
                Some(q) => {
                    cur = q;
                    mult += 1;
                }
                None => break,
            }
        }
        (mult, cur)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let show_coeff = !mag.is_one() || i == 0;
            match (show_coeff, i) {
                (true, 0) => write!(f, "{mag}")?,
                (true, 1) => write!(f, "{mag}t")?,
                (true, _) => write!(f, "{mag}t^{i}")?,
                (false, 1) => write!(f, "t")?,
                (false, _) => write!(f, "t^{i}")?,
            }
        }
        Ok(())
    }
}

/// Euler's totient.
pub fn totient(mut m: u64) -> u64 {
    let mut out = m;
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            while m.is_multiple_of(d) {
                m /= d;
            }
            out -= out / d;
        }
        d += 1;
    }
    if m > 1 {
        out -= out / m;
    }
    out
}

/// Cyclotomic polynomials Φ_1..Φ_max, built by dividing t^m - 1 by Φ_d for
/// the proper divisors d of m.
pub fn cyclotomic_table(max: u64) -> Vec<IntPoly> {
    let mut table: Vec<IntPoly> = vec![IntPoly::one()];
    for m in 1..=max {
        let mut coeffs = vec![BigInt::zero(); m as usize + 1];
        coeffs[0] = -BigInt::one();
        coeffs[m as usize] = BigInt::one();
        let mut p = IntPoly::new(coeffs);
        for d in 1..m {
            if m % d == 0 {
                p = p.div_exact_monic(&table[d as usize]).expect("Φ_d divides t^m - 1");
            }
        }
        table.push(p);
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomics_have_totient_degree() {
        let t = cyclotomic_table(30);
        for m in 1..=30u64 {
            assert_eq!(t[m as usize].degree(), Some(totient(m) as usize));
        }
        assert_eq!(t[6], IntPoly::from_i64(&[1, -1, 1]));
    }

    #[test]
    fn display_and_division() {
        let p = IntPoly::linear_root(1).pow(3).mul(&IntPoly::linear_root(-1).pow(5));
        assert_eq!(p.root_multiplicity(1).0, 3);
        assert_eq!(p.root_multiplicity(-1).0, 5);
        assert_eq!(IntPoly::from_i64(&[1, -1, 0, 2]).to_string(), "2t^3 - t + 1");
    }
}
