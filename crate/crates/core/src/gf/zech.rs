//! Discrete-log representation of F_q for the counting hot loop.
//!
//! A nonzero element g^i is stored as `i`; multiplication is addition of
//! exponents and addition goes through the Zech table Z(i) = log(1 + g^i).
//! The quadratic character of g^i is the parity of `i`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::{packed_increment, FieldCtx, FieldElem, GfError};
use crate::ring::{Field, Ring};

/// Largest field order accepted in table mode (three u32 tables of this size).
pub const ZECH_MAX_ORDER: u64 = 1 << 27;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ZechElem(u32);

impl ZechElem {
    pub const ZERO: ZechElem = ZechElem(u32::MAX);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == u32::MAX
    }

    pub fn log(self) -> Option<u32> {
        (!self.is_zero()).then_some(self.0)
    }
}

#[derive(Debug, Clone)]
pub struct ZechField {
    ctx: FieldCtx,
    /// q - 1
    order: u32,
    /// log of -1, i.e. (q-1)/2
    half: u32,
    zech: Vec<u32>,
    log_of_packed: Vec<u32>,
    packed_of_log: Vec<u32>,
}

impl ZechField {
    pub fn new(ctx: FieldCtx) -> Result<Self, GfError> {
        let q = ctx.order().filter(|&q| q <= ZECH_MAX_ORDER).ok_or_else(|| {
            GfError::TooLargeForTables(ctx.q().to_u64().unwrap_or(u64::MAX))
        })?;
        let p = ctx.p();
        let order = (q - 1) as u32;
        let g = ctx.primitive_element();
        let mut log_of_packed = vec![u32::MAX; q as usize];
        let mut packed_of_log = vec![0u32; order as usize];
        let mut cur: FieldElem = ctx.one();
        for i in 0..order {
            let idx = ctx.packed_index(&cur) as u32;
            packed_of_log[i as usize] = idx;
            log_of_packed[idx as usize] = i;
            cur = ctx.mul(&cur, &g);
        }
        let zech = packed_of_log
            .iter()
            .map(|&idx| log_of_packed[packed_increment(idx as u64, p) as usize])
            .collect();
        Ok(ZechField { ctx, order, half: order / 2, zech, log_of_packed, packed_of_log })
    }

    pub fn for_prime_power(p: u64, n: usize) -> Result<Self, GfError> {
        Self::new(FieldCtx::new(p, n)?)
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn q(&self) -> u64 {
        self.order as u64 + 1
    }

    /// g^i for the table's generator g.
    #[inline]
    pub fn from_log(&self, i: u32) -> ZechElem {
        ZechElem(i % self.order)
    }

    pub fn from_field_elem(&self, a: &FieldElem) -> ZechElem {
        ZechElem(self.log_of_packed[self.ctx.packed_index(a) as usize])
    }

    pub fn to_field_elem(&self, a: ZechElem) -> FieldElem {
        match a.log() {
            None => self.ctx.zero(),
            Some(i) => self.ctx.from_packed_index(self.packed_of_log[i as usize] as u64),
        }
    }

    #[inline]
    fn wrap(&self, s: u32) -> u32 {
        if s >= self.order {
            s - self.order
        } else {
            s
        }
    }

    #[inline]
    pub fn mul(&self, a: ZechElem, b: ZechElem) -> ZechElem {
        if a.is_zero() || b.is_zero() {
            ZechElem::ZERO
        } else {
            ZechElem(self.wrap(a.0 + b.0))
        }
    }

    #[inline]
    pub fn add(&self, a: ZechElem, b: ZechElem) -> ZechElem {
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        let d = if b.0 >= a.0 { b.0 - a.0 } else { b.0 + self.order - a.0 };
        let z = self.zech[d as usize];
        if z == u32::MAX {
            ZechElem::ZERO
        } else {
            ZechElem(self.wrap(a.0 + z))
        }
    }

    #[inline]
    pub fn neg(&self, a: ZechElem) -> ZechElem {
        if a.is_zero() {
            a
        } else {
            ZechElem(self.wrap(a.0 + self.half))
        }
    }

    #[inline]
    pub fn chi(&self, a: ZechElem) -> i8 {
        if a.is_zero() {
            0
        } else if a.0 & 1 == 0 {
            1
        } else {
            -1
        }
    }

    #[inline]
    pub fn square(&self, a: ZechElem) -> ZechElem {
        if a.is_zero() {
            a
        } else {
            ZechElem(((a.0 as u64 * 2) % self.order as u64) as u32)
        }
    }

    pub fn from_int(&self, v: &BigInt) -> ZechElem {
        let r = v.mod_floor(&BigInt::from(self.ctx.p())).to_u64().expect("residue");
        ZechElem(self.log_of_packed[r as usize])
    }
}

impl Ring for ZechField {
    type Elem = ZechElem;
    fn zero(&self) -> ZechElem {
        ZechElem::ZERO
    }
    fn one(&self) -> ZechElem {
        ZechElem(0)
    }
    fn from_bigint(&self, v: &BigInt) -> ZechElem {
        self.from_int(v)
    }
    fn add(&self, a: &ZechElem, b: &ZechElem) -> ZechElem {
        ZechField::add(self, *a, *b)
    }
    fn mul(&self, a: &ZechElem, b: &ZechElem) -> ZechElem {
        ZechField::mul(self, *a, *b)
    }
    fn neg(&self, a: &ZechElem) -> ZechElem {
        ZechField::neg(self, *a)
    }
    fn is_zero(&self, a: &ZechElem) -> bool {
        a.is_zero()
    }
}

impl Field for ZechField {
    fn inv(&self, a: &ZechElem) -> Option<ZechElem> {
        a.log().map(|i| ZechElem(if i == 0 { 0 } else { self.order - i }))
    }
    fn quadratic_character(&self, a: &ZechElem) -> i8 {
        self.chi(*a)
    }
    fn order(&self) -> Option<u64> {
        Some(self.q())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_arithmetic_matches_polynomial_arithmetic() {
        for (p, n) in [(3, 1), (7, 1), (7, 2), (5, 3), (3, 4)] {
            let z = ZechField::for_prime_power(p, n).unwrap();
            let f = z.ctx().clone();
            let all: Vec<_> = f.enumerate().collect();
            for a in &all {
                let za = z.from_field_elem(a);
                assert_eq!(z.to_field_elem(za), *a);
                assert_eq!(z.chi(za), f.quadratic_character(a));
                assert_eq!(z.chi(za), f.chi_by_power(a));
                for b in all.iter().step_by(3) {
                    let zb = z.from_field_elem(b);
                    assert_eq!(z.to_field_elem(z.add(za, zb)), f.add(a, b));
                    assert_eq!(z.to_field_elem(z.mul(za, zb)), f.mul(a, b));
                }
                assert_eq!(z.to_field_elem(z.neg(za)), f.neg(a));
            }
        }
    }

    #[test]
    fn rejects_oversized_tables() {
        let ctx = FieldCtx::new(7, 10).unwrap();
        assert!(matches!(ZechField::new(ctx), Err(GfError::TooLargeForTables(_))));
    }
}
