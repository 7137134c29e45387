//! Frobenius characteristic polynomial on the transcendental part of H²
//! from point counts, and the resulting Picard number bound.
//!
//! With λ_i the normalized Frobenius eigenvalues on the quotient, the power
//! sums are s_n = N_n/pⁿ − pⁿ − p⁻ⁿ − t_n, where t_n is the trace on the
//! algebraic part. Newton's identities give the elementary symmetric
//! functions e_1..e_r, the functional equation supplies the rest, and
//! f(t) = Σ (−1)^k e_k t^{D−k}.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{cyclotomic_table, totient, IntPoly};

/// Counts of the reference surface over F_{7^n}, n = 1..7.
pub const PUBLISHED_COUNTS_P7: [u64; 7] = [43, 2843, 113191, 5786411, 282458443, 13843757831, 678222249307];

/// Dimension of H² of a K3 surface.
pub const K3_B2: usize = 22;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZetaError {
    #[error("algebraic part has a root other than ±1")]
    NotPlusMinusOne,
    #[error("need at least {needed} counts, got {got}")]
    TooFewCounts { needed: usize, got: usize },
    #[error("{got} power sums exceed the degree {degree}")]
    TooManySums { got: usize, degree: usize },
    #[error("only even degrees are supported, got {0}")]
    OddDegree(usize),
    #[error("need e_1..e_{needed}, got {got}")]
    TooFewCoefficients { needed: usize, got: usize },
    #[error("middle coefficient vanishes, so the functional-equation sign is undetermined")]
    SignAmbiguous { plus: Box<CharPoly>, minus: Box<CharPoly> },
    #[error("coefficient e_{index} = {value} is not an integer")]
    NonIntegral { index: usize, value: BigRational },
    #[error("malformed counts record: {0}")]
    BadRecord(String),
}

/// An integer polynomial with all roots ±1, stored by multiplicities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraicPart {
    pub plus_one: u32,
    pub minus_one: u32,
}

impl AlgebraicPart {
    /// (t−1)³(t+1)⁵, the class of the eight explicit curves.
    pub const REFERENCE: AlgebraicPart = AlgebraicPart { plus_one: 3, minus_one: 5 };

    pub fn from_poly(poly: &IntPoly) -> Result<Self, ZetaError> {
        let (plus_one, rest) = poly.root_multiplicity(1);
        let (minus_one, rest) = rest.root_multiplicity(-1);
        if rest.degree() != Some(0) || !rest.coeffs()[0].abs().is_one() {
            return Err(ZetaError::NotPlusMinusOne);
        }
        Ok(AlgebraicPart { plus_one, minus_one })
    }

    pub fn degree(&self) -> usize {
        (self.plus_one + self.minus_one) as usize
    }

    pub fn to_poly(&self) -> IntPoly {
        IntPoly::linear_root(1).pow(self.plus_one).mul(&IntPoly::linear_root(-1).pow(self.minus_one))
    }
}

/// Trace of Frobenius^n on the algebraic part, for n = 1..=r.
pub fn algebraic_traces(alg: &AlgebraicPart, r: usize) -> Vec<i64> {
    (1..=r)
        .map(|n| alg.plus_one as i64 + if n % 2 == 0 { 1 } else { -1 } * alg.minus_one as i64)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceData {
    pub p: u64,
    #[serde(with = "crate::serde_big::bigint_vec")]
    pub counts: Vec<BigInt>,
    pub algebraic: AlgebraicPart,
}

impl TraceData {
    pub fn new(p: u64, counts: Vec<BigInt>, algebraic: AlgebraicPart) -> Result<Self, ZetaError> {
        let data = TraceData { p, counts, algebraic };
        let needed = data.quotient_degree().div_ceil(2);
        if data.counts.len() < needed {
            return Err(ZetaError::TooFewCounts { needed, got: data.counts.len() });
        }
        Ok(data)
    }

    /// The seven published counts with the reference algebraic part.
    pub fn published() -> Self {
        let counts = PUBLISHED_COUNTS_P7.iter().map(|&c| BigInt::from(c)).collect();
        TraceData::new(7, counts, AlgebraicPart::REFERENCE).expect("seven counts suffice")
    }

    pub fn quotient_degree(&self) -> usize {
        K3_B2 - self.algebraic.degree()
    }

    /// Parse either a JSON record `{"p": "7", "counts": ["43", ...]}` or CSV
    /// lines `n,N_n` (an optional header and `#` comments are skipped).
    pub fn parse_counts(text: &str) -> Result<(Option<u64>, Vec<BigInt>), ZetaError> {
        let trimmed = text.trim_start();
        if trimmed.starts_with('{') {
            let v: serde_json::Value = serde_json::from_str(trimmed).map_err(|e| ZetaError::BadRecord(e.to_string()))?;
            let p = match v.get("p") {
                None => None,
                Some(x) => Some(json_u64(x).ok_or_else(|| ZetaError::BadRecord("bad p".into()))?),
            };
            let counts = v
                .get("counts")
                .and_then(|c| c.as_array())
                .ok_or_else(|| ZetaError::BadRecord("missing counts array".into()))?
                .iter()
                .map(|x| json_bigint(x).ok_or_else(|| ZetaError::BadRecord(format!("bad count {x}"))))
                .collect::<Result<_, _>>()?;
            return Ok((p, counts));
        }
        let mut rows: Vec<(usize, BigInt)> = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let fields: Vec<_> = line.split(',').map(str::trim).collect();
            let parsed = match fields.as_slice() {
                [n, count] => n.parse::<usize>().ok().zip(count.parse::<BigInt>().ok()),
                [count] => count.parse::<BigInt>().ok().map(|c| (rows.len() + 1, c)),
                _ => None,
            };
            match parsed {
                Some(row) => rows.push(row),
                None if rows.is_empty() => continue, // header
                None => return Err(ZetaError::BadRecord(format!("bad line {line:?}"))),
            }
        }
        rows.sort_by_key(|r| r.0);
        if rows.iter().enumerate().any(|(i, r)| r.0 != i + 1) {
            return Err(ZetaError::BadRecord("counts must cover n = 1, 2, ... without gaps".into()));
        }
        Ok((None, rows.into_iter().map(|r| r.1).collect()))
    }
}

fn json_bigint(v: &serde_json::Value) -> Option<BigInt> {
    match v {
        serde_json::Value::String(s) => s.parse().ok(),
        serde_json::Value::Number(n) => n.as_i64().map(BigInt::from),
        _ => None,
    }
}

fn json_u64(v: &serde_json::Value) -> Option<u64> {
    json_bigint(v).and_then(|b| b.to_u64())
}

/// s_n = N_n/pⁿ − pⁿ − p⁻ⁿ − t_n.
pub fn quotient_traces(data: &TraceData) -> Vec<BigRational> {
    let t = algebraic_traces(&data.algebraic, data.counts.len());
    let p = BigInt::from(data.p);
    data.counts
        .iter()
        .zip(t)
        .enumerate()
        .map(|(i, (count, tn))| {
            let pn = p.pow(i as u32 + 1);
            BigRational::new(count.clone(), pn.clone())
                - BigRational::from_integer(pn.clone())
                - BigRational::new(BigInt::one(), pn)
                - BigRational::from_integer(tn.into())
        })
        .collect()
}

/// e_1..e_m from power sums s_1..s_m by Newton's identities.
pub fn newton_partial_charpoly(s: &[BigRational], degree: usize) -> Result<Vec<BigRational>, ZetaError> {
    if s.len() > degree {
        return Err(ZetaError::TooManySums { got: s.len(), degree });
    }
    let mut e = vec![BigRational::one()];
    for k in 1..=s.len() {
        let mut acc = BigRational::zero();
        for i in 1..=k {
            let term = &e[k - i] * &s[i - 1];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        e.push(acc / BigRational::from_integer(k.into()));
    }
    e.remove(0);
    Ok(e)
}

/// Characteristic polynomial with its functional-equation sign.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharPoly {
    pub poly: IntPoly,
    pub sign: i8,
}

impl CharPoly {
    pub fn degree(&self) -> usize {
        self.poly.degree().unwrap_or(0)
    }

    /// e_k, read off from the coefficient of t^{D−k}.
    pub fn elementary(&self, k: usize) -> BigInt {
        let d = self.degree();
        let c = self.poly.coeffs()[d - k].clone();
        if k.is_multiple_of(2) {
            c
        } else {
            -c
        }
    }
}

fn assemble(e: &[BigInt], degree: usize) -> IntPoly {
    // e[0] = 1 and e[k] multiplies (−1)^k t^{D−k}.
    let mut coeffs = vec![BigInt::zero(); degree + 1];
    for (k, ek) in e.iter().enumerate() {
        coeffs[degree - k] = if k % 2 == 0 { ek.clone() } else { -ek.clone() };
    }
    IntPoly::new(coeffs)
}

/// Complete e_1..e_{D/2} to the full polynomial via e_{D−k} = ±e_k.
pub fn complete_functional_equation(partial: &[BigRational], degree: usize) -> Result<CharPoly, ZetaError> {
    if degree % 2 == 1 {
        return Err(ZetaError::OddDegree(degree));
    }
    let half = degree / 2;
    if partial.len() < half {
        return Err(ZetaError::TooFewCoefficients { needed: half, got: partial.len() });
    }
    let mut e = vec![BigInt::one()];
    for (i, v) in partial.iter().take(half).enumerate() {
        if !v.is_integer() {
            return Err(ZetaError::NonIntegral { index: i + 1, value: v.clone() });
        }
        e.push(v.to_integer());
    }
    let complete = |sign: i8| {
        let mut full = e.clone();
        for k in (0..half).rev() {
            full.push(if sign > 0 { e[k].clone() } else { -e[k].clone() });
        }
        CharPoly { poly: assemble(&full, degree), sign }
    };
    if e[half].is_zero() {
        return Err(ZetaError::SignAmbiguous { plus: Box::new(complete(1)), minus: Box::new(complete(-1)) });
    }
    Ok(complete(1))
}

/// Total multiplicity of roots of unity among the roots of `f`.
pub fn count_unit_roots(f: &IntPoly) -> u32 {
    let d = f.degree().unwrap_or(0) as u64;
    if d == 0 {
        return 0;
    }
    // φ(m) ≥ √(m/2), so no m beyond 3d² has φ(m) ≤ d.
    let bound = 3 * d * d;
    let candidates: Vec<u64> = (1..=bound).filter(|&m| totient(m) <= d).collect();
    debug_assert!(((bound + 1)..=(bound + 200)).all(|m| totient(m) > d));
    let table = cyclotomic_table(*candidates.last().unwrap_or(&1));
    let mut rest = f.clone();
    let mut count = 0;
    for m in candidates {
        let phi = &table[m as usize];
        while let Some(q) = rest.div_exact_monic(phi) {
            rest = q;
            count += totient(m) as u32;
        }
    }
    count
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PicardBound {
    pub charpoly: CharPoly,
    pub unit_roots: u32,
    pub algebraic_degree: usize,
    pub bound: usize,
}

/// The full pipeline: traces, Newton, functional equation, cyclotomic test.
pub fn picard_bound(data: &TraceData) -> Result<PicardBound, ZetaError> {
    let degree = data.quotient_degree();
    let s = quotient_traces(data);
    let take = s.len().min(degree);
    let e = newton_partial_charpoly(&s[..take], degree)?;
    let charpoly = complete_functional_equation(&e, degree)?;
    let unit_roots = count_unit_roots(&charpoly.poly);
    Ok(PicardBound {
        algebraic_degree: data.algebraic.degree(),
        bound: data.algebraic.degree() + unit_roots as usize,
        unit_roots,
        charpoly,
    })
}

pub fn picard_upper_bound(data: &TraceData) -> Result<usize, ZetaError> {
    picard_bound(data).map(|b| b.bound)
}
