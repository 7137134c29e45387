//! Intersection lattices spanned by explicit curve classes: the two
//! candidate bases S and S′ of the Picard lattice, their Gram matrices,
//! and the search for classes ½v that could enlarge a sublattice.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::perfect_square;
use crate::matrix::{IntMatrix, RatMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("Gram matrix is not symmetric")]
    NotSymmetric,
    #[error("K3 lattice must have even diagonal (entry {0} is odd)")]
    OddDiagonal(usize),
    #[error("superlattice determinant is zero")]
    ZeroDeterminant,
    #[error("determinant ratio {0} is not the square of a rational")]
    NonSquareRatio(BigRational),
    #[error("rank {0} is too large for the 2^r half-class scan")]
    RankTooLarge(usize),
    #[error("matrix text: {0}")]
    Parse(String),
}

/// Names of the S basis, in Gram-matrix order.
pub const S_NAMES: [&str; 8] = ["D1", "D2", "D3", "C1++", "C1-+", "C2++", "C2-+", "C3++"];
pub const SPRIME_NAMES: [&str; 8] = ["D1", "D2", "D3", "C1++", "S1", "C2++", "S2", "C3++"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GramLattice {
    pub names: Vec<String>,
    pub gram: IntMatrix,
}

impl GramLattice {
    pub fn new(names: Vec<String>, gram: IntMatrix, k3: bool) -> Result<Self, LatticeError> {
        if !gram.is_symmetric() {
            return Err(LatticeError::NotSymmetric);
        }
        if k3 {
            if let Some(i) = (0..gram.rows()).find(|&i| gram[(i, i)].is_odd()) {
                return Err(LatticeError::OddDiagonal(i));
            }
        }
        Ok(GramLattice { names, gram })
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn det(&self) -> BigInt {
        self.gram.det_bareiss()
    }

    /// Whitespace- or comma-separated integer rows; `#` starts a comment and
    /// an optional `names:` line labels the basis.
    pub fn parse(text: &str, k3: bool) -> Result<Self, LatticeError> {
        let mut names = None;
        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("names:") {
                names = Some(rest.split_whitespace().map(String::from).collect::<Vec<_>>());
                continue;
            }
            let row = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<BigInt>().map_err(|e| LatticeError::Parse(format!("{s:?}: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(LatticeError::Parse("matrix must be square".into()));
        }
        let names = names.unwrap_or_else(|| (1..=n).map(|i| format!("e{i}")).collect());
        if names.len() != n {
            return Err(LatticeError::Parse("names line does not match the rank".into()));
        }
        Self::new(names, IntMatrix::from_rows(&rows), k3)
    }
}

fn e(i: usize) -> Vec<i64> {
    let mut v = vec![0; 8];
    v[i] = 1;
    v
}

fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// A fiber component C_i^{ab}: axis i ∈ {1,2,3}, a = sign of the ±6
/// coordinate, b = sign of the square root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CurveLabel {
    pub axis: usize,
    pub a: i8,
    pub b: i8,
}

/// Coordinates of D_i (i = 1..3) in the S basis.
pub fn fiber_class(i: usize) -> Vec<i64> {
    e(i - 1)
}

/// Coordinates of C_i^{ab} in the S basis, using D_i = C_i^{a+} + C_i^{a−}
/// and the relation D1+D2+D3 = C1++ + C1−+ + C2++ + C2−+ + C3++ + C3−+.
pub fn curve_class(c: CurveLabel) -> Vec<i64> {
    let plus = |axis: usize, a: i8| -> Vec<i64> {
        match (axis, a) {
            (1, 1) => e(3),
            (1, _) => e(4),
            (2, 1) => e(5),
            (2, _) => e(6),
            (3, 1) => e(7),
            _ => {
                let d = add(&add(&e(0), &e(1)), &e(2));
                [3, 4, 5, 6, 7].iter().fold(d, |acc, &i| sub(&acc, &e(i)))
            }
        }
    };
    let pos = plus(c.axis, c.a);
    if c.b > 0 {
        pos
    } else {
        sub(&fiber_class(c.axis), &pos)
    }
}

pub fn builtin_gram_s() -> GramLattice {
    let g = IntMatrix::from_i64(&[
        &[0, 2, 2, 0, 0, 1, 1, 1],
        &[2, 0, 2, 1, 1, 0, 0, 1],
        &[2, 2, 0, 1, 1, 1, 1, 0],
        &[0, 1, 1, -2, 0, 1, 1, 1],
        &[0, 1, 1, 0, -2, 1, 1, 1],
        &[1, 0, 1, 1, 1, -2, 0, 1],
        &[1, 0, 1, 1, 1, 0, -2, 1],
        &[1, 1, 0, 1, 1, 1, 1, -2],
    ]);
    GramLattice::new(S_NAMES.iter().map(|s| s.to_string()).collect(), g, true).expect("builtin Gram matrix is valid")
}

/// Columns are the S′ basis vectors in S coordinates:
/// S1 = ½(D1+D2+D3+C1++ + C1−+), S2 = ½(D1+D2+D3+C2++ + C2−+).
pub fn sprime_basis_in_s() -> RatMatrix {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut cols: Vec<Vec<BigRational>> = (0..8).map(|i| e(i).iter().map(|&x| BigRational::from_integer(x.into())).collect()).collect();
    for (slot, members) in [(4usize, [0usize, 1, 2, 3, 4]), (6, [0, 1, 2, 5, 6])] {
        let mut v = vec![BigRational::zero(); 8];
        for m in members {
            v[m] = half.clone();
        }
        cols[slot] = v;
    }
    let data = (0..8).flat_map(|i| cols.iter().map(move |c| c[i].clone())).collect();
    RatMatrix { rows: 8, cols: 8, data }
}

pub fn builtin_gram_sprime() -> GramLattice {
    let b = sprime_basis_in_s();
    let g = RatMatrix::from_int(&builtin_gram_s().gram);
    let gp = b.transpose().mul(&g).mul(&b).to_int().expect("S′ pairings are integral");
    GramLattice::new(SPRIME_NAMES.iter().map(|s| s.to_string()).collect(), gp, true).expect("S′ Gram matrix is valid")
}

/// Positive square root of det_sub / det_super.
pub fn sublattice_index(det_sub: &BigInt, det_super: &BigInt) -> Result<BigInt, LatticeError> {
    if det_super.is_zero() {
        return Err(LatticeError::ZeroDeterminant);
    }
    let ratio = BigRational::new(det_sub.clone(), det_super.clone());
    if ratio.is_negative() {
        return Err(LatticeError::NonSquareRatio(ratio));
    }
    match (perfect_square(ratio.numer()), perfect_square(ratio.denom())) {
        (Some(n), Some(d)) if d.is_one() => Ok(n),
        _ => Err(LatticeError::NonSquareRatio(ratio)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HalfClassVerdict {
    /// ½v pairs integrally with the basis and has even square: not excluded
    /// by lattice arithmetic alone.
    Admissible,
    /// (½v)² is an odd integer, impossible in an even lattice.
    ExcludedOddSelfIntersection,
    /// (½v)² is not even an integer.
    ExcludedNonIntegralSelfIntersection,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HalfClassReport {
    /// Entries in {0,1}; the candidate class is ½ Σ v_i e_i.
    pub vector: Vec<u8>,
    pub integral_pairing: bool,
    /// (vᵀ G v) / 4
    #[serde(with = "crate::serde_big::rational")]
    pub self_intersection: BigRational,
    pub verdict: HalfClassVerdict,
}

fn half_class_verdict(gram: &IntMatrix, v: &[BigInt]) -> (bool, BigRational, HalfClassVerdict) {
    let two = BigInt::from(2);
    let integral = gram.mul_vec(v).iter().all(|x| x.is_multiple_of(&two));
    let sq = BigRational::new(gram.pair(v, v), BigInt::from(4));
    let verdict = if !sq.is_integer() {
        HalfClassVerdict::ExcludedNonIntegralSelfIntersection
    } else if sq.to_integer().is_odd() {
        HalfClassVerdict::ExcludedOddSelfIntersection
    } else {
        HalfClassVerdict::Admissible
    };
    (integral, sq, verdict)
}

fn bits_to_vec(bits: u32, r: usize) -> Vec<BigInt> {
    (0..r).map(|i| BigInt::from((bits >> i) & 1)).collect()
}

/// All nonzero v ∈ {0,1}^r for which ½v pairs integrally with every basis
/// vector, each tagged with the parity of its self-intersection.
pub fn half_class_scan(lattice: &GramLattice) -> Result<Vec<HalfClassReport>, LatticeError> {
    let r = lattice.rank();
    if r > 20 {
        return Err(LatticeError::RankTooLarge(r));
    }
    let mut out = Vec::new();
    for bits in 1u32..(1 << r) {
        let v = bits_to_vec(bits, r);
        let (integral, sq, verdict) = half_class_verdict(&lattice.gram, &v);
        if integral {
            out.push(HalfClassReport {
                vector: (0..r).map(|i| ((bits >> i) & 1) as u8).collect(),
                integral_pairing: true,
                self_intersection: sq,
                verdict,
            });
        }
    }
    Ok(out)
}

/// Integer matrices (acting on column coordinate vectors) of the Galois
/// involution and of generators of the 24-element symmetry group, in the S
/// basis. The Galois involution swaps the two square roots, τ = (−1,−1,1)
/// flips the first sign on axes 1 and 2, and π12, π23 swap axes.
pub fn s_basis_symmetries() -> Vec<(&'static str, IntMatrix)> {
    type LabelMap = fn(CurveLabel) -> CurveLabel;
    let galois: LabelMap = |c| CurveLabel { b: -c.b, ..c };
    let tau: LabelMap = |c| CurveLabel { a: if c.axis == 3 { c.a } else { -c.a }, ..c };
    let swap12: LabelMap = |c| CurveLabel { axis: [0, 2, 1, 3][c.axis], ..c };
    let swap23: LabelMap = |c| CurveLabel { axis: [0, 1, 3, 2][c.axis], ..c };
    let axis_perm = |f: LabelMap, i: usize| f(CurveLabel { axis: i, a: 1, b: 1 }).axis;
    let basis_curves = [(1, 1), (1, -1), (2, 1), (2, -1), (3, 1)];
    let build = |f: LabelMap| {
        let mut cols: Vec<Vec<BigInt>> = (1..=3).map(|i| to_big(&fiber_class(axis_perm(f, i)))).collect();
        for (axis, a) in basis_curves {
            cols.push(to_big(&curve_class(f(CurveLabel { axis, a, b: 1 }))));
        }
        IntMatrix::from_columns(&cols)
    };
    vec![("galois", build(galois)), ("tau", build(tau)), ("swap12", build(swap12)), ("swap23", build(swap23))]
}

fn to_big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Express integer actions given in S coordinates in another basis whose
/// vectors (columns of `basis`) are given in S coordinates.
pub fn change_basis(action: &IntMatrix, basis: &RatMatrix) -> Option<IntMatrix> {
    let inv = basis.inverse()?;
    inv.mul(&RatMatrix::from_int(action)).mul(basis).to_int()
}

/// Symmetry generators in the S′ basis.
pub fn sprime_basis_symmetries() -> Vec<(&'static str, IntMatrix)> {
    let b = sprime_basis_in_s();
    s_basis_symmetries()
        .into_iter()
        .map(|(n, m)| (n, change_basis(&m, &b).expect("S′ is stable under every symmetry")))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosureReport {
    pub candidate: Vec<u8>,
    /// Dimension over F₂ of the span of the candidate's orbit.
    pub orbit_span_dim: usize,
    /// A member of the span that fails the lattice test, if any.
    pub witness: Option<Vec<u8>>,
    pub excluded: bool,
}

fn reduce_mod2(v: &[BigInt]) -> u32 {
    v.iter().enumerate().fold(0, |acc, (i, x)| acc | ((x.is_odd() as u32) << i))
}

/// Second-stage filter. If ½v is a class then so is ½g(v) for every
/// symmetry g, and so is every sum of such classes. The candidate is
/// excluded as soon as some element of that F₂-span is not admissible for
/// the first-stage test.
pub fn closure_filter(lattice: &GramLattice, generators: &[IntMatrix], candidates: &[HalfClassReport]) -> Vec<ClosureReport> {
    let r = lattice.rank();
    candidates
        .iter()
        .map(|cand| {
            let start: u32 = cand.vector.iter().enumerate().fold(0, |acc, (i, &b)| acc | ((b as u32) << i));
            let mut orbit = vec![start];
            let mut k = 0;
            while k < orbit.len() {
                let v = bits_to_vec(orbit[k], r);
                for g in generators {
                    let w = reduce_mod2(&g.mul_vec(&v));
                    if !orbit.contains(&w) {
                        orbit.push(w);
                    }
                }
                k += 1;
            }
            let basis = f2_basis(&orbit);
            let span = f2_span(&basis);
            let witness = span.into_iter().filter(|&w| w != 0).find(|&w| {
                let (integral, _, verdict) = half_class_verdict(&lattice.gram, &bits_to_vec(w, r));
                !integral || verdict != HalfClassVerdict::Admissible
            });
            ClosureReport {
                candidate: cand.vector.clone(),
                orbit_span_dim: basis.len(),
                witness: witness.map(|w| (0..r).map(|i| ((w >> i) & 1) as u8).collect()),
                excluded: witness.is_some(),
            }
        })
        .collect()
}

fn f2_basis(vs: &[u32]) -> Vec<u32> {
    let mut basis: Vec<u32> = Vec::new();
    for &v in vs {
        let mut x = v;
        for &b in &basis {
            x = x.min(x ^ b);
        }
        if x != 0 {
            basis.push(x);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis
}

fn f2_span(basis: &[u32]) -> Vec<u32> {
    (0u32..(1 << basis.len()))
        .map(|mask| basis.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).fold(0, |acc, (_, &b)| acc ^ b))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_determinants() {
        let s = builtin_gram_s();
        assert_eq!(s.det(), BigInt::from(-192));
        assert_eq!(s.gram.det_cofactor(), BigInt::from(-192));
        assert_eq!(builtin_gram_sprime().det(), BigInt::from(-12));
        assert_eq!(s.gram[(0, 1)], BigInt::from(2));
    }

    #[test]
    fn index_examples() {
        let i = |a: i64, b: i64| sublattice_index(&a.into(), &b.into());
        assert_eq!(i(-192, -12).unwrap(), BigInt::from(4));
        assert_eq!(i(-12, -12).unwrap(), BigInt::one());
        assert_eq!(i(-192, -3).unwrap(), BigInt::from(8));
        assert!(i(-192, -6).is_err());
    }

    #[test]
    fn identity_lattice_has_no_half_classes() {
        let l = GramLattice::new(vec!["a".into(), "b".into(), "c".into()], IntMatrix::identity(3), false).unwrap();
        assert!(half_class_scan(&l).unwrap().is_empty());
    }

    #[test]
    fn symmetries_preserve_the_form() {
        let g = builtin_gram_s().gram;
        for (name, m) in s_basis_symmetries() {
            assert_eq!(m.transpose().mul(&g).mul(&m), g, "{name}");
            assert_eq!(m.mul(&m), IntMatrix::identity(8), "{name}");
        }
    }
}
