//! Tate cohomology Ĥ⁻¹(ℤ/2, L) = Ker(1+σ)/Im(1−σ) for a lattice with an
//! integral involution, plus the involutions coming from complex conjugation
//! of √(−km) on the Picard lattices.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::lattice::{s_basis_symmetries, sprime_basis_symmetries};
use crate::matrix::{IntMatrix, RatMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum H1Error {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix does not square to the identity")]
    NotInvolution,
    #[error("sublattice is not saturated: quotient has torsion {0:?}")]
    TorsionQuotient(Vec<BigInt>),
    #[error("sublattice is not stable under the involution")]
    NotStable,
    #[error("sublattice generators have {got} rows, lattice has rank {rank}")]
    RankMismatch { got: usize, rank: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvolutionModule {
    sigma: IntMatrix,
}

impl InvolutionModule {
    pub fn new(sigma: IntMatrix) -> Result<Self, H1Error> {
        if !sigma.is_square() {
            return Err(H1Error::NotSquare { rows: sigma.rows(), cols: sigma.cols() });
        }
        if sigma.mul(&sigma) != IntMatrix::identity(sigma.rows()) {
            return Err(H1Error::NotInvolution);
        }
        Ok(InvolutionModule { sigma })
    }

    pub fn rank(&self) -> usize {
        self.sigma.rows()
    }

    pub fn sigma(&self) -> &IntMatrix {
        &self.sigma
    }

    /// The same involution after the change of basis x ↦ U x, i.e. U σ U⁻¹.
    pub fn conjugate(&self, u: &IntMatrix) -> Option<Self> {
        let inv = u.inverse_unimodular()?;
        Some(InvolutionModule { sigma: u.mul(&self.sigma).mul(&inv) })
    }

    /// Integer basis of Ker(1+σ), as columns.
    pub fn norm_kernel(&self) -> IntMatrix {
        let n = self.rank();
        let snf = IntMatrix::identity(n).add(&self.sigma).smith();
        let rank = snf.rank();
        IntMatrix::from_columns(&(rank..n).map(|j| snf.v.column(j)).collect::<Vec<_>>())
    }

    /// Invariant factors of Ker(1+σ)/Im(1−σ) different from 1. Every one of
    /// them is 2, since 2 = (1+σ) + (1−σ) kills the group.
    pub fn h1(&self) -> Vec<BigInt> {
        let n = self.rank();
        let id = IntMatrix::identity(n);
        let snf = id.add(&self.sigma).smith();
        let rank = snf.rank();
        let k = n - rank;
        if k == 0 {
            return Vec::new();
        }
        let v_inv = snf.v.inverse_unimodular().expect("Smith transforms are unimodular");
        let coboundaries = id.sub(&self.sigma);
        // Columns of (1−σ) written in the kernel basis V[:, rank..].
        let mut coords = IntMatrix::zeros(k, n);
        for j in 0..n {
            let y = v_inv.mul_vec(&coboundaries.column(j));
            debug_assert!(y[..rank].iter().all(Zero::is_zero));
            for i in 0..k {
                coords[(i, j)] = y[rank + i].clone();
            }
        }
        let quotient = coords.smith();
        assert_eq!(quotient.rank(), k, "Ĥ⁻¹ must be finite");
        let factors: Vec<BigInt> = quotient.invariant_factors().into_iter().filter(|d| !d.is_one()).map(|d| if d < BigInt::zero() { -d } else { d }).collect();
        assert!(factors.iter().all(|d| *d == BigInt::from(2)), "Ĥ⁻¹ is killed by 2, got {factors:?}");
        factors
    }

    /// σ acting on L / M, where M is spanned by the columns of `sub`. M must
    /// be saturated and σ-stable; the result is expressed in the basis of
    /// the complement produced by the Smith transform.
    pub fn quotient(&self, sub: &IntMatrix) -> Result<InvolutionModule, H1Error> {
        let n = self.rank();
        if sub.rows() != n {
            return Err(H1Error::RankMismatch { got: sub.rows(), rank: n });
        }
        let snf = sub.smith();
        let k = snf.rank();
        let torsion: Vec<BigInt> = snf.invariant_factors().into_iter().filter(|d| !d.is_one() && *d != -BigInt::one()).collect();
        if !torsion.is_empty() {
            return Err(H1Error::TorsionQuotient(torsion));
        }
        let u_inv = snf.u.inverse_unimodular().expect("Smith transforms are unimodular");
        let moved = snf.u.mul(&self.sigma).mul(&u_inv);
        // In the new coordinates M is the span of the first k basis vectors.
        for i in k..n {
            for j in 0..k {
                if !moved[(i, j)].is_zero() {
                    return Err(H1Error::NotStable);
                }
            }
        }
        let mut block = IntMatrix::zeros(n - k, n - k);
        for i in k..n {
            for j in k..n {
                block[(i - k, j - k)] = moved[(i, j)].clone();
            }
        }
        InvolutionModule::new(block)
    }
}

fn galois_of(gens: Vec<(&'static str, IntMatrix)>) -> InvolutionModule {
    let sigma = gens.into_iter().find(|(n, _)| *n == "galois").map(|(_, m)| m).expect("galois generator present");
    InvolutionModule::new(sigma).expect("complex conjugation is an involution")
}

/// σ on Pic W̄ in the basis S.
pub fn sigma_pic_w_case_s() -> InvolutionModule {
    galois_of(s_basis_symmetries())
}

/// σ on Pic W̄ in the basis S′.
pub fn sigma_pic_w_case_sprime() -> InvolutionModule {
    galois_of(sprime_basis_symmetries())
}

/// σ on Pic Ū = Pic W̄ / ⟨D₁, D₂, D₃⟩, derived through the lattice quotient.
pub fn sigma_pic_u() -> InvolutionModule {
    let fibers = IntMatrix::from_columns(&(0..3).map(|i| (0..8).map(|j| BigInt::from((i == j) as i64)).collect()).collect::<Vec<_>>());
    sigma_pic_w_case_s().quotient(&fibers).expect("fiber classes span a saturated stable sublattice")
}

/// Check, using rational arithmetic, that the S′-basis σ is the S-basis σ
/// conjugated by the basis change.
pub fn cases_are_conjugate(basis_sprime_in_s: &RatMatrix) -> bool {
    let s = RatMatrix::from_int(sigma_pic_w_case_s().sigma());
    let sp = RatMatrix::from_int(sigma_pic_w_case_sprime().sigma());
    match basis_sprime_in_s.inverse() {
        Some(inv) => inv.mul(&s).mul(basis_sprime_in_s) == sp,
        None => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn twos(n: usize) -> Vec<BigInt> {
        vec![BigInt::from(2); n]
    }

    #[test]
    fn basic_modules() {
        let id = InvolutionModule::new(IntMatrix::identity(4)).unwrap();
        assert!(id.h1().is_empty());
        let minus = InvolutionModule::new(IntMatrix::identity(5).scale(&BigInt::from(-1))).unwrap();
        assert_eq!(minus.h1(), twos(5));
        let swap = InvolutionModule::new(IntMatrix::from_i64(&[&[0, 1], &[1, 0]])).unwrap();
        assert!(swap.h1().is_empty());
        assert_eq!(InvolutionModule::new(IntMatrix::from_i64(&[&[1, 1], &[0, 1]])), Err(H1Error::NotInvolution));
    }

    #[test]
    fn picard_modules() {
        assert_eq!(sigma_pic_w_case_s().h1(), twos(2));
        assert_eq!(sigma_pic_w_case_sprime().h1(), twos(2));
        let u = sigma_pic_u();
        assert_eq!(u.rank(), 5);
        assert_eq!(*u.sigma(), IntMatrix::identity(5).scale(&BigInt::from(-1)));
        assert_eq!(u.h1(), twos(5));
        assert!(cases_are_conjugate(&crate::lattice::sprime_basis_in_s()));
    }
}
