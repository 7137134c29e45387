//! Hilbert symbols, local invariants of the quaternion classes (x ± 6, 13)
//! and their analogues in y and z, and the resulting obstruction verdict.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arith::{factor_certified, legendre_big, primes_up_to, trial_factor, valuation, TRIAL_DIVISION_BOUND};
use crate::padic::{reference_form, search_solutions_mod, STAR_MODULUS_FACTORS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BrauerError {
    #[error("Hilbert symbol needs nonzero arguments")]
    ZeroArgument,
    #[error("{0} is not an odd prime")]
    NotOddPrime(BigInt),
    #[error("k must be 1 mod 13, got k mod 13 = {0}")]
    NotOneMod13(u64),
    #[error("could not factor {0} below the trial-division bound")]
    Unfactored(BigInt),
}

/// An element of ½ℤ/ℤ ⊂ ℚ/ℤ, stored as its numerator over 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Invariant(u8);

impl Invariant {
    pub const ZERO: Invariant = Invariant(0);
    pub const HALF: Invariant = Invariant(1);

    /// +1 ↦ 0 and −1 ↦ 1/2, for symbols written multiplicatively.
    pub fn from_sign(sign: i8) -> Self {
        if sign < 0 {
            Self::HALF
        } else {
            Self::ZERO
        }
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn to_rational(self) -> BigRational {
        BigRational::new(BigInt::from(self.0), BigInt::from(2))
    }
}

impl Add for Invariant {
    type Output = Invariant;
    fn add(self, rhs: Invariant) -> Invariant {
        Invariant((self.0 + rhs.0) % 2)
    }
}

impl std::iter::Sum for Invariant {
    fn sum<I: Iterator<Item = Invariant>>(iter: I) -> Invariant {
        iter.fold(Invariant::ZERO, Add::add)
    }
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.0 == 0 { "0" } else { "1/2" })
    }
}

impl Serialize for Invariant {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Real,
    Prime(BigInt),
}

impl Place {
    pub fn prime(p: u64) -> Self {
        Place::Prime(BigInt::from(p))
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => f.write_str("inf"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

/// Legendre symbol (a/p) for an odd prime p.
pub fn legendre(a: &BigInt, p: &BigInt) -> Result<i8, BrauerError> {
    if *p < BigInt::from(3) || p.is_even() {
        return Err(BrauerError::NotOddPrime(p.clone()));
    }
    Ok(legendre_big(a, p))
}

/// n·d has the same square class as n/d.
fn integer_representative(q: &BigRational) -> BigInt {
    q.numer() * q.denom()
}

fn split(a: &BigInt, p: &BigInt) -> (u32, BigInt) {
    let v = valuation(a, p).expect("nonzero");
    (v, a / p.pow(v))
}

/// Hilbert symbol (a, b)_v written additively: 0 when z² = a x² + b y²
/// has a nontrivial solution over ℚ_v, 1/2 otherwise.
pub fn hilbert_symbol(a: &BigRational, b: &BigRational, place: &Place) -> Result<Invariant, BrauerError> {
    if a.is_zero() || b.is_zero() {
        return Err(BrauerError::ZeroArgument);
    }
    let (a, b) = (integer_representative(a), integer_representative(b));
    Ok(match place {
        Place::Real => Invariant::from_sign(if a.is_negative() && b.is_negative() { -1 } else { 1 }),
        Place::Prime(p) if *p == BigInt::from(2) => {
            let (alpha, u) = split(&a, p);
            let (beta, v) = split(&b, p);
            let eight = BigInt::from(8);
            let (u8_, v8) = (u.mod_floor(&eight).to_u8().unwrap_or(0), v.mod_floor(&eight).to_u8().unwrap_or(0));
            let eps = |w: u8| u32::from(w % 4 == 3);
            let omega = |w: u8| u32::from(w == 3 || w == 5);
            let e = eps(u8_) * eps(v8) + alpha * omega(v8) + beta * omega(u8_);
            Invariant((e % 2) as u8)
        }
        Place::Prime(p) => {
            let (alpha, u) = split(&a, p);
            let (beta, v) = split(&b, p);
            let mut sign: i8 = 1;
            let half = ((p - 1u32) / 2u32).is_odd();
            if alpha % 2 == 1 && beta % 2 == 1 && half {
                sign = -sign;
            }
            if beta % 2 == 1 {
                sign *= legendre(&u, p)?;
            }
            if alpha % 2 == 1 {
                sign *= legendre(&v, p)?;
            }
            Invariant::from_sign(sign)
        }
    })
}

pub fn hilbert_symbol_int(a: &BigInt, b: &BigInt, place: &Place) -> Result<Invariant, BrauerError> {
    hilbert_symbol(&BigRational::from_integer(a.clone()), &BigRational::from_integer(b.clone()), place)
}

/// The places where (a, b) can ramify: ℝ, 2 and the primes dividing the
/// numerators and denominators.
pub fn relevant_places(a: &BigRational, b: &BigRational) -> Result<Vec<Place>, BrauerError> {
    let primes = primes_up_to(100_000);
    let mut ps = vec![BigInt::from(2)];
    for n in [a.numer(), a.denom(), b.numer(), b.denom()] {
        if n.is_zero() {
            return Err(BrauerError::ZeroArgument);
        }
        let fs = factor_certified(n, &primes).map_err(BrauerError::Unfactored)?;
        ps.extend(fs.into_iter().map(|(p, _, _)| p));
    }
    ps.sort();
    ps.dedup();
    Ok(std::iter::once(Place::Real).chain(ps.into_iter().map(Place::Prime)).collect())
}

/// Σ_v (a, b)_v = 0 in ℚ/ℤ.
pub fn product_formula_check(a: &BigRational, b: &BigRational) -> Result<bool, BrauerError> {
    let mut total = Invariant::ZERO;
    for place in relevant_places(a, b)? {
        total = total + hilbert_symbol(a, b, &place)?;
    }
    Ok(total.is_zero())
}

/// First argument of a quaternion class, as a function of the point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ClassArgument {
    /// coordinate + shift
    Linear {
        #[serde(with = "crate::serde_big::display")]
        coordinate: usize,
        #[serde(with = "crate::serde_big::display")]
        shift: i64,
    },
    /// coordinate² − 36
    Quadratic {
        #[serde(with = "crate::serde_big::display")]
        coordinate: usize,
    },
}

impl ClassArgument {
    pub fn evaluate(&self, point: &[BigInt; 3]) -> BigInt {
        match *self {
            ClassArgument::Linear { coordinate, shift } => &point[coordinate] + shift,
            ClassArgument::Quadratic { coordinate } => &point[coordinate] * &point[coordinate] - 36,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuaternionClass {
    pub name: &'static str,
    pub first: ClassArgument,
    #[serde(with = "crate::serde_big::bigint")]
    pub second: BigInt,
}

impl QuaternionClass {
    /// Local invariant at a point given by integer representatives. For a
    /// prime place the representatives must determine the square class of
    /// the first argument (enough precision).
    pub fn invariant_at(&self, point: &[BigInt; 3], place: &Place) -> Result<Invariant, BrauerError> {
        hilbert_symbol_int(&self.first.evaluate(point), &self.second, place)
    }
}

pub const CLASS_NAMES: [&str; 6] = ["A1", "A2", "B1", "B2", "C1", "C2"];

/// (x − 6, b), (x + 6, b), (y − 6, b), (y + 6, b), (z − 6, b), (z + 6, b).
pub fn six_classes(second: &BigInt) -> [QuaternionClass; 6] {
    std::array::from_fn(|i| QuaternionClass {
        name: CLASS_NAMES[i],
        first: ClassArgument::Linear { coordinate: i / 2, shift: if i % 2 == 0 { -6 } else { 6 } },
        second: second.clone(),
    })
}

/// Square-free part of −k·m, the second argument after discarding squares.
pub fn normalized_second(k: &BigInt, m: &BigInt) -> Result<BigInt, BrauerError> {
    crate::arith::squarefree_part(&(-(k * m)), &primes_up_to(100_000)).map_err(BrauerError::Unfactored)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mod13Row {
    #[serde(serialize_with = "crate::serde_big::display_vec")]
    pub point: Vec<u64>,
    pub invariants: [Invariant; 6],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mod13Report {
    pub rows: Vec<Mod13Row>,
    /// Every factor x² − 36, y² − 36, z² − 36 is a unit mod 13.
    pub all_units: bool,
    /// Every solution has some class with invariant 1/2 at 13.
    pub every_point_obstructed: bool,
}

impl Mod13Report {
    pub fn holds(&self) -> bool {
        self.all_units && self.every_point_obstructed && !self.rows.is_empty()
    }
}

/// Exhaustive check over (ℤ/13)³ of the solutions of F_k ≡ 0 mod 13.
pub fn obstruction_mod13_core(k: &BigInt) -> Result<Mod13Report, BrauerError> {
    let r = k.mod_floor(&BigInt::from(13)).to_u64().unwrap_or(0);
    if r != 1 {
        return Err(BrauerError::NotOneMod13(r));
    }
    let form = reference_form(k);
    let sols = search_solutions_mod(&form, 13).expect("13 is below the search limit");
    let classes = six_classes(&BigInt::from(13));
    let thirteen = Place::prime(13);
    let mut all_units = true;
    let mut every = true;
    let mut rows = Vec::with_capacity(sols.len());
    for s in sols {
        all_units &= s.iter().all(|&c| (c * c + 13 * 13 - 36) % 13 != 0);
        let point = s.map(BigInt::from);
        let invariants: [Invariant; 6] = std::array::from_fn(|i| {
            let arg = classes[i].first.evaluate(&point);
            if arg.is_multiple_of(&BigInt::from(13)) {
                // Not a unit: the residue alone does not determine the class.
                return Invariant::ZERO;
            }
            classes[i].invariant_at(&point, &thirteen).expect("nonzero arguments")
        });
        every &= invariants.iter().any(|v| !v.is_zero());
        rows.push(Mod13Row { point: s.to_vec(), invariants });
    }
    Ok(Mod13Report { rows, all_units, every_point_obstructed: every })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlaceInvariants {
    pub invariants: [Invariant; 6],
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantTranscript {
    #[serde(with = "crate::serde_big::bigint")]
    pub k: BigInt,
    pub classes: Vec<QuaternionClass>,
    /// Places where the invariants are the same for every local point.
    pub places: BTreeMap<String, PlaceInvariants>,
    /// Invariants at 13 for each residue class of local points.
    pub residues_13: Vec<Mod13Row>,
    /// Per residue class at 13, the total over all places for each class.
    pub totals: Vec<[Invariant; 6]>,
    pub verdict: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum BmVerdict {
    Obstructed { transcript: Box<InvariantTranscript> },
    HypothesesUnmet { reason: String },
}

fn unmet(reason: impl Into<String>) -> BmVerdict {
    BmVerdict::HypothesesUnmet { reason: reason.into() }
}

/// Constant invariants at a place over all local solutions modulo `modulus`
/// whose coordinates are units; `None` if some coordinate is not a unit.
fn invariants_over_solutions(k: &BigInt, modulus: u64, p: u64) -> Option<[Invariant; 6]> {
    let sols = search_solutions_mod(&reference_form(k), modulus).ok()?;
    let classes = six_classes(&BigInt::from(13));
    let place = Place::prime(p);
    let mut seen: Option<[Invariant; 6]> = None;
    for s in sols {
        if s.iter().any(|&c| c % p == 0) {
            return None;
        }
        let point = s.map(BigInt::from);
        let inv: [Invariant; 6] = std::array::from_fn(|i| classes[i].invariant_at(&point, &place).expect("units are nonzero"));
        match seen {
            None => seen = Some(inv),
            Some(prev) if prev != inv => return None,
            _ => {}
        }
    }
    seen
}

/// Checks the hypotheses on ℓ and, when they hold, records local invariants
/// of the six classes showing that no adelic point of 𝒰_{ℓ²} is orthogonal
/// to all of them.
pub fn bm_verdict(ell: &BigInt) -> BmVerdict {
    if *ell <= BigInt::one() {
        return unmet("ell must be greater than 1");
    }
    for &(p, e) in &STAR_MODULUS_FACTORS {
        let q = BigInt::from(p).pow(e);
        if !(ell - 1u32).is_multiple_of(&q) {
            return unmet(format!("ell is not 1 mod {q}"));
        }
    }
    let primes = primes_up_to(TRIAL_DIVISION_BOUND);
    let factors = match factor_certified(ell, &primes) {
        Ok(f) => f,
        Err(cofactor) => return unmet(format!("could not factor ell: cofactor {cofactor} is not certified prime")),
    };
    let thirteen = BigInt::from(13);
    for (p, _, _) in &factors {
        if !hilbert_symbol_int(p, &thirteen, &Place::Prime(p.clone())).map(Invariant::is_zero).unwrap_or(false) {
            return unmet(format!("(p, 13)_p is not 0 for the prime divisor p = {p} of ell"));
        }
    }
    let k = ell * ell;
    let core = match obstruction_mod13_core(&k) {
        Ok(r) if r.holds() => r,
        _ => return unmet("the exhaustive computation mod 13 does not obstruct every point"),
    };
    let Some(at2) = invariants_over_solutions(&k, 8, 2) else {
        return unmet("some solution mod 8 has a non-unit coordinate");
    };
    let Some(at3) = invariants_over_solutions(&k, 3, 3) else {
        return unmet("some solution mod 3 has a non-unit coordinate");
    };
    let classes = six_classes(&thirteen);
    let real: [Invariant; 6] =
        std::array::from_fn(|i| hilbert_symbol_int(&BigInt::from(if i % 2 == 0 { -1 } else { 1 }), &thirteen, &Place::Real).expect("nonzero"));
    let ell_primes: Vec<String> = factors.iter().map(|(p, _, _)| p.to_string()).collect();
    let mut places = BTreeMap::new();
    places.insert("inf".into(), PlaceInvariants { invariants: real, reason: "13 > 0, so (t, 13) splits over R for every t".into() });
    places.insert(
        "2".into(),
        PlaceInvariants { invariants: at2, reason: "all solutions mod 8 have odd coordinates and 13 is 1 mod 4".into() },
    );
    places.insert("3".into(), PlaceInvariants { invariants: at3, reason: "all solutions mod 3 have unit coordinates".into() });
    places.insert(
        "other".into(),
        PlaceInvariants {
            invariants: [Invariant::ZERO; 6],
            reason: format!(
                "for p >= 5, p != 13: if p divides x -+ 6 then l^2 = 13*(6(xyz - 4330))^2 mod p, so 13 is a square mod p \
                 when p does not divide l; the prime divisors {ell_primes:?} of l satisfy (p, 13)_p = 0"
            ),
        },
    );
    let totals: Vec<[Invariant; 6]> = core
        .rows
        .iter()
        .map(|row| std::array::from_fn(|i| places.values().map(|pl| pl.invariants[i]).sum::<Invariant>() + row.invariants[i]))
        .collect();
    if totals.iter().any(|t| t.iter().all(|v| v.is_zero())) {
        return unmet("some residue class at 13 has all six totals zero");
    }
    BmVerdict::Obstructed {
        transcript: Box::new(InvariantTranscript {
            k,
            classes: classes.to_vec(),
            places,
            residues_13: core.rows,
            totals,
            verdict: "obstructed",
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SurveyRow {
    #[serde(rename = "M", with = "crate::serde_big::display")]
    pub bound: u64,
    #[serde(with = "crate::serde_big::display")]
    pub count_local: u64,
    #[serde(with = "crate::serde_big::display")]
    pub count_obstructed: u64,
}

/// #{0 < k ≤ M : k ≡ 1 mod P′} and #{ℓ odd prime : ℓ² ≤ M, ℓ ≡ 1 mod P′,
/// (13/ℓ) = 1}. The Legendre condition drops ℓ = 13, where the Hilbert
/// symbol (13, 13)_13 also vanishes.
pub fn survey_counts(bound: u64, modulus: u64) -> SurveyRow {
    assert!(modulus >= 1, "modulus must be positive");
    let count_local = if bound == 0 { 0 } else { (bound - 1) / modulus + 1 };
    let root = bound.sqrt();
    let thirteen = BigInt::from(13);
    let count_obstructed = primes_up_to(root)
        .into_iter()
        .filter(|&l| l % modulus == 1 % modulus)
        .filter(|&l| l > 2 && legendre(&thirteen, &BigInt::from(l)) == Ok(1))
        .count() as u64;
    SurveyRow { bound, count_local, count_obstructed }
}

/// Trial-division helper exposed for callers that want to report which
/// prime divisors of ℓ were found before giving up.
pub fn ell_prime_divisors(ell: &BigInt) -> (Vec<BigInt>, BigInt) {
    let tf = trial_factor(ell, &primes_up_to(TRIAL_DIVISION_BOUND));
    (tf.factors.into_iter().map(|(p, _)| p).collect(), tf.cofactor)
}
