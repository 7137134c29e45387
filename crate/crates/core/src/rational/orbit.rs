//! Vieta involutions and breadth-first orbits of rational points.

use std::collections::{BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::perfect_square;
use crate::forms::{FamilyParams, FormError, Mk3Form, Symmetry, TriprojPoint};
use crate::ring::{Rationals, Ring};

use super::ec::rational_height;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrbitError {
    #[error(transparent)]
    Form(#[from] FormError),
    #[error("axis {0} is not 0, 1 or 2")]
    BadAxis(usize),
    #[error("seed does not lie on the surface")]
    SeedOffSurface,
}

/// σ_axis: replace the pair on `axis` by the other root of the fiber
/// quadratic α w² + β w u + γ u² through the point.
pub fn vieta_involution<R: Ring>(
    ring: &R,
    form: &Mk3Form,
    pt: &TriprojPoint<R::Elem>,
    axis: usize,
) -> Result<TriprojPoint<R::Elem>, OrbitError> {
    if axis > 2 {
        return Err(OrbitError::BadAxis(axis));
    }
    let q = form.fiber_at(ring, pt, axis);
    let (w, u) = &pt.pairs[axis];
    let other = other_root(ring, &q.alpha, &q.beta, &q.gamma, w, u)?;
    let mut pairs = pt.pairs.clone();
    pairs[axis] = other;
    Ok(TriprojPoint { pairs })
}

/// The second root of α w² + β w u + γ u² given the root (w:u).
pub fn other_root<R: Ring>(
    ring: &R,
    alpha: &R::Elem,
    beta: &R::Elem,
    gamma: &R::Elem,
    w: &R::Elem,
    u: &R::Elem,
) -> Result<(R::Elem, R::Elem), OrbitError> {
    let alpha_w = ring.mul(alpha, w);
    if !ring.is_zero(&alpha_w) {
        // Product of the roots is γ/α.
        return Ok((ring.mul(gamma, u), alpha_w));
    }
    if !ring.is_zero(alpha) {
        // w = 0, so u ≠ 0; the roots sum to −β/α.
        let num = ring.neg(&ring.add(&ring.mul(beta, u), &ring.mul(alpha, w)));
        return Ok((num, ring.mul(alpha, u)));
    }
    if ring.is_zero(beta) && ring.is_zero(gamma) {
        return Err(FormError::ZeroFiber.into());
    }
    // α = 0: the roots are (1:0) and (−γ:β).
    if ring.is_zero(u) {
        Ok((ring.neg(gamma), beta.clone()))
    } else {
        Ok((ring.one(), ring.zero()))
    }
}

/// Scale each pair to (w/u : 1) or (1 : 0).
pub fn normalize(pt: &TriprojPoint<BigRational>) -> TriprojPoint<BigRational> {
    TriprojPoint {
        pairs: pt.pairs.clone().map(|(w, u)| {
            if u.is_zero() {
                (BigRational::one(), BigRational::zero())
            } else {
                (w / u, BigRational::one())
            }
        }),
    }
}

/// Product over the three coordinates of max(|numerator|, |denominator|).
pub fn naive_height(pt: &TriprojPoint<BigRational>) -> BigInt {
    normalize(pt)
        .pairs
        .iter()
        .map(|(w, u)| if u.is_zero() { BigInt::one() } else { rational_height(w) })
        .product()
}

#[derive(Debug, Clone)]
pub struct OrbitState {
    pub points: BTreeSet<TriprojPoint<BigRational>>,
    pub frontier: VecDeque<TriprojPoint<BigRational>>,
    pub height_bound: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitStats {
    pub orbit_size: usize,
    /// Distinct coordinate values seen on each axis.
    pub fibers_per_axis: [usize; 3],
    pub steps: usize,
    /// The step budget ran out with unexplored points left.
    pub truncated: bool,
    pub nondegenerate: bool,
    /// Whether −mk is a non-square, when the form comes from family
    /// parameters.
    pub family_hypothesis: Option<bool>,
    pub hypothesis_disagrees: bool,
}

/// Breadth-first closure of `seed` under σ₁, σ₂, σ₃ and the 24 symmetries,
/// keeping points of naive height at most `height_bound` and expanding at
/// most `step_bound` points.
pub fn orbit_explore(
    form: &Mk3Form,
    seed: &TriprojPoint<BigRational>,
    height_bound: &BigInt,
    step_bound: usize,
) -> Result<(OrbitState, OrbitStats), OrbitError> {
    let ring = Rationals;
    if !form.evaluate(&ring, seed).is_zero() {
        return Err(OrbitError::SeedOffSurface);
    }
    let symmetries: Vec<Symmetry> = Symmetry::all().into_iter().skip(1).collect();
    let seed = normalize(seed);
    let mut state = OrbitState { points: BTreeSet::new(), frontier: VecDeque::new(), height_bound: height_bound.clone() };
    if naive_height(&seed) <= *height_bound {
        state.points.insert(seed.clone());
        state.frontier.push_back(seed);
    }
    let mut steps = 0;
    while steps < step_bound {
        let Some(pt) = state.frontier.pop_front() else { break };
        steps += 1;
        let mut images = Vec::with_capacity(27);
        for axis in 0..3 {
            images.push(vieta_involution(&ring, form, &pt, axis)?);
        }
        images.extend(symmetries.iter().map(|s| s.apply(&ring, &pt)));
        for img in images {
            let img = normalize(&img);
            if naive_height(&img) > *height_bound || state.points.contains(&img) {
                continue;
            }
            state.points.insert(img.clone());
            state.frontier.push_back(img);
        }
    }
    let fibers_per_axis = std::array::from_fn(|i| state.points.iter().map(|p| &p.pairs[i]).collect::<BTreeSet<_>>().len());
    let stats = OrbitStats {
        orbit_size: state.points.len(),
        fibers_per_axis,
        steps,
        truncated: !state.frontier.is_empty(),
        nondegenerate: form.is_nondegenerate(),
        family_hypothesis: None,
        hypothesis_disagrees: false,
    };
    Ok((state, stats))
}

/// Whether −m·k is not a perfect square, the condition under which the
/// family is claimed to be non-degenerate.
pub fn family_hypothesis(params: &FamilyParams) -> bool {
    perfect_square(&(-&params.m * &params.k)).is_none()
}

/// [`orbit_explore`] for a family member, recording whether the family
/// hypothesis and the direct non-degeneracy test agree.
pub fn orbit_explore_family(
    params: &FamilyParams,
    seed: &TriprojPoint<BigRational>,
    height_bound: &BigInt,
    step_bound: usize,
) -> Result<(OrbitState, OrbitStats), OrbitError> {
    let form = params.expand();
    let (state, mut stats) = orbit_explore(&form, seed, height_bound, step_bound)?;
    let hyp = family_hypothesis(params);
    stats.family_hypothesis = Some(hyp);
    stats.hypothesis_disagrees = hyp != stats.nondegenerate;
    Ok((state, stats))
}

/// The point (x : 1), (y : 1), (1 : 0) of the fiber at z = ∞.
pub fn fiber_point_at_infinity(x: BigRational, y: BigRational) -> TriprojPoint<BigRational> {
    TriprojPoint { pairs: [(x, BigRational::one()), (y, BigRational::one()), (BigRational::one(), BigRational::zero())] }
}
