//! Complete determination of the integral points of an affine MK3 surface.
//!
//! The solver never relies on a single a-priori box. Points with a zero
//! coordinate reduce to the factorization (bx²+d)(by²+d) = d² − be. For the
//! rest, sort coordinates so that |x| ≤ |y| ≤ |z| and view F as a quadratic
//! in z. Its leading coefficient a x²y² + b(x²+y²) + d dominates once |x| is
//! large, which bounds |x|. For each remaining x the leading coefficient is
//! (ax²+b)y² + (bx²+d); when ax²+b ≠ 0 this bounds |y|, and when ax²+b = 0
//! the equation in (y, z) is a binary quadratic p(y²+z²) + q yz = n, solved
//! with the classical theory (ellipses, factorizations and Pell orbits).
//! Such conics can carry infinitely many integral points, which are reported
//! as families rather than truncated.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{is_prime_u64, perfect_square, primes_up_to, trial_factor};
use crate::forms::Mk3Form;

pub type IntPoint = [BigInt; 3];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IntegralError {
    #[error("coefficient {0} is zero")]
    ZeroCoefficient(char),
    #[error("could not factor {0}")]
    Unfactored(BigInt),
}

/// A(bx²+d)(by²+d)(bz²+d) + (2(abd−b³)xyz + bcd)² − k = A·bd·F with
/// A = 4b(ad−b²).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompletedSquare {
    #[serde(with = "crate::serde_big::bigint")]
    pub scale: BigInt,
    #[serde(with = "crate::serde_big::bigint")]
    pub k: BigInt,
}

/// Multiplying bd·F by A = 4b(ad − b²) and completing the square in xyz gives
/// the identity in [`CompletedSquare`] with k = 4bd(ad−b²)(d²−be) + b²c²d².
pub fn completed_square(form: &Mk3Form) -> CompletedSquare {
    let Mk3Form { a, b, c, d, e } = form;
    let s = a * d - b * b;
    let scale = BigInt::from(4) * b * &s;
    let bcd = b * c * d;
    let k = BigInt::from(4) * b * d * &s * (d * d - b * e) + &bcd * &bcd;
    CompletedSquare { scale, k }
}

/// ⌈max(12|b|/|a|, 4|c|/|a|, 12|d|/|a|, 2√(|e|/|a|))⌉.
pub fn enumeration_bound(form: &Mk3Form) -> BigInt {
    let a = form.a.abs();
    let ceil_div = |n: BigInt| -> BigInt { Integer::div_ceil(&n, &a) };
    let mut best = ceil_div(BigInt::from(12) * form.b.abs());
    best = best.max(ceil_div(BigInt::from(4) * form.c.abs()));
    best = best.max(ceil_div(BigInt::from(12) * form.d.abs()));
    // smallest n with n²|a| ≥ 4|e|
    let target = BigInt::from(4) * form.e.abs();
    let mut n = Integer::div_ceil(&target, &a).sqrt();
    while &n * &n * &a < target {
        n += 1;
    }
    best.max(n)
}

/// Infinitely many integral points, described by a generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntegralFamily {
    /// base + t·direction for t ∈ ℤ.
    Line {
        #[serde(serialize_with = "crate::serde_big::display_vec")]
        base: IntPoint,
        #[serde(serialize_with = "crate::serde_big::display_vec")]
        direction: IntPoint,
    },
    /// Coordinate `axis` equals `fixed`; the other two (in increasing axis
    /// order) solve p(y²+z²) + q yz = n, with infinitely many solutions.
    Conic(PellFamily),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PellFamily {
    pub axis: usize,
    #[serde(with = "crate::serde_big::bigint")]
    pub fixed: BigInt,
    #[serde(with = "crate::serde_big::bigint")]
    pub p: BigInt,
    #[serde(with = "crate::serde_big::bigint")]
    pub q: BigInt,
    #[serde(with = "crate::serde_big::bigint")]
    pub n: BigInt,
    /// q² − 4p², positive and not a square.
    #[serde(with = "crate::serde_big::bigint")]
    pub disc: BigInt,
    /// Fundamental solution (T, U) of T² − disc·U² = 1.
    #[serde(serialize_with = "crate::serde_big::display_vec")]
    pub unit: [BigInt; 2],
    /// Representatives (X, Z) of X² − disc·Z² = 4pn with X = 2py + qz.
    #[serde(skip)]
    pub bases: Vec<[BigInt; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntegralSolutionSet {
    /// Points outside every family, closed under the 24 symmetries.
    pub points: BTreeSet<IntPoint>,
    pub families: Vec<IntegralFamily>,
}

impl IntegralSolutionSet {
    pub fn is_finite(&self) -> bool {
        self.families.is_empty()
    }

    /// Largest |coordinate| among the isolated points.
    pub fn max_coordinate(&self) -> BigInt {
        self.points.iter().flat_map(|p| p.iter().map(|c| c.abs())).max().unwrap_or_default()
    }

    /// Every solution with all |coordinates| ≤ `bound`.
    pub fn within_box(&self, bound: &BigInt) -> BTreeSet<IntPoint> {
        let inside = |p: &IntPoint| p.iter().all(|c| c.abs() <= *bound);
        let mut out: BTreeSet<IntPoint> = self.points.iter().filter(|p| inside(p)).cloned().collect();
        for fam in &self.families {
            for p in fam.members_within(bound) {
                out.extend(symmetric_images(&p).into_iter().filter(inside));
            }
        }
        out
    }
}

impl IntegralFamily {
    /// Members with every |coordinate| ≤ `bound`, before applying symmetries.
    pub fn members_within(&self, bound: &BigInt) -> Vec<IntPoint> {
        match self {
            IntegralFamily::Line { base, direction } => line_members(base, direction, bound),
            IntegralFamily::Conic(f) => f.members_within(bound),
        }
    }

    pub fn contains(&self, pt: &IntPoint) -> bool {
        match self {
            IntegralFamily::Line { base, direction } => {
                let mut t: Option<BigInt> = None;
                for i in 0..3 {
                    let diff = &pt[i] - &base[i];
                    if direction[i].is_zero() {
                        if !diff.is_zero() {
                            return false;
                        }
                    } else {
                        let (q, r) = diff.div_rem(&direction[i]);
                        if !r.is_zero() || t.as_ref().is_some_and(|t| *t != q) {
                            return false;
                        }
                        t = Some(q);
                    }
                }
                true
            }
            IntegralFamily::Conic(f) => {
                let [j, k] = other_axes(f.axis);
                pt[f.axis] == f.fixed && {
                    let (y, z) = (&pt[j], &pt[k]);
                    &f.p * (y * y + z * z) + &f.q * y * z == f.n
                }
            }
        }
    }
}

fn line_members(base: &IntPoint, direction: &IntPoint, bound: &BigInt) -> Vec<IntPoint> {
    // Intersect the intervals |base_i + t dir_i| ≤ bound.
    let mut lo: Option<BigInt> = None;
    let mut hi: Option<BigInt> = None;
    for i in 0..3 {
        let (b, d) = (&base[i], &direction[i]);
        if d.is_zero() {
            if b.abs() > *bound {
                return Vec::new();
            }
            continue;
        }
        let (mut l, mut h) = (Integer::div_ceil(&(-bound - b), d), Integer::div_floor(&(bound - b), d));
        if d.is_negative() {
            l = Integer::div_ceil(&(bound - b), d);
            h = Integer::div_floor(&(-bound - b), d);
        }
        lo = Some(lo.map_or(l.clone(), |x: BigInt| x.max(l)));
        hi = Some(hi.map_or(h.clone(), |x: BigInt| x.min(h)));
    }
    let (Some(lo), Some(hi)) = (lo, hi) else {
        return vec![base.clone()];
    };
    let mut out = Vec::new();
    let mut t = lo;
    while t <= hi {
        out.push(std::array::from_fn(|i| &base[i] + &t * &direction[i]));
        t += 1;
    }
    out
}

impl PellFamily {
    fn place(&self, y: BigInt, z: BigInt) -> IntPoint {
        let [j, k] = other_axes(self.axis);
        let mut pt: IntPoint = Default::default();
        pt[self.axis] = self.fixed.clone();
        pt[j] = y;
        pt[k] = z;
        pt
    }

    fn to_yz(&self, big_x: &BigInt, z: &BigInt) -> Option<(BigInt, BigInt)> {
        let two_p = BigInt::from(2) * &self.p;
        let (y, r) = (big_x - &self.q * z).div_rem(&two_p);
        r.is_zero().then(|| (y, z.clone()))
    }

    pub fn members_within(&self, bound: &BigInt) -> Vec<IntPoint> {
        let [t, u] = &self.unit;
        let mut out = BTreeSet::new();
        for base in &self.bases {
            for sign in [1i32, -1] {
                // sign = −1 walks with the inverse unit T − U√D.
                let u = u * sign;
                let mut cur = base.clone();
                let mut prev_z: Option<BigInt> = None;
                for _ in 0..10_000 {
                    let z = &cur[1];
                    if z.abs() <= *bound {
                        if let Some((y, z)) = self.to_yz(&cur[0], z) {
                            if y.abs() <= *bound {
                                out.insert(self.place(y, z));
                            }
                        }
                    } else if let Some(pz) = &prev_z {
                        // |Z_k| = |c₁εᵏ + c₂ε⁻ᵏ| keeps growing once it has grown
                        // past the bound without a sign change.
                        if pz.sign() == z.sign() && z.abs() > pz.abs() {
                            break;
                        }
                    }
                    prev_z = Some(z.clone());
                    cur = [&cur[0] * t + &self.disc * &cur[1] * &u, &cur[0] * &u + &cur[1] * t];
                }
            }
        }
        out.into_iter().collect()
    }
}

fn other_axes(axis: usize) -> [usize; 2] {
    match axis {
        0 => [1, 2],
        1 => [0, 2],
        _ => [0, 1],
    }
}

/// The 24 images of a point under coordinate permutations and even sign
/// changes.
pub fn symmetric_images(p: &IntPoint) -> Vec<IntPoint> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    const SIGNS: [[i8; 3]; 4] = [[1, 1, 1], [-1, -1, 1], [-1, 1, -1], [1, -1, -1]];
    let mut out = Vec::with_capacity(24);
    for perm in PERMS {
        for signs in SIGNS {
            out.push(std::array::from_fn(|i| if signs[i] < 0 { -&p[perm[i]] } else { p[perm[i]].clone() }));
        }
    }
    out
}

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(1_000_000))
}

/// Positive divisors of a nonzero integer.
fn divisors(n: &BigInt) -> Result<Vec<BigInt>, IntegralError> {
    let tf = trial_factor(n, small_primes());
    let mut factors = tf.factors;
    if !tf.cofactor.is_one() {
        if !tf.cofactor.to_u64().is_some_and(is_prime_u64) {
            return Err(IntegralError::Unfactored(tf.cofactor));
        }
        factors.push((tf.cofactor, 1));
    }
    let mut out = vec![BigInt::one()];
    for (p, e) in factors {
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for d in &out {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        out = next;
    }
    Ok(out)
}

fn signed_divisors(n: &BigInt) -> Result<Vec<BigInt>, IntegralError> {
    let pos = divisors(n)?;
    Ok(pos.iter().cloned().chain(pos.iter().map(|d| -d)).collect())
}

/// Integer roots of α z² + β z + γ, which must not vanish identically.
fn integer_roots(alpha: &BigInt, beta: &BigInt, gamma: &BigInt) -> Vec<BigInt> {
    if alpha.is_zero() {
        if beta.is_zero() {
            return Vec::new();
        }
        let (q, r) = (-gamma).div_rem(beta);
        return if r.is_zero() { vec![q] } else { Vec::new() };
    }
    let disc = beta * beta - BigInt::from(4) * alpha * gamma;
    let Some(root) = perfect_square(&disc) else {
        return Vec::new();
    };
    let two_a = BigInt::from(2) * alpha;
    let mut out = Vec::new();
    for num in [-beta + &root, -beta - &root] {
        let (q, r) = num.div_rem(&two_a);
        if r.is_zero() && !out.contains(&q) {
            out.push(q);
        }
    }
    out
}

/// Integral solutions of p(y² + z²) + q yz = n in (y, z).
#[derive(Debug, Default)]
struct ConicSolutions {
    points: Vec<(BigInt, BigInt)>,
    /// (y₀, z₀) + t(dy, dz)
    lines: Vec<([BigInt; 2], [BigInt; 2])>,
    pell: Option<(BigInt, [BigInt; 2], Vec<[BigInt; 2]>)>,
}

fn solve_conic(p: &BigInt, q: &BigInt, n: &BigInt) -> Result<ConicSolutions, IntegralError> {
    let mut sol = ConicSolutions::default();
    let zero = BigInt::zero;
    let one = BigInt::one;
    if p.is_zero() {
        // q yz = n with q ≠ 0
        let (m, r) = n.div_rem(q);
        if !r.is_zero() {
            return Ok(sol);
        }
        if m.is_zero() {
            sol.lines.push(([zero(), zero()], [zero(), one()]));
            sol.lines.push(([zero(), zero()], [one(), zero()]));
        } else {
            for d in signed_divisors(&m)? {
                let e = &m / &d;
                sol.points.push((d, e));
            }
        }
        return Ok(sol);
    }
    let disc = q * q - BigInt::from(4) * p * p;
    let four_pn = BigInt::from(4) * p * n;
    if disc.is_negative() {
        // 4p·f = (2py + qz)² − disc·z², so |disc| z² ≤ 4pn.
        if four_pn.is_negative() {
            return Ok(sol);
        }
        let zmax = (&four_pn / disc.abs()).sqrt();
        let mut z = -&zmax;
        while z <= zmax {
            for y in integer_roots(p, &(q * &z), &(p * &z * &z - n)) {
                sol.points.push((y, z.clone()));
            }
            z += 1;
        }
        return Ok(sol);
    }
    if disc.is_zero() {
        // q = 2εp, so p(y + εz)² = n.
        let eps = if q.sign() == p.sign() { one() } else { -one() };
        let (w2, r) = n.div_rem(p);
        if let (true, Some(w)) = (r.is_zero(), perfect_square(&w2)) {
            for w in if w.is_zero() { vec![w] } else { vec![w.clone(), -w] } {
                sol.lines.push(([w, zero()], [-&eps, one()]));
            }
        }
        return Ok(sol);
    }
    if let Some(delta) = perfect_square(&disc) {
        // 4p·f = (2py + (q−δ)z)(2py + (q+δ)z)
        let two_p = BigInt::from(2) * p;
        let (l1, l2) = (q - &delta, q + &delta);
        if n.is_zero() {
            for l in [&l1, &l2] {
                let g = l.gcd(&two_p);
                sol.lines.push(([zero(), zero()], [-(l / &g), &two_p / &g]));
            }
            return Ok(sol);
        }
        let two_delta = BigInt::from(2) * &delta;
        for d1 in signed_divisors(&four_pn)? {
            let d2 = &four_pn / &d1;
            let (z, r) = (&d2 - &d1).div_rem(&two_delta);
            if !r.is_zero() {
                continue;
            }
            let (y, r) = (&d1 - &l1 * &z).div_rem(&two_p);
            if r.is_zero() {
                sol.points.push((y, z));
            }
        }
        return Ok(sol);
    }
    if n.is_zero() {
        sol.points.push((zero(), zero()));
        return Ok(sol);
    }
    // X² − disc·Z² = 4pn with X = 2py + qz. By Nagell's bound every class of
    // solutions under the unit group has a representative with
    // 0 ≤ Z ≤ U·√(|N| / (2(T ± 1))), + for N > 0 and − for N < 0.
    let (t, u) = pell_fundamental(&disc);
    let shifted: BigInt = if four_pn.is_positive() { &t + 1u32 } else { &t - 1u32 };
    let zmax: BigInt = (&u * &u * four_pn.abs() / (BigInt::from(2) * shifted)).sqrt();
    let mut bases = Vec::new();
    let mut z = zero();
    while z <= zmax {
        if let Some(x) = perfect_square(&(&four_pn + &disc * &z * &z)) {
            for sx in [x.clone(), -x.clone()] {
                for sz in [z.clone(), -z.clone()] {
                    let b = [sx.clone(), sz];
                    if !bases.contains(&b) {
                        bases.push(b);
                    }
                }
            }
        }
        z += 1;
    }
    // Keep only classes that contain a point with integral y; the orbit
    // modulo 2p is periodic, so one period decides.
    let modulus = (BigInt::from(2) * p).abs();
    bases.retain(|b| {
        let start = [b[0].mod_floor(&modulus), b[1].mod_floor(&modulus)];
        let mut cur = start.clone();
        loop {
            if (&cur[0] - q * &cur[1]).mod_floor(&modulus).is_zero() {
                return true;
            }
            cur = [
                (&cur[0] * &t + &disc * &cur[1] * &u).mod_floor(&modulus),
                (&cur[0] * &u + &cur[1] * &t).mod_floor(&modulus),
            ];
            if cur == start {
                return false;
            }
        }
    });
    if !bases.is_empty() {
        sol.pell = Some((disc, [t, u], bases));
    }
    Ok(sol)
}

/// Smallest solution (T, U) with U > 0 of T² − D U² = 1, by the continued
/// fraction of √D.
fn pell_fundamental(d: &BigInt) -> (BigInt, BigInt) {
    let a0 = d.sqrt();
    let (mut m, mut den, mut a) = (BigInt::zero(), BigInt::one(), a0.clone());
    let (mut p_prev, mut p) = (BigInt::one(), a0.clone());
    let (mut q_prev, mut q) = (BigInt::zero(), BigInt::one());
    loop {
        if &p * &p - d * &q * &q == BigInt::one() {
            return (p, q);
        }
        m = &den * &a - &m;
        den = (d - &m * &m) / &den;
        a = (&a0 + &m) / &den;
        let p_next = &a * &p + &p_prev;
        let q_next = &a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
    }
}

/// Smallest s ≥ 1 past which no solution with s = |x| ≤ |y| ≤ |z| exists.
///
/// For |x| = s ≤ |y| = t ≤ |z| the z-quadratic has leading coefficient
/// α = a s²t² + b(s²+t²) + d with |α| ≥ t²(|a|s² − 2|b| − |d|), and
/// |β| + |γ| ≤ t²(|c| + |b|s² + 2|d| + |e|). Every root has
/// |z| ≤ 1 + (|β|+|γ|)/|α|, which is below t as soon as
/// (t−1)(|a|s² − 2|b| − |d|) > |c| + |b|s² + 2|d| + |e|. Since t ≥ s, the cubic
/// h(s) = (s−1)(|a|s² − 2|b| − |d|) − (|c| + |b|s² + 2|d| + |e|) being positive
/// suffices; once h, h' and h'' are all positive they stay positive.
fn sorted_min_bound(form: &Mk3Form) -> BigInt {
    let [a, b, c, d, e] = form.coeffs().map(|v| v.abs());
    let k1 = BigInt::from(2) * &b + &d;
    let k2 = &c + BigInt::from(2) * &d + &e;
    // h(s) = |a|s³ − (|a|+|b|)s² − k1 s + (k1 − k2)
    let h = |s: &BigInt| &a * s * s * s - (&a + &b) * s * s - &k1 * s + (&k1 - &k2);
    let h1 = |s: &BigInt| BigInt::from(3) * &a * s * s - BigInt::from(2) * (&a + &b) * s - &k1;
    let h2 = |s: &BigInt| BigInt::from(6) * &a * s - BigInt::from(2) * (&a + &b);
    let mut s = BigInt::one();
    while !(h(&s).is_positive() && h1(&s).is_positive() && h2(&s).is_positive()) {
        s += 1;
    }
    s
}

/// Integral (y, z) with s ≤ |y| ≤ tmax and
/// (lead·y² + mid) z² + cx·y z + (mid·y² + tail) = 0.
fn scan_y(lead: &BigInt, mid: &BigInt, tail: &BigInt, cx: &BigInt, s: &BigInt, tmax: &BigInt) -> Vec<(BigInt, BigInt)> {
    let mut out = Vec::new();
    let small = [lead, mid, tail, cx, s, tmax].map(|v| v.to_i128());
    if let [Some(lead), Some(mid), Some(tail), Some(cx), Some(s), Some(tmax)] = small {
        for t in s..=tmax {
            match scan_one_i128(lead, mid, tail, cx, t) {
                Some(found) => out.extend(found.into_iter().map(|(y, z)| (BigInt::from(y), BigInt::from(z)))),
                None => out.extend(scan_one_big(&lead.into(), &mid.into(), &tail.into(), &cx.into(), &t.into())),
            }
        }
        return out;
    }
    let mut t = s.clone();
    while t <= *tmax {
        out.extend(scan_one_big(lead, mid, tail, cx, &t));
        t += 1;
    }
    out
}

/// Both signs y = ±t in machine arithmetic, or `None` on overflow.
fn scan_one_i128(lead: i128, mid: i128, tail: i128, cx: i128, t: i128) -> Option<Vec<(i128, i128)>> {
    let yy = t.checked_mul(t)?;
    let alpha = lead.checked_mul(yy)?.checked_add(mid)?;
    let gamma = mid.checked_mul(yy)?.checked_add(tail)?;
    let mut out = Vec::new();
    for y in [t, -t] {
        let beta = cx.checked_mul(y)?;
        if alpha == 0 {
            if beta != 0 && gamma % beta == 0 {
                out.push((y, -gamma / beta));
            }
            continue;
        }
        let disc = beta.checked_mul(beta)?.checked_sub(alpha.checked_mul(gamma)?.checked_mul(4)?)?;
        if disc < 0 {
            continue;
        }
        let r = disc.isqrt();
        if r * r != disc {
            continue;
        }
        let two_a = alpha.checked_mul(2)?;
        for num in [r - beta, -beta - r] {
            if num % two_a == 0 && !out.contains(&(y, num / two_a)) {
                out.push((y, num / two_a));
            }
        }
    }
    Some(out)
}

fn scan_one_big(lead: &BigInt, mid: &BigInt, tail: &BigInt, cx: &BigInt, t: &BigInt) -> Vec<(BigInt, BigInt)> {
    let yy = t * t;
    let alpha = lead * &yy + mid;
    let gamma = mid * &yy + tail;
    let mut out = Vec::new();
    for y in [t.clone(), -t] {
        let beta = cx * &y;
        for z in integer_roots(&alpha, &beta, &gamma) {
            out.push((y.clone(), z));
        }
    }
    out
}

/// All integral points of a x²y²z² + b(x²y²+x²z²+y²z²) + c xyz + d(x²+y²+z²) + e = 0.
pub fn integral_points_complete(form: &Mk3Form) -> Result<IntegralSolutionSet, IntegralError> {
    for (name, v) in ['a', 'b', 'c', 'd', 'e'].into_iter().zip(form.coeffs()) {
        if v.is_zero() {
            return Err(IntegralError::ZeroCoefficient(name));
        }
    }
    let Mk3Form { a, b, c, d, e } = form;
    let mut raw: Vec<IntPoint> = Vec::new();
    let mut families: Vec<IntegralFamily> = Vec::new();
    let zero = BigInt::zero;

    // x = 0: (by² + d)(bz² + d) = d² − be.
    let rhs = d * d - b * e;
    if rhs.is_zero() {
        let (v2, r) = (-d).div_rem(b);
        if let (true, Some(v)) = (r.is_zero(), perfect_square(&v2)) {
            families.push(IntegralFamily::Line { base: [zero(), v, zero()], direction: [zero(), zero(), BigInt::one()] });
        }
    } else {
        for u in signed_divisors(&rhs)? {
            let w = &rhs / &u;
            let square_from = |f: &BigInt| {
                let (v2, r) = (f - d).div_rem(b);
                if r.is_zero() {
                    perfect_square(&v2)
                } else {
                    None
                }
            };
            if let (Some(y), Some(z)) = (square_from(&u), square_from(&w)) {
                raw.push([zero(), y, z]);
            }
        }
    }

    // xyz ≠ 0 with |x| ≤ |y| ≤ |z|.
    let smax = sorted_min_bound(form);
    let mut s = BigInt::one();
    while s < smax {
        let xx = &s * &s;
        let lead = a * &xx + b;
        let mid = b * &xx + d;
        let tail = d * &xx + e;
        for x in [s.clone(), -s.clone()] {
            let cx = c * &x;
            if lead.is_zero() {
                // p(y² + z²) + q yz = n
                let (p, n) = (mid.clone(), -&tail);
                if p.is_zero() && n.is_zero() {
                    // c·x·yz = 0 forces a zero coordinate, handled above.
                    continue;
                }
                let sol = solve_conic(&p, &cx, &n)?;
                raw.extend(sol.points.into_iter().map(|(y, z)| [x.clone(), y, z]));
                for ([y0, z0], [dy, dz]) in sol.lines {
                    families.push(IntegralFamily::Line { base: [x.clone(), y0, z0], direction: [zero(), dy, dz] });
                }
                if let Some((disc, unit, bases)) = sol.pell {
                    families.push(IntegralFamily::Conic(PellFamily { axis: 0, fixed: x.clone(), p, q: cx, n, disc, unit, bases }));
                }
                continue;
            }
            // Roots satisfy |z| ≤ 1 + (|β|+|γ|)/|α|; with M = |cx| + |mid| this is
            // below |y| once |y| ≥ 2 + (M + |mid| + |tail|)/|lead|.
            let m_sum = cx.abs() + mid.abs();
            let tmax = BigInt::from(2) + (m_sum + mid.abs() + tail.abs()) / lead.abs() + 1;
            for (y, z) in scan_y(&lead, &mid, &tail, &cx, &s, &tmax) {
                raw.push([x.clone(), y, z]);
            }
        }
        s += 1;
    }

    let mut points = BTreeSet::new();
    for p in &raw {
        debug_assert!(form.eval_affine(&p[0], &p[1], &p[2]).is_zero());
        points.extend(symmetric_images(p));
    }
    points.retain(|p| !families.iter().any(|f| symmetric_images(p).iter().any(|q| f.contains(q))));
    Ok(IntegralSolutionSet { points, families })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn completed_square_identity() {
        let f = Mk3Form::new(3, -2, 5, 7, -11);
        let cs = completed_square(&f);
        let s = &f.a * &f.b * &f.d - f.b.pow(3);
        for (x, y, z) in [(1, 2, 3), (-4, 0, 5), (2, -2, 7)] {
            let (x, y, z) = (BigInt::from(x), BigInt::from(y), BigInt::from(z));
            let prod = [&x, &y, &z].iter().map(|v| &f.b * *v * *v + &f.d).product::<BigInt>();
            let sq = BigInt::from(2) * &s * &x * &y * &z + &f.b * &f.c * &f.d;
            let lhs = &cs.scale * prod + &sq * &sq;
            assert_eq!(lhs - &cs.k, &cs.scale * &f.b * &f.d * f.eval_affine(&x, &y, &z));
        }
    }

    #[test]
    fn bound_selection() {
        assert_eq!(enumeration_bound(&Mk3Form::new(1, 1, 1, 1, 1)), BigInt::from(12));
        // |e| < |a| with a large c: 4|c|/|a| wins.
        assert_eq!(enumeration_bound(&Mk3Form::new(10, 1, 100, 1, 5)), BigInt::from(40));
        assert_eq!(enumeration_bound(&Mk3Form::new(1, 1, 1, 1, 10_000)), BigInt::from(200));
    }

    #[test]
    fn pell_unit() {
        assert_eq!(pell_fundamental(&BigInt::from(2)), (BigInt::from(3), BigInt::from(2)));
        assert_eq!(pell_fundamental(&BigInt::from(61)), (BigInt::from(1766319049u64), BigInt::from(226153980u64)));
    }

    #[test]
    fn divisor_lists() {
        let mut ds = divisors(&BigInt::from(-12)).unwrap();
        ds.sort();
        assert_eq!(ds, [1, 2, 3, 4, 6, 12].map(BigInt::from));
    }
}
