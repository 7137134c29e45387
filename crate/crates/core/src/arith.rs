//! Integer utilities shared by the local and global modules: sieving,
//! trial division, modular powers, square roots mod p and a Pocklington
//! primality certificate for cofactors left over by trial division.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Largest trial divisor used when factoring.
pub const TRIAL_DIVISION_BOUND: u64 = 10_000_000;

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    // Deterministic Miller-Rabin for 64-bit inputs.
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Legendre symbol for an odd prime `p`, via Euler's criterion.
pub fn legendre_u64(a: i128, p: u64) -> i8 {
    let r = a.rem_euclid(p as i128) as u64;
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

pub fn legendre_big(a: &BigInt, p: &BigInt) -> i8 {
    let r = a.mod_floor(p);
    if r.is_zero() {
        return 0;
    }
    let e = (p - 1u32) >> 1;
    if r.modpow(&e, p).is_one() {
        1
    } else {
        -1
    }
}

/// Square root of `a` modulo an odd prime `p` (Tonelli-Shanks).
pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

pub fn perfect_square(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Exponent of the prime `p` in a nonzero integer.
pub fn valuation(n: &BigInt, p: &BigInt) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let mut v = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
}

/// Valuation capped at `cap`, with zero reported as `cap`.
pub fn valuation_capped(n: &BigInt, p: &BigInt, cap: u32) -> u32 {
    valuation(n, p).map_or(cap, |v| v.min(cap))
}

/// Result of factoring by trial division: the factored part and the
/// cofactor that still needs attention (1 when fully factored).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialFactorization {
    pub factors: Vec<(BigInt, u32)>,
    pub cofactor: BigInt,
}

pub fn trial_factor(n: &BigInt, primes: &[u64]) -> TrialFactorization {
    let mut m = n.abs();
    let mut factors = Vec::new();
    for &p in primes {
        if m.is_one() {
            break;
        }
        let pb = BigInt::from(p);
        if &pb * &pb > m {
            factors.push((m.clone(), 1));
            m = BigInt::one();
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = m.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            m = q;
            e += 1;
        }
        if e > 0 {
            factors.push((pb, e));
        }
    }
    TrialFactorization { factors, cofactor: m }
}

/// How a prime factor beyond the trial bound was certified.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub enum PrimalityProof {
    /// Below the square of the trial bound, so trial division suffices.
    TrialBound,
    /// Pocklington: base `a` with the fully factored part `f` of n-1.
    Pocklington {
        #[serde(with = "crate::serde_big::bigint")]
        base: BigInt,
        #[serde(with = "crate::serde_big::bigint")]
        factored_part: BigInt,
    },
}

/// Pocklington's test. Returns `Some(proof)` if `n` is proven prime,
/// `None` if the test is inconclusive or `n` is composite.
pub fn pocklington(n: &BigInt, primes: &[u64]) -> Option<PrimalityProof> {
    let two = BigInt::from(2);
    if *n < two {
        return None;
    }
    let nm1 = n - 1u32;
    let tf = trial_factor(&nm1, primes);
    // Every entry of `tf.factors` is prime; the cofactor is ignored.
    let mut f = BigInt::one();
    let mut qs = Vec::new();
    for (q, e) in &tf.factors {
        f *= q.pow(*e);
        qs.push(q.clone());
    }
    if &f * &f <= *n {
        return None;
    }
    for base in 2u32..200 {
        let a = BigInt::from(base);
        if !a.modpow(&nm1, n).is_one() {
            return None;
        }
        let ok = qs.iter().all(|q| {
            let t = a.modpow(&(&nm1 / q), n) - 1u32;
            t.gcd(n).is_one()
        });
        if ok {
            return Some(PrimalityProof::Pocklington {
                base: a,
                factored_part: f,
            });
        }
    }
    None
}

/// Full factorization with every prime certified, or the cofactor that
/// could not be handled.
pub fn factor_certified(n: &BigInt, primes: &[u64]) -> Result<Vec<(BigInt, u32, PrimalityProof)>, BigInt> {
    let tf = trial_factor(n, primes);
    let bound = BigInt::from(*primes.last().unwrap_or(&2));
    let mut out: Vec<(BigInt, u32, PrimalityProof)> = tf
        .factors
        .into_iter()
        .map(|(p, e)| (p, e, PrimalityProof::TrialBound))
        .collect();
    if !tf.cofactor.is_one() {
        if tf.cofactor < &bound * &bound {
            out.push((tf.cofactor, 1, PrimalityProof::TrialBound));
        } else if let Some(proof) = pocklington(&tf.cofactor, primes) {
            out.push((tf.cofactor, 1, proof));
        } else {
            return Err(tf.cofactor);
        }
    }
    Ok(out)
}

/// Square-free kernel with sign, e.g. 468 -> 13, -8 -> -2.
pub fn squarefree_part(n: &BigInt, primes: &[u64]) -> Result<BigInt, BigInt> {
    let factors = factor_certified(n, primes)?;
    let mut out = if n.sign() == Sign::Minus { -BigInt::one() } else { BigInt::one() };
    for (p, e, _) in factors {
        if e % 2 == 1 {
            out *= p;
        }
    }
    Ok(out)
}

pub fn to_u64(n: &BigInt) -> Option<u64> {
    n.to_u64()
}
