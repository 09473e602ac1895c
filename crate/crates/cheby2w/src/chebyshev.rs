//! Chebyshev polynomial evaluation over Z/2^w Z.
//!
//! T_0 = 1, T_1 = X, T_{m+1} = 2X·T_m - T_{m-1}. The semigroup law
//! T_m∘T_n = T_{mn} and the product identity
//! 2·T_m·T_n = T_{m+n} + T_{m-n} hold over any commutative ring, so they
//! survive reduction mod 2^w; everything here leans on them.
//!
//! [`eval`] is the production path: an MSB-first ladder on the pair
//! (T_m, T_{m+1}) that needs O(log n) ring multiplications, i.e. O(w^3)
//! bit operations for w-bit degrees. [`eval_naive`] is the linear
//! recurrence, kept as an independent oracle for tests.

use crate::ring2w::RingElem;
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use thiserror::Error;

/// Degrees above this are refused by the naive recurrence.
pub const NAIVE_DEGREE_LIMIT: u64 = 1_000_000;

/// Iteration-count cap for [`iterate`] with an even base degree, where the
/// exponent p^i must be formed exactly.
pub const ITERATE_CAP: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChebError {
    #[error("naive evaluation supports degrees up to {NAIVE_DEGREE_LIMIT}, got {0}")]
    NaiveDegreeTooLarge(BigUint),
    #[error("iterating an even degree is capped at {ITERATE_CAP} rounds, got {0}")]
    IterateCapExceeded(u64),
}

/// A Chebyshev polynomial degree, canonicalized to a non-negative integer
/// via T_{-n} = T_n.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChebDegree(BigUint);

impl ChebDegree {
    pub fn new(n: BigUint) -> Self {
        Self(n)
    }

    /// Signed constructor; negative degrees fold onto their mirror image.
    pub fn from_int(n: &BigInt) -> Self {
        Self(n.abs().to_biguint().expect("abs is non-negative"))
    }

    pub fn from_u64(n: u64) -> Self {
        Self(BigUint::from(n))
    }

    /// Parses a decimal or 0x-prefixed hex degree; a leading minus sign is
    /// accepted and folded away.
    pub fn parse(s: &str) -> Option<Self> {
        let t = s.trim();
        let rest = t.strip_prefix('-').unwrap_or(t);
        let magnitude =
            if let Some(hex) = rest.strip_prefix("0x").or_else(|| rest.strip_prefix("0X")) {
                BigUint::parse_bytes(hex.as_bytes(), 16)?
            } else if rest.is_empty() {
                return None;
            } else {
                BigUint::parse_bytes(rest.as_bytes(), 10)?
            };
        Some(Self(magnitude))
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_odd(&self) -> bool {
        self.0.bit(0)
    }
}

impl fmt::Display for ChebDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for ChebDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T_{}", self.0)
    }
}

impl From<u64> for ChebDegree {
    fn from(n: u64) -> Self {
        Self::from_u64(n)
    }
}

/// T_n(x) mod 2^w by the three-term recurrence. Oracle path: linear in n.
pub fn eval_naive(n: &ChebDegree, x: &RingElem) -> Result<RingElem, ChebError> {
    let steps = match n.value().to_u64() {
        Some(s) if s <= NAIVE_DEGREE_LIMIT => s,
        _ => return Err(ChebError::NaiveDegreeTooLarge(n.value().clone())),
    };
    let w = x.width();
    let mask = RingElem::minus_one(w).value().clone();
    let modulus = &mask + 1u32;
    let xv = x.value();
    let mut prev = BigUint::one() & &mask; // T_0
    if steps == 0 {
        return Ok(RingElem::new(prev, w).expect("valid width"));
    }
    let mut cur = xv.clone(); // T_1
    for _ in 1..steps {
        let next = (((xv * &cur) << 1) + &modulus - &prev) & &mask;
        prev = cur;
        cur = next;
    }
    Ok(RingElem::new(cur, w).expect("valid width"))
}

/// T_n(x) mod 2^w in O(log n) ring multiplications.
///
/// Walks the bits of n most significant first, carrying the pair
/// (T_m, T_{m+1}): a 0 bit maps it to (T_{2m}, T_{2m+1}) and a 1 bit to
/// (T_{2m+1}, T_{2m+2}), using T_{2m} = 2T_m^2 - 1 and
/// T_{2m+1} = 2·T_m·T_{m+1} - x.
pub fn eval(n: &ChebDegree, x: &RingElem) -> RingElem {
    let w = x.width();
    if n.is_zero() {
        return RingElem::one(w);
    }
    let mask = RingElem::minus_one(w).value().clone();
    let modulus = &mask + 1u32;
    let xv = x.value();
    let dbl = |a: &BigUint| (((a * a) << 1) + &modulus - 1u32) & &mask;
    let cross = |a: &BigUint, b: &BigUint| (((a * b) << 1) + &modulus - xv) & &mask;
    let nv = n.value();
    let mut lo = BigUint::one() & &mask; // T_m, starting at m = 0
    let mut hi = xv.clone(); // T_{m+1}
    for i in (0..nv.bits()).rev() {
        if nv.bit(i) {
            let t = cross(&lo, &hi);
            hi = dbl(&hi);
            lo = t;
        } else {
            let t = cross(&lo, &hi);
            lo = dbl(&lo);
            hi = t;
        }
    }
    RingElem::new(lo, w).expect("valid width")
}

/// The i-th iterate T_p^i(x) = T_{p^i}(x) mod 2^w.
///
/// For odd p the exponent is reduced mod 2^(w-1): every degree period
/// divides 2^(w-1), and the reduction preserves oddness, so the reduced
/// degree evaluates identically. Even p gets the exact exponent, with the
/// iteration count capped.
pub fn iterate(p: &ChebDegree, i: u64, x: &RingElem) -> Result<RingElem, ChebError> {
    let w = x.width();
    let exponent = if p.is_odd() {
        let reduced_width = w.max(2) - 1;
        p.value()
            .modpow(&BigUint::from(i), &(BigUint::one() << reduced_width))
    } else {
        if i > ITERATE_CAP {
            return Err(ChebError::IterateCapExceeded(i));
        }
        p.value().pow(i as u32)
    };
    Ok(eval(&ChebDegree::new(exponent), x))
}
