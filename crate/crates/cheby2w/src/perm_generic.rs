//! Generalized permutation polynomials over Z/2^w Z: the coefficient
//! criterion, iterate oracles for F^j, and the bit-lifting search for an
//! iteration count j with F^j(x) = y mod 2^w.
//!
//! A polynomial a_0 + a_1 X + ... + a_d X^d permutes Z/2^w Z exactly when
//! a_1 is odd and the tail sums a_2 + a_4 + ... and a_3 + a_5 + ... are
//! both even. Such maps lift congruences: F(x + 2^m) = F(x) + 2^m mod
//! 2^(m+1), which is what makes the bit-by-bit search work.

use crate::chebyshev::{self, ChebDegree};
use crate::ring2w::{RingElem, RingError};
use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use thiserror::Error;

/// Widest modulus a table oracle will precompute (w·2^w entries).
pub const TABLE_WIDTH_LIMIT: u32 = 22;

/// Iteration budget of the direct (repeated-application) oracle.
pub const DIRECT_CAP: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("coefficients fail the permutation criterion (a1 odd, even/odd tail sums even)")]
    NotPermutation,
    #[error("table oracle supports width <= {TABLE_WIDTH_LIMIT}, got {0}")]
    TableWidthTooLarge(u32),
    #[error("direct oracle iteration capped at {DIRECT_CAP}, got {0}")]
    DirectBudgetExceeded(BigUint),
    #[error("modulus exponent {m} outside [1, {w}]")]
    BadModulusExponent { m: u32, w: u32 },
    #[error("closed-form oracle needs an odd base degree (even degrees are not bijections)")]
    EvenBaseDegree,
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// True iff the coefficient list (constant term first) defines a
/// permutation of Z/2^w Z, for any w >= 2. The criterion reads parities
/// only, so the width does not enter the test itself.
pub fn is_permutation_poly(coeffs: &[BigInt], _width: u32) -> bool {
    let odd = |i: usize| coeffs.get(i).map(|c| c.is_odd()).unwrap_or(false);
    let a1_odd = odd(1);
    let even_tail = (2..coeffs.len())
        .step_by(2)
        .fold(false, |acc, i| acc ^ odd(i));
    let odd_tail = (3..coeffs.len())
        .step_by(2)
        .fold(false, |acc, i| acc ^ odd(i));
    a1_odd && !even_tail && !odd_tail
}

/// A validated permutation polynomial over Z/2^w Z, coefficients stored
/// canonically (constant term first, trailing zeros trimmed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermPoly {
    coeffs: Vec<BigUint>,
    width: u32,
}

impl PermPoly {
    pub fn new(coeffs: &[BigInt], width: u32) -> Result<Self, PermError> {
        if !is_permutation_poly(coeffs, width) {
            return Err(PermError::NotPermutation);
        }
        let mut reduced = coeffs
            .iter()
            .map(|c| Ok(RingElem::reduce(c, width)?.value().clone()))
            .collect::<Result<Vec<_>, PermError>>()?;
        while reduced.len() > 2 && reduced.last().map(Zero::is_zero).unwrap_or(false) {
            reduced.pop();
        }
        Ok(Self {
            coeffs: reduced,
            width,
        })
    }

    /// Uniform random permutation polynomial of the given degree: draw
    /// coefficients, force a_1 odd, then repair the two tail parities.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, degree: usize, width: u32) -> Self {
        assert!(degree >= 1, "a permutation polynomial has degree >= 1");
        let modulus = BigUint::one() << width;
        let mut coeffs: Vec<BigUint> = (0..=degree)
            .map(|_| rng.gen_biguint_below(&modulus))
            .collect();
        coeffs[1].set_bit(0, true);
        let parity = |cs: &[BigUint], start: usize| {
            cs.iter()
                .skip(start)
                .step_by(2)
                .fold(false, |acc, c| acc ^ c.bit(0))
        };
        if parity(&coeffs, 2) {
            let c = &mut coeffs[2];
            c.set_bit(0, !c.bit(0));
        }
        if degree >= 3 && parity(&coeffs, 3) {
            let c = &mut coeffs[3];
            c.set_bit(0, !c.bit(0));
        }
        let signed: Vec<BigInt> = coeffs.iter().map(|c| BigInt::from(c.clone())).collect();
        Self::new(&signed, width).expect("repaired coefficients satisfy the criterion")
    }

    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Horner evaluation mod 2^width.
    pub fn eval(&self, x: &RingElem) -> RingElem {
        assert_eq!(x.width(), self.width, "point width mismatch");
        let mask = RingElem::minus_one(self.width).value().clone();
        let xv = x.value();
        let mut acc = BigUint::zero();
        for c in self.coeffs.iter().rev() {
            acc = (&acc * xv + c) & &mask;
        }
        RingElem::new(acc, self.width).expect("valid width")
    }

    fn coeffs_u64(&self) -> Vec<u64> {
        self.coeffs
            .iter()
            .map(|c| c.to_u64().expect("table widths fit u64"))
            .collect()
    }
}

/// Lookup tables of F^(2^l) for l in [0, w): O(w) table hits evaluate any
/// F^j at a point.
#[derive(Debug, Clone)]
pub struct TableOracle {
    width: u32,
    tables: Vec<Vec<u32>>,
}

impl TableOracle {
    pub fn build(poly: &PermPoly) -> Result<Self, PermError> {
        let w = poly.width();
        if w > TABLE_WIDTH_LIMIT {
            return Err(PermError::TableWidthTooLarge(w));
        }
        let size = 1usize << w;
        let mask = (size - 1) as u64;
        let coeffs = poly.coeffs_u64();
        let mut base = vec![0u32; size];
        for (x, slot) in base.iter_mut().enumerate() {
            let mut acc = 0u64;
            for &c in coeffs.iter().rev() {
                acc = (acc.wrapping_mul(x as u64).wrapping_add(c)) & mask;
            }
            *slot = acc as u32;
        }
        let mut tables = Vec::with_capacity(w as usize);
        tables.push(base);
        for _ in 1..w {
            let prev = tables.last().expect("nonempty");
            let next: Vec<u32> = (0..size).map(|x| prev[prev[x] as usize]).collect();
            tables.push(next);
        }
        Ok(Self { width: w, tables })
    }

    fn apply_bits(&self, j: &BigUint, x: u32) -> u32 {
        // bits at positions >= w are dropped: the permutation's order
        // divides 2^w, so this is exactly reduction of j mod 2^w
        let mut v = x;
        for l in 0..self.width {
            if j.bit(l as u64) {
                v = self.tables[l as usize][v as usize];
            }
        }
        v
    }
}

/// An evaluator for iterates F^j(x) mod 2^m of a permutation polynomial.
#[derive(Debug, Clone)]
pub enum IterOracle {
    /// F = T_c for an odd base degree c, so F^j = T_{c^j}; exponents
    /// reduce mod 2^(w-1) through the degree period law.
    ClosedFormCheb { base: ChebDegree, width: u32 },
    /// Precomputed permutation tables of F^(2^l); width <= 22.
    Table(TableOracle),
    /// Repeated application; test-only, j capped at 2^20.
    Direct(PermPoly),
}

impl IterOracle {
    pub fn closed_form_chebyshev(base: ChebDegree, width: u32) -> Result<Self, PermError> {
        if !base.is_odd() {
            return Err(PermError::EvenBaseDegree);
        }
        crate::ring2w::validate_width(width)?;
        Ok(Self::ClosedFormCheb { base, width })
    }

    pub fn table(poly: &PermPoly) -> Result<Self, PermError> {
        Ok(Self::Table(TableOracle::build(poly)?))
    }

    pub fn direct(poly: PermPoly) -> Self {
        Self::Direct(poly)
    }

    pub fn width(&self) -> u32 {
        match self {
            Self::ClosedFormCheb { width, .. } => *width,
            Self::Table(t) => t.width,
            Self::Direct(p) => p.width(),
        }
    }

    /// F^j(x) mod 2^m for any iterate count j and any m <= w.
    pub fn eval(&self, j: &BigUint, x: &RingElem, m: u32) -> Result<RingElem, PermError> {
        let w = self.width();
        if m == 0 || m > w {
            return Err(PermError::BadModulusExponent { m, w });
        }
        assert_eq!(x.width(), w, "point width mismatch");
        let full = match self {
            Self::ClosedFormCheb { base, .. } => {
                let reduced_width = w.max(2) - 1;
                let e = base.value().modpow(j, &(BigUint::one() << reduced_width));
                chebyshev::eval(&ChebDegree::new(e), x)
            }
            Self::Table(t) => {
                let v = t.apply_bits(j, x.value().to_u32().expect("width <= 22"));
                RingElem::from_u64(v as u64, w)?
            }
            Self::Direct(poly) => {
                let steps = j
                    .to_u64()
                    .filter(|&s| s <= DIRECT_CAP)
                    .ok_or_else(|| PermError::DirectBudgetExceeded(j.clone()))?;
                let mut v = x.clone();
                for _ in 0..steps {
                    v = poly.eval(&v);
                }
                v
            }
        };
        Ok(full.truncate(m))
    }
}

/// Oracle-call accounting for the attack.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AttackStats {
    pub oracle_calls: u64,
    pub lifts_accepted: u64,
}

/// Finds j with F^j(x) = y mod 2^w, or `None` when no integer j exists.
///
/// Bit-lifting search: keep the frontier value F^j(x); while it disagrees
/// with y, measure the agreement level m_j and probe F^(2^l) applied to
/// the frontier for the smallest l (never decreasing across the run) that
/// repairs bit m_j; if even l = w-1 cannot, the instance is unsolvable.
/// Costs O(w) oracle applications.
pub fn generic_attack_with_stats(
    oracle: &IterOracle,
    x: &RingElem,
    y: &RingElem,
) -> Result<(Option<BigUint>, AttackStats), PermError> {
    let w = oracle.width();
    assert_eq!(x.width(), w, "attack inputs must match the oracle width");
    assert_eq!(y.width(), w, "attack inputs must match the oracle width");
    let mut stats = AttackStats::default();
    let mut j = BigUint::zero();
    let mut l: u32 = 0;
    let mut frontier = x.clone(); // F^j(x) at full width
    loop {
        if frontier == *y {
            // orbit periods divide 2^w, so the canonical answer is j mod
            // 2^w; re-verify it from scratch rather than trusting algebra
            let reduced = RingElem::new(j.clone(), w)?.value().clone();
            stats.oracle_calls += 1;
            if oracle.eval(&reduced, x, w)? == *y {
                return Ok((Some(reduced), stats));
            }
            return Ok((Some(j), stats));
        }
        let gap = y.sub(&frontier);
        let m_j = gap.v2().finite().expect("frontier != y");
        loop {
            let stepped = oracle.eval(&(BigUint::one() << l), &frontier, w)?;
            stats.oracle_calls += 1;
            if stepped.congruent_mod(y, m_j + 1) {
                j += BigUint::one() << l;
                frontier = stepped;
                stats.lifts_accepted += 1;
                break;
            }
            if l == w - 1 {
                return Ok((None, stats));
            }
            l += 1;
        }
    }
}

pub fn generic_attack(
    oracle: &IterOracle,
    x: &RingElem,
    y: &RingElem,
) -> Result<Option<BigUint>, PermError> {
    generic_attack_with_stats(oracle, x, y).map(|(j, _)| j)
}

/// Least j < bound with F^j(x) = y, by stepping the orbit. Oracle path.
pub fn brute_iterate_log(
    oracle: &IterOracle,
    x: &RingElem,
    y: &RingElem,
    bound: u64,
) -> Result<Option<u64>, PermError> {
    if bound > DIRECT_CAP {
        return Err(PermError::DirectBudgetExceeded(BigUint::from(bound)));
    }
    let w = oracle.width();
    let one = BigUint::one();
    let mut v = x.clone();
    for j in 0..bound {
        if v == *y {
            return Ok(Some(j));
        }
        v = oracle.eval(&one, &v, w)?;
    }
    Ok(None)
}
