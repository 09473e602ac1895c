//! Residue arithmetic over Z/2^w Z for arbitrary bit width w.
//!
//! Every value carries its width so one computation can mix several moduli
//! 2^m with m <= w, which the degree solver does when it tightens a
//! candidate one bit at a time. Values are canonical representatives in
//! [0, 2^w), immutable after construction; all operations are pure.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt;
use thiserror::Error;

/// Largest supported modulus exponent.
pub const MAX_WIDTH: u32 = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("width {0} outside supported range [1, {MAX_WIDTH}]")]
    InvalidWidth(u32),
    #[error("cannot parse {0:?} as a residue (decimal or 0x-prefixed hex)")]
    BadLiteral(String),
}

/// Widths must sit in [1, [`MAX_WIDTH`]].
pub fn validate_width(width: u32) -> Result<(), RingError> {
    if width == 0 || width > MAX_WIDTH {
        Err(RingError::InvalidWidth(width))
    } else {
        Ok(())
    }
}

/// The 2-adic valuation of a residue. Zero is divisible by every power of
/// two representable at the value's width, so it gets a dedicated marker
/// instead of a number; the classifier needs to tell "exactly divisible by
/// 2^w" apart from "zero".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }
}

/// A residue modulo 2^width, stored canonically in [0, 2^width).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RingElem {
    value: BigUint,
    width: u32,
}

impl RingElem {
    /// Canonicalizes an unsigned value into [0, 2^width).
    pub fn new(value: BigUint, width: u32) -> Result<Self, RingError> {
        validate_width(width)?;
        Ok(Self {
            value: value & Self::mask(width),
            width,
        })
    }

    /// Canonical representative of a signed integer modulo 2^width.
    pub fn reduce(n: &BigInt, width: u32) -> Result<Self, RingError> {
        validate_width(width)?;
        let modulus = BigInt::from(Self::modulus_for(width));
        let value = n
            .mod_floor(&modulus)
            .to_biguint()
            .expect("mod_floor of a positive modulus is non-negative");
        Ok(Self { value, width })
    }

    pub fn from_u64(value: u64, width: u32) -> Result<Self, RingError> {
        Self::new(BigUint::from(value), width)
    }

    /// Parses a decimal or 0x-prefixed hexadecimal literal, with an
    /// optional leading minus sign.
    pub fn parse(s: &str, width: u32) -> Result<Self, RingError> {
        validate_width(width)?;
        let t = s.trim();
        let (negative, rest) = match t.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, t),
        };
        let magnitude =
            parse_magnitude(rest).ok_or_else(|| RingError::BadLiteral(s.to_string()))?;
        if negative {
            Self::reduce(&-BigInt::from(magnitude), width)
        } else {
            Self::new(magnitude, width)
        }
    }

    fn mask(width: u32) -> BigUint {
        (BigUint::one() << width) - BigUint::one()
    }

    fn modulus_for(width: u32) -> BigUint {
        BigUint::one() << width
    }

    pub fn zero(width: u32) -> Self {
        Self::new(BigUint::zero(), width).expect("valid width")
    }

    pub fn one(width: u32) -> Self {
        Self::new(BigUint::one(), width).expect("valid width")
    }

    /// The residue 2^width - 1, i.e. -1 mod 2^width.
    pub fn minus_one(width: u32) -> Self {
        validate_width(width).expect("valid width");
        Self {
            value: Self::mask(width),
            width,
        }
    }

    /// The residue 2^k mod 2^width (zero when k >= width).
    pub fn pow2(k: u32, width: u32) -> Self {
        if k >= width {
            Self::zero(width)
        } else {
            Self::new(BigUint::one() << k, width).expect("valid width")
        }
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn modulus(&self) -> BigUint {
        Self::modulus_for(self.width)
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.value.is_one()
    }

    pub fn is_minus_one(&self) -> bool {
        self.value == Self::mask(self.width)
    }

    pub fn is_odd(&self) -> bool {
        self.value.is_odd()
    }

    fn assert_same_width(&self, other: &Self) {
        assert_eq!(
            self.width, other.width,
            "ring operation on mismatched widths {} and {}",
            self.width, other.width
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_width(other);
        Self {
            value: (&self.value + &other.value) & Self::mask(self.width),
            width: self.width,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.assert_same_width(other);
        Self {
            value: (&self.value + self.modulus() - &other.value) & Self::mask(self.width),
            width: self.width,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_width(other);
        Self {
            value: (&self.value * &other.value) & Self::mask(self.width),
            width: self.width,
        }
    }

    /// Largest t with 2^t dividing the value; `Infinite` for zero.
    pub fn v2(&self) -> Valuation {
        match self.value.trailing_zeros() {
            Some(t) => Valuation::Finite(t as u32),
            None => Valuation::Infinite,
        }
    }

    /// The same residue reduced at a smaller modulus 2^m.
    pub fn truncate(&self, m: u32) -> Self {
        assert!(
            m >= 1 && m <= self.width,
            "truncation width {m} outside [1, {}]",
            self.width
        );
        Self {
            value: &self.value & Self::mask(m),
            width: m,
        }
    }

    /// Congruence modulo 2^m for m up to the shared width.
    pub fn congruent_mod(&self, other: &Self, m: u32) -> bool {
        self.assert_same_width(other);
        assert!(
            m <= self.width,
            "modulus exponent {m} exceeds width {}",
            self.width
        );
        let mask = Self::mask(m);
        (&self.value & &mask) == (&other.value & &mask)
    }

    /// Low bits as a machine word; only valid when width <= 64.
    pub fn to_u64(&self) -> u64 {
        self.value.to_u64().expect("residue exceeds 64 bits")
    }
}

fn parse_magnitude(s: &str) -> Option<BigUint> {
    if let Some(hex) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        BigUint::parse_bytes(hex.as_bytes(), 16)
    } else if s.is_empty() {
        None
    } else {
        BigUint::parse_bytes(s.as_bytes(), 10)
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Debug for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod 2^{})", self.value, self.width)
    }
}

impl std::ops::Add for &RingElem {
    type Output = RingElem;
    fn add(self, rhs: &RingElem) -> RingElem {
        RingElem::add(self, rhs)
    }
}

impl std::ops::Sub for &RingElem {
    type Output = RingElem;
    fn sub(self, rhs: &RingElem) -> RingElem {
        RingElem::sub(self, rhs)
    }
}

impl std::ops::Mul for &RingElem {
    type Output = RingElem;
    fn mul(self, rhs: &RingElem) -> RingElem {
        RingElem::mul(self, rhs)
    }
}
