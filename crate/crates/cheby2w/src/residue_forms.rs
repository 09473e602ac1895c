//! 2-adic normal forms of residues and the period laws of odd-degree
//! Chebyshev maps.
//!
//! Every residue mod 2^w falls in exactly one bucket: the three fixed
//! points 0, 1, 2^w - 1; the odd-near form (2A-1)·2^k ± 1 with k >= 2; or
//! the even form (2A-1)·2^k with k >= 1. The level k alone drives both
//! period laws, and degrees classify with the same routine as arguments.
//!
//! Closed forms are paired with brute-force oracles (direct orbit walking,
//! direct degree-sequence scanning) so the laws can be machine checked.

use crate::chebyshev::{self, ChebDegree};
use crate::ring2w::RingElem;
use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

/// Widest modulus the brute-force orbit walk will touch (budget 2^w steps).
pub const ORBIT_BRUTE_MAX_WIDTH: u32 = 24;

/// Widest modulus the brute-force degree-sequence scan will touch.
pub const DEGREE_BRUTE_MAX_WIDTH: u32 = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PeriodError {
    #[error("orbital periods are defined for odd degrees only")]
    EvenDegree,
    #[error("brute-force search supports width <= {limit}, got {width}")]
    WidthTooLarge { width: u32, limit: u32 },
    #[error("orbit walk exhausted its 2^{0} budget; the map cannot be a bijection")]
    BudgetExhausted(u32),
}

/// The 2-adic shape of a residue.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ResidueForm {
    FixedZero,
    FixedOne,
    FixedMinusOne,
    /// x = (2a-1)·2^k + sign with 2a-1 odd, k >= 2 and sign = ±1.
    OddNear {
        a: BigUint,
        k: u32,
        sign: i8,
    },
    /// x = (2a-1)·2^k with 2a-1 odd and k >= 1.
    EvenForm {
        a: BigUint,
        k: u32,
    },
}

impl ResidueForm {
    /// The 2-adic level k, when the form has one.
    pub fn level(&self) -> Option<u32> {
        match self {
            ResidueForm::OddNear { k, .. } | ResidueForm::EvenForm { k, .. } => Some(*k),
            _ => None,
        }
    }

    pub fn is_fixed_point(&self) -> bool {
        matches!(
            self,
            ResidueForm::FixedZero | ResidueForm::FixedOne | ResidueForm::FixedMinusOne
        )
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ResidueForm::FixedZero => "fixed_zero",
            ResidueForm::FixedOne => "fixed_one",
            ResidueForm::FixedMinusOne => "fixed_minus_one",
            ResidueForm::OddNear { .. } => "odd_near",
            ResidueForm::EvenForm { .. } => "even_form",
        }
    }

    /// Rebuilds the residue the form describes.
    pub fn reconstruct(&self, width: u32) -> RingElem {
        match self {
            ResidueForm::FixedZero => RingElem::zero(width),
            ResidueForm::FixedOne => RingElem::one(width),
            ResidueForm::FixedMinusOne => RingElem::minus_one(width),
            ResidueForm::OddNear { a, k, sign } => {
                let base = RingElem::new(((a << 1u32) - 1u32) << *k, width).expect("valid width");
                let one = RingElem::one(width);
                if *sign >= 0 {
                    base.add(&one)
                } else {
                    base.sub(&one)
                }
            }
            ResidueForm::EvenForm { a, k } => {
                RingElem::new(((a << 1u32) - 1u32) << *k, width).expect("valid width")
            }
        }
    }
}

/// Splits a residue into its 2-adic normal form. Total on [0, 2^w).
///
/// For odd x other than ±1 exactly one of x-1, x+1 has valuation >= 2
/// (they differ by 2), which picks the sign; the level is that valuation.
pub fn classify(x: &RingElem) -> ResidueForm {
    if x.is_zero() {
        return ResidueForm::FixedZero;
    }
    if x.is_one() {
        return ResidueForm::FixedOne;
    }
    if x.is_minus_one() {
        return ResidueForm::FixedMinusOne;
    }
    let v = x.value();
    let t = v.trailing_zeros().expect("nonzero") as u32;
    if t > 0 {
        let odd = v >> t;
        return ResidueForm::EvenForm {
            a: (&odd + 1u32) >> 1,
            k: t,
        };
    }
    // odd, not ±1: both neighbours stay inside [0, 2^w) here
    let down = v - 1u32;
    let up = v + 1u32;
    let kd = down.trailing_zeros().expect("nonzero") as u32;
    let ku = up.trailing_zeros().expect("nonzero") as u32;
    if kd >= ku {
        let m = down >> kd;
        ResidueForm::OddNear {
            a: (&m + 1u32) >> 1,
            k: kd,
            sign: 1,
        }
    } else {
        let m = up >> ku;
        ResidueForm::OddNear {
            a: (&m + 1u32) >> 1,
            k: ku,
            sign: -1,
        }
    }
}

/// Classifies a degree exactly like an argument: reduce mod 2^w first.
pub fn classify_degree(p: &ChebDegree, width: u32) -> ResidueForm {
    classify(&RingElem::new(p.value().clone(), width).expect("valid width"))
}

fn pow2_or_one(width: u32, spent: u32) -> BigUint {
    if width > spent {
        BigUint::one() << (width - spent)
    } else {
        BigUint::one()
    }
}

/// Closed-form orbital period of the map T_p at starting point x.
///
/// 1 when p = ±1 mod 2^w or x is a fixed point; otherwise with r the level
/// of p and k the level of x: max(2^(w-k-r-1), 1) for odd-near x and
/// max(2^(w-k-r), 1) for even-form x.
pub fn orbital_period_closed(x: &RingElem, p: &ChebDegree) -> Result<BigUint, PeriodError> {
    if !p.is_odd() {
        return Err(PeriodError::EvenDegree);
    }
    let w = x.width();
    if classify(x).is_fixed_point() {
        return Ok(BigUint::one());
    }
    let r = match classify_degree(p, w) {
        ResidueForm::FixedOne | ResidueForm::FixedMinusOne => return Ok(BigUint::one()),
        ResidueForm::OddNear { k, .. } => k,
        // p is odd, so its reduction is odd
        ResidueForm::FixedZero | ResidueForm::EvenForm { .. } => unreachable!("odd degree"),
    };
    Ok(match classify(x) {
        ResidueForm::OddNear { k, .. } => pow2_or_one(w, k + r + 1),
        ResidueForm::EvenForm { k, .. } => pow2_or_one(w, k + r),
        _ => unreachable!("fixed points handled above"),
    })
}

/// Orbital period by walking the orbit until it returns. Oracle path.
pub fn orbital_period_brute(x: &RingElem, p: &ChebDegree) -> Result<BigUint, PeriodError> {
    if !p.is_odd() {
        return Err(PeriodError::EvenDegree);
    }
    let w = x.width();
    if w > ORBIT_BRUTE_MAX_WIDTH {
        return Err(PeriodError::WidthTooLarge {
            width: w,
            limit: ORBIT_BRUTE_MAX_WIDTH,
        });
    }
    let budget = 1u64 << w;
    let mut y = chebyshev::eval(p, x);
    let mut steps = 1u64;
    while y != *x {
        y = chebyshev::eval(p, &y);
        steps += 1;
        if steps > budget {
            return Err(PeriodError::BudgetExhausted(w));
        }
    }
    Ok(BigUint::from(steps))
}

/// Closed-form degree period: the least even d with T_{p+d}(x) = T_p(x)
/// mod 2^w for every odd p.
///
/// 2^(w-k-1) for odd-near x with 2 <= k <= w-4, 2^(w-k) for even-form x
/// with k <= w-3, and 2 otherwise — at boundary levels the congruence
/// offsets 2^(k+r+1) (resp. 2^(k+r)) already vanish mod 2^w for every
/// degree class r >= 2, so the value is constant over odd degrees.
pub fn degree_period_closed(x: &RingElem) -> BigUint {
    let w = x.width();
    debug_assert!(w >= 5, "degree period law needs width >= 5");
    match classify(x) {
        ResidueForm::OddNear { k, .. } if k + 4 <= w => BigUint::one() << (w - k - 1),
        ResidueForm::EvenForm { k, .. } if k + 3 <= w => BigUint::one() << (w - k),
        _ => BigUint::from(2u32),
    }
}

/// Degree period by scanning the sequence s_i = T_{2i+1}(x) over a full
/// half-modulus window and taking its least power-of-two period. Oracle
/// path, width <= 16.
pub fn degree_period_brute(x: &RingElem) -> BigUint {
    let w = x.width();
    assert!(
        (2..=DEGREE_BRUTE_MAX_WIDTH).contains(&w),
        "degree-sequence scan supports widths 2..={DEGREE_BRUTE_MAX_WIDTH}, got {w}"
    );
    let len = 1usize << (w - 1);
    let mask = (1u64 << w) - 1;
    let modulus = 1u64 << w;
    let xv = x.to_u64();
    let t2 = (2 * xv * xv + modulus - 1) & mask;
    let t3 = (2 * t2 * xv + modulus - xv) & mask;
    let mut seq = Vec::with_capacity(len);
    let (mut a, mut b) = (xv, t3); // T_{2i+1}, T_{2i+3}
    for _ in 0..len {
        seq.push(a);
        let next = (2 * t2 * b + modulus - a) & mask;
        a = b;
        b = next;
    }
    // the sequence wraps with period len, so its least period is a power
    // of two dividing len; scan candidates upward
    let mut period = 1usize;
    loop {
        if (0..len).all(|i| seq[i] == seq[(i + period) & (len - 1)]) {
            return BigUint::from(2 * period as u64);
        }
        period <<= 1;
        assert!(period <= len, "no power-of-two degree period at width {w}");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::RandBigInt;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn re(v: u64, w: u32) -> RingElem {
        RingElem::from_u64(v, w).unwrap()
    }

    fn deg(n: u64) -> ChebDegree {
        ChebDegree::from_u64(n)
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify(&re(5, 7)),
            ResidueForm::OddNear {
                a: big(1),
                k: 2,
                sign: 1
            }
        );
        assert_eq!(
            classify(&re(97, 11)),
            ResidueForm::OddNear {
                a: big(2),
                k: 5,
                sign: 1
            }
        );
        assert_eq!(classify(&re(0, 8)), ResidueForm::FixedZero);
        assert_eq!(
            classify(&re(12, 8)),
            ResidueForm::EvenForm { a: big(2), k: 2 }
        );
        assert_eq!(
            classify(&re(7, 11)),
            ResidueForm::OddNear {
                a: big(1),
                k: 3,
                sign: -1
            }
        );
        assert_eq!(classify(&re(255, 8)), ResidueForm::FixedMinusOne);
    }

    #[test]
    fn classification_partitions_and_reconstructs() {
        for w in 3..=12u32 {
            let mut counts = [0usize; 5];
            for v in 0..1u64 << w {
                let x = re(v, w);
                let form = classify(&x);
                counts[match form {
                    ResidueForm::FixedZero => 0,
                    ResidueForm::FixedOne => 1,
                    ResidueForm::FixedMinusOne => 2,
                    ResidueForm::OddNear { k, .. } => {
                        assert!((2..w).contains(&k), "x={v} w={w}");
                        3
                    }
                    ResidueForm::EvenForm { k, .. } => {
                        assert!((1..w).contains(&k), "x={v} w={w}");
                        4
                    }
                }] += 1;
                assert_eq!(form.reconstruct(w), x, "x={v} w={w}");
            }
            assert_eq!(counts[0] + counts[1] + counts[2], 3);
            assert_eq!(
                counts[3],
                (1 << (w - 1)) - 2,
                "odd non-fixed count at w={w}"
            );
            assert_eq!(counts[4], (1 << (w - 1)) - 1, "even nonzero count at w={w}");
        }
    }

    #[test]
    fn orbital_period_closed_examples() {
        assert_eq!(orbital_period_closed(&re(5, 7), &deg(3)).unwrap(), big(4));
        assert_eq!(orbital_period_closed(&re(1, 10), &deg(3)).unwrap(), big(1));
        assert_eq!(
            orbital_period_closed(&re(12, 10), &deg(5)).unwrap(),
            big(64)
        );
        assert_eq!(orbital_period_closed(&re(5, 7), &deg(1)).unwrap(), big(1));
        assert!(matches!(
            orbital_period_closed(&re(5, 7), &deg(4)),
            Err(PeriodError::EvenDegree)
        ));
    }

    #[test]
    fn orbital_period_brute_examples() {
        assert_eq!(orbital_period_brute(&re(5, 7), &deg(3)).unwrap(), big(4));
        assert_eq!(orbital_period_brute(&re(0, 8), &deg(9)).unwrap(), big(1));
        assert_eq!(orbital_period_brute(&re(12, 10), &deg(5)).unwrap(), big(64));
        assert!(matches!(
            orbital_period_brute(&re(1, 25), &deg(3)),
            Err(PeriodError::WidthTooLarge { .. })
        ));
    }

    #[test]
    fn degree_period_examples() {
        assert_eq!(degree_period_closed(&re(5, 6)), big(8));
        assert_eq!(degree_period_closed(&re(1, 10)), big(2));
        assert_eq!(degree_period_closed(&re(12, 10)), big(256));
        assert_eq!(degree_period_brute(&re(5, 6)), big(8));
        assert_eq!(degree_period_brute(&re(0, 8)), big(2));
        assert_eq!(degree_period_brute(&re(12, 10)), big(256));
        assert_eq!(degree_period_brute(&re(513, 10)), big(2)); // 2^9 + 1 folds to "otherwise"
    }

    #[test]
    fn degree_period_is_genuine_beyond_the_window() {
        // the closed form must keep holding for degrees past 2^(w-1); the
        // ladder never reduces its input degree, so this is an independent
        // check of the wraparound the brute scan assumes
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let w = rng.gen_range(5..=12u32);
            let x = RingElem::new(rng.gen_biguint(w as u64), w).unwrap();
            let d = degree_period_closed(&x);
            let p = rng.gen_range(0..1u64 << (w + 2)) | 1;
            let shifted = ChebDegree::new(BigUint::from(p) + &d);
            assert_eq!(
                chebyshev::eval(&deg(p), &x),
                chebyshev::eval(&shifted, &x),
                "x={x} w={w} p={p} d={d}"
            );
        }
    }

    #[test]
    fn degree_period_sharpness() {
        // in-range forms: half the period must fail for some odd degree
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut tested = 0;
        while tested < 200 {
            let w = rng.gen_range(6..=12u32);
            let x = RingElem::new(rng.gen_biguint(w as u64), w).unwrap();
            let in_range = match classify(&x) {
                ResidueForm::OddNear { k, .. } => k + 4 <= w,
                ResidueForm::EvenForm { k, .. } => k + 3 <= w,
                _ => false,
            };
            if !in_range {
                continue;
            }
            let half: BigUint = degree_period_closed(&x) >> 1;
            let found = (0..64u64).map(|i| 2 * i + 1).any(|p| {
                let shifted = ChebDegree::new(BigUint::from(p) + &half);
                chebyshev::eval(&deg(p), &x) != chebyshev::eval(&shifted, &x)
            });
            assert!(found, "degree period at x={x} w={w} is not sharp");
            tested += 1;
        }
    }

    #[test]
    fn closed_forms_match_brute_oracles_smoke() {
        let report = crate::verification::orbital_law_exhaustive(6, 1);
        assert_eq!(report.mismatches, 0);
        assert_eq!(report.cells, 64 * 32);
        let report = crate::verification::degree_law_exhaustive(6);
        assert_eq!(report.mismatches, 0);
        assert_eq!(report.cells, 64);
    }

    #[test]
    fn closed_form_matches_brute_on_random_larger_widths() {
        for &w in &[10u32, 12, 14, 16] {
            let report = crate::verification::orbital_law_random(w, 1000, 0xC0FFEE + w as u64);
            assert_eq!(report.mismatches, 0, "width {w}");
            assert_eq!(report.cells, 1000);
        }
    }
}
