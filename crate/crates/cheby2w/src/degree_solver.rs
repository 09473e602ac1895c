//! The degree decision problem over Z/2^w Z: given residues x and y, find
//! every degree p with T_p(x) = y mod 2^w.
//!
//! Any p factors as p(l)·2^l with p(l) odd, and
//! T_p(x) = T_{p(l)}(T_{2^l}(x)), so the search runs one reduced problem
//! per shift l in [0, w) against x_l = T_{2^l}(x). Each reduced problem
//! dispatches on the 2-adic form of x_l:
//!
//! - odd-near x_l with level 2 <= k <= w-4: the image of the odd-degree
//!   orbit is the coset x_l + 2^(k+3)·Z, and the offset valuation pins the
//!   degree class r; a candidate q = 2^r + 1 is then lifted one modulus
//!   bit at a time, adding 2^(m-k-2) whenever the congruence mod 2^m
//!   breaks (the degree period law guarantees each correction repairs
//!   exactly the failing bit);
//! - even-form x_l with level k <= w-3: same lift with offsets shifted by
//!   one, starting modulus k+r+2 and correction 2^(m-k-1);
//! - all remaining shapes: T over odd degrees is constant, so either every
//!   odd p(l) works (y = x_l) or none does.
//!
//! The whole scan costs O(w^4) bit operations when a solution exists and
//! O(w^3) when none does: the x_l chain is w squarings and each deep lift
//! is O(w) ladder evaluations.

use crate::chebyshev::{self, ChebDegree};
use crate::residue_forms::{classify, ResidueForm};
use crate::ring2w::RingElem;
use num_bigint::BigUint;
use num_traits::{One, Zero};

/// One reduced-problem answer: at shift l, the odd factor p_l solves
/// T_{p_l}(x_l) = y, so p = p_l·2^l solves the original instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftSolution {
    pub shift: u32,
    pub odd_factor: BigUint,
    /// Every odd factor works at this shift (constant branch with y = x_l);
    /// the stored factor is the representative 1.
    pub all_odd: bool,
    /// Canonical composite degree p_l·2^l reduced mod 2^w.
    pub degree: BigUint,
}

/// Everything the solver recovered for one (x, y) instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSolution {
    pub width: u32,
    /// p = 0 solves, i.e. y = 1 (T_0 is identically 1).
    pub zero_degree_solves: bool,
    /// Per-shift solutions in ascending shift order.
    pub solutions: Vec<ShiftSolution>,
}

impl DegreeSolution {
    pub fn is_empty(&self) -> bool {
        !self.zero_degree_solves && self.solutions.is_empty()
    }

    /// All recovered degrees, zero first when it applies.
    pub fn degrees(&self) -> Vec<BigUint> {
        let mut out = Vec::with_capacity(self.solutions.len() + 1);
        if self.zero_degree_solves {
            out.push(BigUint::zero());
        }
        out.extend(self.solutions.iter().map(|s| s.degree.clone()));
        out
    }

    pub fn first_degree(&self) -> Option<BigUint> {
        self.degrees().into_iter().next()
    }

    pub fn contains_degree(&self, p: &BigUint) -> bool {
        self.degrees().iter().any(|d| d == p)
    }
}

/// Answer to one reduced problem at a fixed shift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedShiftSolution {
    pub odd_factor: BigUint,
    pub all_odd: bool,
}

/// True iff T_p(x) = y mod 2^w.
pub fn verify(x: &RingElem, y: &RingElem, p: &ChebDegree) -> bool {
    chebyshev::eval(p, x) == *y
}

enum LiftCase {
    /// offset 2^(k+r+1) mod 2^(k+r+2), start m = k+r+3, correction 2^(m-k-2)
    OddNear,
    /// offset 2^(k+r) mod 2^(k+r+1), start m = k+r+2, correction 2^(m-k-1)
    EvenForm,
}

fn lift_search(x_l: &RingElem, y: &RingElem, k: u32, case: LiftCase) -> Option<FixedShiftSolution> {
    if y == x_l {
        return Some(FixedShiftSolution {
            odd_factor: BigUint::one(),
            all_odd: false,
        });
    }
    let w = x_l.width();
    let diff = y.sub(x_l);
    let v = diff.v2().finite().expect("y != x_l");
    // the image offset has valuation k+r+1 (odd-near) or k+r (even form)
    // with r >= 2; anything shallower is unreachable by odd degrees
    let (offset_gap, start_gap, corr_gap) = match case {
        LiftCase::OddNear => (1u32, 3u32, 2u32),
        LiftCase::EvenForm => (0, 2, 1),
    };
    if v < k + offset_gap + 2 {
        return None;
    }
    let r = v - k - offset_gap;
    let mut q = (BigUint::one() << r) + 1u32;
    let mut m = k + r + start_gap;
    while m <= w {
        let t = chebyshev::eval(&ChebDegree::new(q.clone()), x_l);
        if !t.congruent_mod(y, m) {
            q += BigUint::one() << (m - k - corr_gap);
        }
        #[cfg(debug_assertions)]
        {
            let lifted = chebyshev::eval(&ChebDegree::new(q.clone()), x_l);
            debug_assert!(
                lifted.congruent_mod(y, m),
                "lift lost the congruence at level {m} (x_l={x_l}, y={y})"
            );
        }
        m += 1;
    }
    // the loop may not have run at all when k+r+start_gap > w, so settle
    // the candidate at the full modulus
    let candidate = ChebDegree::new(q.clone());
    if chebyshev::eval(&candidate, x_l) == *y {
        Some(FixedShiftSolution {
            odd_factor: q,
            all_odd: false,
        })
    } else {
        None
    }
}

/// Solves the reduced problem: an odd p_l with T_{p_l}(x_l) = y mod 2^w,
/// or `None` when no odd degree can work.
pub fn solve_fixed_shift(x_l: &RingElem, y: &RingElem) -> Option<FixedShiftSolution> {
    let w = x_l.width();
    assert_eq!(w, y.width(), "solver inputs must share a width");
    assert!(w >= 5, "solver requires width >= 5");
    match classify(x_l) {
        ResidueForm::OddNear { k, .. } if k + 4 <= w => lift_search(x_l, y, k, LiftCase::OddNear),
        ResidueForm::EvenForm { k, .. } if k + 3 <= w => lift_search(x_l, y, k, LiftCase::EvenForm),
        _ => {
            // T over odd degrees is constant here
            if y == x_l {
                Some(FixedShiftSolution {
                    odd_factor: BigUint::one(),
                    all_odd: true,
                })
            } else {
                None
            }
        }
    }
}

fn solve_impl(x: &RingElem, y: &RingElem, stop_at_first: bool) -> DegreeSolution {
    let w = x.width();
    assert_eq!(w, y.width(), "solver inputs must share a width");
    assert!(w >= 5, "solver requires width >= 5");
    let zero_degree_solves = y.is_one();
    let mut solutions = Vec::new();
    let mut x_l = x.clone();
    let one = RingElem::one(w);
    for shift in 0..w {
        if let Some(found) = solve_fixed_shift(&x_l, y) {
            let degree = RingElem::new(found.odd_factor.clone() << shift, w)
                .expect("valid width")
                .value()
                .clone();
            // soundness gate: a candidate that does not verify would be a
            // bug in the lift, never a legitimate output
            assert!(
                verify(x, y, &ChebDegree::new(degree.clone())),
                "solver produced non-verifying degree {degree} for x={x}, y={y}, w={w}"
            );
            solutions.push(ShiftSolution {
                shift,
                odd_factor: found.odd_factor,
                all_odd: found.all_odd,
                degree,
            });
            if stop_at_first {
                break;
            }
        }
        let sq = x_l.mul(&x_l);
        x_l = sq.add(&sq).sub(&one); // x_{l+1} = T_2(x_l)
    }
    DegreeSolution {
        width: w,
        zero_degree_solves,
        solutions,
    }
}

/// Scans every shift l in [0, w) and reports all per-shift solutions.
pub fn solve(x: &RingElem, y: &RingElem) -> DegreeSolution {
    solve_impl(x, y, false)
}

/// Early-exit variant: stops at the first verified shift solution.
pub fn solve_any(x: &RingElem, y: &RingElem) -> DegreeSolution {
    solve_impl(x, y, true)
}
