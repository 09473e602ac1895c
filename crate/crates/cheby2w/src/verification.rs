//! Machine checks of the period laws and the congruence lemmas behind
//! them: exhaustive sweeps at small widths, seeded random sweeps above,
//! and single-case checkers that property tests and the acceptance suite
//! drive with their own generators.

use crate::chebyshev::{self, ChebDegree};
use crate::degree_solver;
use crate::perm_generic::{IterOracle, PermError, PermPoly};
use crate::residue_forms::{
    classify, degree_period_brute, degree_period_closed, orbital_period_brute,
    orbital_period_closed, ResidueForm,
};
use crate::ring2w::RingElem;
use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcome of one closed-form-versus-brute-force sweep.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SweepReport {
    pub cells: u64,
    pub mismatches: u64,
}

impl SweepReport {
    pub fn clean(&self) -> bool {
        self.cells > 0 && self.mismatches == 0
    }

    pub fn absorb(&mut self, other: SweepReport) {
        self.cells += other.cells;
        self.mismatches += other.mismatches;
    }
}

fn orbital_cell_matches(x: &RingElem, p: &ChebDegree) -> bool {
    let closed = orbital_period_closed(x, p).expect("odd degree");
    let brute = orbital_period_brute(x, p).expect("odd degree, small width");
    closed == brute
}

/// Closed-form orbital periods against brute-force orbits for every
/// x in [0, 2^w) and every odd degree in [1, 2^w).
pub fn orbital_law_exhaustive(width: u32, threads: usize) -> SweepReport {
    assert!(
        (3..=10).contains(&width),
        "exhaustive orbital sweep supports widths 3..=10"
    );
    let threads = threads.max(1);
    let size = 1u64 << width;
    let sweep_chunk = |x_from: u64, x_to: u64| -> SweepReport {
        let mut report = SweepReport::default();
        for xv in x_from..x_to {
            let x = RingElem::from_u64(xv, width).expect("valid width");
            for pv in (1..size).step_by(2) {
                let p = ChebDegree::from_u64(pv);
                report.cells += 1;
                if !orbital_cell_matches(&x, &p) {
                    report.mismatches += 1;
                }
            }
        }
        report
    };
    if threads == 1 {
        return sweep_chunk(0, size);
    }
    let chunk = size.div_ceil(threads as u64);
    let mut report = SweepReport::default();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads as u64)
            .map(|t| {
                let from = (t * chunk).min(size);
                let to = ((t + 1) * chunk).min(size);
                scope.spawn(move || sweep_chunk(from, to))
            })
            .collect();
        for handle in handles {
            report.absorb(handle.join().expect("sweep worker panicked"));
        }
    });
    report
}

/// Random (x, odd p) cells at larger widths, seeded for reproducibility.
pub fn orbital_law_random(width: u32, samples: u64, seed: u64) -> SweepReport {
    assert!(width <= crate::residue_forms::ORBIT_BRUTE_MAX_WIDTH);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SweepReport::default();
    for _ in 0..samples {
        let x = RingElem::new(rng.gen_biguint(width as u64), width).expect("valid width");
        let p = ChebDegree::new(rng.gen_biguint(width as u64) | BigUint::one());
        report.cells += 1;
        if !orbital_cell_matches(&x, &p) {
            report.mismatches += 1;
        }
    }
    report
}

/// Closed-form degree periods against full sequence scans for every x.
pub fn degree_law_exhaustive(width: u32) -> SweepReport {
    assert!(
        (5..=12).contains(&width),
        "exhaustive degree sweep supports widths 5..=12"
    );
    let mut report = SweepReport::default();
    for xv in 0..1u64 << width {
        let x = RingElem::from_u64(xv, width).expect("valid width");
        report.cells += 1;
        if degree_period_closed(&x) != degree_period_brute(&x) {
            report.mismatches += 1;
        }
    }
    report
}

/// Random-x degree-period cells for widths where the full scan is too wide.
pub fn degree_law_random(width: u32, samples: u64, seed: u64) -> SweepReport {
    assert!((5..=crate::residue_forms::DEGREE_BRUTE_MAX_WIDTH).contains(&width));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SweepReport::default();
    for _ in 0..samples {
        let x = RingElem::new(rng.gen_biguint(width as u64), width).expect("valid width");
        report.cells += 1;
        if degree_period_closed(&x) != degree_period_brute(&x) {
            report.mismatches += 1;
        }
    }
    report
}

/// T_{2^r}(x) = 1 mod 2^(k+r+2) for forms at level k. `None` when the
/// premise cannot be posed (fixed point, or the modulus outgrows w).
pub fn power_of_two_degree_collapses(x: &RingElem, r: u32) -> Option<bool> {
    if r < 2 {
        return None;
    }
    let k = classify(x).level()?;
    let exp = k + r + 2;
    if exp > x.width() {
        return None;
    }
    let lhs = chebyshev::eval(&ChebDegree::new(BigUint::one() << r), x);
    Some(lhs.congruent_mod(&RingElem::one(x.width()), exp))
}

/// T_{(2B-1)·2^r ± 1}(x) = x + 2^(k+r+1) mod 2^(k+r+2) for odd-near x,
/// and x + 2^(k+r) mod 2^(k+r+1) for even-form x.
pub fn near_power_degree_translates(
    x: &RingElem,
    b: &BigUint,
    r: u32,
    degree_sign: i8,
) -> Option<bool> {
    if r < 2 || b.is_zero() {
        return None;
    }
    let w = x.width();
    let offset_exp = match classify(x) {
        ResidueForm::OddNear { k, .. } => k + r + 1,
        ResidueForm::EvenForm { k, .. } => k + r,
        _ => return None,
    };
    if offset_exp + 1 > w {
        return None;
    }
    let stem = ((b << 1u32) - 1u32) << r;
    let degree = ChebDegree::new(if degree_sign >= 0 {
        &stem + 1u32
    } else {
        &stem - 1u32
    });
    let lhs = chebyshev::eval(&degree, x);
    let rhs = x.add(&RingElem::pow2(offset_exp, w));
    Some(lhs.congruent_mod(&rhs, offset_exp + 1))
}

/// When T_p(x) = x + 2^m mod 2^(m+1), the orbit of x under T_p is exactly
/// the coset {x + t·2^m}. `None` when T_p fixes x at this width or the
/// coset is too large to enumerate.
pub fn orbit_fills_coset(p: &ChebDegree, x: &RingElem) -> Option<bool> {
    const ENUM_BUDGET_BITS: u32 = 14;
    let w = x.width();
    let first = chebyshev::eval(p, x);
    let m = first.sub(x).v2().finite()?;
    if w - m > ENUM_BUDGET_BITS {
        return None;
    }
    let count = 1u64 << (w - m);
    let mut orbit: Vec<BigUint> = Vec::with_capacity(count as usize);
    let mut point = x.clone();
    for _ in 0..count {
        orbit.push(point.value().clone());
        point = chebyshev::eval(p, &point);
    }
    let step = RingElem::pow2(m, w);
    let mut coset: Vec<BigUint> = Vec::with_capacity(count as usize);
    let mut offset = x.clone();
    for _ in 0..count {
        coset.push(offset.value().clone());
        offset = offset.add(&step);
    }
    orbit.sort_unstable();
    coset.sort_unstable();
    Some(orbit == coset)
}

/// a = b mod 2^s forces a^(2^t) = b^(2^t) mod 2^(s+t); b is built from the
/// lift so the premise holds by construction.
pub fn congruent_power_lift_holds(a: &BigUint, lift: &BigUint, s: u32, t: u32) -> bool {
    let b = a + (lift << s);
    let modulus = BigUint::one() << (s + t);
    let exponent = BigUint::one() << t;
    a.modpow(&exponent, &modulus) == b.modpow(&exponent, &modulus)
}

/// Permutation polynomials translate residue classes:
/// P(x + 2^m) = P(x) + 2^m mod 2^(m+1).
pub fn lifting_holds(poly: &PermPoly, x: &RingElem, m: u32) -> bool {
    let w = poly.width();
    assert!(m >= 1 && m < w, "lifting level m must sit in [1, w)");
    let shifted = x.add(&RingElem::pow2(m, w));
    let lhs = poly.eval(&shifted);
    let rhs = poly.eval(x).add(&RingElem::pow2(m, w));
    lhs.congruent_mod(&rhs, m + 1)
}

/// Whenever y = F^j(x) mod 2^m, some l <= m has y = F^(j+2^l)(x) mod 2^m.
pub fn step_exists_at_some_level(
    oracle: &IterOracle,
    x: &RingElem,
    j: &BigUint,
    m: u32,
) -> Result<bool, PermError> {
    let w = oracle.width();
    assert!(m <= w);
    let y = oracle.eval(j, x, w)?;
    for l in 0..=m {
        let candidate = oracle.eval(&(j + (BigUint::one() << l)), x, w)?;
        if candidate.congruent_mod(&y, m) {
            return Ok(true);
        }
    }
    Ok(false)
}

fn minimal_step_level(
    oracle: &IterOracle,
    x: &RingElem,
    y: &RingElem,
    j: &BigUint,
    m: u32,
) -> Result<Option<u32>, PermError> {
    let w = oracle.width();
    for l in 0..=m {
        let candidate = oracle.eval(&(j + (BigUint::one() << l)), x, w)?;
        if candidate.congruent_mod(y, m) {
            return Ok(Some(l));
        }
    }
    Ok(None)
}

/// With l minimal as in the step lemma, every j' solving the instance one
/// bit deeper is congruent to j mod 2^l. Enumerates all j' < 2^w, so keep
/// the width small. `None` when the premises fail or no j' exists.
pub fn deeper_solutions_align(
    oracle: &IterOracle,
    x: &RingElem,
    y: &RingElem,
    j: &BigUint,
    m: u32,
) -> Result<Option<bool>, PermError> {
    let w = oracle.width();
    assert!(m < w, "needs headroom for mod 2^(m+1)");
    if !oracle.eval(j, x, w)?.congruent_mod(y, m) {
        return Ok(None);
    }
    let Some(l) = minimal_step_level(oracle, x, y, j, m)? else {
        return Ok(None);
    };
    let align = BigUint::one() << l;
    let mut found_deeper = false;
    for jv in 0..1u64 << w {
        let j_prime = BigUint::from(jv);
        if oracle.eval(&j_prime, x, w)?.congruent_mod(y, m + 1) {
            found_deeper = true;
            let diff_ok = (&j_prime % &align) == (j % &align);
            if !diff_ok {
                return Ok(Some(false));
            }
        }
    }
    Ok(if found_deeper { Some(true) } else { None })
}

/// When y = F^j(x) + 2^m mod 2^(m+1) and the instance is solvable one bit
/// deeper at all, stepping by the minimal 2^l solves it:
/// y = F^(j+2^l)(x) mod 2^(m+1). `None` when premises fail.
pub fn minimal_step_repairs_bit(
    oracle: &IterOracle,
    x: &RingElem,
    y: &RingElem,
    j: &BigUint,
    m: u32,
) -> Result<Option<bool>, PermError> {
    let w = oracle.width();
    assert!(m < w, "needs headroom for mod 2^(m+1)");
    let at_j = oracle.eval(j, x, w)?;
    let expected = at_j.add(&RingElem::pow2(m, w));
    if !expected.congruent_mod(y, m + 1) {
        return Ok(None); // premise y = F^j(x) + 2^m mod 2^(m+1) fails
    }
    let Some(l) = minimal_step_level(oracle, x, y, j, m)? else {
        return Ok(None);
    };
    let mut solvable_deeper = false;
    for jv in 0..1u64 << w {
        if oracle
            .eval(&BigUint::from(jv), x, w)?
            .congruent_mod(y, m + 1)
        {
            solvable_deeper = true;
            break;
        }
    }
    if !solvable_deeper {
        return Ok(None);
    }
    let stepped = oracle.eval(&(j + (BigUint::one() << l)), x, w)?;
    Ok(Some(stepped.congruent_mod(y, m + 1)))
}

/// The attack and the degree solver agree on solvability when F = T_3.
pub fn attack_agrees_with_degree_solver(
    width: u32,
    samples: u64,
    seed: u64,
) -> Result<SweepReport, PermError> {
    let oracle = IterOracle::closed_form_chebyshev(ChebDegree::from_u64(3), width)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SweepReport::default();
    for _ in 0..samples {
        let x = RingElem::new(rng.gen_biguint(width as u64), width).expect("valid width");
        let j = rng.gen_range(0..1u64 << width.min(20));
        let y = oracle.eval(&BigUint::from(j), &x, width)?;
        report.cells += 1;
        let attack_found = generic_attack_finds(&oracle, &x, &y)?;
        let solver_found = !degree_solver::solve_any(&x, &y).is_empty();
        if !(attack_found && solver_found) {
            report.mismatches += 1;
        }
    }
    Ok(report)
}

fn generic_attack_finds(
    oracle: &IterOracle,
    x: &RingElem,
    y: &RingElem,
) -> Result<bool, PermError> {
    Ok(crate::perm_generic::generic_attack(oracle, x, y)?.is_some())
}
