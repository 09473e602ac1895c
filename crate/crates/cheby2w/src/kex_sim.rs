//! Key exchange with commuting Chebyshev maps over Z/2^w Z, and the
//! passive attack that recovers the shared key from public values alone.
//!
//! Protocol: both parties hold secret odd degrees a and b; from a public
//! base x they exchange y_a = T_a(x) and y_b = T_b(x) and settle on
//! key = T_a(y_b) = T_b(y_a) (the two compositions agree because
//! T_m∘T_n = T_{mn}). An eavesdropper needs no secret: any degree p with
//! T_p(x) = y_a satisfies T_p(y_b) = T_b(T_p(x)) = T_b(y_a) = key, and the
//! degree solver hands one over.
//!
//! There is no transport layer: a protocol run is three pure evaluations
//! producing a transcript value.

use crate::chebyshev::{self, ChebDegree};
use crate::degree_solver;
use crate::ring2w::{RingElem, RingError};
use num_bigint::{BigUint, RandBigInt};
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KexError {
    #[error("secret degrees must be odd (even degrees do not permute the ring)")]
    EvenSecret,
    #[error("no degree maps the base to the first message; transcript is not an honest run")]
    UnsolvableTranscript,
    #[error("malformed transcript: {0}")]
    BadTranscript(String),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// The public view of one protocol run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub width: u32,
    pub base: RingElem,
    pub alice_msg: RingElem,
    pub bob_msg: RingElem,
}

impl Transcript {
    /// Single-line JSON: {"w":..,"x":"..","ya":"..","yb":".."} with
    /// decimal string values.
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "w": self.width,
            "x": self.base.to_string(),
            "ya": self.alice_msg.to_string(),
            "yb": self.bob_msg.to_string(),
        })
        .to_string()
    }

    pub fn from_json(s: &str) -> Result<Self, KexError> {
        let value: serde_json::Value =
            serde_json::from_str(s).map_err(|e| KexError::BadTranscript(e.to_string()))?;
        let width = value["w"]
            .as_u64()
            .ok_or_else(|| KexError::BadTranscript("missing width".into()))?
            as u32;
        let field = |name: &str| -> Result<RingElem, KexError> {
            let raw = value[name]
                .as_str()
                .ok_or_else(|| KexError::BadTranscript(format!("missing {name}")))?;
            RingElem::parse(raw, width).map_err(KexError::from)
        };
        Ok(Self {
            width,
            base: field("x")?,
            alice_msg: field("ya")?,
            bob_msg: field("yb")?,
        })
    }
}

/// Deterministic secret sampling: a uniform odd degree in [3, 2^w).
pub fn keygen(seed: u64, width: u32) -> ChebDegree {
    assert!(width >= 5, "keygen requires width >= 5");
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    sample_secret(&mut rng, width)
}

/// Uniform odd degree in [3, 2^w) from a caller-supplied source.
pub fn sample_secret<R: Rng + ?Sized>(rng: &mut R, width: u32) -> ChebDegree {
    let half = BigUint::one() << (width - 1);
    let t = rng.gen_biguint_range(&BigUint::one(), &half);
    ChebDegree::new((t << 1) + 1u32)
}

/// Base-point shapes for [`sample_base`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseKind {
    /// Form (2A-1)·2^2 ± 1 — an odd base at the lowest level, where the
    /// degree decision problem is at its hardest.
    OddNear,
    /// An even base (2A-1)·2, level 1.
    Even,
    /// One of the fixed points 0, 1, 2^w - 1.
    Degenerate,
}

/// Draws a public base point of the requested shape.
pub fn sample_base<R: Rng + ?Sized>(rng: &mut R, width: u32, kind: BaseKind) -> RingElem {
    assert!(width >= 5, "base sampling requires width >= 5");
    let raw = rng.gen_biguint(width as u64);
    match kind {
        BaseKind::OddNear => {
            let low: u64 = if rng.gen() { 3 } else { 5 }; // = 2^2 ± 1 mod 8
            RingElem::new((raw >> 3u32 << 3u32) | BigUint::from(low), width).expect("valid width")
        }
        BaseKind::Even => {
            RingElem::new((raw >> 2u32 << 2u32) | BigUint::from(2u32), width).expect("valid width")
        }
        BaseKind::Degenerate => match rng.gen_range(0..3u8) {
            0 => RingElem::zero(width),
            1 => RingElem::one(width),
            _ => RingElem::minus_one(width),
        },
    }
}

/// One honest run: messages and the shared key both parties compute.
pub fn protocol_run(
    base: &RingElem,
    alice_secret: &ChebDegree,
    bob_secret: &ChebDegree,
) -> Result<(Transcript, RingElem), KexError> {
    if !alice_secret.is_odd() || !bob_secret.is_odd() {
        return Err(KexError::EvenSecret);
    }
    let alice_msg = chebyshev::eval(alice_secret, base);
    let bob_msg = chebyshev::eval(bob_secret, base);
    let key_alice = chebyshev::eval(alice_secret, &bob_msg);
    let key_bob = chebyshev::eval(bob_secret, &alice_msg);
    assert_eq!(key_alice, key_bob, "commuting maps must agree on the key");
    Ok((
        Transcript {
            width: base.width(),
            base: base.clone(),
            alice_msg,
            bob_msg,
        },
        key_alice,
    ))
}

/// Recovers the shared key from the public transcript.
pub fn eavesdrop(transcript: &Transcript) -> Result<RingElem, KexError> {
    let solution = degree_solver::solve_any(&transcript.base, &transcript.alice_msg);
    let degree = solution
        .first_degree()
        .ok_or(KexError::UnsolvableTranscript)?;
    Ok(chebyshev::eval(
        &ChebDegree::new(degree),
        &transcript.bob_msg,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;

    fn re(v: u64, w: u32) -> RingElem {
        RingElem::from_u64(v, w).unwrap()
    }

    fn deg(n: u64) -> ChebDegree {
        ChebDegree::from_u64(n)
    }

    #[test]
    fn keygen_is_deterministic_odd_and_in_range() {
        for seed in 0..50u64 {
            let a = keygen(seed, 8);
            let b = keygen(seed, 8);
            assert_eq!(a, b);
            assert!(a.is_odd());
            assert!(a.value() >= &BigUint::from(3u32));
            assert!(a.value() < &(BigUint::one() << 8));
        }
    }

    #[test]
    fn keygen_seeds_spread_out() {
        let degrees: std::collections::HashSet<_> = (0..1000u64)
            .map(|s| keygen(s, 64).value().clone())
            .collect();
        assert_eq!(degrees.len(), 1000, "seed collisions at width 64");
    }

    #[test]
    fn identity_degrees_leak_the_base() {
        let (t, key) = protocol_run(&re(42, 8), &deg(1), &deg(1)).unwrap();
        assert_eq!(key, re(42, 8));
        assert_eq!(t.alice_msg, re(42, 8));
    }

    #[test]
    fn worked_protocol_instance() {
        // x = 7, a = 13, b = 3 at width 11: the shared key is
        // T_13(T_3(7)) = T_39(7) = 1415, and Alice's message is
        // T_13(7) = 1607 (frozen from the recurrence oracle)
        let (t, key) = protocol_run(&re(7, 11), &deg(13), &deg(3)).unwrap();
        assert_eq!(t.alice_msg, re(1607, 11));
        assert_eq!(t.bob_msg, re(1351, 11)); // T_3(7) = 4·343 - 21
        assert_eq!(key, re(1415, 11));
        assert_eq!(key, chebyshev::eval(&deg(39), &re(7, 11)));
        let recovered = eavesdrop(&t).unwrap();
        assert_eq!(recovered, key);
    }

    #[test]
    fn even_secret_rejected() {
        assert_eq!(
            protocol_run(&re(7, 11), &deg(4), &deg(3)),
            Err(KexError::EvenSecret)
        );
    }

    #[test]
    fn both_parties_agree_at_large_width() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..20 {
            let base = sample_base(&mut rng, 32, BaseKind::OddNear);
            let a = sample_secret(&mut rng, 32);
            let b = sample_secret(&mut rng, 32);
            let (_, key) = protocol_run(&base, &a, &b).unwrap();
            // recompute both ways
            let ya = chebyshev::eval(&a, &base);
            let yb = chebyshev::eval(&b, &base);
            assert_eq!(chebyshev::eval(&a, &yb), key);
            assert_eq!(chebyshev::eval(&b, &ya), key);
        }
    }

    #[test]
    fn eavesdropper_recovers_keys_end_to_end() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        for i in 0..50 {
            let kind = match i % 3 {
                0 => BaseKind::OddNear,
                1 => BaseKind::Even,
                _ => BaseKind::Degenerate,
            };
            let base = sample_base(&mut rng, 64, kind);
            let a = sample_secret(&mut rng, 64);
            let b = sample_secret(&mut rng, 64);
            let (t, key) = protocol_run(&base, &a, &b).unwrap();
            assert_eq!(eavesdrop(&t).unwrap(), key, "run {i} base {base}");
        }
    }

    #[test]
    fn alice_identity_secret_recovery() {
        let (t, key) = protocol_run(&re(19, 9), &deg(1), &deg(7)).unwrap();
        assert_eq!(key, t.bob_msg);
        assert_eq!(eavesdrop(&t).unwrap(), t.bob_msg);
    }

    #[test]
    fn base_kinds_have_the_advertised_shape() {
        use crate::residue_forms::{classify, ResidueForm};
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        for _ in 0..100 {
            match classify(&sample_base(&mut rng, 16, BaseKind::OddNear)) {
                ResidueForm::OddNear { k: 2, .. } => {}
                other => panic!("expected level-2 odd-near base, got {other:?}"),
            }
            match classify(&sample_base(&mut rng, 16, BaseKind::Even)) {
                ResidueForm::EvenForm { k: 1, .. } => {}
                other => panic!("expected level-1 even base, got {other:?}"),
            }
            assert!(classify(&sample_base(&mut rng, 16, BaseKind::Degenerate)).is_fixed_point());
        }
    }

    #[test]
    fn transcript_json_round_trip() {
        let (t, _) = protocol_run(&re(7, 11), &deg(13), &deg(3)).unwrap();
        let line = t.to_json();
        assert_eq!(line, r#"{"w":11,"x":"7","ya":"1607","yb":"1351"}"#);
        assert!(!line.contains('\n'));
        assert_eq!(Transcript::from_json(&line).unwrap(), t);
        assert!(Transcript::from_json("{}").is_err());
        assert!(Transcript::from_json("not json").is_err());
    }
}
