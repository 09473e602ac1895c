//! Chebyshev polynomials and generalized permutation polynomials over the
//! ring Z/2^w Z.
//!
//! The crate provides:
//!
//! - [`ring2w`] — residue arithmetic modulo 2^w for arbitrary width,
//!   including 2-adic valuations;
//! - [`chebyshev`] — T_n(x) mod 2^w by a logarithmic pair ladder, plus a
//!   linear-recurrence oracle and iteration via T_p^i = T_{p^i};
//! - [`residue_forms`] — the 2-adic normal forms (2A-1)·2^k ± 1 and
//!   (2A-1)·2^k, and the closed-form orbital/degree period laws with
//!   brute-force oracles;
//! - [`degree_solver`] — given x and y, recover every degree p with
//!   T_p(x) = y mod 2^w in O(w^4) bit operations;
//! - [`perm_generic`] — the permutation-polynomial coefficient criterion,
//!   iterate oracles for F^j, and the bit-lifting search for j with
//!   F^j(x) = y;
//! - [`kex_sim`] — the commutative-polynomial key exchange and the passive
//!   eavesdropper that recovers the shared key from public values;
//! - [`verification`] — exhaustive and randomized sweeps checking the
//!   closed-form period laws and their supporting congruence lemmas;
//! - [`cli`] — the `cheby2w` command line tool.

pub mod chebyshev;
pub mod cli;
pub mod degree_solver;
pub mod kex_sim;
pub mod perm_generic;
pub mod residue_forms;
pub mod ring2w;
pub mod verification;

pub use chebyshev::ChebDegree;
pub use degree_solver::DegreeSolution;
pub use kex_sim::Transcript;
pub use perm_generic::{IterOracle, PermPoly};
pub use residue_forms::ResidueForm;
pub use ring2w::{RingElem, Valuation};
