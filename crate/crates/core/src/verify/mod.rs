//! Validity oracles for triangle outcomes and exhaustive checks over
//! classical affine strategies.

mod classical;
mod lemma2;
mod parity;
mod support;

pub use classical::{best_affine_success, classical_success_rate, strategy_successes, AffineSuccess, SuccessReport};
pub use lemma2::{lemma2_equalities, lemma2_exhaustive, Lemma2Report};
pub use parity::{check_prop1, parities, parity_masks, ParityTuple};
pub use support::{
    enumerate_support, is_valid, parse as parse_support_file, support_with_tol, Support, SupportCache,
    ValidityReport, MAX_SUPPORT_D,
};
