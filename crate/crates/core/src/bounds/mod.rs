//! Deviation-bound right-hand sides, their constants, and lemma checkers.

pub mod constants;
pub mod lemmas;
pub mod rhs;
pub mod tail;

pub use constants::{base_constants, i_integral, recurse_constants, BoundConstants, LevelConstants};
pub use lemmas::{
    cond_wip_check, exponent_fit, lemma3_moment_sum, lemma_svarying_partial_sum, ExponentFit,
    Lemma3Check, SeriesCheck, SvaryingCheck,
};
pub use rhs::{bounded_rhs, thm1_rhs, thm2_rhs, BoundedRhs, Thm2Rhs};
pub use tail::TailModel;
