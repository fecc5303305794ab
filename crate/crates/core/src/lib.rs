//! Simulation and numerical verification of deviation inequalities for
//! orthomartingale difference random fields.
//!
//! The crate is organised bottom-up: [`lattice`] holds the prefix-sum kernels,
//! [`generators`] samples fields, [`sum_process`] builds the partial-sum
//! process `W_n`, [`holder`] computes Schauder coefficients and sequential
//! Hölder norms, [`bounds`] evaluates the bound right-hand sides and their
//! constants, and [`harness`] runs Monte Carlo experiments producing reports.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod generators;
pub mod harness;
pub mod holder;
pub mod lattice;
pub mod quad;
pub mod rng;
pub mod stats;
pub mod sum_process;

pub use error::{Error, Result};
pub use bounds::{BoundConstants, TailModel};
pub use harness::{ExperimentConfig, Report};
pub use generators::{generate, shift_field, BaseDist, FieldSample, GeneratorSpec, Variant};
pub use lattice::{max_abs_prefix, prefix_sum, rect_sum, LatticeArray, MultiIndex};
pub use holder::{DyadicSite, Modulus, SlowlyVarying};
pub use rng::SeedSpec;
pub use sum_process::PartialSumProcess;
