//! Relative divergence of grading functions on finite posets.
//!
//! A *grading function* on a poset is an order-comonotonic real assignment:
//! it never decreases along a cover edge of the Hasse diagram. The
//! *relative divergence* of a grading `F` from a null grading `G` along a
//! chain is
//!
//! ```text
//! D(F‖G) = −Σ_k f_k ln(f_k / g_k)
//! ```
//!
//! over the per-edge increments `f_k`, `g_k` of the two functions, with the
//! 0·ln 0 = 0 convention and natural logarithms (nats) throughout. With
//! unit null increments this is the Shannon entropy of the increments; on
//! partition weights it is the negated Kullback–Leibler form.
//!
//! Divergence composes with poset structure:
//!
//! - serially over concatenated [l-g] blocks, by summation
//!   ([`divergence::rd_blocks_serial`]);
//! - in parallel over even-sided split chains, by an infimum over maximal
//!   chains ([`divergence::rd_even_sided`]) — power sets under inclusion
//!   and direct products of chains ("bundles") are the two generated
//!   families here;
//! - additively over bundle components when both gradings are separable
//!   ([`divergence::rd_bundle_separable`]).
//!
//! On top of evaluation, [`solve`] carries closed-form *maximum relative
//! divergence* solvers: among admissible gradings with a fixed value range,
//! prefer the one with the greatest divergence from the null. Every solver
//! is paired with an independent brute-force check in [`oracle`], and
//! [`apps`] wires the solvers into two end-to-end drivers (group-testing
//! cost updating and multi-queue batch costing).
//!
//! ```
//! use mrd_core::{power_set_poset, natural_gf, validate_grading};
//! use mrd_core::divergence::rd_even_sided;
//! use mrd_core::grading::additive_subset_values;
//!
//! let ground = ["a".into(), "b".into(), "c".into()];
//! let poset = power_set_poset(&ground)?;
//! let atoms = [("a".into(), 0.2), ("b".into(), 0.3), ("c".into(), 0.5)];
//! let f = validate_grading(&poset, &additive_subset_values(&atoms)?, false)?;
//! let g = natural_gf(&poset)?; // subset cardinality
//! let rd = rd_even_sided(&poset, &f, &g)?;
//! assert!((rd.value - 1.0296530140645737).abs() < 1e-10);
//! # Ok::<(), mrd_core::Error>(())
//! ```

#![forbid(unsafe_code)]

pub mod apps;
pub mod divergence;
pub mod error;
pub mod grading;
pub mod io;
pub mod oracle;
pub mod poset;
pub mod solve;

pub use error::{Error, Result};
pub use grading::{
    increments_along, natural_gf, normalize, validate_grading, GradingFunction,
    IncrementSequence,
};
pub use poset::{
    bundle_poset, power_set_poset, Chain, ChainBundle, ElementId, Poset, PosetClassification,
    VectorIndex,
};
