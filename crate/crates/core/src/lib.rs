//! Overlap functions `O(x, y) = ϑ(θ(x) + θ(y))` built from additive generator
//! pairs: construction, validation against generator conditions, a
//! brute-force axiom oracle, overlap-preserving transforms and a collision
//! falsifier for non-affine generator changes.
//!
//! ```
//! use overlap_gen::axioms::check_axioms;
//! use overlap_gen::fixtures::product_pair;
//! use overlap_gen::genfn::ProbeConfig;
//! use overlap_gen::pair::validate_pair;
//!
//! let p = product_pair();
//! assert!(validate_pair(&p, &ProbeConfig::default()).is_valid());
//! assert!(check_axioms(&p, 65, 1e-9).all_pass());
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::redundant_guards)]

pub mod axioms;
pub mod cli;
pub mod fixtures;
pub mod genfn;
pub mod pair;
pub mod report;
pub mod spec_file;
pub mod transform;
pub mod xreal;

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/xreal.md")]
    mod xreal {}
    #[doc = include_str!("../../../book/src/generators.md")]
    mod generators {}
    #[doc = include_str!("../../../book/src/pairs.md")]
    mod pairs {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/transforms.md")]
    mod transforms {}
    #[doc = include_str!("../../../book/src/falsification.md")]
    mod falsification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
