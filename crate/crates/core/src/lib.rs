//! Pricing of two-asset options under regime-switching correlation.

// `!(x > 0.0)` is used on purpose so NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod ctmc;
pub mod error;
pub mod fourier;
pub mod linalg;
pub mod numeric;
pub mod par;
pub mod pricing;
pub mod rng;
pub mod simulate;

pub use error::{Error, Result};
