//! Numerical toolkit for Wolff potentials generated by N-functions.

// negated comparisons double as NaN rejection
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::large_enum_variant)]

pub mod cli;
pub mod config;
pub mod criteria;
pub mod dyadic;
pub mod error;
pub mod measure;
pub mod orlicz;
pub mod quadrature;
pub mod radial;
pub mod rearrangement;
pub mod wolff;

pub use error::{Error, Result};
pub use orlicz::NFunction;
