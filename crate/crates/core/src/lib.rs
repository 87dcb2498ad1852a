#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bundle;
pub mod error;
pub mod evolution;
pub mod extrapolation;
pub mod grid;
pub mod multiplication;
pub mod numerics;
pub mod random;
pub mod report;
pub mod scenario;
pub mod semigroup;
pub mod space;
pub mod suites;

pub use error::{Error, Result};
