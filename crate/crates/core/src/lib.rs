// `!(x > 0.0)` is the NaN-rejecting form used throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod branch;
pub mod error;
pub mod fit;
pub mod ratio;
pub mod realization;
pub mod roots;
pub mod smoothness;
pub mod symbolic;

/// Library version embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
