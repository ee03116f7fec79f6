// NaN must fail range checks, so bounds are written as negated comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod oracle;
pub mod quat;
pub mod scattering;
pub mod step;
pub mod sweep;
pub mod wavefield;
