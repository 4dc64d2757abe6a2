// Negated float comparisons are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod availability;
pub mod axioms;
pub mod error;
pub mod estimate;
pub mod extensions;
pub mod identify;
pub mod io;
pub mod listdesign;
pub mod model;
pub mod rationality;
pub mod scalar;
pub mod types;
