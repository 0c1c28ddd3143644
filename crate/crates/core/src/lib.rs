//! Certified brackets for Laplace-type integrals `∫ exp(-n f) g` built
//! from local data of `f` at its minimizer, plus the oracles that check
//! them.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod bounds;
pub mod error;
pub mod local_model;
pub mod oracle;
pub mod problems;
pub mod special;

pub use bounds::{
    bracket_e_g, bracket_i, mcw_reference, n0_threshold, n4_threshold, solve_xa, theorem1_constants,
    theorem2_constants, Bracket, GConstants, GData, RelaxationParams, TheoremOneConstants,
};
pub use error::{Error, Result};
pub use local_model::{LocalExpansion, SquareMatrix, SymMatrix, ThirdTensor};
pub use problems::{parse_selector, Problem};
