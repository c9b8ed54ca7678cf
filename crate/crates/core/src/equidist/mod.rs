//! Weyl sums, truncated Weyl-criterion tests on tori, recurrence-set scans
//! and the finite Hölder lower bound.

mod holder;
mod poly;
mod recur;
mod weyl;

pub use holder::{holder_lowerbound_check, HolderCheck};
pub use poly::{e64, PhaseEval, RealPolynomial};
pub use recur::{recurrence_best_r, recurrence_set, RecurrenceReport};
pub use weyl::{affine_pair_test, equidist_test, genericity_witness, weyl_average, EquidistVerdict, PairTestParams, PairVerdict};

pub(crate) use weyl::chunked_sum;

use thiserror::Error;

use crate::dynsys::DynsysError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EquidistError {
    #[error("precision budget exhausted: {required} bits required, {available} available")]
    Precision { required: u64, available: u32 },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error(transparent)]
    Dynsys(#[from] DynsysError),
}
