//! Model measure-preserving systems: rotations of `Z/N` and unipotent affine
//! maps of tori, evaluated exactly in fixed-point arithmetic modulo 1.

mod affine;
mod constant;
mod expectation;
mod finite;
mod fixed;
mod observable;
mod sample;
mod system;

pub use affine::{AffineMap, ACCURACY_BITS};
pub use constant::Constant;
pub use expectation::{invariant_expectation, kronecker_rational_expectation};
pub use finite::{CyclicMap, FiniteSystem};
pub use fixed::{e, e_fixed, fraction_f64, TorusPoint, DEFAULT_BITS};
pub use observable::{Observable, TrigTerm};
pub use sample::{sample_measure, SampleScheme};
pub use system::{commute_check, CommutingTuple, Point, SingleMap, Space};

use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DynsysError {
    #[error("cannot parse constant {0:?}")]
    Parse(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("matrix is not unipotent")]
    NotUnipotent,
    #[error("matrix does not preserve Haar measure")]
    NotMeasurePreserving,
    #[error("maps {0} and {1} do not commute")]
    NotCommuting(usize, usize),
    #[error("precision budget exhausted: {required} bits required, {available} available")]
    Precision { required: u64, available: u32 },
    #[error("rational eigenvalue of order {needed} exceeds the cap")]
    RationalCap { needed: BigInt },
    #[error("unsupported: {0}")]
    Unsupported(String),
}
