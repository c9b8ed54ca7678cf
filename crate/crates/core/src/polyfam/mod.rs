//! Families of polynomial tuples and the van der Corput (vdC) reduction.
//!
//! A family is an ordered list of `m` tuples `(p_1, ..., p_l)` of integer
//! polynomials. Row `i` of the family is the list of `i`-th entries. The
//! reduction replaces a family by the starred family of shifted and
//! unshifted differences against a chosen tuple, and the type matrix
//! decreases lexicographically along the way.

mod bulk;
mod family;
mod kbound;
mod poly;
mod roots;
mod trace;
mod type_matrix;
mod vdc;

pub use bulk::{pet_trace_length, LengthBudget, LengthOutcome, TraceLength};
pub use family::{star, NiceReport, NiceViolation, PolyFamily, PolyTuple};
pub use kbound::{trace_k_bound, universal_k_bound, KBound};
pub use poly::{equivalent, poly_shift, IntPolynomial};
pub use roots::{cauchy_bound, integer_roots_in, positive_integer_roots};
pub use trace::{pet_trace, HPolicy, PetTrace, TraceIter, VdcStep};
pub use type_matrix::TypeMatrix;
pub use vdc::{choose_pair, nice_exceptions, vdc_apply, NiceExceptions};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyfamError {
    #[error("tuple has arity {found}, family arity is {expected}")]
    Arity { expected: usize, found: usize },
    #[error("arity must be at least 1")]
    ZeroArity,
    #[error("entry of degree {degree} exceeds the declared bound {bound}")]
    DegreeBound { degree: usize, bound: usize },
    #[error("family contains an all-constant tuple at index {0}")]
    ConstantTuple(usize),
    #[error("type matrices have different shapes: {0:?} vs {1:?}")]
    Shape((usize, usize), (usize, usize)),
    #[error("tuple is not a member of the family")]
    NotMember,
    #[error("family is not nice: {0:?}")]
    NotNice(Vec<NiceViolation>),
    #[error("leading polynomial has degree {0}; reduction needs degree at least 2")]
    DegreeTooLow(usize),
    #[error("family is empty")]
    Empty,
    #[error("reduced family is not nice for generic h")]
    GenericNotNice,
    #[error("type did not decrease at step {0}")]
    TypeNotDecreasing(usize),
    #[error("no admissible h found below {0}")]
    NoAdmissibleH(u64),
    #[error("trace exceeded {0} steps")]
    StepLimit(usize),
}
