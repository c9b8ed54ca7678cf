use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::constant::Constant;
use super::fixed::e_fixed;
use super::system::Point;
use super::DynsysError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub freq: Vec<i64>,
    pub coeff: Complex64,
}

/// Bounded test function on a model space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Observable {
    Constant { value: Complex64 },
    /// `Σ c_k e(k·x)` on a torus.
    Trig { terms: Vec<TrigTerm> },
    /// Indicator of a product of half-open intervals `[lo, hi)` with rational
    /// endpoints in `[0, 1]`.
    Box { intervals: Vec<(Constant, Constant)> },
    /// Values on `Z/N`.
    Table { values: Vec<Complex64> },
}

impl Observable {
    pub fn one() -> Self {
        Self::Constant { value: Complex64::one() }
    }

    /// The character `e(k·x)`.
    pub fn character(freq: Vec<i64>) -> Self {
        Self::Trig { terms: vec![TrigTerm { freq, coeff: Complex64::one() }] }
    }

    pub fn trig(terms: Vec<(Vec<i64>, Complex64)>) -> Self {
        Self::Trig { terms: terms.into_iter().map(|(freq, coeff)| TrigTerm { freq, coeff }).collect() }
    }

    pub fn boxed(intervals: Vec<(Constant, Constant)>) -> Result<Self, DynsysError> {
        for (lo, hi) in &intervals {
            let (Some(a), Some(b)) = (lo.to_rational(), hi.to_rational()) else {
                return Err(DynsysError::Shape("box endpoints must be rational".into()));
            };
            if a.is_negative() || a > b || *b > BigRational::one() {
                return Err(DynsysError::Shape(format!("bad interval [{a}, {b})")));
            }
        }
        Ok(Self::Box { intervals })
    }

    pub fn table(values: Vec<Complex64>) -> Self {
        Self::Table { values }
    }

    pub fn real_table(values: &[f64]) -> Self {
        Self::Table { values: values.iter().map(|&v| Complex64::new(v, 0.0)).collect() }
    }

    /// Exact Haar (or uniform) mean.
    pub fn mean(&self) -> Complex64 {
        match self {
            Self::Constant { value } => *value,
            Self::Trig { terms } => terms.iter().filter(|t| t.freq.iter().all(|&k| k == 0)).map(|t| t.coeff).sum(),
            Self::Box { .. } => Complex64::new(self.box_measure().and_then(|m| m.to_f64()).unwrap_or(0.0), 0.0),
            Self::Table { values } => values.iter().sum::<Complex64>() / values.len().max(1) as f64,
        }
    }

    /// Measure of a box as an exact rational.
    pub fn box_measure(&self) -> Option<BigRational> {
        match self {
            Self::Box { intervals } => Some(
                intervals
                    .iter()
                    .map(|(lo, hi)| hi.rational_part() - lo.rational_part())
                    .fold(BigRational::one(), |a, b| a * b),
            ),
            _ => None,
        }
    }

    /// Upper bound for the sup norm.
    pub fn sup_bound(&self) -> f64 {
        match self {
            Self::Constant { value } => value.norm(),
            Self::Trig { terms } => terms.iter().map(|t| t.coeff.norm()).sum(),
            Self::Box { .. } => 1.0,
            Self::Table { values } => values.iter().map(|v| v.norm()).fold(0.0, f64::max),
        }
    }

    pub fn eval(&self, x: &Point) -> Result<Complex64, DynsysError> {
        match (self, x) {
            (Self::Constant { value }, _) => Ok(*value),
            (Self::Table { values }, Point::Cyclic(i)) => values
                .get(*i as usize)
                .copied()
                .ok_or_else(|| DynsysError::Shape(format!("table of length {} evaluated at {i}", values.len()))),
            (Self::Trig { terms }, Point::Torus(p)) => {
                let mut acc = Complex64::zero();
                for t in terms {
                    if t.freq.len() != p.dim() {
                        return Err(DynsysError::Shape("frequency dimension mismatch".into()));
                    }
                    acc += t.coeff * e_fixed(&p.dot(&t.freq), p.bits());
                }
                Ok(acc)
            }
            (Self::Box { intervals }, Point::Torus(p)) => {
                if intervals.len() != p.dim() {
                    return Err(DynsysError::Shape("box dimension mismatch".into()));
                }
                let scale = BigUint::one() << p.bits();
                let inside = intervals.iter().zip(p.coords()).all(|((lo, hi), c)| {
                    let c = BigRational::from_integer(c.clone().into());
                    let s = BigRational::from_integer(scale.clone().into());
                    lo.rational_part() * &s <= c && c < hi.rational_part() * &s
                });
                Ok(Complex64::new(inside as u8 as f64, 0.0))
            }
            _ => Err(DynsysError::Shape("observable does not live on this space".into())),
        }
    }
}
