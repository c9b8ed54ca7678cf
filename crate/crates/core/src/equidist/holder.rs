use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::EquidistError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

fn exact(x: f64) -> Result<BigRational, EquidistError> {
    BigRational::from_float(x).ok_or_else(|| EquidistError::Shape(format!("non-finite value {x}")))
}

/// `∫ f·E(f|X_1)···E(f|X_l) dμ >= (∫ f dμ)^{l+1}` on a finite probability
/// space. Inputs are read as exact binary rationals and both sides are
/// evaluated exactly; the verdict allows `1e-12` slack.
///
/// `partitions[i][x]` is the cell label of point `x` in the `i`-th partition.
pub fn holder_lowerbound_check(weights: &[f64], partitions: &[Vec<usize>], f: &[f64]) -> Result<HolderCheck, EquidistError> {
    let n = weights.len();
    if f.len() != n || partitions.iter().any(|p| p.len() != n) {
        return Err(EquidistError::Shape("weights, f and partitions must have the same length".into()));
    }
    if f.iter().any(|&v| v < 0.0) {
        return Err(EquidistError::Hypothesis("f must be non-negative".into()));
    }
    if weights.iter().any(|&w| w < 0.0) {
        return Err(EquidistError::Hypothesis("weights must be non-negative".into()));
    }
    let w = weights.iter().map(|&x| exact(x)).collect::<Result<Vec<_>, _>>()?;
    let fv = f.iter().map(|&x| exact(x)).collect::<Result<Vec<_>, _>>()?;
    let total: BigRational = w.iter().sum();
    if total.is_zero() {
        return Err(EquidistError::Shape("total weight is zero".into()));
    }
    let w: Vec<BigRational> = w.into_iter().map(|x| x / &total).collect();
    let mut lhs_terms: Vec<BigRational> = w.iter().zip(&fv).map(|(a, b)| a * b).collect();
    let integral: BigRational = lhs_terms.iter().sum();
    for part in partitions {
        let cells = part.iter().copied().max().map_or(0, |m| m + 1);
        let mut mass = vec![BigRational::zero(); cells];
        let mut mean = vec![BigRational::zero(); cells];
        for x in 0..n {
            mass[part[x]] += &w[x];
            mean[part[x]] += &w[x] * &fv[x];
        }
        for x in 0..n {
            let c = part[x];
            if mass[c].is_zero() {
                lhs_terms[x] = BigRational::zero();
            } else {
                lhs_terms[x] = &lhs_terms[x] * &mean[c] / &mass[c];
            }
        }
    }
    let lhs: BigRational = lhs_terms.iter().sum();
    let rhs = num_traits::pow(integral, partitions.len() + 1);
    let slack = BigRational::new(1.into(), 1_000_000_000_000u64.into());
    Ok(HolderCheck {
        lhs: lhs.to_f64().unwrap_or(f64::NAN),
        rhs: rhs.to_f64().unwrap_or(f64::NAN),
        holds: lhs >= rhs - slack,
    })
}
