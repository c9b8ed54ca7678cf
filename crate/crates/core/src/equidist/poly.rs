use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::EquidistError;
use crate::dynsys::{Constant, ACCURACY_BITS};

/// Polynomial with exact real coefficients `c_0 + c_1 t + ...`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RealPolynomial {
    coeffs: Vec<Constant>,
}

impl RealPolynomial {
    pub fn new(mut coeffs: Vec<Constant>) -> Self {
        while coeffs.last().is_some_and(Constant::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn parse(coeffs: &[&str]) -> Result<Self, EquidistError> {
        let cs = coeffs.iter().map(|s| s.parse()).collect::<Result<Vec<Constant>, _>>()?;
        Ok(Self::new(cs))
    }

    /// `c t^k`.
    pub fn monomial(c: Constant, k: usize) -> Self {
        let mut coeffs = vec![Constant::zero(); k];
        coeffs.push(c);
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Constant] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exact check that `t^k` divides the polynomial.
    pub fn divisible_by_power(&self, k: usize) -> bool {
        self.coeffs.iter().take(k).all(Constant::is_zero)
    }

    pub fn neg(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(Constant::neg).collect() }
    }

    /// Phase evaluator for `n` in `[0, n_max)`.
    pub fn phases(&self, n_max: u64, bits: u32) -> Result<PhaseEval, EquidistError> {
        PhaseEval::new(self, n_max, bits)
    }
}

/// Evaluates `p(n) mod 1` as a 64-bit fraction.
///
/// Uses 128-bit wrapping arithmetic when `Σ n^j` leaves enough headroom and
/// falls back to `bits`-bit big integers otherwise.
#[derive(Clone, Debug)]
pub enum PhaseEval {
    Wide(Vec<u128>),
    Big { coeffs: Vec<BigInt>, bits: u32 },
}

fn required_bits(deg: usize, n_max: u64) -> u64 {
    let n = BigUint::from(n_max.max(1));
    let total: BigUint = (0..=deg).map(|j| n.pow(j as u32)).sum();
    total.bits() + ACCURACY_BITS as u64
}

impl PhaseEval {
    pub fn new(p: &RealPolynomial, n_max: u64, bits: u32) -> Result<Self, EquidistError> {
        let required = required_bits(p.degree(), n_max);
        if required <= 128 {
            let coeffs = p.coeffs().iter().map(|c| c.to_fixed(128).to_u128().unwrap_or(0)).collect();
            return Ok(Self::Wide(coeffs));
        }
        if required > bits as u64 {
            return Err(EquidistError::Precision { required, available: bits });
        }
        let coeffs = p.coeffs().iter().map(|c| BigInt::from_biguint(Sign::Plus, c.to_fixed(bits))).collect();
        Ok(Self::Big { coeffs, bits })
    }

    pub fn phase(&self, n: u64) -> u64 {
        match self {
            Self::Wide(cs) => {
                let (mut acc, mut pw) = (0u128, 1u128);
                for c in cs {
                    acc = acc.wrapping_add(c.wrapping_mul(pw));
                    pw = pw.wrapping_mul(n as u128);
                }
                (acc >> 64) as u64
            }
            Self::Big { coeffs, bits } => {
                let n = BigInt::from(n);
                let mut acc = BigInt::zero();
                for c in coeffs.iter().rev() {
                    acc = acc * &n + c;
                }
                let modulus = BigInt::from(1u8) << *bits;
                ((acc % &modulus) >> (*bits - 64)).to_u64().unwrap_or(0)
            }
        }
    }
}

/// `e(t)` for a 64-bit fraction `t`.
pub fn e64(phase: u64) -> num_complex::Complex64 {
    crate::dynsys::e(phase as f64 / 18_446_744_073_709_551_616.0)
}
