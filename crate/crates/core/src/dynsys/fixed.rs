use num_bigint::{BigInt, BigUint, Sign};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Default number of fractional bits per coordinate.
pub const DEFAULT_BITS: u32 = 256;

/// Point of the torus `T^m`, each coordinate a residue modulo `2^bits`
/// standing for the fraction `c / 2^bits`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusPoint {
    coords: Vec<BigUint>,
    bits: u32,
}

pub(crate) fn reduce_mod_one(x: &BigInt, bits: u32) -> BigUint {
    let modulus = BigInt::from(1u8) << bits;
    x.mod_floor(&modulus).to_biguint().expect("mod_floor is non-negative")
}

/// Fraction in `[0, 1)` of a residue modulo `2^bits`, rounded to `f64`.
pub fn fraction_f64(x: &BigUint, bits: u32) -> f64 {
    let top = if bits > 64 { x >> (bits - 64) } else { x << (64 - bits) };
    top.to_u64().unwrap_or(0) as f64 / 18_446_744_073_709_551_616.0
}

/// `e(t) = exp(2πi t)` of a fixed-point phase.
pub fn e_fixed(x: &BigUint, bits: u32) -> Complex64 {
    e(fraction_f64(x, bits))
}

pub fn e(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, std::f64::consts::TAU * t)
}

impl TorusPoint {
    pub fn zero(dim: usize, bits: u32) -> Self {
        Self { coords: vec![BigUint::zero(); dim], bits }
    }

    /// Residues are reduced modulo `2^bits`.
    pub fn from_raw(coords: Vec<BigUint>, bits: u32) -> Self {
        let modulus = BigUint::from(1u8) << bits;
        Self { coords: coords.into_iter().map(|c| c % &modulus).collect(), bits }
    }

    pub fn from_f64s(xs: &[f64], bits: u32) -> Self {
        let coords = xs
            .iter()
            .map(|&x| {
                let frac = x - x.floor();
                let top = BigUint::from((frac * 18_446_744_073_709_551_616.0) as u64);
                if bits >= 64 { top << (bits - 64) } else { top >> (64 - bits) }
            })
            .collect();
        Self { coords, bits }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn coords(&self) -> &[BigUint] {
        &self.coords
    }

    pub fn coord_f64(&self, i: usize) -> f64 {
        fraction_f64(&self.coords[i], self.bits)
    }

    pub fn to_f64s(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.coord_f64(i)).collect()
    }

    /// `Σ k_i x_i mod 1` as a fixed-point residue.
    pub fn dot(&self, k: &[i64]) -> BigUint {
        let mut acc = BigInt::zero();
        for (ki, xi) in k.iter().zip(&self.coords) {
            acc += BigInt::from(*ki) * BigInt::from_biguint(Sign::Plus, xi.clone());
        }
        reduce_mod_one(&acc, self.bits)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.bits, other.bits, "precision mismatch");
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect();
        Self::from_raw(coords, self.bits)
    }
}
