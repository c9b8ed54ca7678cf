use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::DynsysError;

/// Commuting rotations `x -> x + a_i` of `Z/N` with the uniform measure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteSystem {
    modulus: u64,
    shifts: Vec<u64>,
}

/// One rotation `x -> x + shift` of `Z/modulus`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicMap {
    pub modulus: u64,
    pub shift: u64,
}

impl FiniteSystem {
    pub fn new(modulus: u64, shifts: Vec<u64>) -> Result<Self, DynsysError> {
        if modulus == 0 {
            return Err(DynsysError::Shape("modulus must be positive".into()));
        }
        let shifts = shifts.into_iter().map(|a| a % modulus).collect();
        Ok(Self { modulus, shifts })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn shifts(&self) -> &[u64] {
        &self.shifts
    }

    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }

    pub fn map(&self, i: usize) -> CyclicMap {
        CyclicMap { modulus: self.modulus, shift: self.shifts[i] }
    }
}

impl CyclicMap {
    pub fn new(modulus: u64, shift: u64) -> Self {
        assert!(modulus > 0, "modulus must be positive");
        Self { modulus, shift: shift % modulus }
    }

    pub fn power_apply(&self, n: &BigInt, x: u64) -> u64 {
        let step = (n * BigInt::from(self.shift)).mod_floor(&BigInt::from(self.modulus));
        (x + step.to_u64().expect("residue fits")) % self.modulus
    }

    pub fn power(&self, r: u64) -> CyclicMap {
        CyclicMap::new(self.modulus, ((self.shift as u128 * r as u128) % self.modulus as u128) as u64)
    }

    /// Index of the orbit subgroup, i.e. the number of ergodic components.
    pub fn components(&self) -> u64 {
        self.shift.gcd(&self.modulus)
    }

    /// Smallest `p >= 1` with `T^p = id`.
    pub fn period(&self) -> u64 {
        self.modulus / self.components()
    }

    pub fn is_ergodic(&self) -> bool {
        self.components() == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_basics() {
        let t = CyclicMap::new(12, 8);
        assert_eq!(t.components(), 4);
        assert_eq!(t.period(), 3);
        assert_eq!(t.power_apply(&BigInt::from(-1), 0), 4);
        assert_eq!(t.power_apply(&BigInt::from(10u64).pow(30), 1), 9);
        assert!(CyclicMap::new(7, 3).is_ergodic());
        assert_eq!(CyclicMap::new(6, 1).power(6).shift, 0);
        let s = FiniteSystem::new(5, vec![7, 1]).unwrap();
        assert_eq!(s.shifts(), &[2, 1]);
        assert!(FiniteSystem::new(0, vec![]).is_err());
    }
}
