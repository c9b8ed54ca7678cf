use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::affine::AffineMap;
use super::finite::{CyclicMap, FiniteSystem};
use super::fixed::TorusPoint;
use super::DynsysError;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Point {
    Cyclic(u64),
    Torus(TorusPoint),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Space {
    Cyclic { modulus: u64 },
    Torus { dim: usize, bits: u32 },
}

/// One transformation of a model system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SingleMap {
    Cyclic(CyclicMap),
    Affine(AffineMap),
}

impl SingleMap {
    pub fn power_apply(&self, n: &BigInt, x: &Point) -> Result<Point, DynsysError> {
        match (self, x) {
            (Self::Cyclic(t), Point::Cyclic(i)) => Ok(Point::Cyclic(t.power_apply(n, *i))),
            (Self::Affine(t), Point::Torus(p)) => Ok(Point::Torus(t.power_apply(n, p)?)),
            _ => Err(DynsysError::Shape("point does not belong to the map's space".into())),
        }
    }
}

/// Commuting measure-preserving maps on a shared space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CommutingTuple {
    Finite { system: FiniteSystem },
    Torus { maps: Vec<AffineMap> },
}

/// First pair of maps that fail to commute, if any.
pub fn commute_check(maps: &[AffineMap]) -> Result<(), (usize, usize)> {
    for i in 0..maps.len() {
        for j in i + 1..maps.len() {
            if !maps[i].commutes_with(&maps[j]) {
                return Err((i, j));
            }
        }
    }
    Ok(())
}

impl CommutingTuple {
    pub fn finite(system: FiniteSystem) -> Self {
        Self::Finite { system }
    }

    pub fn torus(maps: Vec<AffineMap>) -> Result<Self, DynsysError> {
        let Some(first) = maps.first() else { return Err(DynsysError::Shape("no maps given".into())) };
        if maps.iter().any(|m| m.dim() != first.dim() || m.bits() != first.bits()) {
            return Err(DynsysError::Shape("maps live on different tori".into()));
        }
        commute_check(&maps).map_err(|(i, j)| DynsysError::NotCommuting(i, j))?;
        Ok(Self::Torus { maps })
    }

    pub fn len(&self) -> usize {
        match self {
            Self::Finite { system } => system.len(),
            Self::Torus { maps } => maps.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn space(&self) -> Space {
        match self {
            Self::Finite { system } => Space::Cyclic { modulus: system.modulus() },
            Self::Torus { maps } => Space::Torus { dim: maps[0].dim(), bits: maps[0].bits() },
        }
    }

    pub fn map(&self, i: usize) -> SingleMap {
        match self {
            Self::Finite { system } => SingleMap::Cyclic(system.map(i)),
            Self::Torus { maps } => SingleMap::Affine(maps[i].clone()),
        }
    }

    pub fn power_apply(&self, i: usize, n: &BigInt, x: &Point) -> Result<Point, DynsysError> {
        match (self, x) {
            (Self::Finite { system }, Point::Cyclic(p)) => Ok(Point::Cyclic(system.map(i).power_apply(n, *p))),
            (Self::Torus { maps }, Point::Torus(p)) => Ok(Point::Torus(maps[i].power_apply(n, p)?)),
            _ => Err(DynsysError::Shape("point does not belong to the system's space".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::Constant;

    #[test]
    fn torus_tuple_checks_commutation() {
        let k = |s: &str| s.parse::<Constant>().unwrap();
        let skew = AffineMap::new(vec![vec![1, 0], vec![1, 1]], vec![k("sqrt2-1"), k("0")], 64).unwrap();
        let rot = AffineMap::rotation(vec![k("0"), k("sqrt3-1")], 64).unwrap();
        let bad = AffineMap::rotation(vec![k("sqrt3"), k("0")], 64).unwrap();
        assert!(CommutingTuple::torus(vec![skew.clone(), rot.clone()]).is_ok());
        assert_eq!(commute_check(&[skew.clone(), rot.clone(), bad.clone()]), Err((0, 2)));
        assert_eq!(CommutingTuple::torus(vec![rot, skew, bad]), Err(DynsysError::NotCommuting(1, 2)));
    }
}
