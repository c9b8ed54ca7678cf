use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::fixed::TorusPoint;
use super::system::{Point, Space};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum SampleScheme {
    /// `res^m` grid points `j / res`; on `Z/N` every point.
    Grid { res: u32 },
    Random { seed: u64, count: usize },
}

/// Weighted sample of the uniform measure on `space`.
pub fn sample_measure(space: Space, scheme: SampleScheme) -> Vec<(Point, f64)> {
    match (space, scheme) {
        (Space::Cyclic { modulus }, SampleScheme::Grid { .. }) => {
            (0..modulus).map(|i| (Point::Cyclic(i), 1.0 / modulus as f64)).collect()
        }
        (Space::Cyclic { modulus }, SampleScheme::Random { seed, count }) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count).map(|_| (Point::Cyclic(rng.gen_range(0..modulus)), 1.0 / count as f64)).collect()
        }
        (Space::Torus { dim, bits }, SampleScheme::Grid { res }) => {
            let total = (res as usize).pow(dim as u32);
            let w = 1.0 / total as f64;
            (0..total)
                .map(|mut idx| {
                    let coords = (0..dim)
                        .map(|_| {
                            let j = idx % res as usize;
                            idx /= res as usize;
                            (BigUint::from(j) << bits) / res
                        })
                        .collect();
                    (Point::Torus(TorusPoint::from_raw(coords, bits)), w)
                })
                .collect()
        }
        (Space::Torus { dim, bits }, SampleScheme::Random { seed, count }) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let words = bits.div_ceil(32) as usize;
            (0..count)
                .map(|_| {
                    let coords = (0..dim)
                        .map(|_| {
                            let digits: Vec<u32> = (0..words).map(|_| rng.gen()).collect();
                            BigUint::new(digits)
                        })
                        .collect();
                    (Point::Torus(TorusPoint::from_raw(coords, bits)), 1.0 / count as f64)
                })
                .collect()
        }
    }
}
