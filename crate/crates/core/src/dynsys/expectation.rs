use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::One;

use super::constant::{is_multiple_integer, Constant};
use super::observable::{Observable, TrigTerm};
use super::system::SingleMap;
use super::DynsysError;

fn freq_dot(freq: &[i64], b: &[Constant]) -> Constant {
    freq.iter().zip(b).fold(Constant::zero(), |acc, (k, c)| acc.add(&c.mul_int(&BigInt::from(*k))))
}

fn constant(f: &Observable) -> Observable {
    Observable::Constant { value: f.mean() }
}

/// Orbit means of `values` under `x -> x + step` on `Z/N`.
fn orbit_means(values: &[Complex64], step: u64) -> Vec<Complex64> {
    let n = values.len() as u64;
    let g = step.gcd(&n) as usize;
    let mut sums = vec![Complex64::new(0.0, 0.0); g];
    for (i, v) in values.iter().enumerate() {
        sums[i % g] += v;
    }
    let size = (n as usize / g) as f64;
    (0..values.len()).map(|i| sums[i % g] / size).collect()
}

fn table_len_check(values: &[Complex64], modulus: u64) -> Result<(), DynsysError> {
    if values.len() as u64 != modulus {
        return Err(DynsysError::Shape(format!("table of length {} on Z/{modulus}", values.len())));
    }
    Ok(())
}

/// `E(f | I(T^r))`: exact orbit averages of `T^r`.
///
/// For rotations the conditional expectation keeps exactly the characters
/// `e(k·x)` with `r k·b ∈ Z`. Ergodic maps send every observable to its mean.
pub fn invariant_expectation(map: &SingleMap, r: u64, f: &Observable) -> Result<Observable, DynsysError> {
    if r == 0 {
        return Err(DynsysError::Shape("r must be positive".into()));
    }
    if let Observable::Constant { .. } = f {
        return Ok(f.clone());
    }
    match (map, f) {
        (SingleMap::Cyclic(t), Observable::Table { values }) => {
            table_len_check(values, t.modulus)?;
            Ok(Observable::table(orbit_means(values, t.power(r).shift)))
        }
        (SingleMap::Affine(t), Observable::Trig { terms }) if t.is_rotation() => {
            let r = BigInt::from(r);
            let kept = terms
                .iter()
                .filter(|term| is_multiple_integer(&freq_dot(&term.freq, t.translation()), &r))
                .cloned()
                .collect::<Vec<TrigTerm>>();
            Ok(Observable::Trig { terms: kept })
        }
        (SingleMap::Affine(t), Observable::Trig { .. } | Observable::Box { .. }) => {
            if t.is_ergodic() {
                Ok(constant(f))
            } else {
                Err(DynsysError::Unsupported("orbit averages of a non-ergodic map with infinite orbits".into()))
            }
        }
        _ => Err(DynsysError::Shape("observable does not live on this space".into())),
    }
}

/// `E(f | K_rat)`, the projection onto eigenfunctions with rational eigenvalues.
///
/// Finite systems are periodic, so `f` is returned unchanged. Rotations keep
/// the characters with rational `k·b`; a kept character whose eigenvalue has
/// order above `r_cap` is reported instead of silently included.
pub fn kronecker_rational_expectation(map: &SingleMap, f: &Observable, r_cap: u64) -> Result<Observable, DynsysError> {
    if let Observable::Constant { .. } = f {
        return Ok(f.clone());
    }
    match (map, f) {
        (SingleMap::Cyclic(t), Observable::Table { values }) => {
            table_len_check(values, t.modulus)?;
            Ok(f.clone())
        }
        (SingleMap::Affine(t), Observable::Trig { terms }) if t.is_rotation() => {
            let mut kept = Vec::new();
            for term in terms {
                let kb = freq_dot(&term.freq, t.translation());
                if let Some(q) = kb.to_rational() {
                    if q.denom() > &BigInt::from(r_cap) {
                        return Err(DynsysError::RationalCap { needed: q.denom().clone() });
                    }
                    kept.push(term.clone());
                }
            }
            Ok(Observable::Trig { terms: kept })
        }
        (SingleMap::Affine(t), Observable::Box { .. }) if t.is_rotation() && t.translation().iter().all(Constant::is_rational) => {
            let period = t
                .translation()
                .iter()
                .fold(BigInt::one(), |acc, c| acc.lcm(c.rational_part().denom()));
            if period > BigInt::from(r_cap) {
                return Err(DynsysError::RationalCap { needed: period });
            }
            Ok(f.clone())
        }
        (SingleMap::Affine(t), Observable::Trig { .. } | Observable::Box { .. }) => {
            if t.is_ergodic() {
                Ok(constant(f))
            } else {
                Err(DynsysError::Unsupported("rational spectrum of a non-ergodic, non-rotation map".into()))
            }
        }
        _ => Err(DynsysError::Shape("observable does not live on this space".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::{AffineMap, CyclicMap, Point, TorusPoint};
    use proptest::prelude::*;

    fn rot(s: &[&str]) -> SingleMap {
        SingleMap::Affine(AffineMap::rotation(s.iter().map(|x| x.parse().unwrap()).collect(), 128).unwrap())
    }

    fn values(f: &Observable) -> Vec<f64> {
        match f {
            Observable::Table { values } => values.iter().map(|v| v.re).collect(),
            _ => panic!("not a table"),
        }
    }

    #[test]
    fn cyclic_orbits() {
        let f = Observable::real_table(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        let t = SingleMap::Cyclic(CyclicMap::new(6, 1));
        // orbits {0,2,4} and {1,3,5}
        assert_eq!(values(&invariant_expectation(&t, 2, &f).unwrap()), vec![2.0, 3.0, 2.0, 3.0, 2.0, 3.0]);
        assert_eq!(invariant_expectation(&t, 6, &f).unwrap(), f);
        assert_eq!(values(&invariant_expectation(&t, 1, &f).unwrap()), vec![2.5; 6]);
        assert_eq!(kronecker_rational_expectation(&t, &f, 1).unwrap(), f);
        assert!(invariant_expectation(&t, 0, &f).is_err());
    }

    #[test]
    fn rotations() {
        let f = Observable::trig(vec![
            (vec![0], Complex64::new(0.5, 0.0)),
            (vec![1], Complex64::new(1.0, 0.0)),
            (vec![3], Complex64::new(0.0, 2.0)),
        ]);
        let third = rot(&["1/3"]);
        assert_eq!(kronecker_rational_expectation(&third, &f, 10).unwrap(), f);
        assert_eq!(invariant_expectation(&third, 3, &f).unwrap(), f);
        let inv1 = invariant_expectation(&third, 1, &f).unwrap();
        assert_eq!(inv1, Observable::trig(vec![(vec![0], Complex64::new(0.5, 0.0)), (vec![3], Complex64::new(0.0, 2.0))]));
        assert!(matches!(kronecker_rational_expectation(&third, &f, 2), Err(DynsysError::RationalCap { .. })));

        let irr = rot(&["sqrt2 - 1"]);
        assert_eq!(invariant_expectation(&irr, 3, &f).unwrap().mean(), f.mean());
        let k = kronecker_rational_expectation(&irr, &f, 100).unwrap();
        assert_eq!(k, Observable::trig(vec![(vec![0], Complex64::new(0.5, 0.0))]));
        let zero_mean = Observable::character(vec![2]);
        assert_eq!(kronecker_rational_expectation(&irr, &zero_mean, 100).unwrap().mean(), Complex64::new(0.0, 0.0));

        let b = Observable::boxed(vec![("0".parse().unwrap(), "3/10".parse().unwrap())]).unwrap();
        assert!((invariant_expectation(&irr, 2, &b).unwrap().mean().re - 0.3).abs() < 1e-15);
        assert!(matches!(invariant_expectation(&third, 1, &b), Err(DynsysError::Unsupported(_))));
        assert_eq!(kronecker_rational_expectation(&third, &b, 3).unwrap(), b);
    }

    #[test]
    fn mixed_torus_keeps_rational_characters() {
        let t = rot(&["sqrt2", "1/4"]);
        let f = Observable::trig(vec![(vec![1, 0], Complex64::new(1.0, 0.0)), (vec![0, 1], Complex64::new(1.0, 0.0))]);
        let k = kronecker_rational_expectation(&t, &f, 4).unwrap();
        assert_eq!(k, Observable::character(vec![0, 1]));
        assert_eq!(invariant_expectation(&t, 2, &f).unwrap(), Observable::trig(vec![]));
        assert_eq!(invariant_expectation(&t, 4, &f).unwrap(), k);
    }

    proptest! {
        #[test]
        fn cyclic_projection_is_invariant(n in 1u64..40, a in 0u64..40, r in 1u64..10, seed in prop::collection::vec(-5i32..=5, 40)) {
            let t = CyclicMap::new(n, a);
            let f = Observable::real_table(&seed[..n as usize].iter().map(|&v| v as f64).collect::<Vec<_>>());
            let g = invariant_expectation(&SingleMap::Cyclic(t), r, &f).unwrap();
            let tr = t.power(r);
            for x in 0..n {
                let y = tr.power_apply(&BigInt::one(), x);
                prop_assert_eq!(g.eval(&Point::Cyclic(x)).unwrap(), g.eval(&Point::Cyclic(y)).unwrap());
            }
            prop_assert!((g.mean() - f.mean()).norm() < 1e-12);
        }

        #[test]
        fn rotation_projection_is_invariant(p in 1i64..12, q in 1i64..12, r in 1u64..6, x in 0.0f64..1.0) {
            let b = format!("{p}/{q}");
            let map = AffineMap::rotation(vec![b.parse().unwrap()], 128).unwrap();
            let f = Observable::trig((0..8).map(|k| (vec![k], Complex64::new(1.0 / (k + 1) as f64, 0.0))).collect());
            let g = invariant_expectation(&SingleMap::Affine(map.clone()), r, &f).unwrap();
            let pt = TorusPoint::from_f64s(&[x], 128);
            let moved = map.power_apply(&BigInt::from(r), &pt).unwrap();
            let d = g.eval(&Point::Torus(pt)).unwrap() - g.eval(&Point::Torus(moved)).unwrap();
            prop_assert!(d.norm() < 1e-12);
        }
    }
}
