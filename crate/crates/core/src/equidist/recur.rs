use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::EquidistError;
use crate::dynsys::{sample_measure, CommutingTuple, Constant, Observable, Point, SampleScheme};
use crate::polyfam::IntPolynomial;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceReport {
    pub n_max: u64,
    pub r: u64,
    /// `μ(A)^{l+1} - ε`.
    pub threshold: f64,
    /// Whether the measures were computed exactly (rotations, finite systems)
    /// or estimated by sampling.
    pub exact: bool,
    /// Qualifying `n` in `[0, n_max]`.
    pub qualifying: Vec<u64>,
    pub max_gap: Option<u64>,
}

impl RecurrenceReport {
    /// Gap length -> number of occurrences.
    pub fn gap_histogram(&self) -> BTreeMap<u64, u64> {
        let mut h = BTreeMap::new();
        for w in self.qualifying.windows(2) {
            *h.entry(w[1] - w[0]).or_insert(0) += 1;
        }
        h
    }
}

/// Half-open arcs of a circle of integer circumference, as sorted disjoint
/// intervals of `[0, C)`.
pub(crate) type ArcSet = Vec<(BigInt, BigInt)>;

pub(crate) fn arc(start: &BigInt, len: &BigInt, c: &BigInt) -> ArcSet {
    if len >= c {
        return vec![(BigInt::zero(), c.clone())];
    }
    if len.is_zero() {
        return Vec::new();
    }
    let s = start.mod_floor(c);
    let end = &s + len;
    if &end <= c {
        vec![(s, end)]
    } else {
        vec![(BigInt::zero(), end - c), (s, c.clone())]
    }
}

pub(crate) fn intersect(a: &ArcSet, b: &ArcSet) -> ArcSet {
    let mut out = Vec::new();
    for (a0, a1) in a {
        for (b0, b1) in b {
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if lo < hi {
                out.push((lo.clone(), hi.clone()));
            }
        }
    }
    out.sort();
    out
}

fn total(a: &ArcSet) -> BigInt {
    a.iter().map(|(x, y)| y - x).sum()
}

/// Set of `n` in `[0, n_max]` with
/// `μ(A ∩ T_1^{-p_1(rn)} A ∩ ... ∩ T_l^{-p_l(rn)} A) >= μ(A)^{l+1} - ε`.
///
/// Rotations of tori use exact arc arithmetic on a circle of circumference
/// `L·2^bits`, where `L` clears the denominators of the box and the offsets
/// `p(rn)·b mod 1` are floored to `bits` bits from their exact values. Finite
/// systems count points exactly. Other affine maps are sampled with `fallback`.
pub fn recurrence_set(
    systems: &CommutingTuple,
    polys: &[IntPolynomial],
    a: &Observable,
    epsilon: &BigRational,
    n_max: u64,
    r: u64,
    fallback: SampleScheme,
) -> Result<RecurrenceReport, EquidistError> {
    if polys.len() != systems.len() {
        return Err(EquidistError::Shape("one polynomial per map is required".into()));
    }
    if polys.iter().any(|p| !p.coeff(0).is_zero()) {
        return Err(EquidistError::Hypothesis("polynomials must have zero constant term".into()));
    }
    if r == 0 {
        return Err(EquidistError::Shape("r must be positive".into()));
    }
    let l = polys.len() as i32;
    let measure_fn = MeasureFn::new(systems, a, fallback)?;
    let mu_a = measure_fn.mu_a.clone();
    let threshold = mu_a.pow(l + 1) - epsilon;
    let mut qualifying = Vec::new();
    for n in 0..=n_max {
        let m = BigInt::from(r) * BigInt::from(n);
        let iterates: Vec<BigInt> = polys.iter().map(|p| p.eval(&m)).collect();
        if measure_fn.measure(systems, &iterates)? >= threshold {
            qualifying.push(n);
        }
    }
    let max_gap = qualifying.windows(2).map(|w| w[1] - w[0]).max();
    Ok(RecurrenceReport {
        n_max,
        r,
        threshold: threshold.to_f64().unwrap_or(f64::NAN),
        exact: !matches!(measure_fn.kind, MeasureKind::Sampled(_)),
        qualifying,
        max_gap,
    })
}

/// Runs [`recurrence_set`] for `r = 1..=r_cap`; returns all reports and the
/// index of the best one (smallest max gap, then most qualifying `n`).
pub fn recurrence_best_r(
    systems: &CommutingTuple,
    polys: &[IntPolynomial],
    a: &Observable,
    epsilon: &BigRational,
    n_max: u64,
    r_cap: u64,
    fallback: SampleScheme,
) -> Result<(Vec<RecurrenceReport>, usize), EquidistError> {
    let reports = (1..=r_cap.max(1))
        .map(|r| recurrence_set(systems, polys, a, epsilon, n_max, r, fallback))
        .collect::<Result<Vec<_>, _>>()?;
    let best = (0..reports.len())
        .min_by_key(|&i| (reports[i].max_gap.unwrap_or(u64::MAX), std::cmp::Reverse(reports[i].qualifying.len())))
        .unwrap_or(0);
    Ok((reports, best))
}

enum MeasureKind {
    /// Box `[lo_c, hi_c)` per coordinate, scaled to a circle of circumference `c`.
    Arcs { lo: Vec<BigInt>, len: Vec<BigInt>, c: BigInt, scale: BigInt, bits: u32 },
    Cyclic(Vec<bool>),
    Sampled(Vec<(Point, f64)>),
}

struct MeasureFn<'a> {
    kind: MeasureKind,
    a: &'a Observable,
    mu_a: BigRational,
}

impl<'a> MeasureFn<'a> {
    fn new(systems: &CommutingTuple, a: &'a Observable, fallback: SampleScheme) -> Result<Self, EquidistError> {
        match (systems, a) {
            (CommutingTuple::Finite { system }, Observable::Table { values }) => {
                if values.len() as u64 != system.modulus() || values.iter().any(|v| v.im != 0.0 || (v.re != 0.0 && v.re != 1.0)) {
                    return Err(EquidistError::Shape("A must be a 0/1 table on Z/N".into()));
                }
                let set: Vec<bool> = values.iter().map(|v| v.re == 1.0).collect();
                let count = set.iter().filter(|&&b| b).count();
                let mu_a = BigRational::new(count.into(), (values.len() as u64).into());
                Ok(Self { kind: MeasureKind::Cyclic(set), a, mu_a })
            }
            (CommutingTuple::Torus { maps }, Observable::Box { intervals }) => {
                let mu_a = a.box_measure().expect("box");
                if maps.iter().all(|m| m.is_rotation()) {
                    let bits = maps[0].bits();
                    let l = intervals.iter().fold(BigInt::one(), |acc, (lo, hi)| {
                        acc.lcm(lo.rational_part().denom()).lcm(hi.rational_part().denom())
                    });
                    let scale = l.clone();
                    let c = &l << bits;
                    let to_int = |x: &Constant| (x.rational_part() * BigRational::from_integer(c.clone())).to_integer();
                    let lo = intervals.iter().map(|(x, _)| to_int(x)).collect();
                    let len = intervals.iter().map(|(x, y)| to_int(y) - to_int(x)).collect();
                    Ok(Self { kind: MeasureKind::Arcs { lo, len, c, scale, bits }, a, mu_a })
                } else {
                    let dim = maps[0].dim();
                    let space = crate::dynsys::Space::Torus { dim, bits: maps[0].bits() };
                    Ok(Self { kind: MeasureKind::Sampled(sample_measure(space, fallback)), a, mu_a })
                }
            }
            _ => Err(EquidistError::Shape("A must be a box on a torus or a 0/1 table on Z/N".into())),
        }
    }

    fn measure(&self, systems: &CommutingTuple, iterates: &[BigInt]) -> Result<BigRational, EquidistError> {
        match (&self.kind, systems) {
            (MeasureKind::Arcs { lo, len, c, scale, bits }, CommutingTuple::Torus { maps }) => {
                let mut num = BigInt::one();
                for (coord, (lo_c, len_c)) in lo.iter().zip(len).enumerate() {
                    let mut set = arc(lo_c, len_c, c);
                    for (map, p) in maps.iter().zip(iterates) {
                        let offset = map.translation()[coord].mul_int(p).to_fixed(*bits);
                        let start = lo_c - BigInt::from(offset) * scale;
                        set = intersect(&set, &arc(&start, len_c, c));
                    }
                    num *= total(&set);
                }
                Ok(BigRational::new(num, c.pow(lo.len() as u32)))
            }
            (MeasureKind::Cyclic(set), CommutingTuple::Finite { system }) => {
                let n = system.modulus();
                let count = (0..n)
                    .filter(|&x| {
                        set[x as usize]
                            && iterates
                                .iter()
                                .enumerate()
                                .all(|(i, p)| set[system.map(i).power_apply(p, x) as usize])
                    })
                    .count();
                Ok(BigRational::new(count.into(), n.into()))
            }
            (MeasureKind::Sampled(points), _) => {
                let mut acc = 0.0;
                for (x, w) in points {
                    let mut v = self.a.eval(x)?.re;
                    for (i, p) in iterates.iter().enumerate() {
                        if v == 0.0 {
                            break;
                        }
                        v *= self.a.eval(&systems.power_apply(i, p, x)?)?.re;
                    }
                    acc += w * v;
                }
                Ok(BigRational::from_float(acc).unwrap_or_else(BigRational::zero))
            }
            _ => unreachable!("measure kind matches the system"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::{AffineMap, FiniteSystem};

    fn k(s: &str) -> Constant {
        s.parse().unwrap()
    }

    /// Sweep over all arc endpoints: a segment counts when every arc covers it.
    fn sweep_measure(arcs: &[(f64, f64)]) -> f64 {
        let mut cuts = vec![0.0, 1.0];
        for &(s, len) in arcs {
            cuts.push(s);
            cuts.push((s + len).rem_euclid(1.0));
        }
        cuts.sort_by(f64::total_cmp);
        let covered = |x: f64, (s, len): (f64, f64)| (x - s).rem_euclid(1.0) < len;
        cuts.windows(2)
            .filter(|w| w[1] > w[0] && arcs.iter().all(|&a| covered((w[0] + w[1]) / 2.0, a)))
            .map(|w| w[1] - w[0])
            .sum()
    }

    #[test]
    fn arc_arithmetic() {
        let c = BigInt::from(10);
        assert_eq!(arc(&BigInt::from(8), &BigInt::from(4), &c), vec![(0.into(), 2.into()), (8.into(), 10.into())]);
        let i = intersect(&arc(&BigInt::from(8), &BigInt::from(4), &c), &arc(&BigInt::from(1), &BigInt::from(8), &c));
        assert_eq!(i, vec![(1.into(), 2.into()), (8.into(), 9.into())]);
        assert_eq!(arc(&BigInt::from(3), &BigInt::from(10), &c), vec![(0.into(), 10.into())]);
    }

    #[test]
    fn single_rotation_matches_sweep() {
        let alpha = k("sqrt2 - 1");
        let sys = CommutingTuple::torus(vec![AffineMap::rotation(vec![alpha.clone()], 128).unwrap()]).unwrap();
        let a = Observable::boxed(vec![(k("0"), k("3/10"))]).unwrap();
        let eps = BigRational::new(1.into(), 20.into());
        let p = IntPolynomial::var();
        let rep = recurrence_set(&sys, &[p], &a, &eps, 2000, 1, SampleScheme::Grid { res: 1 }).unwrap();
        assert!(rep.exact);
        assert_eq!(rep.qualifying[0], 0);
        let af = alpha.to_f64();
        let expected: Vec<u64> = (0..=2000u64)
            .filter(|&n| {
                let off = (n as f64 * af).rem_euclid(1.0);
                sweep_measure(&[(0.0, 0.3), ((-off).rem_euclid(1.0), 0.3)]) >= 0.09 - 0.05 - 1e-9
            })
            .collect();
        assert_eq!(rep.qualifying, expected);
        assert!(rep.max_gap.unwrap() < 20);
        assert_eq!(rep.gap_histogram().values().sum::<u64>(), rep.qualifying.len() as u64 - 1);
    }

    #[test]
    fn finite_systems_are_exact() {
        let sys = CommutingTuple::finite(FiniteSystem::new(12, vec![1, 5]).unwrap());
        let a = Observable::real_table(&[1., 1., 1., 0., 0., 0., 1., 0., 0., 0., 0., 0.]);
        let eps = BigRational::zero();
        let polys = [IntPolynomial::var(), IntPolynomial::from_i64s(&[0, 0, 1])];
        let rep = recurrence_set(&sys, &polys, &a, &eps, 30, 1, SampleScheme::Grid { res: 1 }).unwrap();
        // independent count: μ(A ∩ (A - n) ∩ (A - 5n²)) >= (1/3)^3
        let in_a = |x: i64| [0, 1, 2, 6].contains(&x.rem_euclid(12));
        let expected: Vec<u64> = (0..=30i64)
            .filter(|&n| 27 * (0..12).filter(|&x| in_a(x) && in_a(x + n) && in_a(x + 5 * n * n)).count() >= 12)
            .map(|n| n as u64)
            .collect();
        assert_eq!(rep.qualifying, expected);
        assert!(recurrence_set(&sys, &[IntPolynomial::from_i64s(&[1, 1]), IntPolynomial::var()], &a, &eps, 3, 1, SampleScheme::Grid { res: 1 }).is_err());
    }

    #[test]
    fn best_multiplier() {
        let sys = CommutingTuple::torus(vec![AffineMap::rotation(vec![k("1/3 + sqrt2/1000")], 128).unwrap()]).unwrap();
        let a = Observable::boxed(vec![(k("0"), k("1/5"))]).unwrap();
        let eps = BigRational::new(1.into(), 100.into());
        let (reports, best) = recurrence_best_r(&sys, &[IntPolynomial::var()], &a, &eps, 300, 3, SampleScheme::Grid { res: 1 }).unwrap();
        assert_eq!(reports.len(), 3);
        let min_gap = reports.iter().filter_map(|r| r.max_gap).min();
        assert_eq!(reports[best].max_gap, min_gap);
        assert_eq!(reports.iter().map(|r| r.r).collect::<Vec<_>>(), vec![1, 2, 3]);
    }
}
