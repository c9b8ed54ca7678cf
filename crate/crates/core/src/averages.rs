//! Multiple ergodic averages along polynomial iterates of commuting maps.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Signed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynsys::{AffineMap, CommutingTuple, DynsysError, Observable, Point, TorusPoint};
use crate::equidist::chunked_sum;
use crate::polyfam::IntPolynomial;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AveragesError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error(transparent)]
    Dynsys(#[from] DynsysError),
}

/// `(1/(N-M)) Σ_{M <= n < N} f_1(T_1^{p_1(n)} x) ··· f_l(T_l^{p_l(n)} x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AverageSpec {
    pub systems: CommutingTuple,
    pub polys: Vec<IntPolynomial>,
    pub observables: Vec<Observable>,
    pub window: (u64, u64),
}

impl AverageSpec {
    pub fn new(
        systems: CommutingTuple,
        polys: Vec<IntPolynomial>,
        observables: Vec<Observable>,
        window: (u64, u64),
    ) -> Result<Self, AveragesError> {
        if polys.len() != systems.len() || observables.len() != systems.len() {
            return Err(AveragesError::Shape(format!(
                "{} maps, {} polynomials, {} observables",
                systems.len(),
                polys.len(),
                observables.len()
            )));
        }
        if window.1 <= window.0 {
            return Err(AveragesError::Shape("empty window".into()));
        }
        Ok(Self { systems, polys, observables, window })
    }

    pub fn with_window(&self, window: (u64, u64)) -> Result<Self, AveragesError> {
        Self::new(self.systems.clone(), self.polys.clone(), self.observables.clone(), window)
    }

    /// Fails early when some iterate in the window would exceed the
    /// fixed-point budget.
    fn check(&self, x: &Point) -> Result<(), AveragesError> {
        let n = BigInt::from(self.window.1);
        for (i, (p, f)) in self.polys.iter().zip(&self.observables).enumerate() {
            let bound: BigInt = p.coeffs().iter().rev().fold(BigInt::from(0), |acc, c| acc * &n + c.abs());
            let y = self.systems.power_apply(i, &bound, x)?;
            f.eval(&y)?;
        }
        Ok(())
    }

    fn term(&self, n: u64, x: &Point) -> Complex64 {
        let n = BigInt::from(n);
        let mut v = Complex64::new(1.0, 0.0);
        for (i, (p, f)) in self.polys.iter().zip(&self.observables).enumerate() {
            let y = self.systems.power_apply(i, &p.eval(&n), x).expect("checked against the window");
            v *= f.eval(&y).expect("checked against the space");
        }
        v
    }
}

pub fn multi_average(spec: &AverageSpec, x: &Point) -> Result<Complex64, AveragesError> {
    spec.check(x)?;
    let (m, n) = spec.window;
    Ok(chunked_sum(m, n, |k| spec.term(k, x)) / (n - m) as f64)
}

/// Weighted root-mean-square of [`multi_average`] over the sample.
pub fn l2_norm_of_averages(spec: &AverageSpec, samples: &[(Point, f64)]) -> Result<f64, AveragesError> {
    let values = samples
        .par_iter()
        .map(|(x, w)| multi_average(spec, x).map(|a| w * a.norm_sqr()))
        .collect::<Result<Vec<f64>, _>>()?;
    let total: f64 = samples.iter().map(|(_, w)| w).sum();
    Ok((values.iter().sum::<f64>() / total).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub windows: Vec<(u64, u64)>,
    pub values: Vec<Complex64>,
    /// `|v_{j+1} - v_j|`.
    pub gaps: Vec<f64>,
    /// Largest pairwise gap among the second half of the windows.
    pub tail_max_gap: f64,
}

/// Averages over a schedule of windows with Cauchy-gap diagnostics.
pub fn convergence_probe(spec: &AverageSpec, x: &Point, windows: &[(u64, u64)]) -> Result<ProbeReport, AveragesError> {
    let values = windows
        .iter()
        .map(|&w| multi_average(&spec.with_window(w)?, x))
        .collect::<Result<Vec<_>, _>>()?;
    let gaps = values.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let tail = &values[values.len() / 2..];
    let mut tail_max_gap: f64 = 0.0;
    for (i, a) in tail.iter().enumerate() {
        for b in &tail[i + 1..] {
            tail_max_gap = tail_max_gap.max((a - b).norm());
        }
    }
    Ok(ProbeReport { windows: windows.to_vec(), values, gaps, tail_max_gap })
}

/// Default window schedule: `N_j = 1000·2^j` from `M = 0`, then the same
/// lengths started at `N_j / 2`.
pub fn default_windows(count: usize) -> Vec<(u64, u64)> {
    let ends: Vec<u64> = (0..count).map(|j| 1000 << j).collect();
    ends.iter().map(|&n| (0, n)).chain(ends.iter().map(|&n| (n / 2, n / 2 + n))).collect()
}

/// Bounded weights `u_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSequence {
    /// `u_n = g(c^n y)` for an affine map `c`.
    Orbit { map: AffineMap, base: TorusPoint, observable: Observable },
    /// `u_n = values[n]`.
    Table { values: Vec<Complex64> },
}

impl WeightSequence {
    pub fn bound(&self) -> f64 {
        match self {
            Self::Orbit { observable, .. } => observable.sup_bound(),
            Self::Table { values } => values.iter().map(|v| v.norm()).fold(0.0, f64::max),
        }
    }

    fn check(&self, n_end: u64) -> Result<(), AveragesError> {
        match self {
            Self::Orbit { map, base, observable } => {
                let y = map.power_apply(&BigInt::from(n_end), base)?;
                observable.eval(&Point::Torus(y))?;
                Ok(())
            }
            Self::Table { values } if (values.len() as u64) < n_end => {
                Err(AveragesError::Shape(format!("weight table has {} entries, window needs {n_end}", values.len())))
            }
            Self::Table { .. } => Ok(()),
        }
    }

    pub fn get(&self, n: u64) -> Complex64 {
        match self {
            Self::Orbit { map, base, observable } => {
                let y = map.power_apply(&BigInt::from(n), base).expect("checked against the window");
                observable.eval(&Point::Torus(y)).expect("checked against the space")
            }
            Self::Table { values } => values[n as usize],
        }
    }
}

/// `(1/(N-M)) Σ f_1(T_1^{p_1(n)} x) ··· f_l(T_l^{p_l(n)} x) · u_n`.
pub fn weighted_average(spec: &AverageSpec, weights: &WeightSequence, x: &Point) -> Result<Complex64, AveragesError> {
    spec.check(x)?;
    let (m, n) = spec.window;
    weights.check(n)?;
    Ok(chunked_sum(m, n, |k| spec.term(k, x) * weights.get(k)) / (n - m) as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VdcBound {
    /// `b_h` for `h = 1..=H`.
    pub b: Vec<f64>,
    /// `(1/H) Σ b_h`.
    pub bound: f64,
}

/// `b_h = |(1/(N-M)) Σ_{M <= n < N} <v_{n+h}, v_n>|` with the unnormalized
/// inner product `Σ_i a_i conj(b_i)`.
pub fn vdc_numeric_bound(v: &[Vec<Complex64>], h_max: usize, window: (u64, u64)) -> Result<VdcBound, AveragesError> {
    let (m, n) = window;
    if n <= m || h_max == 0 {
        return Err(AveragesError::Shape("need a non-empty window and H >= 1".into()));
    }
    if (v.len() as u64) < n + h_max as u64 {
        return Err(AveragesError::Shape(format!("need {} vectors, got {}", n + h_max as u64, v.len())));
    }
    let b: Vec<f64> = (1..=h_max)
        .map(|h| {
            let s = chunked_sum(m, n, |k| {
                let (a, c) = (&v[k as usize + h], &v[k as usize]);
                a.iter().zip(c).map(|(x, y)| x * y.conj()).sum()
            });
            s.norm() / (n - m) as f64
        })
        .collect();
    let bound = b.iter().sum::<f64>() / h_max as f64;
    Ok(VdcBound { b, bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::{e, Constant, FiniteSystem};
    use crate::equidist::{weyl_average, RealPolynomial};
    use proptest::prelude::*;

    fn k(s: &str) -> Constant {
        s.parse().unwrap()
    }

    fn circle(b: &str) -> CommutingTuple {
        CommutingTuple::torus(vec![AffineMap::rotation(vec![k(b)], 256).unwrap()]).unwrap()
    }

    fn pt(x: f64) -> Point {
        Point::Torus(TorusPoint::from_f64s(&[x], 256))
    }

    #[test]
    fn ones_average_to_one() {
        let spec = AverageSpec::new(circle("sqrt2 - 1"), vec![IntPolynomial::var()], vec![Observable::one()], (3, 50)).unwrap();
        assert_eq!(multi_average(&spec, &pt(0.1)).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(l2_norm_of_averages(&spec, &[(pt(0.0), 0.5), (pt(0.5), 0.5)]).unwrap(), 1.0);
        assert!(AverageSpec::new(circle("1/2"), vec![], vec![], (0, 1)).is_err());
        assert!(AverageSpec::new(circle("1/2"), vec![IntPolynomial::var()], vec![Observable::one()], (5, 5)).is_err());
    }

    #[test]
    fn single_character_factors_through_weyl_sum() {
        let p = IntPolynomial::from_i64s(&[0, 3, 2]);
        let spec = AverageSpec::new(circle("sqrt2 - 1"), vec![p], vec![Observable::character(vec![1])], (10, 5000)).unwrap();
        let x = 0.37;
        let avg = multi_average(&spec, &pt(x)).unwrap();
        let u = RealPolynomial::parse(&["0", "3*sqrt2 - 3", "2*sqrt2 - 2"]).unwrap();
        let w = weyl_average(&u, (10, 5000), 256).unwrap();
        assert!((avg - e(x) * w).norm() < 1e-9);
    }

    #[test]
    fn finite_full_period_matches_enumeration() {
        let sys = FiniteSystem::new(12, vec![1, 7]).unwrap();
        let f: Vec<f64> = (0..12).map(|i| ((i * 5) % 7) as f64 - 3.0).collect();
        let g: Vec<f64> = (0..12).map(|i| ((i * i) % 5) as f64).collect();
        let spec = AverageSpec::new(
            CommutingTuple::finite(sys),
            vec![IntPolynomial::var(), IntPolynomial::from_i64s(&[0, 0, 1])],
            vec![Observable::real_table(&f), Observable::real_table(&g)],
            (0, 12),
        )
        .unwrap();
        for x in 0..12u64 {
            let brute: f64 = (0..12u64).map(|n| f[((x + n) % 12) as usize] * g[((x + 7 * n * n) % 12) as usize]).sum::<f64>() / 12.0;
            assert!((multi_average(&spec, &Point::Cyclic(x)).unwrap().re - brute).abs() < 1e-12);
        }
        let probe = convergence_probe(&spec, &Point::Cyclic(3), &[(0, 12), (0, 24), (12, 36), (5, 65)]).unwrap();
        assert!(probe.gaps.iter().all(|&g| g < 1e-12), "{probe:?}");
        assert!(probe.tail_max_gap < 1e-12);
    }

    #[test]
    fn alternating_probe_settles() {
        let sys = CommutingTuple::finite(FiniteSystem::new(2, vec![1]).unwrap());
        let spec = AverageSpec::new(sys, vec![IntPolynomial::var()], vec![Observable::real_table(&[1.0, -1.0])], (0, 1)).unwrap();
        let windows: Vec<(u64, u64)> = (0..8).map(|j| (0, (10 << j) + 1)).collect();
        let probe = convergence_probe(&spec, &Point::Cyclic(0), &windows).unwrap();
        assert!(probe.gaps.windows(2).all(|w| w[1] <= w[0]));
        assert!(probe.tail_max_gap < 0.01);
        assert_eq!(default_windows(3), vec![(0, 1000), (0, 2000), (0, 4000), (500, 1500), (1000, 3000), (2000, 6000)]);
    }

    #[test]
    fn composition_trick_is_exact() {
        let sys = FiniteSystem::new(30, vec![1, 7, 11]).unwrap();
        let tables: Vec<Vec<f64>> = (0..3).map(|j| (0..30).map(|i| ((i * (j + 2) + j) % 9) as f64).collect()).collect();
        let polys = vec![IntPolynomial::var(), IntPolynomial::from_i64s(&[0, 1, 1]), IntPolynomial::from_i64s(&[0, 0, 0, 1])];
        let obs: Vec<Observable> = tables.iter().map(|t| Observable::real_table(t)).collect();
        let spec = AverageSpec::new(CommutingTuple::finite(sys.clone()), polys.clone(), obs.clone(), (0, 300)).unwrap();
        let s = 4u64;
        let j = 1usize;
        let mut shifted_polys = polys.clone();
        shifted_polys[j] = &polys[j] + &IntPolynomial::constant(s);
        let a = AverageSpec::new(CommutingTuple::finite(sys.clone()), shifted_polys, obs.clone(), (0, 300)).unwrap();
        let mut composed = obs.clone();
        let shift = sys.map(j).power_apply(&BigInt::from(s), 0);
        composed[j] = Observable::real_table(&(0..30).map(|i| tables[j][((i + shift) % 30) as usize]).collect::<Vec<_>>());
        let b = AverageSpec::new(CommutingTuple::finite(sys), polys, composed, (0, 300)).unwrap();
        for x in [0u64, 5, 17] {
            assert_eq!(multi_average(&a, &Point::Cyclic(x)).unwrap(), multi_average(&b, &Point::Cyclic(x)).unwrap());
        }
        let once = multi_average(&spec, &Point::Cyclic(3)).unwrap();
        assert_eq!(once, multi_average(&spec, &Point::Cyclic(3)).unwrap());
    }

    #[test]
    fn theorem_setup_is_small() {
        let t = AffineMap::rotation(vec![k("sqrt2 - 1"), k("0")], 256).unwrap();
        let s = AffineMap::rotation(vec![k("0"), k("sqrt3 - 1")], 256).unwrap();
        let spec = AverageSpec::new(
            CommutingTuple::torus(vec![t, s]).unwrap(),
            vec![IntPolynomial::var(), IntPolynomial::from_i64s(&[0, 0, 1])],
            vec![Observable::character(vec![1, 0]), Observable::character(vec![0, 1])],
            (0, 20_000),
        )
        .unwrap();
        let x = Point::Torus(TorusPoint::from_f64s(&[0.2, 0.9], 256));
        assert!(multi_average(&spec, &x).unwrap().norm() < 0.05);
    }

    #[test]
    fn weights() {
        let spec = AverageSpec::new(circle("sqrt2 - 1"), vec![IntPolynomial::var()], vec![Observable::character(vec![1])], (0, 100_000)).unwrap();
        let x = pt(0.3);
        let ones = WeightSequence::Table { values: vec![Complex64::new(1.0, 0.0); 100_000] };
        assert_eq!(weighted_average(&spec, &ones, &x).unwrap(), multi_average(&spec, &x).unwrap());
        let half = AffineMap::rotation(vec![k("1/2")], 256).unwrap();
        let signs = WeightSequence::Orbit { map: half, base: TorusPoint::zero(1, 256), observable: Observable::character(vec![1]) };
        assert!((signs.get(3) + Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(weighted_average(&spec, &signs, &x).unwrap().norm() < 0.05);
        let beta = AffineMap::rotation(vec![k("sqrt3 - 1")], 256).unwrap();
        let orbit = WeightSequence::Orbit { map: beta, base: TorusPoint::zero(1, 256), observable: Observable::character(vec![1]) };
        assert!(weighted_average(&spec, &orbit, &x).unwrap().norm() < 0.01);
        let short = WeightSequence::Table { values: vec![Complex64::new(1.0, 0.0); 10] };
        assert!(weighted_average(&spec, &short, &x).is_err());
    }

    #[test]
    fn vdc_bound_examples() {
        let ones = vec![vec![Complex64::new(1.0, 0.0)]; 120];
        let r = vdc_numeric_bound(&ones, 10, (0, 100)).unwrap();
        assert!(r.b.iter().all(|&b| (b - 1.0).abs() < 1e-12) && (r.bound - 1.0).abs() < 1e-12);

        let alpha = (2f64).sqrt() - 1.0;
        let lin: Vec<Vec<Complex64>> = (0..10_100).map(|n| vec![e(n as f64 * alpha)]).collect();
        assert!(vdc_numeric_bound(&lin, 5, (0, 10_000)).unwrap().b.iter().all(|&b| b > 0.999));

        let quad_phase = RealPolynomial::parse(&["0", "0", "sqrt2"]).unwrap().phases(10_100, 256).unwrap();
        let quad: Vec<Vec<Complex64>> = (0..10_100).map(|n| vec![crate::equidist::e64(quad_phase.phase(n))]).collect();
        assert!(vdc_numeric_bound(&quad, 5, (0, 10_000)).unwrap().b.iter().all(|&b| b < 0.05));

        let e1 = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let e2 = vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        let alt: Vec<Vec<Complex64>> = (0..220).map(|n| if n % 2 == 0 { e1.clone() } else { e2.clone() }).collect();
        let r = vdc_numeric_bound(&alt, 10, (0, 200)).unwrap();
        assert_eq!(r.b, vec![0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0]);
        assert_eq!(r.bound, 0.5);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn birkhoff_error_bound(c in prop::collection::vec(-3i32..=3, 4), n in 100u64..3000, x in 0.0f64..1.0) {
            let alpha = "sqrt5 - 2";
            let terms: Vec<(Vec<i64>, Complex64)> = c.iter().enumerate().map(|(i, &v)| (vec![i as i64], Complex64::new(v as f64, 0.0))).collect();
            let f = Observable::trig(terms);
            let spec = AverageSpec::new(circle(alpha), vec![IntPolynomial::var()], vec![f.clone()], (0, n)).unwrap();
            let avg = multi_average(&spec, &pt(x)).unwrap();
            let a = k(alpha).to_f64();
            let bound: f64 = c.iter().enumerate().skip(1).map(|(i, &v)| {
                let t = (i as f64 * a).rem_euclid(1.0);
                (v as f64).abs() / (2.0 * t.min(1.0 - t))
            }).sum::<f64>() / n as f64;
            prop_assert!((avg - f.mean()).norm() <= bound + 1e-9);
        }

        #[test]
        fn bounded_by_sup_norms(n in 2u64..40, a in 0u64..40, b in 0u64..40, vals in prop::collection::vec(-2.0f64..2.0, 40), x in 0u64..40) {
            let sys = FiniteSystem::new(n, vec![a, b]).unwrap();
            let f = Observable::real_table(&vals[..n as usize]);
            let g = Observable::real_table(&vals[40 - n as usize..]);
            let bound = f.sup_bound() * g.sup_bound();
            let spec = AverageSpec::new(
                CommutingTuple::finite(sys),
                vec![IntPolynomial::from_i64s(&[0, 2]), IntPolynomial::from_i64s(&[0, 1, 3])],
                vec![f, g],
                (0, 97),
            ).unwrap();
            prop_assert!(multi_average(&spec, &Point::Cyclic(x % n)).unwrap().norm() <= bound + 1e-12);
        }
    }
}
