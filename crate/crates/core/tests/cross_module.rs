use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use petlab::averages::{convergence_probe, multi_average, AverageSpec};
use petlab::dynsys::{invariant_expectation, AffineMap, CommutingTuple, CyclicMap, FiniteSystem, Observable, Point, SingleMap, TorusPoint};
use petlab::equidist::{weyl_average, RealPolynomial};
use petlab::polyfam::IntPolynomial;
use petlab::seminorms::{dual_function, gowers_seminorm_finite, gowers_seminorm_torus};

#[test]
fn level_one_seminorm_is_norm_of_invariant_projection() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..30 {
        let n = rng.gen_range(2..=20u64);
        let a = rng.gen_range(0..n);
        let f: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let proj = invariant_expectation(&SingleMap::Cyclic(CyclicMap::new(n, a)), 1, &Observable::table(f.clone())).unwrap();
        let l2 = ((0..n).map(|x| proj.eval(&Point::Cyclic(x)).unwrap().norm_sqr()).sum::<f64>() / n as f64).sqrt();
        let s = gowers_seminorm_finite(&CyclicMap::new(n, a), &f, 1).unwrap().value;
        assert!((s - l2).abs() < 1e-12, "{s} vs {l2}");
        // the level-one dual function is the same projection
        let d = dual_function(&CyclicMap::new(n, a), &f, 1).unwrap();
        for x in 0..n {
            assert!((d.values[x as usize] - proj.eval(&Point::Cyclic(x)).unwrap()).norm() < 1e-12);
        }
    }
}

#[test]
fn single_map_average_is_a_weyl_sum() {
    // f(T^{n^2} x) with f = e(x) and T = rot(b) is e(x) e(b n^2)
    let t = AffineMap::rotation(vec!["sqrt5/3".parse().unwrap()], 256).unwrap();
    let spec = AverageSpec::new(
        CommutingTuple::torus(vec![t]).unwrap(),
        vec![IntPolynomial::from_i64s(&[0, 0, 1])],
        vec![Observable::character(vec![1])],
        (17, 5_017),
    )
    .unwrap();
    let x = Point::Torus(TorusPoint::from_f64s(&[0.375], 256));
    let avg = multi_average(&spec, &x).unwrap();
    let w = weyl_average(&RealPolynomial::parse(&["0", "0", "sqrt5/3"]).unwrap(), (17, 5_017), 256).unwrap();
    assert!((avg - w * petlab::dynsys::e(0.375)).norm() < 1e-9);
}

#[test]
fn finite_average_converges_to_component_means() {
    // on Z/12 with shifts 4 and 6, n -> (4n, 6n^2) visits a fixed finite pattern
    let sys = FiniteSystem::new(12, vec![4, 6]).unwrap();
    let f = Observable::real_table(&(0..12).map(|v| (v % 5) as f64).collect::<Vec<_>>());
    let g = Observable::real_table(&(0..12).map(|v| (v % 3) as f64 - 1.0).collect::<Vec<_>>());
    let spec = AverageSpec::new(
        CommutingTuple::finite(sys),
        vec![IntPolynomial::var(), IntPolynomial::from_i64s(&[0, 0, 1])],
        vec![f.clone(), g.clone()],
        (0, 12),
    )
    .unwrap();
    let x = Point::Cyclic(5);
    let probe = convergence_probe(&spec, &x, &[(0, 12), (0, 120), (0, 1_200)]).unwrap();
    assert!(probe.gaps.iter().all(|&g| g < 1e-12));
    let direct: Complex64 = (0..12u64)
        .map(|n| {
            let y1 = (5 + 4 * n) % 12;
            let y2 = (5 + 6 * n * n) % 12;
            f.eval(&Point::Cyclic(y1)).unwrap() * g.eval(&Point::Cyclic(y2)).unwrap()
        })
        .sum::<Complex64>()
        / 12.0;
    assert!((probe.values[0] - direct).norm() < 1e-12);
}

#[test]
fn torus_and_finite_seminorms_agree_on_a_rational_rotation() {
    // rotation by 1/8 and e(x) restricted to the orbit of 0 is e(x/8) on Z/8
    let t = AffineMap::rotation(vec!["1/8".parse().unwrap()], 128).unwrap();
    let f = Observable::trig(vec![(vec![1], Complex64::new(1.0, 0.0)), (vec![3], Complex64::new(0.5, 0.0))]);
    let cyc = CyclicMap::new(8, 1);
    let values: Vec<Complex64> = (0..8).map(|x| f.eval(&Point::Torus(TorusPoint::from_f64s(&[x as f64 / 8.0], 128))).unwrap()).collect();
    for k in 1..=3 {
        let torus = gowers_seminorm_torus(&t, &f, k, 8).unwrap().value;
        let finite = gowers_seminorm_finite(&cyc, &values, k).unwrap().value;
        // compare 2^k-th powers; the root amplifies rounding near zero
        let p = 1 << k;
        assert!((torus.powi(p) - finite.powi(p)).abs() < 1e-12, "k = {k}: {torus} vs {finite}");
    }
}
