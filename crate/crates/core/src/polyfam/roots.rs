//! Exact integer roots of integer polynomials on a bounded range.
//!
//! The integer sequence `p(lo), p(lo+1), ..., p(hi)` is split into monotone
//! runs using the sign pattern of the forward difference `p(k+1) - p(k)`,
//! itself found recursively. Each run is then binary searched for zeros, so
//! the cost is polynomial in the degree and logarithmic in the range.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::poly::IntPolynomial;

/// Cauchy bound: every complex root `z` of `p` satisfies `|z| <= bound`.
/// Returns 0 for constants.
pub fn cauchy_bound(p: &IntPolynomial) -> BigInt {
    if p.is_constant() {
        return BigInt::zero();
    }
    let lead = p.leading_coeff().abs();
    let max_ratio = p.coeffs()[..p.degree()]
        .iter()
        .map(|c| Integer::div_ceil(&c.abs(), &lead))
        .max()
        .unwrap_or_default();
    max_ratio + BigInt::one()
}

/// All integers `k` in `[lo, hi]` with `p(k) = 0`, ascending. `p` must be nonzero.
pub fn integer_roots_in(p: &IntPolynomial, lo: &BigInt, hi: &BigInt) -> Vec<BigInt> {
    assert!(!p.is_zero(), "integer_roots_in: zero polynomial");
    if lo > hi || p.is_constant() {
        return Vec::new();
    }
    let breaks = monotone_breakpoints(p, lo, hi);
    let mut roots: Vec<BigInt> = Vec::new();
    for w in breaks.windows(2) {
        for r in roots_on_monotone_run(p, &w[0], &w[1]) {
            if roots.last() != Some(&r) {
                roots.push(r);
            }
        }
    }
    if breaks.len() == 1 && p.eval(&breaks[0]).is_zero() {
        roots.push(breaks[0].clone());
    }
    roots
}

/// Positive integer roots up to `hi` (inclusive).
pub fn positive_integer_roots(p: &IntPolynomial, hi: &BigInt) -> Vec<BigInt> {
    let bound = cauchy_bound(p);
    let top = if &bound < hi { bound } else { hi.clone() };
    integer_roots_in(p, &BigInt::one(), &top)
}

/// Sorted points `lo = b_0 < b_1 < ... < b_r = hi` such that `p` restricted to
/// the integers of each `[b_i, b_{i+1}]` is monotone.
fn monotone_breakpoints(p: &IntPolynomial, lo: &BigInt, hi: &BigInt) -> Vec<BigInt> {
    if lo == hi {
        return vec![lo.clone()];
    }
    if p.degree() <= 1 || hi - lo == BigInt::one() {
        return vec![lo.clone(), hi.clone()];
    }
    let diff = p.forward_difference();
    let hi_d = hi - BigInt::one();
    let mut points = vec![lo.clone(), hi.clone()];
    if diff.is_constant() {
        return points;
    }
    let diff_breaks = monotone_breakpoints(&diff, lo, &hi_d);
    for w in diff_breaks.windows(2) {
        points.push(w[0].clone());
        if let Some(c) = sign_switch(&diff, &w[0], &w[1]) {
            points.push(c);
        }
    }
    points.extend(diff_breaks.iter().cloned());
    points.sort();
    points.dedup();
    points
}

/// For `q` monotone on `[a, b]`, the first index where `q` takes the strict
/// sign of its end side, if that index lies strictly inside the run.
fn sign_switch(q: &IntPolynomial, a: &BigInt, b: &BigInt) -> Option<BigInt> {
    let qa = q.eval(a);
    let qb = q.eval(b);
    let increasing = qa <= qb;
    let reached = |k: &BigInt| {
        let v = q.eval(k);
        if increasing {
            v.is_positive()
        } else {
            v.is_negative()
        }
    };
    if !reached(b) || reached(a) {
        return None;
    }
    // invariant: !reached(lo), reached(hi)
    let mut lo = a.clone();
    let mut hi = b.clone();
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) >> 1;
        if reached(&mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

fn roots_on_monotone_run(p: &IntPolynomial, a: &BigInt, b: &BigInt) -> Vec<BigInt> {
    let pa = p.eval(a);
    let pb = p.eval(b);
    let increasing = pa <= pb;
    let at_or_past = |k: &BigInt| {
        let v = p.eval(k);
        if increasing {
            !v.is_negative()
        } else {
            !v.is_positive()
        }
    };
    if !at_or_past(b) {
        return Vec::new();
    }
    let first = if at_or_past(a) {
        a.clone()
    } else {
        let mut lo = a.clone();
        let mut hi = b.clone();
        while &hi - &lo > BigInt::one() {
            let mid: BigInt = (&lo + &hi) >> 1;
            if at_or_past(&mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    let mut roots = Vec::new();
    let mut k = first;
    while &k <= b && p.eval(&k).is_zero() {
        roots.push(k.clone());
        k += 1;
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(p: &IntPolynomial, lo: i64, hi: i64) -> Vec<BigInt> {
        (lo..=hi)
            .map(BigInt::from)
            .filter(|k| p.eval(k).is_zero())
            .collect()
    }

    #[test]
    fn finds_planted_roots() {
        // (h - 3)(h - 4)(h + 2)(h - 100)
        let mut q = IntPolynomial::constant(1);
        for r in [3, 4, -2, 100] {
            q = &q * &IntPolynomial::from_i64s(&[-r, 1]);
        }
        let roots = integer_roots_in(&q, &BigInt::from(-10), &BigInt::from(1000));
        let want: Vec<BigInt> = [-2, 3, 4, 100].iter().map(|&v| BigInt::from(v)).collect();
        assert_eq!(roots, want);
        assert_eq!(positive_integer_roots(&q, &BigInt::from(50)), want[1..3].to_vec());
    }

    #[test]
    fn cauchy_bound_dominates_roots() {
        let q = IntPolynomial::from_i64s(&[-600, 10, 1]); // roots 20, -30
        assert!(cauchy_bound(&q) >= BigInt::from(30));
    }

    proptest! {
        #[test]
        fn matches_brute_force(
            planted in prop::collection::vec(-40i64..40, 0..4),
            extra in prop::collection::vec(-6i64..6, 0..3),
            scale in 1i64..4,
        ) {
            let mut q = IntPolynomial::constant(scale);
            for r in &planted {
                q = &q * &IntPolynomial::from_i64s(&[-r, 1]);
            }
            let e = IntPolynomial::from_i64s(&extra);
            if !e.is_zero() {
                q = &q * &(&e + &IntPolynomial::monomial(1, extra.len()));
            }
            prop_assume!(!q.is_zero());
            let got = integer_roots_in(&q, &BigInt::from(-60), &BigInt::from(60));
            prop_assert_eq!(got, brute(&q, -60, 60));
        }
    }
}
