use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::poly::{e64, RealPolynomial};
use super::EquidistError;
use crate::dynsys::{AffineMap, Constant, TorusPoint};

const CHUNK: u64 = 1 << 14;

/// Sum of `term(n)` over `[m, n)` in fixed chunks, added in index order.
pub(crate) fn chunked_sum<F>(m: u64, n: u64, term: F) -> Complex64
where
    F: Fn(u64) -> Complex64 + Sync,
{
    let chunks: Vec<u64> = (m..n).step_by(CHUNK as usize).collect();
    let partial: Vec<Complex64> = chunks
        .par_iter()
        .map(|&lo| (lo..(lo + CHUNK).min(n)).map(&term).sum())
        .collect();
    partial.into_iter().sum()
}

/// `(1/(N-M)) Σ_{M <= n < N} e(p(n))`.
pub fn weyl_average(p: &RealPolynomial, window: (u64, u64), bits: u32) -> Result<Complex64, EquidistError> {
    let (m, n) = window;
    if n <= m {
        return Err(EquidistError::Shape("empty window".into()));
    }
    let eval = p.phases(n, bits)?;
    Ok(chunked_sum(m, n, |k| e64(eval.phase(k))) / (n - m) as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquidistVerdict {
    pub pass: bool,
    /// Frequency with the largest `|avg e(k·x_n)|`.
    pub worst_freq: Vec<i64>,
    pub worst_value: f64,
    pub n: u64,
    pub cutoff: i64,
    pub tol: f64,
}

/// Non-zero `k` with `|k|_∞ <= cutoff` and first non-zero entry positive;
/// `-k` gives the conjugate average.
fn half_frequencies(dim: usize, cutoff: i64) -> Vec<Vec<i64>> {
    let side = (2 * cutoff + 1) as usize;
    let total = side.pow(dim as u32);
    (0..total)
        .map(|mut idx| {
            (0..dim)
                .map(|_| {
                    let v = (idx % side) as i64 - cutoff;
                    idx /= side;
                    v
                })
                .collect::<Vec<i64>>()
        })
        .filter(|k| k.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0))
        .collect()
}

/// Truncated Weyl criterion on `T^dim`: the largest character average over
/// `0 <= |k|_∞ <= cutoff`, `k != 0`, of the points `x_0, ..., x_{N-1}`
/// given as 64-bit fractions.
pub fn equidist_test<F>(dim: usize, seq: F, n: u64, cutoff: i64, tol: f64) -> EquidistVerdict
where
    F: Fn(u64) -> Vec<u64> + Sync,
{
    let freqs = half_frequencies(dim, cutoff);
    let side = (2 * cutoff + 1) as usize;
    let chunks: Vec<u64> = (0..n).step_by(CHUNK as usize).collect();
    let partial: Vec<Vec<Complex64>> = chunks
        .par_iter()
        .map(|&lo| {
            let mut acc = vec![Complex64::new(0.0, 0.0); freqs.len()];
            let mut pw = vec![Complex64::new(0.0, 0.0); dim * side];
            for t in lo..(lo + CHUNK).min(n) {
                let x = seq(t);
                for (j, &phase) in x.iter().enumerate() {
                    let z = e64(phase);
                    let row = &mut pw[j * side..(j + 1) * side];
                    row[cutoff as usize] = Complex64::new(1.0, 0.0);
                    for k in 1..=cutoff as usize {
                        row[cutoff as usize + k] = row[cutoff as usize + k - 1] * z;
                        row[cutoff as usize - k] = row[cutoff as usize + k].conj();
                    }
                }
                for (a, k) in acc.iter_mut().zip(&freqs) {
                    let mut v = Complex64::new(1.0, 0.0);
                    for (j, &kj) in k.iter().enumerate() {
                        if kj != 0 {
                            v *= pw[j * side + (kj + cutoff) as usize];
                        }
                    }
                    *a += v;
                }
            }
            acc
        })
        .collect();
    let mut sums = vec![Complex64::new(0.0, 0.0); freqs.len()];
    for p in partial {
        for (s, v) in sums.iter_mut().zip(p) {
            *s += v;
        }
    }
    let (mut worst, mut worst_value) = (vec![0; dim], 0.0);
    for (k, s) in freqs.iter().zip(&sums) {
        let v = s.norm() / n.max(1) as f64;
        if v > worst_value {
            worst_value = v;
            worst = k.clone();
        }
    }
    EquidistVerdict { pass: worst_value < tol, worst_freq: worst, worst_value, n, cutoff, tol }
}

/// Witness `(k_1, k_2)` with `k_2 != 0`, entries bounded by `cutoff`, and
/// `k_1·b + k_2·x ∈ Z`. Only exact (rational) `x` can be checked.
pub fn genericity_witness(b: &[Constant], x: &[BigRational], cutoff: i64) -> Option<(Vec<i64>, Vec<i64>)> {
    let m = b.len();
    let freqs = half_frequencies(m, cutoff);
    let all: Vec<Vec<i64>> = std::iter::once(vec![0; m])
        .chain(freqs.iter().cloned())
        .chain(freqs.iter().map(|k| k.iter().map(|v| -v).collect()))
        .collect();
    for k2 in &freqs {
        let kx: BigRational = k2.iter().zip(x).map(|(k, xi)| xi * BigRational::from_integer((*k).into())).sum();
        for k1 in &all {
            let kb = k1
                .iter()
                .zip(b)
                .fold(Constant::rational(kx.clone()), |acc, (k, c)| acc.add(&c.mul_int(&BigInt::from(*k))));
            if kb.is_integer() {
                return Some((k1.clone(), k2.clone()));
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairVerdict {
    pub x: Vec<f64>,
    pub verdict: EquidistVerdict,
    /// Violation of the genericity condition found below the cutoff.
    pub genericity_witness: Option<(Vec<i64>, Vec<i64>)>,
}

/// Parameters of [`affine_pair_test`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairTestParams {
    pub n: u64,
    pub cutoff: i64,
    pub tol: f64,
    /// Frequency bound for the genericity search.
    pub genericity_cutoff: i64,
}

/// Joint equidistribution of `(T^{n^d} x, u(n))` on `T^{m_1} x T^{m_2}` for
/// each sampled `x` (rational coordinates).
pub fn affine_pair_test(
    t: &AffineMap,
    d: u32,
    u: &[RealPolynomial],
    xs: &[Vec<BigRational>],
    params: PairTestParams,
) -> Result<Vec<PairVerdict>, EquidistError> {
    if !t.is_ergodic() {
        return Err(EquidistError::Hypothesis("affine map is not ergodic".into()));
    }
    if let Some(i) = u.iter().position(|p| !p.divisible_by_power(d as usize + 1)) {
        return Err(EquidistError::Hypothesis(format!("u_{i} is not divisible by t^{}", d + 1)));
    }
    let evals = u.iter().map(|p| p.phases(params.n, t.bits())).collect::<Result<Vec<_>, _>>()?;
    if !u.is_empty() {
        let own = equidist_test(u.len(), |k| evals.iter().map(|e| e.phase(k)).collect(), params.n, params.cutoff, params.tol);
        if !own.pass {
            return Err(EquidistError::Hypothesis(format!(
                "u is not equidistributed: frequency {:?} averages {:.3e}",
                own.worst_freq, own.worst_value
            )));
        }
    }
    let m1 = t.dim();
    let top = |v: &num_bigint::BigUint| (v >> (t.bits() - 64)).to_u64().unwrap_or(0);
    let mut out = Vec::with_capacity(xs.len());
    for x in xs {
        if x.len() != m1 {
            return Err(EquidistError::Shape("sample has the wrong dimension".into()));
        }
        let consts: Vec<Constant> = x.iter().map(|r| Constant::rational(r.clone())).collect();
        let p = TorusPoint::from_raw(consts.iter().map(|c| c.to_fixed(t.bits())).collect(), t.bits());
        t.power_apply(&BigInt::from(params.n).pow(d), &p)?;
        let verdict = equidist_test(
            m1 + u.len(),
            |k| {
                let y = t.power_apply(&BigInt::from(k).pow(d), &p).expect("budget checked at the window end");
                y.coords().iter().map(top).chain(evals.iter().map(|e| e.phase(k))).collect()
            },
            params.n,
            params.cutoff,
            params.tol,
        );
        out.push(PairVerdict {
            x: x.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect(),
            verdict,
            genericity_witness: genericity_witness(t.translation(), x, params.genericity_cutoff),
        });
    }
    Ok(out)
}
