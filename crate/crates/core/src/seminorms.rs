//! Gowers–Host–Kra seminorms on finite cyclic systems and on rotations,
//! cube integrals, dual functions, and uniformity seminorms of sequences.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::averages::WeightSequence;
use crate::dynsys::{e_fixed, AffineMap, CyclicMap, DynsysError, Observable};

/// Largest number of `(x, h_1, ..., h_k)` cube configurations enumerated.
pub const ORACLE_CAP: u64 = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeminormError {
    #[error("cube enumeration needs {needed} configurations, cap is {cap}")]
    Cap { needed: u64, cap: u64 },
    #[error("shape error: {0}")]
    Shape(String),
    #[error(transparent)]
    Dynsys(#[from] DynsysError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Recursive,
    BruteForce,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubeAverageResult {
    pub k: u32,
    pub value: f64,
    pub method: Method,
}

fn root(avg: f64, k: u32) -> f64 {
    avg.max(0.0).powf(1.0 / (1u64 << k) as f64)
}

fn check_len(t: &CyclicMap, f: &[Complex64]) -> Result<(), SeminormError> {
    if f.len() as u64 != t.modulus {
        return Err(SeminormError::Shape(format!("function of length {} on Z/{}", f.len(), t.modulus)));
    }
    Ok(())
}

/// Configurations `(x, h)` with `h` in the orbit subgroup `<a>` of `Z/N`.
fn cube_size(t: &CyclicMap, k: u32) -> Result<u64, SeminormError> {
    let needed = (t.period() as u128).pow(k) * t.modulus as u128;
    if needed > ORACLE_CAP as u128 {
        return Err(SeminormError::Cap { needed: needed.min(u64::MAX as u128) as u64, cap: ORACLE_CAP });
    }
    Ok(needed as u64)
}

/// `(1/N) Σ_x E_h Π_{ε ≠ skip} C^{|ε| + shift} f_ε(x + ε·h)` over the cube of
/// `T`-orbit steps, `C` complex conjugation. Vertices are indexed by the bits of `ε`.
fn cube_sum(t: &CyclicMap, fs: &[&[Complex64]], k: u32, skip_base: bool, x: u64) -> Complex64 {
    let n = t.modulus;
    let g = t.components();
    let p = t.period();
    let vertices = 1usize << k;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut h = vec![0u64; k as usize];
    loop {
        let mut prod = Complex64::new(1.0, 0.0);
        for eps in (skip_base as usize)..vertices {
            let mut y = x;
            for (i, hi) in h.iter().enumerate() {
                if eps >> i & 1 == 1 {
                    y += hi * g;
                }
            }
            let v = fs[eps][(y % n) as usize];
            let conj = (eps.count_ones() + skip_base as u32) % 2 == 1;
            prod *= if conj { v.conj() } else { v };
        }
        acc += prod;
        let mut i = 0;
        loop {
            if i == k as usize {
                return acc / (p as f64).powi(k as i32);
            }
            h[i] += 1;
            if h[i] < p {
                break;
            }
            h[i] = 0;
            i += 1;
        }
    }
}

/// `∫ Π_ε C^{|ε|} f_ε dμ^{[k]}` by complete enumeration of the cube measure.
pub fn cube_integral(t: &CyclicMap, fs: &[Vec<Complex64>], k: u32) -> Result<Complex64, SeminormError> {
    if fs.len() != 1 << k {
        return Err(SeminormError::Shape(format!("need {} functions, got {}", 1 << k, fs.len())));
    }
    for f in fs {
        check_len(t, f)?;
    }
    cube_size(t, k)?;
    let refs: Vec<&[Complex64]> = fs.iter().map(Vec::as_slice).collect();
    let total: Complex64 = (0..t.modulus).map(|x| cube_sum(t, &refs, k, false, x)).sum();
    Ok(total / t.modulus as f64)
}

/// `‖f‖_k` by brute-force enumeration of `μ^{[k]}`.
pub fn gowers_seminorm_finite(t: &CyclicMap, f: &[Complex64], k: u32) -> Result<CubeAverageResult, SeminormError> {
    if k == 0 {
        return Err(SeminormError::Shape("level must be at least 1".into()));
    }
    let fs = vec![f.to_vec(); 1 << k];
    let avg = cube_integral(t, &fs, k)?;
    Ok(CubeAverageResult { k, value: root(avg.re, k), method: Method::BruteForce })
}

fn level_one_power(t: &CyclicMap, f: &[Complex64]) -> f64 {
    let g = t.components() as usize;
    let mut sums = vec![Complex64::new(0.0, 0.0); g];
    for (i, v) in f.iter().enumerate() {
        sums[i % g] += v;
    }
    let size = (f.len() / g) as f64;
    sums.iter().map(|s| (s / size).norm_sqr()).sum::<f64>() / g as f64
}

/// `‖f‖_k^{2^k}` through `‖f‖_{k+1}^{2^{k+1}} = E_n ‖f · C T^n f‖_k^{2^k}`,
/// with `‖f‖_1^2 = ‖E(f|I)‖^2`. Limits are exact averages over one period.
fn recursive_power(t: &CyclicMap, f: &[Complex64], k: u32) -> f64 {
    if k == 1 {
        return level_one_power(t, f);
    }
    let n = f.len();
    let p = t.period();
    let step = t.shift as usize;
    let mut total = 0.0;
    let mut g = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..p as usize {
        let s = (j * step) % n;
        for x in 0..n {
            g[x] = f[x] * f[(x + s) % n].conj();
        }
        total += recursive_power(t, &g, k - 1);
    }
    total / p as f64
}

/// `‖f‖_k` through the van der Corput recursion.
pub fn gowers_seminorm_recursive(t: &CyclicMap, f: &[Complex64], k: u32) -> Result<CubeAverageResult, SeminormError> {
    if k == 0 {
        return Err(SeminormError::Shape("level must be at least 1".into()));
    }
    check_len(t, f)?;
    cube_size(t, k.saturating_sub(1))?;
    Ok(CubeAverageResult { k, value: root(recursive_power(t, f, k), k), method: Method::Recursive })
}

type Trig = BTreeMap<Vec<i64>, Complex64>;

fn trig_terms(f: &Observable) -> Result<Trig, SeminormError> {
    match f {
        Observable::Trig { terms } => {
            let mut out = Trig::new();
            for t in terms {
                *out.entry(t.freq.clone()).or_insert(Complex64::new(0.0, 0.0)) += t.coeff;
            }
            Ok(out)
        }
        Observable::Constant { value } => Ok(Trig::from([(Vec::new(), *value)])),
        _ => Err(SeminormError::Shape("torus seminorms need a trigonometric polynomial".into())),
    }
}

/// `‖f‖_k` for a rotation of a torus and a trigonometric polynomial, with the
/// limits in the recursion replaced by averages over `n < window`.
/// Level one is exact: `E(f|I)` keeps the characters with `k·b ∈ Z`.
pub fn gowers_seminorm_torus(t: &AffineMap, f: &Observable, k: u32, window: u64) -> Result<CubeAverageResult, SeminormError> {
    if !t.is_rotation() {
        return Err(SeminormError::Shape("torus seminorms are implemented for rotations".into()));
    }
    if k == 0 || window == 0 {
        return Err(SeminormError::Shape("level and window must be positive".into()));
    }
    let mut terms = trig_terms(f)?;
    let dim = t.dim();
    terms = terms.into_iter().map(|(mut kf, c)| {
        kf.resize(dim, 0);
        (kf, c)
    }).collect();
    Ok(CubeAverageResult { k, value: root(torus_power(t, &terms, k, window), k), method: Method::Recursive })
}

fn torus_power(t: &AffineMap, f: &Trig, k: u32, window: u64) -> f64 {
    let dot = |kf: &[i64]| {
        kf.iter()
            .zip(t.translation())
            .fold(crate::dynsys::Constant::zero(), |acc, (ki, b)| acc.add(&b.mul_int(&BigInt::from(*ki))))
    };
    if k == 1 {
        return f.iter().filter(|(kf, _)| dot(kf).is_integer()).map(|(_, c)| c.norm_sqr()).sum();
    }
    let mut total = 0.0;
    for n in 0..window {
        // C T^n f has coefficients conj(c_k e(n k·b)) at -k
        let mut g = Trig::new();
        for (k1, c1) in f {
            for (k2, c2) in f {
                let phase = e_fixed(&dot(k2).mul_int(&BigInt::from(n)).to_fixed(64), 64);
                let freq: Vec<i64> = k1.iter().zip(k2).map(|(a, b)| a - b).collect();
                *g.entry(freq).or_insert(Complex64::new(0.0, 0.0)) += c1 * (c2 * phase).conj();
            }
        }
        g.retain(|_, c| c.norm() > 1e-15);
        total += torus_power(t, &g, k - 1, window);
    }
    total / window as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualFunction {
    pub values: Vec<Complex64>,
    /// `|∫ f · C D_k f - ‖f‖_k^{2^k}|`, computed on every call.
    pub identity_gap: f64,
}

/// `D_k f(x) = E_h Π_{ε ≠ 0} C^{|ε| - 1} f(x + ε·h)`, so that `D_1 f = E(f|I)`
/// and `∫ f · C(D_k f) dμ = ‖f‖_k^{2^k}`.
pub fn dual_function(t: &CyclicMap, f: &[Complex64], k: u32) -> Result<DualFunction, SeminormError> {
    if k == 0 {
        return Err(SeminormError::Shape("level must be at least 1".into()));
    }
    check_len(t, f)?;
    cube_size(t, k)?;
    let fs: Vec<&[Complex64]> = vec![f; 1 << k];
    let values: Vec<Complex64> = (0..t.modulus).map(|x| cube_sum(t, &fs, k, true, x)).collect();
    let pairing: Complex64 = f.iter().zip(&values).map(|(a, d)| a * d.conj()).sum::<Complex64>() / f.len() as f64;
    let power = recursive_power(t, f, k);
    Ok(DualFunction { values, identity_gap: (pairing - power).norm() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformityReport {
    pub k: u32,
    pub h_max: usize,
    pub value: f64,
    /// `(h, c_h on the last interval, |c_h(last) - c_h(previous)|)`.
    pub table: Vec<(Vec<usize>, f64, f64)>,
    pub max_gap: f64,
    /// All gaps within the tolerance.
    pub adapted: bool,
}

/// `c_h` on `[start, end)` for every `h ∈ [1, H]^k`, row-major in `h`.
fn correlations(a: &[f64], start: usize, end: usize, k: u32, h_max: usize) -> Vec<f64> {
    let len = end - start;
    let span = k as usize * h_max;
    let base: Vec<f64> = a[start..end + span].to_vec();
    let mut out = Vec::with_capacity(h_max.pow(k));
    derivatives(&base, len, k, h_max, &mut out);
    out
}

/// Multiplicative differences `b_n a_{n+h}` down to the last level, where the
/// remaining correlation is averaged directly.
fn derivatives(b: &[f64], len: usize, k: u32, h_max: usize, out: &mut Vec<f64>) {
    if k == 1 {
        for h in 1..=h_max {
            let s: f64 = b[..len].iter().zip(&b[h..h + len]).map(|(x, y)| x * y).sum();
            out.push(s / len as f64);
        }
        return;
    }
    let keep = b.len() - h_max;
    for h in 1..=h_max {
        let d: Vec<f64> = b[..keep].iter().zip(&b[h..h + keep]).map(|(x, y)| x * y).collect();
        derivatives(&d, len, k - 1, h_max, out);
    }
}

/// `‖a‖_{I,k}` from `c_h` on the last interval, `h ∈ [1, H]^k`; the previous
/// interval supplies the stabilization gaps.
///
/// Intervals are `[start, end)` indices into `a`, which must extend `k·H`
/// beyond each interval.
pub fn seq_uniformity_seminorm(
    a: &[f64],
    intervals: &[(usize, usize)],
    k: u32,
    h_max: usize,
    tol: f64,
) -> Result<UniformityReport, SeminormError> {
    if k < 2 || h_max == 0 || intervals.len() < 2 {
        return Err(SeminormError::Shape("need k >= 2, H >= 1 and at least two intervals".into()));
    }
    let lengths: Vec<usize> = intervals.iter().map(|(s, e)| e.saturating_sub(*s)).collect();
    if lengths.windows(2).any(|w| w[1] <= w[0]) || lengths[0] == 0 {
        return Err(SeminormError::Shape("interval lengths must increase".into()));
    }
    if intervals.iter().any(|&(_, e)| e + k as usize * h_max > a.len()) {
        return Err(SeminormError::Shape("sequence too short for the intervals".into()));
    }
    let (ps, pe) = intervals[intervals.len() - 2];
    let (ls, le) = intervals[intervals.len() - 1];
    let prev = correlations(a, ps, pe, k, h_max);
    let last = correlations(a, ls, le, k, h_max);
    let mut table = Vec::with_capacity(last.len());
    for (idx, (c, p)) in last.iter().zip(&prev).enumerate() {
        let mut h = vec![0; k as usize];
        let mut r = idx;
        for slot in h.iter_mut().rev() {
            *slot = r % h_max + 1;
            r /= h_max;
        }
        table.push((h, *c, (c - p).abs()));
    }
    let max_gap = table.iter().map(|t| t.2).fold(0.0, f64::max);
    let mean = last.iter().sum::<f64>() / last.len() as f64;
    Ok(UniformityReport { k, h_max, value: root(mean, k), table, max_gap, adapted: max_gap <= tol })
}

/// `(1/|I|) Σ_{n ∈ I} a_n Re(u_n)` for each interval.
pub fn seq_correlation_test(a: &[f64], u: &WeightSequence, intervals: &[(usize, usize)]) -> Result<Vec<f64>, SeminormError> {
    let mut out = Vec::with_capacity(intervals.len());
    for &(s, e) in intervals {
        if e <= s || e > a.len() {
            return Err(SeminormError::Shape(format!("interval [{s}, {e}) outside the sequence")));
        }
        let sum: f64 = (s..e).map(|n| a[n] * u.get(n as u64).re).sum();
        out.push(sum / (e - s) as f64);
    }
    Ok(out)
}

/// Seeded `±1` sequence.
pub fn random_signs(seed: u64, len: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect()
}
