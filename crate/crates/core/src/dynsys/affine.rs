use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::constant::Constant;
use super::fixed::{reduce_mod_one, TorusPoint};
use super::DynsysError;

/// Bits of accuracy kept after the largest integer multiplier of the
/// translation has eaten into the fixed-point budget.
pub const ACCURACY_BITS: u32 = 48;

/// `T x = S x + b` on `T^m` with `S` unipotent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawAffine", into = "RawAffine")]
pub struct AffineMap {
    matrix: Vec<Vec<i64>>,
    translation: Vec<Constant>,
    bits: u32,
    fixed_b: Vec<BigInt>,
    /// `(S - I)^k` for `k < m`.
    nil_powers: Vec<Vec<Vec<BigInt>>>,
}

#[derive(Clone, Serialize, Deserialize)]
struct RawAffine {
    matrix: Vec<Vec<i64>>,
    translation: Vec<Constant>,
    bits: u32,
}

impl TryFrom<RawAffine> for AffineMap {
    type Error = DynsysError;
    fn try_from(r: RawAffine) -> Result<Self, Self::Error> {
        AffineMap::new(r.matrix, r.translation, r.bits)
    }
}

impl From<AffineMap> for RawAffine {
    fn from(a: AffineMap) -> Self {
        RawAffine { matrix: a.matrix, translation: a.translation, bits: a.bits }
    }
}

type Mat = Vec<Vec<BigInt>>;

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| &a[i][k] * &b[k][j]).sum()).collect())
        .collect()
}

fn to_big(m: &[Vec<i64>]) -> Mat {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

fn identity(n: usize) -> Mat {
    (0..n).map(|i| (0..n).map(|j| BigInt::from((i == j) as u8)).collect()).collect()
}

/// Exact determinant by fraction-free elimination.
fn determinant(m: &Mat) -> BigInt {
    let n = m.len();
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else { return BigInt::zero() };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    if n == 0 { BigInt::one() } else { sign * &a[n - 1][n - 1] }
}

/// Rank over the rationals.
pub(crate) fn rank(mut rows: Vec<Vec<BigRational>>, cols: usize) -> usize {
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(p, r);
        let pivot = rows[r][c].clone();
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = &rows[i][c] / &pivot;
                for j in c..cols {
                    let d = &f * &rows[r][j];
                    rows[i][j] -= d;
                }
            }
        }
        r += 1;
    }
    r
}

/// Generalized binomials `C(n, 0..=k)`; exact for negative `n` as well.
fn binomials(n: &BigInt, k: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(k + 1);
    let mut c = BigInt::one();
    out.push(c.clone());
    for i in 0..k {
        c = c * (n - BigInt::from(i)) / BigInt::from(i + 1);
        out.push(c.clone());
    }
    out
}

impl AffineMap {
    pub fn new(matrix: Vec<Vec<i64>>, translation: Vec<Constant>, bits: u32) -> Result<Self, DynsysError> {
        let m = matrix.len();
        if m == 0 || translation.len() != m || matrix.iter().any(|r| r.len() != m) {
            return Err(DynsysError::Shape(format!(
                "matrix must be square of size {} matching the translation",
                translation.len()
            )));
        }
        let s = to_big(&matrix);
        let mut nil = s.clone();
        for (i, row) in nil.iter_mut().enumerate() {
            row[i] -= 1;
        }
        let mut nil_powers = vec![identity(m)];
        for _ in 1..m {
            let next = mat_mul(nil_powers.last().unwrap(), &nil);
            nil_powers.push(next);
        }
        let top = mat_mul(nil_powers.last().unwrap(), &nil);
        if top.iter().flatten().any(|x| !x.is_zero()) {
            return Err(DynsysError::NotUnipotent);
        }
        if determinant(&s).abs() != BigInt::one() {
            return Err(DynsysError::NotMeasurePreserving);
        }
        let fixed_b = translation
            .iter()
            .map(|c| BigInt::from_biguint(Sign::Plus, c.to_fixed(bits)))
            .collect();
        Ok(Self { matrix, translation, bits, fixed_b, nil_powers })
    }

    pub fn rotation(translation: Vec<Constant>, bits: u32) -> Result<Self, DynsysError> {
        let m = translation.len();
        let id = (0..m).map(|i| (0..m).map(|j| (i == j) as i64).collect()).collect();
        Self::new(id, translation, bits)
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn translation(&self) -> &[Constant] {
        &self.translation
    }

    pub fn is_rotation(&self) -> bool {
        self.nil_powers.len() == 1 || self.nil_powers[1].iter().flatten().all(Zero::is_zero)
    }

    /// Fixed-point bits needed to evaluate `T^n` with [`ACCURACY_BITS`] to spare.
    pub fn required_bits(&self, n: &BigInt) -> u64 {
        let c = binomials(n, self.dim());
        let mut total = BigInt::zero();
        for (k, pk) in self.nil_powers.iter().enumerate() {
            let row_sum = pk.iter().map(|r| r.iter().map(|x| x.abs()).sum::<BigInt>()).max().unwrap_or_default();
            total += c[k + 1].abs() * row_sum;
        }
        total.bits() + ACCURACY_BITS as u64
    }

    /// `T^n x` by the closed form
    /// `Σ_k C(n,k) (S-I)^k x + Σ_k C(n,k+1) (S-I)^k b`, reducing mod 1 only at the end.
    pub fn power_apply(&self, n: &BigInt, x: &TorusPoint) -> Result<TorusPoint, DynsysError> {
        let m = self.dim();
        if x.dim() != m || x.bits() != self.bits {
            return Err(DynsysError::Shape(format!(
                "point has dimension {} at {} bits, map has {} at {}",
                x.dim(),
                x.bits(),
                m,
                self.bits
            )));
        }
        let required = self.required_bits(n);
        if required > self.bits as u64 {
            return Err(DynsysError::Precision { required, available: self.bits });
        }
        let c = binomials(n, m);
        let xs: Vec<BigInt> = x.coords().iter().map(|v| BigInt::from_biguint(Sign::Plus, v.clone())).collect();
        let coords = (0..m)
            .map(|i| {
                let mut acc = BigInt::zero();
                for (k, pk) in self.nil_powers.iter().enumerate() {
                    let mut vx = BigInt::zero();
                    let mut vb = BigInt::zero();
                    for j in 0..m {
                        if !pk[i][j].is_zero() {
                            vx += &pk[i][j] * &xs[j];
                            vb += &pk[i][j] * &self.fixed_b[j];
                        }
                    }
                    acc += &c[k] * vx + &c[k + 1] * vb;
                }
                reduce_mod_one(&acc, self.bits)
            })
            .collect();
        Ok(TorusPoint::from_raw(coords, self.bits))
    }

    pub fn apply(&self, x: &TorusPoint) -> Result<TorusPoint, DynsysError> {
        self.power_apply(&BigInt::one(), x)
    }

    /// `T` is ergodic iff no non-zero integer `k` has `k (S - I) = 0` and `k·b`
    /// rational. Both conditions are linear over Q, so this is a rank check.
    pub fn is_ergodic(&self) -> bool {
        let m = self.dim();
        let mut rows: Vec<Vec<BigRational>> = (0..m)
            .map(|j| {
                (0..m)
                    .map(|i| BigRational::from_integer((self.matrix[i][j] - (i == j) as i64).into()))
                    .collect()
            })
            .collect();
        let radicands: std::collections::BTreeSet<u64> =
            self.translation.iter().flat_map(|c| c.surd_parts().keys().copied()).collect();
        for r in radicands {
            rows.push(
                self.translation
                    .iter()
                    .map(|c| c.surd_parts().get(&r).cloned().unwrap_or_else(BigRational::zero))
                    .collect(),
            );
        }
        rank(rows, m) == m
    }

    /// Exact check of `S T = T S` and `S b' + b = S' b + b'` modulo `Z^m`.
    pub fn commutes_with(&self, other: &Self) -> bool {
        let m = self.dim();
        if other.dim() != m {
            return false;
        }
        let (a, b) = (to_big(&self.matrix), to_big(&other.matrix));
        if mat_mul(&a, &b) != mat_mul(&b, &a) {
            return false;
        }
        (0..m).all(|i| {
            let mut d = self.translation[i].sub(&other.translation[i]);
            for j in 0..m {
                d = d
                    .add(&other.translation[j].mul_int(&a[i][j]))
                    .sub(&self.translation[j].mul_int(&b[i][j]));
            }
            d.is_integer()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::fixed::fraction_f64;
    use proptest::prelude::*;

    fn k(s: &str) -> Constant {
        s.parse().unwrap()
    }

    fn skew(bits: u32) -> AffineMap {
        AffineMap::new(vec![vec![1, 0], vec![1, 1]], vec![k("sqrt2 - 1"), k("0")], bits).unwrap()
    }

    #[test]
    fn construction_checks() {
        assert_eq!(
            AffineMap::new(vec![vec![2, 1], vec![1, 1]], vec![k("0"), k("0")], 64),
            Err(DynsysError::NotUnipotent)
        );
        assert!(AffineMap::new(vec![vec![1, 5], vec![0, 1]], vec![k("0"), k("0")], 64).is_ok());
        assert!(matches!(AffineMap::new(vec![vec![1]], vec![], 64), Err(DynsysError::Shape(_))));
        // -I is not unipotent
        assert_eq!(AffineMap::new(vec![vec![-1]], vec![k("0")], 64), Err(DynsysError::NotUnipotent));
    }

    #[test]
    fn rotation_power() {
        let t = AffineMap::rotation(vec![k("1/8")], 64).unwrap();
        let x = TorusPoint::from_f64s(&[0.5], 64);
        assert_eq!(t.power_apply(&BigInt::from(3), &x).unwrap().to_f64s(), vec![0.875]);
        assert_eq!(t.power_apply(&BigInt::from(-5), &x).unwrap().to_f64s(), vec![0.875]);
        assert_eq!(t.power_apply(&BigInt::zero(), &x).unwrap(), x);
    }

    #[test]
    fn skew_closed_form_matches_iteration() {
        let t = skew(256);
        let x0 = TorusPoint::from_f64s(&[0.3, 0.7], 256);
        let alpha = fraction_f64(&k("sqrt2 - 1").to_fixed(256), 256);
        let mut x = x0.clone();
        for n in 0..=50i64 {
            let closed = t.power_apply(&BigInt::from(n), &x0).unwrap();
            assert_eq!(closed, x, "n = {n}");
            let expect_y = 0.7 + n as f64 * 0.3 + (n * (n - 1) / 2) as f64 * alpha;
            let got = closed.coord_f64(1);
            let diff = (got - expect_y.rem_euclid(1.0)).abs();
            assert!(diff.min(1.0 - diff) < 1e-9);
            x = t.apply(&x).unwrap();
        }
    }

    #[test]
    fn precision_budget() {
        let t = skew(64);
        let x = TorusPoint::zero(2, 64);
        match t.power_apply(&BigInt::from(10u64).pow(6), &x) {
            Err(DynsysError::Precision { required, available: 64 }) => assert!(required > 64),
            other => panic!("{other:?}"),
        }
        let big = BigInt::from(10u64).pow(30);
        assert!(skew(256).power_apply(&big, &TorusPoint::zero(2, 256)).is_ok());
    }

    #[test]
    fn commutation() {
        let a = AffineMap::rotation(vec![k("sqrt2 - 1")], 64).unwrap();
        let b = AffineMap::rotation(vec![k("1/3")], 64).unwrap();
        assert!(a.commutes_with(&b));
        let s1 = skew(64);
        let s2 = AffineMap::rotation(vec![k("0"), k("sqrt3 - 1")], 64).unwrap();
        assert!(s1.commutes_with(&s2));
        // the skew map does not commute with a rotation in the first coordinate
        let s3 = AffineMap::rotation(vec![k("sqrt5"), k("0")], 64).unwrap();
        assert!(!s1.commutes_with(&s3));
        let s4 = AffineMap::rotation(vec![k("1"), k("0")], 64).unwrap();
        assert!(s1.commutes_with(&s4));
    }

    #[test]
    fn ergodicity() {
        assert!(AffineMap::rotation(vec![k("sqrt2 - 1")], 64).unwrap().is_ergodic());
        assert!(!AffineMap::rotation(vec![k("1/3")], 64).unwrap().is_ergodic());
        assert!(AffineMap::rotation(vec![k("sqrt2"), k("sqrt3")], 64).unwrap().is_ergodic());
        assert!(!AffineMap::rotation(vec![k("sqrt2"), k("2*sqrt2 + 1/5")], 64).unwrap().is_ergodic());
        assert!(skew(64).is_ergodic());
        let rational_skew = AffineMap::new(vec![vec![1, 0], vec![1, 1]], vec![k("1/2"), k("sqrt2")], 64).unwrap();
        assert!(!rational_skew.is_ergodic());
    }

    #[test]
    fn serde_round_trip() {
        let t = skew(128);
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(serde_json::from_str::<AffineMap>(&s).unwrap(), t);
        assert!(serde_json::from_str::<AffineMap>(r#"{"matrix":[[2]],"translation":["0"],"bits":64}"#).is_err());
    }

    proptest! {
        #[test]
        fn power_is_additive(a in -1_000_000i64..=1_000_000, b in -1_000_000i64..=1_000_000, x in 0.0f64..1.0, y in 0.0f64..1.0) {
            let t = AffineMap::new(
                vec![vec![1, 0, 0], vec![2, 1, 0], vec![1, 3, 1]],
                vec![k("sqrt2 - 1"), k("1/7"), k("sqrt3")],
                256,
            ).unwrap();
            let p = TorusPoint::from_f64s(&[x, y, 0.1], 256);
            let lhs = t.power_apply(&BigInt::from(a + b), &p).unwrap();
            let rhs = t.power_apply(&BigInt::from(a), &t.power_apply(&BigInt::from(b), &p).unwrap()).unwrap();
            for i in 0..3 {
                let d = (lhs.coord_f64(i) - rhs.coord_f64(i)).abs();
                prop_assert!(d.min(1.0 - d) < 1e-12);
            }
        }
    }
}
