//! Integer polynomials in one variable with arbitrary-precision coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

/// A polynomial `c_0 + c_1 n + ... + c_d n^d` with integer coefficients.
///
/// Coefficients are stored in ascending order and kept canonical: there is
/// never a trailing zero, so the zero polynomial has an empty coefficient
/// vector. The degree of every constant (including zero) is 0.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant<T: Into<BigInt>>(c: T) -> Self {
        Self::from_coeffs(vec![c.into()])
    }

    /// `c * n^k`.
    pub fn monomial<T: Into<BigInt>>(c: T, k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = c.into();
        Self::from_coeffs(coeffs)
    }

    /// The identity polynomial `n`.
    pub fn var() -> Self {
        Self::monomial(1, 1)
    }

    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `n^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading_coeff(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    /// Drops the constant term, giving the representative of `p` modulo constants.
    pub fn without_constant(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        if let Some(c0) = coeffs.first_mut() {
            *c0 = BigInt::zero();
        }
        Self::from_coeffs(coeffs)
    }

    pub fn eval(&self, n: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * n + c;
        }
        acc
    }

    pub fn eval_i64(&self, n: i64) -> BigInt {
        self.eval(&BigInt::from(n))
    }

    /// `p(n + h)`, expanded with exact binomial coefficients.
    pub fn shift(&self, h: &BigInt) -> Self {
        if h.is_zero() || self.is_constant() {
            return self.clone();
        }
        let d = self.degree();
        let mut out = vec![BigInt::zero(); d + 1];
        // Horner in (n + h): acc <- acc * (n + h) + c_k
        for c in self.coeffs.iter().rev() {
            let mut next = vec![BigInt::zero(); d + 1];
            for (j, a) in out.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                if j + 1 <= d {
                    next[j + 1] += a;
                }
                next[j] += a * h;
            }
            next[0] += c;
            out = next;
        }
        Self::from_coeffs(out)
    }

    /// `p(k n)`.
    pub fn compose_scale(&self, k: &BigInt) -> Self {
        let mut pow = BigInt::one();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            coeffs.push(c * &pow);
            pow *= k;
        }
        Self::from_coeffs(coeffs)
    }

    /// Forward difference `p(n + 1) - p(n)`.
    pub fn forward_difference(&self) -> Self {
        &self.shift(&BigInt::one()) - self
    }

    /// Two polynomials are equivalent when they have the same degree and the
    /// same leading coefficient; all constants are mutually equivalent.
    pub fn equivalent(&self, other: &Self) -> bool {
        if self.is_constant() && other.is_constant() {
            return true;
        }
        self.degree() == other.degree() && self.leading_coeff() == other.leading_coeff()
    }
}

pub fn equivalent(p: &IntPolynomial, q: &IntPolynomial) -> bool {
    p.equivalent(q)
}

pub fn poly_shift(p: &IntPolynomial, h: &BigInt) -> IntPolynomial {
    p.shift(h)
}

impl<'a> Add<&'a IntPolynomial> for &'a IntPolynomial {
    type Output = IntPolynomial;
    fn add(self, rhs: &'a IntPolynomial) -> IntPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect();
        IntPolynomial::from_coeffs(coeffs)
    }
}

impl<'a> Sub<&'a IntPolynomial> for &'a IntPolynomial {
    type Output = IntPolynomial;
    fn sub(self, rhs: &'a IntPolynomial) -> IntPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect();
        IntPolynomial::from_coeffs(coeffs)
    }
}

impl<'a> Mul<&'a IntPolynomial> for &'a IntPolynomial {
    type Output = IntPolynomial;
    fn mul(self, rhs: &'a IntPolynomial) -> IntPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return IntPolynomial::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        IntPolynomial::from_coeffs(coeffs)
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;
    fn neg(self) -> IntPolynomial {
        IntPolynomial::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}")?;
                    }
                    write!(f, "n")?;
                    if k > 1 {
                        write!(f, "^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPolynomial({self})")
    }
}

// Coefficients serialize as a JSON integer array (ascending degree). Values
// outside the i64 range fall back to decimal strings.
impl Serialize for IntPolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            match c.to_i64() {
                Some(v) => seq.serialize_element(&v)?,
                None => seq.serialize_element(&c.to_string())?,
            }
        }
        seq.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CoeffRepr {
    Int(i64),
    Str(String),
}

impl<'de> Deserialize<'de> for IntPolynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct CoeffsVisitor;
        impl<'de> Visitor<'de> for CoeffsVisitor {
            type Value = IntPolynomial;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "an array of integer coefficients in ascending degree")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Self::Value, A::Error> {
                let mut coeffs = Vec::new();
                while let Some(c) = seq.next_element::<CoeffRepr>()? {
                    let v = match c {
                        CoeffRepr::Int(v) => BigInt::from(v),
                        CoeffRepr::Str(s) => s
                            .trim()
                            .parse::<BigInt>()
                            .map_err(|_| de::Error::custom(format!("bad integer {s:?}")))?,
                    };
                    coeffs.push(v);
                }
                Ok(IntPolynomial::from_coeffs(coeffs))
            }
        }
        deserializer.deserialize_seq(CoeffsVisitor)
    }
}
