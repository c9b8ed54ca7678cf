//! Exact constants of the form `r_0 + Σ r_k sqrt(k)` with rational `r_k` and
//! squarefree radicands `k > 1`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::fixed::reduce_mod_one;
use super::DynsysError;

/// Element of the rational span of `1` and square roots of squarefree integers.
///
/// A non-zero square-root part marks the constant as irrational. That tag is
/// part of the input, never inferred from digits.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Constant {
    rational: BigRational,
    surds: BTreeMap<u64, BigRational>,
}

impl Constant {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn rational(r: BigRational) -> Self {
        Self { rational: r, surds: BTreeMap::new() }
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::rational(BigRational::new(num.into(), den.into()))
    }

    pub fn integer(n: i64) -> Self {
        Self::ratio(n, 1)
    }

    /// `c * sqrt(k)`, with `k` reduced to its squarefree part.
    pub fn sqrt_times(c: BigRational, k: u64) -> Self {
        let (square, free) = squarefree_split(k);
        let c = c * BigRational::from_integer(square.into());
        let mut out = Self::zero();
        if free == 1 {
            out.rational = c;
        } else if free != 0 && !c.is_zero() {
            out.surds.insert(free, c);
        }
        out
    }

    pub fn sqrt(k: u64) -> Self {
        Self::sqrt_times(BigRational::one(), k)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rational
    }

    pub fn surd_parts(&self) -> &BTreeMap<u64, BigRational> {
        &self.surds
    }

    pub fn is_rational(&self) -> bool {
        self.surds.is_empty()
    }

    pub fn to_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.rational)
    }

    pub fn is_integer(&self) -> bool {
        self.is_rational() && self.rational.is_integer()
    }

    pub fn is_zero(&self) -> bool {
        self.is_rational() && self.rational.is_zero()
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        let k = BigRational::from_integer(k.clone());
        let mut out = Self::rational(&self.rational * &k);
        for (r, c) in &self.surds {
            let c = c * &k;
            if !c.is_zero() {
                out.surds.insert(*r, c);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.rational += &other.rational;
        for (r, c) in &other.surds {
            let e = out.surds.entry(*r).or_insert_with(BigRational::zero);
            *e += c;
            if e.is_zero() {
                out.surds.remove(r);
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.mul_int(&BigInt::from(-1))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Fractional part as a `bits`-bit fixed-point residue, correct to one
    /// unit in the last place.
    pub fn to_fixed(&self, bits: u32) -> BigUint {
        const GUARD: u32 = 64;
        let g = bits + GUARD;
        let scale = BigInt::one() << g;
        let mut total = (&self.rational * BigRational::from_integer(scale.clone())).floor().to_integer();
        for (r, c) in &self.surds {
            let (num, den) = (c.numer(), c.denom());
            let radicand = num.magnitude() * num.magnitude() * BigUint::from(*r) << (2 * g as usize);
            let root = BigInt::from_biguint(Sign::Plus, radicand.sqrt());
            let term = if num.is_negative() { -(root / den) - 1 } else { root / den };
            total += term;
        }
        reduce_mod_one(&(total >> GUARD), bits)
    }

    pub fn to_f64(&self) -> f64 {
        let mut x = self.rational.to_f64().unwrap_or(f64::NAN);
        for (r, c) in &self.surds {
            x += c.to_f64().unwrap_or(f64::NAN) * (*r as f64).sqrt();
        }
        x
    }
}

/// `k = square^2 * free` with `free` squarefree.
fn squarefree_split(k: u64) -> (u64, u64) {
    if k == 0 {
        return (0, 0);
    }
    let (mut square, mut free, mut rest) = (1u64, 1u64, k);
    let mut p = 2u64;
    while p * p <= rest {
        let mut e = 0;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        square *= p.pow(e / 2);
        if e % 2 == 1 {
            free *= p;
        }
        p += 1;
    }
    (square, free * rest)
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if !self.rational.is_zero() || self.surds.is_empty() {
            write!(f, "{}", self.rational)?;
            first = false;
        }
        for (r, c) in &self.surds {
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            if !a.is_one() {
                write!(f, "{a}*")?;
            }
            write!(f, "sqrt{r}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Constant({self})")
    }
}

impl FromStr for Constant {
    type Err = DynsysError;

    /// Sums of terms like `3`, `-1/2`, `0.25`, `sqrt2`, `sqrt(3)`, `2*sqrt5`, `sqrt3/2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DynsysError::Parse(s.to_string());
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if text.is_empty() {
            return Err(bad());
        }
        let mut out = Self::zero();
        let mut rest = text.as_str();
        while !rest.is_empty() {
            let negative = rest.starts_with('-');
            if rest.starts_with('+') || negative {
                rest = &rest[1..];
            }
            let end = rest[1.min(rest.len())..].find(['+', '-']).map_or(rest.len(), |i| i + 1);
            let term = parse_term(&rest[..end]).ok_or_else(bad)?;
            out = if negative { out.sub(&term) } else { out.add(&term) };
            rest = &rest[end..];
        }
        Ok(out)
    }
}

fn parse_term(t: &str) -> Option<Constant> {
    let mut factor = BigRational::one();
    let mut radicand = None;
    for (i, part) in t.split('*').enumerate() {
        let (head, div) = match part.split_once('/') {
            Some((h, d)) => (h, Some(d)),
            None => (part, None),
        };
        if let Some(body) = head.strip_prefix("sqrt") {
            let body = body.strip_prefix('(').and_then(|b| b.strip_suffix(')')).unwrap_or(body);
            if radicand.replace(body.parse::<u64>().ok()?).is_some() {
                return None;
            }
        } else {
            if i > 0 && radicand.is_none() && head.is_empty() {
                return None;
            }
            factor *= parse_decimal(head)?;
        }
        if let Some(d) = div {
            let d = parse_decimal(d)?;
            if d.is_zero() {
                return None;
            }
            factor /= d;
        }
    }
    Some(match radicand {
        Some(k) => Constant::sqrt_times(factor, k),
        None => Constant::rational(factor),
    })
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let den = BigInt::from(10u32).pow(frac.len() as u32);
    Some(BigRational::new(digits, den))
}

/// `k·c` is rational with denominator dividing `d`.
pub(crate) fn is_multiple_integer(c: &Constant, d: &BigInt) -> bool {
    c.is_rational() && (c.rational_part() * BigRational::from_integer(d.clone())).is_integer()
}

impl Serialize for Constant {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Constant {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
