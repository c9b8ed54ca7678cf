use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::family::{star, PolyFamily, PolyTuple};
use super::poly::IntPolynomial;
use super::roots::{cauchy_bound, positive_integer_roots};
use super::PolyfamError;

/// `(S_h F - t, F - t)*`: shifted differences first, then unshifted ones,
/// all-constant tuples removed. `h = 0` is accepted.
pub fn vdc_apply(family: &PolyFamily, t: &PolyTuple, h: u64) -> Result<PolyFamily, PolyfamError> {
    if family.position(t).is_none() {
        return Err(PolyfamError::NotMember);
    }
    let h = BigInt::from(h);
    let shifted = family.tuples().iter().map(|s| s.shift(&h).sub(t));
    let plain = family.tuples().iter().map(|s| s.sub(t));
    star(family.arity(), family.degree_bound(), shifted.chain(plain).collect())
}

fn check_reducible(family: &PolyFamily) -> Result<(), PolyfamError> {
    let report = family.nice_report();
    if !report.is_nice() {
        return Err(PolyfamError::NotNice(report.violations));
    }
    let d11 = family.entry(0, 0).degree();
    if d11 < 2 {
        return Err(PolyfamError::DegreeTooLow(d11));
    }
    Ok(())
}

/// Index of the reduction tuple; see [`choose_pair`].
pub(crate) fn choose_pair_index(family: &PolyFamily) -> Result<usize, PolyfamError> {
    check_reducible(family)?;
    let by_row = family.prime_indices();
    for i in (1..family.arity()).rev() {
        if let Some(&j) = by_row[i].iter().min_by_key(|&&j| family.entry(i, j).degree()) {
            return Ok(j);
        }
    }
    let p11 = family.entry(0, 0);
    let outsider = (0..family.len())
        .filter(|&j| !family.entry(0, j).equivalent(p11))
        .min_by_key(|&j| family.entry(0, j).degree());
    Ok(outsider.unwrap_or(0))
}

/// Picks the tuple to subtract in the next reduction.
///
/// Rows are scanned from the last down to the second; the first non-empty
/// `P_i'` supplies the member whose `i`-th entry has least degree. When all
/// those sets are empty the first tuple is used if every first-row entry is
/// equivalent to `p_{1,1}`, otherwise the least-degree tuple whose first
/// entry is not. Ties go to the earliest tuple.
pub fn choose_pair(family: &PolyFamily) -> Result<PolyTuple, PolyfamError> {
    choose_pair_index(family).map(|j| family.tuples()[j].clone())
}

/// Polynomial in `n` whose coefficients are polynomials in `h`.
#[derive(Clone, Debug, PartialEq)]
struct HnPoly(Vec<IntPolynomial>);

impl HnPoly {
    fn from_plain(p: &IntPolynomial) -> Self {
        HnPoly(p.coeffs().iter().map(|c| IntPolynomial::constant(c.clone())).collect())
    }

    /// `p(n + h)` with `h` symbolic.
    fn shifted(p: &IntPolynomial) -> Self {
        let d = p.coeffs().len();
        let mut out = vec![IntPolynomial::zero(); d];
        for (k, c) in p.coeffs().iter().enumerate() {
            let mut binom = BigInt::one();
            for j in (0..=k).rev() {
                // coefficient of n^j h^(k-j) is c * C(k, j)
                let term = IntPolynomial::monomial(c * &binom, k - j);
                out[j] = &out[j] + &term;
                binom = binom * BigInt::from(j) / BigInt::from(k - j + 1);
            }
        }
        HnPoly(out)
    }

    fn sub(&self, other: &HnPoly) -> HnPoly {
        let len = self.0.len().max(other.0.len());
        let zero = IntPolynomial::zero();
        HnPoly(
            (0..len)
                .map(|k| self.0.get(k).unwrap_or(&zero) - other.0.get(k).unwrap_or(&zero))
                .collect(),
        )
    }

    fn is_generically_constant(&self) -> bool {
        self.0.iter().skip(1).all(IntPolynomial::is_zero)
    }

    /// Non-constant h-polynomials among the coefficients of `n^k`, `k >= 1`;
    /// only their roots can change the degree in `n`.
    fn critical(&self) -> impl Iterator<Item = &IntPolynomial> {
        self.0.iter().skip(1).filter(|c| !c.is_constant())
    }
}

/// Exceptional shifts for one reduction step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NiceExceptions {
    /// Every `h` in `1..=h_max` for which the reduced family is not nice.
    pub exceptions: Vec<u64>,
    /// No exception exists above this bound.
    pub certificate_bound: BigInt,
    pub h_max: u64,
    /// Candidate shifts that were checked explicitly.
    pub candidates: Vec<u64>,
}

impl NiceExceptions {
    pub fn is_exceptional(&self, h: u64) -> bool {
        assert!(h <= self.h_max || BigInt::from(h) > self.certificate_bound, "h outside certified range");
        self.exceptions.binary_search(&h).is_ok()
    }
}

/// All `h` in `1..=h_max` for which `vdc_apply(family, t, h)` is not nice.
///
/// The reduced family is tracked with `h` symbolic. Its niceness can only
/// differ from the generic case at positive integer roots of the
/// h-coefficients of its entries and of the row differences against the
/// first tuple, so those candidates are checked directly. The Cauchy bound
/// of the same polynomials certifies that nothing lies beyond.
pub fn nice_exceptions(family: &PolyFamily, t: &PolyTuple, h_max: u64) -> Result<NiceExceptions, PolyfamError> {
    check_reducible(family)?;
    if family.position(t).is_none() {
        return Err(PolyfamError::NotMember);
    }
    let l = family.arity();
    let t_sym: Vec<HnPoly> = t.entries().iter().map(HnPoly::from_plain).collect();
    let mut rows: Vec<Vec<HnPoly>> = Vec::new();
    for s in family.tuples() {
        rows.push((0..l).map(|i| HnPoly::shifted(s.entry(i)).sub(&t_sym[i])).collect());
    }
    for s in family.tuples() {
        rows.push((0..l).map(|i| HnPoly::from_plain(s.entry(i)).sub(&t_sym[i])).collect());
    }
    rows.retain(|tuple| !tuple.iter().all(HnPoly::is_generically_constant));

    let mut critical: Vec<IntPolynomial> = Vec::new();
    for tuple in &rows {
        for e in tuple {
            critical.extend(e.critical().cloned());
        }
    }
    if let Some(first) = rows.first() {
        for tuple in &rows[1..] {
            for i in 0..l {
                critical.extend(first[i].sub(&tuple[i]).critical().cloned());
            }
        }
    }

    let certificate_bound = critical.iter().map(cauchy_bound).max().unwrap_or_else(BigInt::zero);
    let hi = BigInt::from(h_max);
    let mut candidates: Vec<u64> = Vec::new();
    for c in &critical {
        for r in positive_integer_roots(c, &hi) {
            candidates.push(u64::try_from(r).expect("root below h_max"));
        }
    }
    candidates.sort_unstable();
    candidates.dedup();

    let generic_h = u64::try_from(&certificate_bound + BigInt::one()).map_err(|_| PolyfamError::GenericNotNice)?;
    if !vdc_apply(family, t, generic_h)?.is_nice() {
        return Err(PolyfamError::GenericNotNice);
    }
    let mut exceptions = Vec::new();
    for &h in &candidates {
        if !vdc_apply(family, t, h)?.is_nice() {
            exceptions.push(h);
        }
    }
    Ok(NiceExceptions { exceptions, certificate_bound, h_max, candidates })
}
