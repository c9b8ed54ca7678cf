use std::fmt;

use serde::{Deserialize, Serialize};

use super::poly::IntPolynomial;
use super::PolyfamError;

/// One tuple `(p_1, ..., p_l)`; entry `i` belongs to row `i` of a family.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PolyTuple {
    entries: Vec<IntPolynomial>,
}

impl PolyTuple {
    pub fn new(entries: Vec<IntPolynomial>) -> Self {
        Self { entries }
    }

    pub fn from_i64s(rows: &[&[i64]]) -> Self {
        Self::new(rows.iter().map(|c| IntPolynomial::from_i64s(c)).collect())
    }

    pub fn arity(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[IntPolynomial] {
        &self.entries
    }

    pub fn entry(&self, i: usize) -> &IntPolynomial {
        &self.entries[i]
    }

    pub fn is_constant(&self) -> bool {
        self.entries.iter().all(IntPolynomial::is_constant)
    }

    pub fn max_degree(&self) -> usize {
        self.entries.iter().map(IntPolynomial::degree).max().unwrap_or(0)
    }

    /// Entrywise `self - other`.
    pub fn sub(&self, other: &PolyTuple) -> PolyTuple {
        PolyTuple::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    /// Entrywise `p(n + h)`.
    pub fn shift(&self, h: &num_bigint::BigInt) -> PolyTuple {
        PolyTuple::new(self.entries.iter().map(|p| p.shift(h)).collect())
    }

    /// Drops every constant term.
    pub fn without_constants(&self) -> PolyTuple {
        PolyTuple::new(self.entries.iter().map(IntPolynomial::without_constant).collect())
    }
}

impl fmt::Display for PolyTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, p) in self.entries.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for PolyTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// An ordered family of tuples of common arity, none of them all-constant.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFamily", into = "RawFamily")]
pub struct PolyFamily {
    arity: usize,
    degree_bound: usize,
    tuples: Vec<PolyTuple>,
}

#[derive(Serialize, Deserialize)]
struct RawFamily {
    arity: usize,
    degree: usize,
    tuples: Vec<PolyTuple>,
}

impl TryFrom<RawFamily> for PolyFamily {
    type Error = PolyfamError;
    fn try_from(r: RawFamily) -> Result<Self, Self::Error> {
        PolyFamily::new(r.arity, r.degree, r.tuples)
    }
}

impl From<PolyFamily> for RawFamily {
    fn from(f: PolyFamily) -> Self {
        RawFamily { arity: f.arity, degree: f.degree_bound, tuples: f.tuples }
    }
}

fn check_tuples(arity: usize, degree_bound: usize, tuples: &[PolyTuple]) -> Result<(), PolyfamError> {
    if arity == 0 {
        return Err(PolyfamError::ZeroArity);
    }
    for t in tuples {
        if t.arity() != arity {
            return Err(PolyfamError::Arity { expected: arity, found: t.arity() });
        }
        let degree = t.max_degree();
        if degree > degree_bound {
            return Err(PolyfamError::DegreeBound { degree, bound: degree_bound });
        }
    }
    Ok(())
}

/// Removes all-constant tuples, keeping the order of the rest.
///
/// An empty result is allowed; check [`PolyFamily::is_empty`].
pub fn star(arity: usize, degree_bound: usize, tuples: Vec<PolyTuple>) -> Result<PolyFamily, PolyfamError> {
    check_tuples(arity, degree_bound, &tuples)?;
    let tuples = tuples.into_iter().filter(|t| !t.is_constant()).collect();
    Ok(PolyFamily { arity, degree_bound, tuples })
}

impl PolyFamily {
    /// Validates arity and degrees and rejects all-constant tuples; use
    /// [`star`] to drop them instead.
    pub fn new(arity: usize, degree_bound: usize, tuples: Vec<PolyTuple>) -> Result<Self, PolyfamError> {
        check_tuples(arity, degree_bound, &tuples)?;
        if let Some(k) = tuples.iter().position(PolyTuple::is_constant) {
            return Err(PolyfamError::ConstantTuple(k));
        }
        Ok(Self { arity, degree_bound, tuples })
    }

    /// Builds a family from coefficient arrays; the degree bound is the
    /// largest degree present (at least 1).
    pub fn from_i64s(tuples: &[&[&[i64]]]) -> Result<Self, PolyfamError> {
        let tuples: Vec<PolyTuple> = tuples.iter().map(|t| PolyTuple::from_i64s(t)).collect();
        let arity = tuples.first().map_or(1, PolyTuple::arity);
        let d = tuples.iter().map(PolyTuple::max_degree).max().unwrap_or(1).max(1);
        Self::new(arity, d, tuples)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn tuples(&self) -> &[PolyTuple] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// Largest degree of any entry.
    pub fn degree(&self) -> usize {
        self.tuples.iter().map(PolyTuple::max_degree).max().unwrap_or(0)
    }

    /// Entry `(i, j)`: row `i`, tuple `j`, both 0-based.
    pub fn entry(&self, i: usize, j: usize) -> &IntPolynomial {
        self.tuples[j].entry(i)
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = &IntPolynomial> {
        self.tuples.iter().map(move |t| t.entry(i))
    }

    pub fn position(&self, t: &PolyTuple) -> Option<usize> {
        self.tuples.iter().position(|s| s == t)
    }

    /// Row index of the first non-constant entry of tuple `j`.
    pub fn leading_row(&self, j: usize) -> usize {
        self.tuples[j]
            .entries()
            .iter()
            .position(|p| !p.is_constant())
            .expect("starred family has no constant tuples")
    }

    /// `P_i'` for each row: the non-constant `i`-th entries of tuples whose
    /// earlier entries are all constant, in family order.
    pub fn prime_sets(&self) -> Vec<Vec<IntPolynomial>> {
        let mut sets = vec![Vec::new(); self.arity];
        for j in 0..self.len() {
            let i = self.leading_row(j);
            sets[i].push(self.entry(i, j).clone());
        }
        sets
    }

    /// Tuple indices contributing to each `P_i'`.
    pub fn prime_indices(&self) -> Vec<Vec<usize>> {
        let mut sets = vec![Vec::new(); self.arity];
        for j in 0..self.len() {
            sets[self.leading_row(j)].push(j);
        }
        sets
    }

    /// Checks the three niceness conditions against the first tuple.
    ///
    /// Condition (3) only counts a non-constant difference `p_{i,1} - p_{i,j}`
    /// as a violation; constant offsets never affect degrees downstream.
    pub fn nice_report(&self) -> NiceReport {
        let mut violations = Vec::new();
        if self.is_empty() {
            violations.push(NiceViolation::Empty);
            return NiceReport { violations };
        }
        let d11 = self.entry(0, 0).degree();
        for j in 1..self.len() {
            let d1j = self.entry(0, j).degree();
            if d1j > d11 {
                violations.push(NiceViolation::LeadingDegree { tuple: j });
            }
        }
        for i in 1..self.arity {
            for j in 0..self.len() {
                let p = self.entry(i, j);
                if !p.is_constant() && p.degree() >= d11 {
                    violations.push(NiceViolation::RowDegree { row: i, tuple: j });
                }
            }
        }
        for j in 1..self.len() {
            let top = (self.entry(0, 0) - self.entry(0, j)).degree();
            for i in 1..self.arity {
                let diff = self.entry(i, 0) - self.entry(i, j);
                if !diff.is_constant() && diff.degree() >= top {
                    violations.push(NiceViolation::Difference { row: i, tuple: j });
                }
            }
        }
        NiceReport { violations }
    }

    pub fn is_nice(&self) -> bool {
        self.nice_report().is_nice()
    }

    /// Same family with every constant term dropped and repeats removed
    /// (first occurrence kept).
    pub fn normalized(&self) -> PolyFamily {
        let mut seen = std::collections::HashSet::new();
        let tuples = self
            .tuples
            .iter()
            .map(PolyTuple::without_constants)
            .filter(|t| seen.insert(t.clone()))
            .collect();
        PolyFamily { arity: self.arity, degree_bound: self.degree_bound, tuples }
    }
}

impl fmt::Display for PolyFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, t) in self.tuples.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for PolyFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A failed niceness condition. Indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NiceViolation {
    Empty,
    /// `deg p_{1,j} > deg p_{1,1}`.
    LeadingDegree { tuple: usize },
    /// `deg p_{i,j} >= deg p_{1,1}` with `i >= 2`.
    RowDegree { row: usize, tuple: usize },
    /// `deg(p_{i,1} - p_{i,j}) >= deg(p_{1,1} - p_{1,j})` with `i, j >= 2`.
    Difference { row: usize, tuple: usize },
}

impl NiceViolation {
    /// Condition number 1, 2 or 3 (0 for an empty family).
    pub fn condition(&self) -> u8 {
        match self {
            NiceViolation::Empty => 0,
            NiceViolation::LeadingDegree { .. } => 1,
            NiceViolation::RowDegree { .. } => 2,
            NiceViolation::Difference { .. } => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NiceReport {
    pub violations: Vec<NiceViolation>,
}

impl NiceReport {
    pub fn is_nice(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violated_conditions(&self) -> Vec<u8> {
        let mut c: Vec<u8> = self.violations.iter().map(NiceViolation::condition).collect();
        c.sort_unstable();
        c.dedup();
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64s(c)
    }

    fn eight_tuple_family() -> PolyFamily {
        PolyFamily::from_i64s(&[
            &[&[0, 0, 1], &[0, 0, 0, 0, 1], &[0, 0, 0, 0, 1]],
            &[&[0, 1, 1], &[0, 0, 0, 3], &[]],
            &[&[0, 0, 2], &[], &[0, 2]],
            &[&[0, 1], &[0, 2], &[]],
            &[&[], &[0, 0, 0, 1], &[0, 0, 0, 0, 1]],
            &[&[], &[0, 0, 0, 2], &[0, 0, 1]],
            &[&[], &[], &[0, 0, 0, 1]],
            &[&[], &[], &[1, 0, 0, 1]],
        ])
        .unwrap()
    }

    #[test]
    fn prime_sets_examples() {
        let f = PolyFamily::from_i64s(&[&[&[0, 0, 0, 1], &[]], &[&[], &[0, 0, 1]]]).unwrap();
        assert_eq!(f.prime_sets(), vec![vec![p(&[0, 0, 0, 1])], vec![p(&[0, 0, 1])]]);

        let f = eight_tuple_family();
        let sets = f.prime_sets();
        assert_eq!(sets[0], vec![p(&[0, 0, 1]), p(&[0, 1, 1]), p(&[0, 0, 2]), p(&[0, 1])]);
        assert_eq!(sets[1], vec![p(&[0, 0, 0, 1]), p(&[0, 0, 0, 2])]);
        assert_eq!(sets[2], vec![p(&[0, 0, 0, 1]), p(&[1, 0, 0, 1])]);

        let f = PolyFamily::from_i64s(&[&[&[0, 1], &[]]]).unwrap();
        assert_eq!(f.prime_sets(), vec![vec![p(&[0, 1])], vec![]]);
    }

    #[test]
    fn star_examples() {
        let f = star(2, 1, vec![PolyTuple::from_i64s(&[&[0, 1], &[]]), PolyTuple::from_i64s(&[&[], &[]])]).unwrap();
        assert_eq!(f.tuples(), &[PolyTuple::from_i64s(&[&[0, 1], &[]])]);

        // ((n+h)^2, -n), (0, h), (n^2, -n), (0, 0) with h = 3
        let raw = vec![
            PolyTuple::from_i64s(&[&[9, 6, 1], &[0, -1]]),
            PolyTuple::from_i64s(&[&[], &[3]]),
            PolyTuple::from_i64s(&[&[0, 0, 1], &[0, -1]]),
            PolyTuple::from_i64s(&[&[], &[]]),
        ];
        let f = star(2, 2, raw.clone()).unwrap();
        assert_eq!(f.tuples(), &[raw[0].clone(), raw[2].clone()]);
        let again = star(2, 2, f.tuples().to_vec()).unwrap();
        assert_eq!(again, f);

        let empty = star(1, 1, vec![PolyTuple::from_i64s(&[&[5]])]).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            PolyFamily::new(2, 1, vec![PolyTuple::from_i64s(&[&[0, 1]])]),
            Err(PolyfamError::Arity { expected: 2, found: 1 })
        );
        assert_eq!(
            PolyFamily::new(1, 1, vec![PolyTuple::from_i64s(&[&[0, 0, 1]])]),
            Err(PolyfamError::DegreeBound { degree: 2, bound: 1 })
        );
        assert_eq!(
            PolyFamily::new(1, 1, vec![PolyTuple::from_i64s(&[&[2]])]),
            Err(PolyfamError::ConstantTuple(0))
        );
    }

    #[test]
    fn niceness_examples() {
        let f = PolyFamily::from_i64s(&[&[&[0, 0, 0, 1], &[]], &[&[], &[0, 0, 1]]]).unwrap();
        assert!(f.is_nice());

        let f = PolyFamily::from_i64s(&[&[&[0, 1], &[]], &[&[], &[0, 1]]]).unwrap();
        let r = f.nice_report();
        assert!(!r.is_nice());
        assert!(r.violated_conditions().contains(&2));

        let f = PolyFamily::from_i64s(&[&[&[0, 0, 1], &[]], &[&[0, 1], &[0, 1]]]).unwrap();
        assert!(f.is_nice());

        // deg(p11 - p12) = 1 is not above deg(q1 - q2) = 1
        let f = PolyFamily::from_i64s(&[&[&[0, 0, 1], &[]], &[&[0, 1, 1], &[0, 1]]]).unwrap();
        assert_eq!(f.nice_report().violated_conditions(), vec![3]);

        // a larger first-row degree later in the family
        let f = PolyFamily::from_i64s(&[&[&[0, 1]], &[&[0, 0, 1]]]).unwrap();
        assert_eq!(f.nice_report().violated_conditions(), vec![1]);
    }

    #[test]
    fn serde_round_trip() {
        let f = eight_tuple_family();
        let s = serde_json::to_string(&f).unwrap();
        let back: PolyFamily = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        let bad = r#"{"arity":1,"degree":1,"tuples":[[[3]]]}"#;
        assert!(serde_json::from_str::<PolyFamily>(bad).is_err());
    }
}
