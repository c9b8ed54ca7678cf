use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::family::PolyFamily;
use super::poly::IntPolynomial;
use super::PolyfamError;

/// `l x d` matrix of class counts. Entry `(i, c)` counts the classes of
/// degree `d - c` in `P_i'`, so columns run from degree `d` down to 1.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TypeMatrix {
    rows: Vec<Vec<u64>>,
}

impl TypeMatrix {
    pub fn new(rows: Vec<Vec<u64>>) -> Self {
        assert!(!rows.is_empty(), "type matrix needs at least one row");
        let d = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == d), "ragged type matrix");
        Self { rows }
    }

    pub fn zeros(l: usize, d: usize) -> Self {
        Self::new(vec![vec![0; d]; l])
    }

    pub fn of(family: &PolyFamily) -> Self {
        let d = family.degree_bound();
        let mut rows = vec![vec![0u64; d]; family.arity()];
        for (i, set) in family.prime_sets().iter().enumerate() {
            let mut classes: Vec<&IntPolynomial> = Vec::new();
            for p in set {
                if !classes.iter().any(|q| q.equivalent(p)) {
                    classes.push(p);
                    rows[i][d - p.degree()] += 1;
                }
            }
        }
        Self { rows }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.rows[0].len())
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    /// Count for row `i` (0-based) and polynomial degree `deg` (1..=d).
    pub fn get(&self, i: usize, deg: usize) -> u64 {
        let d = self.rows[0].len();
        self.rows[i][d - deg]
    }

    /// Lexicographic comparison of the row-major flattening.
    pub fn try_cmp(&self, other: &TypeMatrix) -> Result<Ordering, PolyfamError> {
        if self.shape() != other.shape() {
            return Err(PolyfamError::Shape(self.shape(), other.shape()));
        }
        Ok(self.rows.iter().flatten().cmp(other.rows.iter().flatten()))
    }

    /// True when every non-zero count sits at row 1, degree 1.
    pub fn is_degree_one(&self) -> bool {
        let d = self.rows[0].len();
        self.rows
            .iter()
            .enumerate()
            .all(|(i, r)| r.iter().enumerate().all(|(c, &w)| w == 0 || (i == 0 && c == d - 1)))
    }
}

impl fmt::Display for TypeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, r) in self.rows.iter().enumerate() {
            if k > 0 {
                write!(f, " / ")?;
            }
            let cells: Vec<String> = r.iter().map(u64::to_string).collect();
            write!(f, "{}", cells.join(" "))?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for TypeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.rows)
    }
}
