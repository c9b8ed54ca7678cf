use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::family::{PolyFamily, PolyTuple};
use super::type_matrix::TypeMatrix;
use super::vdc::{choose_pair, nice_exceptions, vdc_apply};
use super::PolyfamError;

/// How the shift `h` is instantiated at each reduction step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HPolicy {
    /// Least `h >= 1` that keeps the reduced family nice.
    SmallestValid,
    /// Successive primes 5, 7, 11, 13, ..., skipping any exceptional one.
    FixedPrimes,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VdcStep {
    pub chosen: PolyTuple,
    pub h: u64,
    /// Reduced family with constant terms dropped and repeats removed.
    pub family: PolyFamily,
    pub type_matrix: TypeMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PetTrace {
    pub initial: PolyFamily,
    pub initial_type: TypeMatrix,
    pub steps: Vec<VdcStep>,
}

impl PetTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn types(&self) -> Vec<&TypeMatrix> {
        std::iter::once(&self.initial_type)
            .chain(self.steps.iter().map(|s| &s.type_matrix))
            .collect()
    }

    pub fn final_family(&self) -> &PolyFamily {
        self.steps.last().map_or(&self.initial, |s| &s.family)
    }
}

/// Lazy reduction: yields one step at a time until the family is linear.
///
/// Dropping constant terms and merging repeated tuples after each step
/// changes neither niceness, the type, nor the next choice, and keeps the
/// family from doubling at every level.
pub struct TraceIter {
    current: PolyFamily,
    current_type: TypeMatrix,
    policy: HPolicy,
    next_prime: u64,
    step: usize,
    done: bool,
}

impl TraceIter {
    pub fn new(family: &PolyFamily, policy: HPolicy) -> Result<Self, PolyfamError> {
        let report = family.nice_report();
        if !report.is_nice() {
            return Err(PolyfamError::NotNice(report.violations));
        }
        let current = family.normalized();
        let current_type = TypeMatrix::of(&current);
        Ok(Self { current, current_type, policy, next_prime: 5, step: 0, done: false })
    }

    fn pick_h(&mut self, t: &PolyTuple) -> Result<u64, PolyfamError> {
        match self.policy {
            HPolicy::SmallestValid => {
                let mut h_max = 1;
                loop {
                    let ex = nice_exceptions(&self.current, t, h_max)?;
                    if let Some(h) = (1..=h_max).find(|h| !ex.exceptions.contains(h)) {
                        return Ok(h);
                    }
                    h_max = h_max.checked_mul(2).ok_or(PolyfamError::NoAdmissibleH(h_max))?;
                }
            }
            HPolicy::FixedPrimes => loop {
                let q = self.next_prime;
                self.next_prime = next_prime_after(q);
                let ex = nice_exceptions(&self.current, t, q)?;
                if !ex.exceptions.contains(&q) {
                    return Ok(q);
                }
            },
        }
    }

    fn advance(&mut self) -> Result<VdcStep, PolyfamError> {
        let t = choose_pair(&self.current)?;
        let h = self.pick_h(&t)?;
        let family = vdc_apply(&self.current, &t, h)?.normalized();
        let type_matrix = TypeMatrix::of(&family);
        self.step += 1;
        if type_matrix.try_cmp(&self.current_type)? != Ordering::Less {
            return Err(PolyfamError::TypeNotDecreasing(self.step));
        }
        self.current = family.clone();
        self.current_type = type_matrix.clone();
        Ok(VdcStep { chosen: t, h, family, type_matrix })
    }
}

impl Iterator for TraceIter {
    type Item = Result<VdcStep, PolyfamError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done || self.current.entry(0, 0).degree() <= 1 {
            return None;
        }
        let out = self.advance();
        if out.is_err() {
            self.done = true;
        }
        Some(out)
    }
}

fn next_prime_after(q: u64) -> u64 {
    let is_prime = |n: u64| n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| n % k != 0);
    (q + 1..).find(|&n| is_prime(n)).expect("primes are unbounded")
}

/// Runs the reduction to a linear family, failing after `max_steps` steps.
pub fn pet_trace(family: &PolyFamily, policy: HPolicy, max_steps: usize) -> Result<PetTrace, PolyfamError> {
    let iter = TraceIter::new(family, policy)?;
    let initial = family.clone();
    let initial_type = TypeMatrix::of(family);
    let mut steps = Vec::new();
    for step in iter {
        if steps.len() == max_steps {
            return Err(PolyfamError::StepLimit(max_steps));
        }
        steps.push(step?);
    }
    Ok(PetTrace { initial, initial_type, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn tm(rows: &[&[u64]]) -> TypeMatrix {
        TypeMatrix::new(rows.iter().map(|r| r.to_vec()).collect())
    }

    #[test]
    fn square_linear_pair_takes_two_steps() {
        let f = PolyFamily::from_i64s(&[&[&[0, 0, 1], &[]], &[&[], &[0, 1]]]).unwrap();
        for policy in [HPolicy::SmallestValid, HPolicy::FixedPrimes] {
            let tr = pet_trace(&f, policy, 50).unwrap();
            assert_eq!(tr.len(), 2);
            assert!(tr.final_family().entry(0, 0).degree() <= 1);
            assert!(tr.steps.last().unwrap().type_matrix.is_degree_one());
        }
    }

    #[test]
    fn cubic_square_type_sequence() {
        let f = PolyFamily::from_i64s(&[&[&[0, 0, 0, 1], &[]], &[&[], &[0, 0, 1]]]).unwrap();
        // the full trace is far too long to run; the first levels are pinned
        let steps: Vec<VdcStep> = TraceIter::new(&f, HPolicy::FixedPrimes)
            .unwrap()
            .take(3)
            .collect::<Result<_, _>>()
            .unwrap();
        assert_eq!(TypeMatrix::of(&f), tm(&[&[1, 0, 0], &[0, 1, 0]]));
        assert_eq!(steps[0].type_matrix, tm(&[&[1, 0, 0], &[0, 0, 1]]));
        assert_eq!(steps[1].type_matrix, tm(&[&[1, 0, 0], &[0, 0, 0]]));
        assert_eq!(steps[2].type_matrix, tm(&[&[0, 7, 0], &[0, 0, 0]]));
        assert_eq!(steps.iter().map(|s| s.h).collect::<Vec<_>>(), vec![5, 7, 11]);
        assert_eq!(steps[0].chosen, PolyTuple::from_i64s(&[&[], &[0, 0, 1]]));
    }

    #[test]
    fn linear_input_has_empty_trace() {
        let f = PolyFamily::from_i64s(&[&[&[0, 1], &[]], &[&[0, 2], &[]]]).unwrap();
        assert!(pet_trace(&f, HPolicy::SmallestValid, 10).unwrap().is_empty());
        let bad = PolyFamily::from_i64s(&[&[&[0, 1], &[]], &[&[], &[0, 1]]]).unwrap();
        assert!(pet_trace(&bad, HPolicy::SmallestValid, 10).is_err());
    }

    #[test]
    fn step_cap() {
        let f = PolyFamily::from_i64s(&[&[&[0, 0, 0, 1], &[]], &[&[], &[0, 0, 1]]]).unwrap();
        assert_eq!(pet_trace(&f, HPolicy::SmallestValid, 1), Err(PolyfamError::StepLimit(1)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn traces_terminate_without_repeats(
            a in 1i64..=3,
            b in -2i64..=2,
            q in prop::sample::select(vec![-2i64, -1, 1, 2]),
            r in prop::collection::vec(-2i64..=2, 3),
        ) {
            let p1 = [0, b, a];
            let (t1, t2, t3): (&[&[i64]], &[&[i64]], &[&[i64]]) = (&[&p1, &[]], &[&[], &[0, q]], &[&r, &[]]);
            let rows = [t1, t2, t3];
            let f = match PolyFamily::from_i64s(&rows) {
                Ok(f) => f,
                Err(_) => PolyFamily::from_i64s(&rows[..2]).unwrap(),
            };
            prop_assume!(f.is_nice());
            let tr = pet_trace(&f, HPolicy::SmallestValid, 500).unwrap();
            let mut seen = HashSet::new();
            for w in tr.types() {
                prop_assert!(seen.insert(w.clone()));
            }
            prop_assert!(tr.final_family().entry(0, 0).degree() <= 1);
        }
    }
}
