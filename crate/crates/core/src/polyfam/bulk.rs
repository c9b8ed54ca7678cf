//! Exact trace length without materializing the quadratic stage.
//!
//! Once a nice family has a quadratic leading polynomial, every tuple is
//! either linear (a vector of slopes) or `(a n^2 + b n, w_2 n, ..., w_l n)`.
//! Under the smallest-valid policy every remaining step uses `h = 1`:
//! niceness forces all members of the leading class to share `w`, so no
//! row difference can catch up with a first-row difference. The reduction
//! then acts on each leading-coefficient class `a` by `S -> S ∪ (S + 2a e_1)`
//! up to a common translation, and subtracting a linear tuple removes exactly
//! one linear vector. Only set sizes matter, so each phase collapses to one
//! Minkowski sum with an arithmetic progression.

use std::collections::{BTreeMap, HashMap};

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::family::PolyFamily;
use super::trace::{HPolicy, TraceIter};
use super::type_matrix::TypeMatrix;
use super::PolyfamError;

/// Limits for [`pet_trace_length`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthBudget {
    /// Steps run explicitly before the quadratic stage is reached.
    pub max_explicit_steps: usize,
    /// Largest family carried through explicit steps.
    pub max_tuples: usize,
    /// Largest point set held by the quadratic-stage count.
    pub max_points: usize,
}

impl Default for LengthBudget {
    fn default() -> Self {
        Self { max_explicit_steps: 2_000, max_tuples: 50_000, max_points: 20_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceLength {
    /// Total number of reduction steps to a linear family.
    pub steps: u64,
    /// Steps carried out on explicit families.
    pub explicit_steps: usize,
    /// Type of the final linear family.
    pub final_type: TypeMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LengthOutcome {
    Done(TraceLength),
    /// Budget ran out; `steps` were completed and verified.
    Exhausted { steps: u64, reason: String },
}

/// Number of smallest-valid reduction steps until the family is linear.
pub fn pet_trace_length(family: &PolyFamily, budget: LengthBudget) -> Result<LengthOutcome, PolyfamError> {
    let mut iter = TraceIter::new(family, HPolicy::SmallestValid)?;
    let mut explicit = 0usize;
    let mut current = family.normalized();
    let d = family.degree_bound();
    loop {
        let deg = current.entry(0, 0).degree();
        if deg <= 1 {
            return Ok(LengthOutcome::Done(TraceLength {
                steps: explicit as u64,
                explicit_steps: explicit,
                final_type: TypeMatrix::of(&current),
            }));
        }
        if deg == 2 {
            break;
        }
        if explicit == budget.max_explicit_steps {
            return Ok(exhausted(explicit as u64, "explicit step budget"));
        }
        let step = iter.next().expect("non-linear family has a next step")?;
        explicit += 1;
        current = step.family;
        if current.len() > budget.max_tuples {
            return Ok(exhausted(explicit as u64, "family size budget"));
        }
    }
    let Some(stage) = QuadraticStage::from_family(&current) else {
        return Ok(exhausted(explicit as u64, "coefficients outside i64"));
    };
    match stage.run(budget.max_points) {
        Some((rest, w11)) => {
            let mut rows = vec![vec![0u64; d]; family.arity()];
            rows[0][d - 1] = w11;
            Ok(LengthOutcome::Done(TraceLength {
                steps: explicit as u64 + rest,
                explicit_steps: explicit,
                final_type: TypeMatrix::new(rows),
            }))
        }
        None => Ok(exhausted(explicit as u64, "point budget")),
    }
}

fn exhausted(steps: u64, reason: &str) -> LengthOutcome {
    LengthOutcome::Exhausted { steps, reason: reason.to_string() }
}

/// Fiber `w` -> sorted distinct first-row slopes `b`.
type ClassSet = BTreeMap<Vec<i64>, Vec<i64>>;

struct QuadraticStage {
    /// Leading-coefficient classes in order of first appearance.
    classes: Vec<(i64, ClassSet)>,
    linear: u64,
}

impl QuadraticStage {
    fn from_family(f: &PolyFamily) -> Option<Self> {
        let mut classes: Vec<(i64, ClassSet)> = Vec::new();
        let mut linear = 0u64;
        for t in f.tuples() {
            let row1 = t.entry(0);
            let a = row1.coeff(2).to_i64()?;
            if a == 0 {
                linear += 1;
                continue;
            }
            let b = row1.coeff(1).to_i64()?;
            let w = t.entries()[1..]
                .iter()
                .map(|p| p.coeff(1).to_i64())
                .collect::<Option<Vec<i64>>>()?;
            let pos = match classes.iter().position(|(c, _)| *c == a) {
                Some(p) => p,
                None => {
                    classes.push((a, ClassSet::new()));
                    classes.len() - 1
                }
            };
            classes[pos].1.entry(w).or_default().push(b);
        }
        for (_, set) in &mut classes {
            for bs in set.values_mut() {
                bs.sort_unstable();
                bs.dedup();
            }
        }
        Some(Self { classes, linear })
    }

    /// Remaining steps and the final count of linear classes.
    fn run(mut self, max_points: usize) -> Option<(u64, u64)> {
        let mut steps = 0u64;
        loop {
            // linear phase, then the quadratic step, each doubling with 2a
            steps = steps.checked_add(self.linear)?.checked_add(1)?;
            let n = self.linear.checked_add(1)?;
            if self.classes.len() == 1 {
                let (a, set) = &self.classes[0];
                let size = ap_sum_size(set, *a, n, max_points)?;
                return Some((steps, size - 1));
            }
            let (a_t, set_t) = self.classes.remove(1);
            self.linear = ap_sum_size(&set_t, a_t, n, max_points)? - 1;
            let mut next = Vec::with_capacity(self.classes.len());
            for (a, set) in &self.classes {
                next.push((a.checked_sub(a_t)?, ap_sum(set, *a, n, max_points)?));
            }
            self.classes = next;
        }
    }
}

/// Groups each fiber's slopes by residue modulo `2a` and returns, per group,
/// the merged index intervals of `S + {0, 2a, ..., 2a n}`.
fn ap_intervals(set: &ClassSet, a: i64, n: u64) -> Option<Vec<(Vec<i64>, i64, Vec<(i64, i64)>)>> {
    let s = a.checked_mul(2)?.checked_abs()?;
    let n = i64::try_from(n).ok()?;
    let sign = a.signum();
    let mut out = Vec::new();
    for (w, bs) in set {
        let mut groups: HashMap<i64, Vec<i64>> = HashMap::new();
        for &b in bs {
            groups.entry(b.rem_euclid(s)).or_default().push(b.div_euclid(s));
        }
        let mut residues: Vec<i64> = groups.keys().copied().collect();
        residues.sort_unstable();
        for r in residues {
            let mut ks = groups.remove(&r).unwrap();
            ks.sort_unstable();
            let mut iv: Vec<(i64, i64)> = Vec::new();
            for k in ks {
                let (lo, hi) = if sign > 0 { (k, k.checked_add(n)?) } else { (k.checked_sub(n)?, k) };
                match iv.last_mut() {
                    Some(last) if lo <= last.1 + 1 => last.1 = last.1.max(hi),
                    _ => iv.push((lo, hi)),
                }
            }
            out.push((w.clone(), r, iv));
        }
    }
    Some(out)
}

fn ap_sum_size(set: &ClassSet, a: i64, n: u64, max_points: usize) -> Option<u64> {
    let mut total = 0u64;
    for (_, _, iv) in ap_intervals(set, a, n)? {
        for (lo, hi) in iv {
            total = total.checked_add(u64::try_from(hi - lo + 1).ok()?)?;
        }
    }
    (total <= max_points as u64).then_some(total)
}

fn ap_sum(set: &ClassSet, a: i64, n: u64, max_points: usize) -> Option<ClassSet> {
    ap_sum_size(set, a, n, max_points)?;
    let s = a.checked_mul(2)?.checked_abs()?;
    let mut out = ClassSet::new();
    for (w, r, iv) in ap_intervals(set, a, n)? {
        let bs = out.entry(w).or_default();
        for (lo, hi) in iv {
            for k in lo..=hi {
                bs.push(k.checked_mul(s)?.checked_add(r)?);
            }
        }
    }
    for bs in out.values_mut() {
        bs.sort_unstable();
    }
    Some(out)
}
