use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::trace::VdcStep;

/// `2^len * m`: the factor level reached after `len` reductions of a family
/// of `m` tuples.
pub fn trace_k_bound(trace: &[VdcStep], m: u64) -> BigUint {
    BigUint::from(m) << trace.len()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KBound {
    Value(BigUint),
    Exhausted { steps: u64 },
}

/// Worst-case number of reductions over all nice families of `m` tuples of
/// arity `l` and degree at most `d`.
///
/// With `f(W, m) = 0` on linear types and `f(W, m) = 1 + max_{W' < W} f(W', 2m)`
/// otherwise, `f` is monotone in `W`, so the maximum sits at the largest
/// realizable predecessor and the recursion unrolls into a single chain.
/// A type is realizable with `M` tuples when its first row has a non-zero
/// leading degree `D`, later rows only use degrees below `D`, and the counts
/// sum to at most `M`. Each link of the chain costs one unit of `budget`.
pub fn universal_k_bound(d: usize, l: usize, m: u64, budget: u64) -> KBound {
    assert!(d >= 1 && l >= 1 && m >= 1, "d, l, m must be positive");
    // row-major, columns from degree d down to 1
    let mut w = vec![BigUint::zero(); d * l];
    w[0] = BigUint::from(m);
    let mut cap = BigUint::from(m);
    let mut steps = 0u64;
    while !is_linear(&w, d) {
        if steps == budget {
            return KBound::Exhausted { steps };
        }
        cap <<= 1;
        w = predecessor(&w, d, &cap);
        steps += 1;
    }
    KBound::Value(BigUint::from(steps))
}

fn is_linear(w: &[BigUint], d: usize) -> bool {
    w.iter().enumerate().all(|(k, x)| x.is_zero() || k == d - 1)
}

/// Lexicographically largest realizable type below `w` with at most `cap`
/// tuples. `w` must be non-linear, so a realizable predecessor exists.
fn predecessor(w: &[BigUint], d: usize, cap: &BigUint) -> Vec<BigUint> {
    for p in (0..w.len()).rev() {
        if w[p].is_zero() {
            continue;
        }
        let mut out = w[..=p].to_vec();
        out[p] -= BigUint::one();
        out.resize(w.len(), BigUint::zero());
        let used: BigUint = out.iter().sum();
        let spare = cap - used;
        // first slot after p that keeps the type realizable gets everything
        let lead = out[..d].iter().position(|x| !x.is_zero());
        let slot = (p + 1..w.len()).find(|&k| {
            k < d || lead.is_some_and(|c| k % d > c)
        });
        match slot {
            Some(k) => out[k] = spare,
            None if lead.is_some() => {}
            None => continue,
        }
        return out;
    }
    unreachable!("linear types have no predecessor")
}
