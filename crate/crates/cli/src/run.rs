//! Dispatch from a resolved config to the library and into a result table.

use petlab::averages::{default_windows, l2_norm_of_averages, AverageSpec, AveragesError};
use petlab::dynsys::{AffineMap, CommutingTuple, CyclicMap, DynsysError, FiniteSystem, Observable, SampleScheme};
use petlab::equidist::{equidist_test, holder_lowerbound_check, recurrence_set, weyl_average, EquidistError, RealPolynomial};
use petlab::polyfam::{trace_k_bound, universal_k_bound, IntPolynomial, KBound, PolyFamily, PolyfamError, TraceIter, TypeMatrix};
use petlab::seminorms::{dual_function, gowers_seminorm_finite, gowers_seminorm_recursive, SeminormError};
use serde_json::{json, Value};

use crate::config::{Coeffs, Experiment, MapConfig, SeminormMethod, SystemConfig};

pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;
pub const EXIT_HYPOTHESIS: i32 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }

    fn config(message: impl Into<String>) -> Self {
        Self::new(EXIT_CONFIG, message)
    }
}

impl From<DynsysError> for Failure {
    fn from(e: DynsysError) -> Self {
        let code = match e {
            DynsysError::Precision { .. } => EXIT_PRECISION,
            DynsysError::NotUnipotent | DynsysError::NotMeasurePreserving | DynsysError::NotCommuting(..) => EXIT_HYPOTHESIS,
            _ => EXIT_CONFIG,
        };
        Self::new(code, e.to_string())
    }
}

impl From<EquidistError> for Failure {
    fn from(e: EquidistError) -> Self {
        match e {
            EquidistError::Precision { .. } => Self::new(EXIT_PRECISION, e.to_string()),
            EquidistError::Hypothesis(_) => Self::new(EXIT_HYPOTHESIS, e.to_string()),
            EquidistError::Shape(_) => Self::config(e.to_string()),
            EquidistError::Dynsys(d) => d.into(),
        }
    }
}

impl From<AveragesError> for Failure {
    fn from(e: AveragesError) -> Self {
        match e {
            AveragesError::Shape(_) => Self::config(e.to_string()),
            AveragesError::Dynsys(d) => d.into(),
        }
    }
}

impl From<SeminormError> for Failure {
    fn from(e: SeminormError) -> Self {
        match e {
            SeminormError::Dynsys(d) => d.into(),
            _ => Self::config(e.to_string()),
        }
    }
}

impl From<PolyfamError> for Failure {
    fn from(e: PolyfamError) -> Self {
        let code = match e {
            PolyfamError::NotNice(_) | PolyfamError::GenericNotNice => EXIT_HYPOTHESIS,
            PolyfamError::TypeNotDecreasing(_) | PolyfamError::NoAdmissibleH(_) => EXIT_IO,
            _ => EXIT_CONFIG,
        };
        Self::new(code, e.to_string())
    }
}

/// Columns, rows, and scalar summary entries of one run.
#[derive(Debug, Default)]
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    pub summary: Vec<(&'static str, Value)>,
}

impl Report {
    fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), ..Self::default() }
    }
}

fn polynomial(c: &Coeffs) -> IntPolynomial {
    IntPolynomial::from_i64s(c)
}

fn affine(m: &MapConfig, bits: u32) -> Result<AffineMap, Failure> {
    let dim = m.translation.len();
    let matrix = m.matrix.clone().unwrap_or_else(|| (0..dim).map(|i| (0..dim).map(|j| i64::from(i == j)).collect()).collect());
    Ok(AffineMap::new(matrix, m.translation.clone(), bits)?)
}

fn system(s: &SystemConfig, bits: u32) -> Result<CommutingTuple, Failure> {
    match s {
        SystemConfig::Cyclic { modulus, shifts } => Ok(CommutingTuple::finite(FiniteSystem::new(*modulus, shifts.clone())?)),
        SystemConfig::Torus { maps } => {
            Ok(CommutingTuple::torus(maps.iter().map(|m| affine(m, bits)).collect::<Result<Vec<_>, _>>()?)?)
        }
    }
}

fn cyclic(modulus: u64, shift: u64) -> Result<CyclicMap, Failure> {
    if modulus == 0 {
        return Err(Failure::config("modulus must be positive"));
    }
    Ok(CyclicMap::new(modulus, shift))
}

pub fn execute(exp: &Experiment, seed: u64, bits: u32) -> Result<Report, Failure> {
    match exp {
        Experiment::Pet { family, policy, max_steps } => {
            let rows: Vec<Vec<&[i64]>> = family.iter().map(|t| t.iter().map(Vec::as_slice).collect()).collect();
            let refs: Vec<&[&[i64]]> = rows.iter().map(Vec::as_slice).collect();
            let f = PolyFamily::from_i64s(&refs)?;
            let mut report = Report::new(&["step", "h", "chosen", "family_size", "type"]);
            let mut last = TypeMatrix::of(&f);
            let mut steps = Vec::new();
            let mut iter = TraceIter::new(&f, *policy)?;
            for (i, step) in iter.by_ref().take(*max_steps).enumerate() {
                let step = step?;
                report.rows.push(vec![
                    json!(i + 1),
                    json!(step.h),
                    json!(step.chosen.to_string()),
                    json!(step.family.len()),
                    json!(step.type_matrix.to_string()),
                ]);
                last = step.type_matrix.clone();
                steps.push(step);
            }
            let complete = iter.next().is_none();
            report.summary = vec![
                ("family", json!(f.to_string())),
                ("initial_type", json!(TypeMatrix::of(&f).to_string())),
                ("steps", json!(steps.len())),
                ("complete", json!(complete)),
                ("final_type", json!(last.to_string())),
                ("trace_k_bound", json!(trace_k_bound(&steps, f.len() as u64).to_string())),
            ];
            Ok(report)
        }
        Experiment::Kbound { d, l, m, budget } => {
            if *d == 0 || *l == 0 || *m == 0 {
                return Err(Failure::config("d, l and m must be positive"));
            }
            let mut report = Report::new(&["d", "l", "m", "status", "steps"]);
            let (status, steps) = match universal_k_bound(*d, *l, *m, *budget) {
                KBound::Value(v) => ("value", v.to_string()),
                KBound::Exhausted { steps } => ("exhausted", steps.to_string()),
            };
            report.rows.push(vec![json!(d), json!(l), json!(m), json!(status), json!(steps)]);
            Ok(report)
        }
        Experiment::Avg { system: sys, polys, observables, windows, window_count, samples } => {
            let systems = system(sys, bits)?;
            let windows = windows.clone().unwrap_or_else(|| default_windows(*window_count));
            let Some(&first) = windows.first() else {
                return Ok(Report::new(&["start", "end", "l2_norm", "gap"]));
            };
            let spec = AverageSpec::new(systems.clone(), polys.iter().map(polynomial).collect(), observables.clone(), first)?;
            let points = petlab::dynsys::sample_measure(systems.space(), samples.scheme(seed));
            let mut report = Report::new(&["start", "end", "l2_norm", "gap"]);
            let mut prev: Option<f64> = None;
            for w in windows {
                let v = l2_norm_of_averages(&spec.with_window(w)?, &points)?;
                report.rows.push(vec![json!(w.0), json!(w.1), json!(v), prev.map_or(Value::Null, |p| json!((v - p).abs()))]);
                prev = Some(v);
            }
            report.summary = vec![("samples", json!(points.len()))];
            Ok(report)
        }
        Experiment::Seminorm { modulus, shift, f, k, method } => {
            let t = cyclic(*modulus, *shift)?;
            let mut report = Report::new(&["k", "method", "value"]);
            if matches!(method, SeminormMethod::Recursive | SeminormMethod::Both) {
                let r = gowers_seminorm_recursive(&t, f, *k)?;
                report.rows.push(vec![json!(r.k), json!("recursive"), json!(r.value)]);
            }
            if matches!(method, SeminormMethod::BruteForce | SeminormMethod::Both) {
                let r = gowers_seminorm_finite(&t, f, *k)?;
                report.rows.push(vec![json!(r.k), json!("brute-force"), json!(r.value)]);
            }
            Ok(report)
        }
        Experiment::Dual { modulus, shift, f, k } => {
            let t = cyclic(*modulus, *shift)?;
            let d = dual_function(&t, f, *k)?;
            let mut report = Report::new(&["x", "re", "im"]);
            for (x, v) in d.values.iter().enumerate() {
                report.rows.push(vec![json!(x), json!(v.re), json!(v.im)]);
            }
            report.summary = vec![("identity_gap", json!(d.identity_gap))];
            Ok(report)
        }
        Experiment::Weyl { poly, windows } => {
            let p = RealPolynomial::new(poly.clone());
            let mut report = Report::new(&["start", "end", "re", "im", "abs"]);
            for &w in windows {
                let z = weyl_average(&p, w, bits)?;
                report.rows.push(vec![json!(w.0), json!(w.1), json!(z.re), json!(z.im), json!(z.norm())]);
            }
            report.summary = vec![("poly_degree", json!(p.degree()))];
            Ok(report)
        }
        Experiment::Equidist { polys, n, cutoff, tol } => {
            if polys.is_empty() || *cutoff < 1 {
                return Err(Failure::config("need at least one polynomial and a positive cutoff"));
            }
            let evals = polys
                .iter()
                .map(|c| RealPolynomial::new(c.clone()).phases(*n, bits))
                .collect::<Result<Vec<_>, _>>()?;
            let v = equidist_test(polys.len(), |k| evals.iter().map(|e| e.phase(k)).collect(), *n, *cutoff, *tol);
            let mut report = Report::new(&["n", "cutoff", "tol", "worst_freq", "worst_value", "pass"]);
            let freq = v.worst_freq.iter().map(i64::to_string).collect::<Vec<_>>().join(" ");
            report.rows.push(vec![json!(v.n), json!(v.cutoff), json!(v.tol), json!(freq), json!(v.worst_value), json!(v.pass)]);
            Ok(report)
        }
        Experiment::Recur { maps, polys, set, epsilon, n_max, r } => {
            let systems = CommutingTuple::torus(maps.iter().map(|m| affine(m, bits)).collect::<Result<Vec<_>, _>>()?)?;
            let a = Observable::boxed(set.clone())?;
            let eps = epsilon.to_rational().ok_or_else(|| Failure::config("epsilon must be rational"))?;
            let polys: Vec<IntPolynomial> = polys.iter().map(polynomial).collect();
            let fallback = SampleScheme::Random { seed, count: 4_096 };
            let rep = recurrence_set(&systems, &polys, &a, eps, *n_max, *r, fallback)?;
            let mut report = Report::new(&["n"]);
            report.rows = rep.qualifying.iter().map(|n| vec![json!(n)]).collect();
            report.summary = vec![
                ("n_max", json!(rep.n_max)),
                ("r", json!(rep.r)),
                ("threshold", json!(rep.threshold)),
                ("exact", json!(rep.exact)),
                ("qualifying", json!(rep.qualifying.len())),
                ("max_gap", json!(rep.max_gap)),
            ];
            Ok(report)
        }
        Experiment::Holder { weights, partitions, f } => {
            let c = holder_lowerbound_check(weights, partitions, f)?;
            let mut report = Report::new(&["lhs", "rhs", "holds"]);
            report.rows.push(vec![json!(c.lhs), json!(c.rhs), json!(c.holds)]);
            Ok(report)
        }
    }
}
