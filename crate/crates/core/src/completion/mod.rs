//! Completions of partial functions: enumeration, completion complexity,
//! naive and natural completions, and the parity test for exact degree.

pub mod admissibility;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boolfn::{PartialFunction, Value};
use crate::error::{Error, Result};
use crate::measures::{block_sensitivity, certificate, deterministic_complexity, sensitivity, CertKind, Sensitivity};
use crate::par::Exec;
use crate::polynomials::{approx_degree, Basis, MultilinearPoly, DEFAULT_EPSILON};

pub use admissibility::{
    admissibility, boost_to_natural, covering_radius, engineered_instance, gap_majority, AdmissibilityReport,
    BiasedCriterion, BoostOutcome,
};

/// Largest number of undefined points enumerated by default.
pub const DEFAULT_BUDGET: usize = 16;
/// Largest number of undefined points enumerated for approximate degree.
pub const ADEG_BUDGET: usize = 14;
/// Random completions tried when enumeration is over budget.
pub const RANDOM_RESTARTS: usize = 64;

/// Enumerates all `2^u` total extensions of a partial function.
///
/// The `j`-th completion labels the `i`-th undefined point (in increasing
/// order) with bit `i` of `j`.
#[derive(Clone, Debug)]
pub struct CompletionIterator {
    base: PartialFunction,
    undefined: Vec<u32>,
    cursor: u64,
}

impl CompletionIterator {
    pub fn new(f: &PartialFunction) -> Self {
        let undefined = f.undefined_points();
        assert!(undefined.len() < 64, "too many undefined points to enumerate");
        CompletionIterator {
            base: f.clone(),
            undefined,
            cursor: 0,
        }
    }

    pub fn undefined_count(&self) -> usize {
        self.undefined.len()
    }

    pub fn total(&self) -> u64 {
        1u64 << self.undefined.len()
    }

    /// The completion with index `j`.
    pub fn completion(&self, j: u64) -> PartialFunction {
        let mut g = self.base.clone();
        for (i, &y) in self.undefined.iter().enumerate() {
            g.set(y, Value::from_bit(j >> i & 1 == 1));
        }
        g
    }
}

impl Iterator for CompletionIterator {
    type Item = PartialFunction;

    fn next(&mut self) -> Option<PartialFunction> {
        if self.cursor >= self.total() {
            return None;
        }
        let g = self.completion(self.cursor);
        self.cursor += 1;
        Some(g)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Measure {
    D,
    Deg,
    Adeg,
    C,
    Bs,
    S,
}

impl Measure {
    pub const ALL: [Measure; 6] = [
        Measure::D,
        Measure::Deg,
        Measure::Adeg,
        Measure::C,
        Measure::Bs,
        Measure::S,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::D => "D",
            Measure::Deg => "deg",
            Measure::Adeg => "adeg",
            Measure::C => "C",
            Measure::Bs => "bs",
            Measure::S => "s",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown measure {s:?}")))
    }

    fn budget(self, budget: usize) -> usize {
        match self {
            Measure::Adeg => budget.min(ADEG_BUDGET),
            _ => budget,
        }
    }
}

/// `M(F)` for a total function.
pub fn total_measure(g: &PartialFunction, m: Measure) -> Result<usize> {
    if !g.is_total() {
        return Err(Error::NotTotal);
    }
    let pointwise = |h: &dyn Fn(u32) -> Result<usize>| -> Result<usize> {
        (0..g.size() as u32).try_fold(0, |acc, x| Ok(acc.max(h(x)?)))
    };
    match m {
        Measure::D => deterministic_complexity(g),
        Measure::Deg => Ok(MultilinearPoly::from_function(g, Basis::Fourier)?.degree()),
        Measure::Adeg => approx_degree(g, DEFAULT_EPSILON),
        Measure::C => pointwise(&|x| certificate(g, x, CertKind::Strict)),
        Measure::Bs => pointwise(&|x| block_sensitivity(g, x, Sensitivity::Strict)),
        Measure::S => pointwise(&|x| sensitivity(g, x, Sensitivity::Strict)),
    }
}

/// `min_F M(F)` over completions with a completion attaining it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompletionOptimum {
    pub measure: Measure,
    pub value: usize,
    pub witness: PartialFunction,
    /// False when only a sample of completions was searched.
    pub exact: bool,
    pub evaluated: u64,
}

/// Exact by enumeration when `u ≤ budget` (14 at most for `adeg`); the first
/// completion in enumeration order attaining the minimum is the witness.
/// For `D` the search stops at the first completion reaching `D(f)`, which
/// every partial function attains. Over budget, the naive completions and
/// [`RANDOM_RESTARTS`] seeded random completions are tried.
pub fn completion_complexity(f: &PartialFunction, m: Measure, budget: usize, exec: Exec) -> Result<CompletionOptimum> {
    let it = CompletionIterator::new(f);
    if it.undefined_count() <= m.budget(budget) {
        let total = it.total() as usize;
        if m == Measure::D {
            let floor = deterministic_complexity(f)?;
            let hit = exec.find_first(total, |j| match total_measure(&it.completion(j as u64), m) {
                Ok(v) if v <= floor => Some(Ok((j, v))),
                Ok(_) => None,
                Err(e) => Some(Err(e)),
            });
            if let Some(hit) = hit {
                let (j, value) = hit?;
                return Ok(CompletionOptimum {
                    measure: m,
                    value,
                    witness: it.completion(j as u64),
                    exact: true,
                    evaluated: j as u64 + 1,
                });
            }
        }
        let values = exec.map(total, |j| total_measure(&it.completion(j as u64), m));
        let values: Vec<usize> = values.into_iter().collect::<Result<_>>()?;
        let (j, &value) = values
            .iter()
            .enumerate()
            .min_by_key(|&(j, v)| (*v, j))
            .expect("at least one completion");
        return Ok(CompletionOptimum {
            measure: m,
            value,
            witness: it.completion(j as u64),
            exact: true,
            evaluated: total as u64,
        });
    }
    let mut candidates = vec![f.fill_undefined(false), f.fill_undefined(true)];
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..RANDOM_RESTARTS {
        let mut g = f.clone();
        for y in f.undefined_points() {
            g.set(y, Value::from_bit(rng.gen()));
        }
        candidates.push(g);
    }
    let values = exec.map_slice(&candidates, |g| total_measure(g, m));
    let values: Vec<usize> = values.into_iter().collect::<Result<_>>()?;
    let (j, &value) = values
        .iter()
        .enumerate()
        .min_by_key(|&(j, v)| (*v, j))
        .expect("at least one candidate");
    Ok(CompletionOptimum {
        measure: m,
        value,
        witness: candidates.swap_remove(j),
        exact: false,
        evaluated: values.len() as u64,
    })
}

/// The completion that is constant `bit` off the domain.
pub fn naive_completion(f: &PartialFunction, bit: bool) -> PartialFunction {
    f.fill_undefined(bit)
}

/// `r = p·q` (value 0) or `r = p·q + 1 - q` (value 1) with its error against
/// the naive completion.
#[derive(Clone, Debug, PartialEq)]
pub struct NaiveApproximation {
    pub poly: MultilinearPoly,
    /// `deg(p) + deg(q)`.
    pub degree_bound: usize,
    pub max_error: f64,
}

/// Tolerance on the input approximation contracts.
pub const CONTRACT_TOLERANCE: f64 = 1e-9;

/// Combines an `ε`-approximator `p` of `f` on its domain, bounded in `[0,1]`,
/// with an `ε'`-approximator `q` of the domain indicator on the whole cube.
/// Both are read with `0/1` semantics.
pub fn naive_indicator_product(
    f: &PartialFunction,
    p: &MultilinearPoly,
    q: &MultilinearPoly,
    value: bool,
    epsilon: f64,
    epsilon_prime: f64,
) -> Result<NaiveApproximation> {
    if p.n != f.arity() || q.n != f.arity() {
        return Err(Error::ArityMismatch {
            expected: f.arity(),
            got: if p.n != f.arity() { p.n } else { q.n },
        });
    }
    let (pv, qv) = (p.values(), q.values());
    for x in 0..f.size() {
        let pt = x as u32;
        if !(-CONTRACT_TOLERANCE..=1.0 + CONTRACT_TOLERANCE).contains(&pv[x]) {
            return Err(Error::Contract {
                point: pt,
                detail: format!("p = {} outside [0,1]", pv[x]),
            });
        }
        if let Some(b) = f.value(pt).bit() {
            if (pv[x] - f64::from(u8::from(b))).abs() > epsilon + CONTRACT_TOLERANCE {
                return Err(Error::Contract {
                    point: pt,
                    detail: format!("p = {} is not within {epsilon} of f", pv[x]),
                });
            }
        }
        let ind = f64::from(u8::from(f.in_domain(pt)));
        if (qv[x] - ind).abs() > epsilon_prime + CONTRACT_TOLERANCE {
            return Err(Error::Contract {
                point: pt,
                detail: format!("q = {} is not within {epsilon_prime} of the indicator", qv[x]),
            });
        }
    }
    let target = naive_completion(f, value);
    let rv: Vec<f64> = pv
        .iter()
        .zip(&qv)
        .map(|(a, b)| if value { a * b + 1.0 - b } else { a * b })
        .collect();
    let max_error = rv
        .iter()
        .enumerate()
        .map(|(x, r)| (r - f64::from(u8::from(target.value(x as u32) == Value::One))).abs())
        .fold(0.0, f64::max);
    Ok(NaiveApproximation {
        poly: MultilinearPoly::interpolate(f.arity(), Basis::Monomial, &rv)?,
        degree_bound: p.degree() + q.degree(),
        max_error,
    })
}

/// `F(x) = +1` (bit 0) where `p(x) ≥ 0`, else `-1` (bit 1).
pub fn natural_completion(p: &MultilinearPoly) -> Result<PartialFunction> {
    if p.basis == Basis::Monomial {
        return Err(Error::InvalidArgument("natural completion needs ±1 semantics".into()));
    }
    let v = p.values();
    PartialFunction::total_from_fn(p.n, |x| v[x as usize] < 0.0)
}

/// Whether every Möbius coefficient of `F` above level `d` vanishes, tested
/// as equal counts of ones on even and odd subsets of each `S` with `|S| > d`.
pub fn exact_degree_completion_check(g: &PartialFunction, d: usize) -> Result<bool> {
    if !g.is_total() {
        return Err(Error::NotTotal);
    }
    let full = (g.size() - 1) as u32;
    Ok((0..=full).filter(|s| s.count_ones() as usize > d).all(|s| {
        let mut balance = 0i64;
        let mut t = s;
        loop {
            if g.value(t) == Value::One {
                balance += if t.count_ones() % 2 == 0 { 1 } else { -1 };
            }
            if t == 0 {
                break;
            }
            t = (t - 1) & s;
        }
        balance == 0
    }))
}

/// Measures compared across optimal completions.
pub const REPORT_MEASURES: [Measure; 4] = [Measure::D, Measure::Adeg, Measure::C, Measure::Bs];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompletionReport {
    pub measures: Vec<Measure>,
    /// Optimum per measure, in `measures` order.
    pub optima: Vec<CompletionOptimum>,
    /// `table[i][j] = M_i(F_{M_j})`.
    pub table: Vec<Vec<usize>>,
    pub d_partial: usize,
    pub adeg_partial: usize,
    /// `D(f) / (adeg(f)² · ln²(2 + |Dom|))`; `None` when `adeg(f) = 0`.
    pub ratio: Option<f64>,
}

/// Cross-measure table over optimal completions plus the domain-size ratio.
pub fn completion_report(f: &PartialFunction, budget: usize, exec: Exec) -> Result<CompletionReport> {
    let optima = REPORT_MEASURES
        .iter()
        .map(|&m| completion_complexity(f, m, budget, exec))
        .collect::<Result<Vec<_>>>()?;
    let table = REPORT_MEASURES
        .iter()
        .map(|&m| {
            optima
                .iter()
                .map(|o| total_measure(&o.witness, m))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let d_partial = deterministic_complexity(f)?;
    let adeg_partial = approx_degree(f, DEFAULT_EPSILON)?;
    let ln = (2.0 + f.domain_size() as f64).ln();
    let ratio = (adeg_partial > 0).then(|| d_partial as f64 / ((adeg_partial * adeg_partial) as f64 * ln * ln));
    Ok(CompletionReport {
        measures: REPORT_MEASURES.to_vec(),
        optima,
        table,
        d_partial,
        adeg_partial,
        ratio,
    })
}

/// Domain given by a random `q`-junta on the first `q` coordinates, random
/// labels, and `0/1` approximators: `p` within `ε` of `f` on the domain and
/// inside `[0,1]`, `q` within `ε'` of the domain indicator.
pub fn junta_indicator_instance(
    n: usize,
    q: usize,
    eps: f64,
    eps2: f64,
    rng: &mut impl Rng,
) -> Result<(PartialFunction, MultilinearPoly, MultilinearPoly)> {
    if q > n {
        return Err(Error::InvalidArgument(format!("junta size {q} exceeds arity {n}")));
    }
    let g: Vec<bool> = (0..1 << q).map(|_| rng.gen_bool(0.6)).collect();
    let in_dom = |x: u32| g[(x & ((1 << q) - 1)) as usize];
    let f = PartialFunction::from_fn(n, |x| {
        if in_dom(x) {
            Value::from_bit(rng.gen())
        } else {
            Value::Undefined
        }
    })?;
    let pv: Vec<f64> = (0..f.size() as u32)
        .map(|x| {
            let target = match f.value(x) {
                Value::One => 1.0,
                Value::Zero => 0.0,
                Value::Undefined => rng.gen_range(0.0..1.0),
            };
            (target + rng.gen_range(-eps..=eps)).clamp(0.0, 1.0)
        })
        .collect();
    let qv: Vec<f64> = (0..f.size() as u32)
        .map(|x| f64::from(u8::from(in_dom(x))) + rng.gen_range(-eps2..=eps2))
        .collect();
    Ok((
        f,
        MultilinearPoly::interpolate(n, Basis::Monomial, &pv)?,
        MultilinearPoly::interpolate(n, Basis::Monomial, &qv)?,
    ))
}
