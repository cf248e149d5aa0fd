//! Sufficient conditions for the natural completion: covering radius,
//! edge-Lipschitz constant, influence times sparsity and the biased-basis
//! influence bound, each checked against `η(f,c) = (2/3 - d^{-c}) / r_C`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use rand::Rng;

use crate::boolfn::{make_symmetric, PartialFunction, Value};
use crate::completion::natural_completion;
use crate::error::{Error, Result};
use crate::polynomials::{
    biased_k, compose_boost, influence, sign_polynomial, sparsity_at, Basis, BiasedBasis, MultilinearPoly,
};

/// Slack for the floating-point comparisons in the verdicts.
const TOLERANCE: f64 = 1e-12;

/// Largest Hamming distance from a cube point to `set`, by multi-source BFS.
pub fn covering_radius(n: usize, set: &[u32]) -> Result<usize> {
    if set.is_empty() {
        return Err(Error::InvalidArgument("covering radius of the empty set".into()));
    }
    let size = 1usize << n;
    let mut dist = vec![usize::MAX; size];
    let mut queue = VecDeque::new();
    for &x in set {
        if dist[x as usize] == usize::MAX {
            dist[x as usize] = 0;
            queue.push_back(x);
        }
    }
    let mut radius = 0;
    while let Some(x) = queue.pop_front() {
        let d = dist[x as usize];
        radius = radius.max(d);
        for i in 0..n {
            let y = (x ^ 1 << i) as usize;
            if dist[y] == usize::MAX {
                dist[y] = d + 1;
                queue.push_back(y as u32);
            }
        }
    }
    Ok(radius)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasedCriterion {
    pub bias: f64,
    /// `max_i sqrt(Inf_i)` in the biased basis.
    pub max_sqrt_influence: f64,
    /// `σ · η / (2 sqrt(K_{n,d,p}))`.
    pub bound: Option<f64>,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub covering_radius: usize,
    pub c: f64,
    pub degree: usize,
    /// `d^{-c}`, the margin promised off the domain.
    pub margin: f64,
    /// `None` for a total function.
    pub eta: Option<f64>,
    /// Largest `|p(x) - f(x)|` on the domain, `±1` outputs.
    pub approximation_error: f64,
    /// Largest `|p(x) - p(x^i)|` over cube edges.
    pub lipschitz: f64,
    /// `max_i 2 sqrt(spar_i · Inf_i)`.
    pub influence_sparsity: f64,
    pub lipschitz_holds: bool,
    pub influence_holds: bool,
    pub biased: Option<BiasedCriterion>,
    /// `None` for a total function.
    pub min_off_domain: Option<f64>,
    pub min_abs: f64,
    /// Any criterion holding forces `|p| ≥ d^{-c}` off the domain.
    pub implication_holds: bool,
}

impl AdmissibilityReport {
    pub fn any_criterion(&self) -> bool {
        self.lipschitz_holds || self.influence_holds || self.biased.as_ref().is_some_and(|b| b.holds)
    }
}

/// Evaluates every criterion for `p` (read with `±1` semantics) as an
/// approximator of `f` within 1/3 on the domain.
pub fn admissibility(
    f: &PartialFunction,
    p: &MultilinearPoly,
    c: f64,
    bias: Option<f64>,
) -> Result<AdmissibilityReport> {
    let n = f.arity();
    if p.n != n {
        return Err(Error::ArityMismatch { expected: n, got: p.n });
    }
    if p.basis == Basis::Monomial {
        return Err(Error::InvalidArgument("admissibility needs ±1 semantics".into()));
    }
    if c.is_nan() || c <= 0.0 {
        return Err(Error::InvalidArgument(format!("exponent {c} must be positive")));
    }
    let dom: Vec<u32> = f.domain().collect();
    let values = p.values();
    let mut approximation_error: f64 = 0.0;
    for &x in &dom {
        let err = (values[x as usize] - f.value(x).sign().expect("domain point")).abs();
        if err > 1.0 / 3.0 + 1e-9 {
            return Err(Error::Contract {
                point: x,
                detail: format!("p is {err} away from f, above 1/3"),
            });
        }
        approximation_error = approximation_error.max(err);
    }
    let r = covering_radius(n, &dom)?;
    let degree = p.degree();
    let margin = (degree.max(1) as f64).powf(-c);
    let eta = (r > 0).then(|| (2.0 / 3.0 - margin) / r as f64);

    let mut lipschitz: f64 = 0.0;
    for x in 0..values.len() {
        for i in 0..n {
            lipschitz = lipschitz.max((values[x] - values[x ^ 1 << i]).abs());
        }
    }
    let fourier = p.to_fourier();
    let influence_sparsity = (0..n)
        .map(|i| 2.0 * (sparsity_at(&fourier, i) as f64 * influence(&fourier, i)).sqrt())
        .fold(0.0, f64::max);
    let within = |value: f64, bound: Option<f64>| bound.is_none_or(|b| value <= b + TOLERANCE);
    let biased = bias
        .map(|q| -> Result<BiasedCriterion> {
            let b = BiasedBasis::checked(q)?;
            let expanded = p.to_basis(Basis::Biased { bias: q });
            let max_sqrt_influence = (0..n)
                .map(|i| {
                    expanded
                        .coeffs
                        .iter()
                        .filter(|(&s, _)| s >> i & 1 == 1)
                        .map(|(_, v)| v * v)
                        .sum::<f64>()
                        .sqrt()
                })
                .fold(0.0, f64::max);
            let bound = eta.map(|e| b.sigma * e / (2.0 * biased_k(n, degree, q).sqrt()));
            Ok(BiasedCriterion {
                bias: q,
                max_sqrt_influence,
                bound,
                holds: within(max_sqrt_influence, bound),
            })
        })
        .transpose()?;
    let min_off_domain = (0..values.len())
        .filter(|&x| !f.in_domain(x as u32))
        .map(|x| values[x].abs())
        .reduce(f64::min);
    let min_abs = values.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    let mut report = AdmissibilityReport {
        covering_radius: r,
        c,
        degree,
        margin,
        eta,
        approximation_error,
        lipschitz,
        influence_sparsity,
        lipschitz_holds: within(lipschitz, eta),
        influence_holds: within(influence_sparsity, eta),
        biased,
        min_off_domain,
        min_abs,
        implication_holds: true,
    };
    report.implication_holds = !report.any_criterion() || min_off_domain.is_none_or(|m| m >= margin - 1e-9);
    Ok(report)
}

/// Symmetric function `0` below weight `n/6`, `1` above `5n/6`, with the
/// averaging polynomial `Σ χ_i / n`.
pub fn gap_majority(n: usize) -> Result<(PartialFunction, MultilinearPoly)> {
    let profile: Vec<Value> = (0..=n)
        .map(|w| {
            if 6 * w <= n {
                Value::Zero
            } else if 6 * w >= 5 * n {
                Value::One
            } else {
                Value::Undefined
            }
        })
        .collect();
    let f = make_symmetric(n, &profile)?;
    let p = MultilinearPoly::from_coeffs(n, Basis::Fourier, (0..n).map(|i| (1u32 << i, 1.0 / n as f64)));
    Ok((f, p))
}

/// A near-constant degree-2 polynomial whose edge steps fit under `η`,
/// with the domain a random subset where `|p| ≥ 2/3`.
pub fn engineered_instance(n: usize, rng: &mut impl Rng) -> (PartialFunction, MultilinearPoly) {
    loop {
        let keep: Vec<bool> = (0..1 << n).map(|_| rng.gen_bool(0.5)).collect();
        let dom: Vec<u32> = (0..1u32 << n).filter(|&x| keep[x as usize]).collect();
        if dom.is_empty() || dom.len() == 1 << n {
            continue;
        }
        let r = covering_radius(n, &dom).unwrap() as f64;
        let sign = if rng.gen() { 1.0 } else { -1.0 };
        // η = (2/3 - 1/2) / r with c = 1, d = 2; each edge step ≤ 2 Σ|a_S|
        let budget = 1.0 / (6.0 * r) / 3.0;
        let terms: Vec<(u32, f64)> = (0..3)
            .map(|_| {
                let s = loop {
                    let s = rng.gen_range(1..1u32 << n);
                    if s.count_ones() <= 2 {
                        break s;
                    }
                };
                (s, rng.gen_range(-1.0..1.0) * budget / 3.0)
            })
            .chain([(0b11, budget / 3.0)])
            .collect();
        let p = MultilinearPoly::from_coeffs(n, Basis::Fourier, terms.into_iter().chain([(0, 0.9)])).scale(sign);
        let v = p.values();
        let f = PartialFunction::from_fn(n, |x| {
            if keep[x as usize] {
                Value::from_bit(v[x as usize] < 0.0)
            } else {
                Value::Undefined
            }
        })
        .expect("arity checked by the caller");
        return (f, p);
    }
}

/// The admissibility verdicts together with the boosted polynomial compared
/// against the natural completion on the whole cube.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoostOutcome {
    pub report: AdmissibilityReport,
    pub sign_degree: usize,
    /// Largest `|p̃(x) - F(x)|` over the cube, `F` the natural completion.
    pub max_deviation: f64,
    pub within: bool,
    /// `P(p / scale)` in the Fourier basis.
    pub boosted: MultilinearPoly,
}

/// Composes `p` with a sign polynomial for `δ = min |p| / scale` and measures
/// the distance to `sign(p)` everywhere.
pub fn boost_to_natural(f: &PartialFunction, p: &MultilinearPoly, c: f64, bias: Option<f64>) -> Result<BoostOutcome> {
    let report = admissibility(f, p, c, bias)?;
    let p = p.to_fourier();
    if report.min_abs <= 0.0 {
        return Err(Error::InvalidArgument("p vanishes on the cube".into()));
    }
    let scale = (p.sup_norm() / 2.0).max(1.0);
    let sign = sign_polynomial((report.min_abs / scale).min(2.0), 1.0 / 3.0)?;
    let boosted = compose_boost(&p, &sign, scale)?;
    let natural = natural_completion(&p)?;
    let max_deviation = boosted
        .poly
        .values()
        .iter()
        .enumerate()
        .map(|(x, v)| (v - natural.value(x as u32).sign().expect("total")).abs())
        .fold(0.0, f64::max);
    Ok(BoostOutcome {
        report,
        sign_degree: sign.degree,
        max_deviation,
        within: max_deviation <= 1.0 / 3.0 + 1e-9,
        boosted: boosted.poly,
    })
}
