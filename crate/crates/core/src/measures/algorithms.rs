//! Adaptive certificate-querying procedures whose query counts bound `D(f)`.
//!
//! Every procedure fixes an orientation `t` and an ordered universe of
//! certificates for the `t`-inputs of the domain: for each such input the
//! lexicographically first minimum certificate, sorted by size, index list,
//! then values. Queries are counted as distinct coordinates read.

use serde::{Deserialize, Serialize};

use crate::boolfn::{PartialAssignment, PartialFunction, Value};
use crate::error::{Error, Result};
use crate::measures::blocks::{
    lex_first_hitting_set, max_disjoint, min_hitting_size, minimal_blocks, CertKind, Sensitivity,
};
use crate::measures::critical::critical_search;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// `{t,*}`-certificates for `bs⊥(f)` rounds; bound `min_b C_b⊥ · bs⊥`.
    PromiseCertificates,
    /// Strict `t`-certificates for `bs(f)` rounds; bound `min_b C_b · bs`.
    StrictCertificates,
    /// Certificates of a critical completion for `cbs(f)` rounds; bound `C_crit · cbs`.
    CriticalCompletion,
    /// Strict `t`-certificates until a `{1-t,*}`-certificate is read;
    /// bound `min{C_1 · C_0⊥, C_0 · C_1⊥}`.
    MixedCertificates,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::PromiseCertificates,
        Variant::StrictCertificates,
        Variant::CriticalCompletion,
        Variant::MixedCertificates,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::PromiseCertificates => "promise-cert-promise-bs",
            Variant::StrictCertificates => "strict-cert-bs",
            Variant::CriticalCompletion => "critical-cert-cbs",
            Variant::MixedCertificates => "strict-cert-promise-cert",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgorithmRun {
    pub output: bool,
    pub queries: usize,
    pub bound: usize,
}

/// A prepared procedure that can be replayed against many hidden inputs.
#[derive(Clone, Debug)]
pub struct CertAlgorithm {
    f: PartialFunction,
    variant: Variant,
    target: bool,
    rounds: usize,
    universe: Vec<PartialAssignment>,
    bound: usize,
}

fn lex_min_certificate(g: &PartialFunction, x: u32, kind: CertKind) -> Result<PartialAssignment> {
    let blocks = minimal_blocks(g, x, kind.blocks_to_hit())?;
    let k = min_hitting_size(&blocks);
    let support = lex_first_hitting_set(g.arity(), k, &blocks)
        .ok_or_else(|| Error::Internal("minimum hitting set vanished".into()))?;
    Ok(PartialAssignment::restrict(x, support))
}

fn sort_key(c: &PartialAssignment) -> (usize, Vec<usize>, Vec<bool>) {
    let idx = c.support_indices();
    let vals = idx.iter().map(|&i| c.values >> i & 1 == 1).collect();
    (c.size(), idx, vals)
}

pub(crate) fn universe(g: &PartialFunction, points: &[u32], kind: CertKind) -> Result<Vec<PartialAssignment>> {
    let mut certs = points
        .iter()
        .map(|&x| lex_min_certificate(g, x, kind))
        .collect::<Result<Vec<_>>>()?;
    certs.sort_by_key(sort_key);
    certs.dedup();
    Ok(certs)
}

fn side_max(g: &PartialFunction, points: &[u32], kind: CertKind) -> Result<usize> {
    points.iter().try_fold(0, |m, &x| {
        let blocks = minimal_blocks(g, x, kind.blocks_to_hit())?;
        Ok(m.max(min_hitting_size(&blocks)))
    })
}

fn bs_max(f: &PartialFunction, kind: Sensitivity) -> Result<usize> {
    f.domain()
        .try_fold(0, |m, x| Ok(m.max(max_disjoint(&minimal_blocks(f, x, kind)?))))
}

impl CertAlgorithm {
    /// Precomputes measures, orientation and certificate universe.
    pub fn prepare(f: &PartialFunction, variant: Variant, budget: usize) -> Result<Self> {
        let sides = [f.preimage(false), f.preimage(true)];
        let mut stated = None;
        let (g, kind, rounds, costs) = match variant {
            Variant::PromiseCertificates => {
                let c = [
                    side_max(f, &sides[0], CertKind::Promise)?,
                    side_max(f, &sides[1], CertKind::Promise)?,
                ];
                (f.clone(), CertKind::Promise, bs_max(f, Sensitivity::Promise)?, c)
            }
            Variant::StrictCertificates => {
                let c = [
                    side_max(f, &sides[0], CertKind::Strict)?,
                    side_max(f, &sides[1], CertKind::Strict)?,
                ];
                (f.clone(), CertKind::Strict, bs_max(f, Sensitivity::Strict)?, c)
            }
            Variant::CriticalCompletion => {
                let w = critical_search(f, budget)?;
                let c = [
                    side_max(&w.completion, &sides[0], CertKind::Strict)?,
                    side_max(&w.completion, &sides[1], CertKind::Strict)?,
                ];
                stated = Some(w.c_crit * w.cbs);
                (w.completion, CertKind::Strict, w.cbs, c)
            }
            Variant::MixedCertificates => {
                let strict = [
                    side_max(f, &sides[0], CertKind::Strict)?,
                    side_max(f, &sides[1], CertKind::Strict)?,
                ];
                let promise = [
                    side_max(f, &sides[0], CertKind::Promise)?,
                    side_max(f, &sides[1], CertKind::Promise)?,
                ];
                // orientation t reads strict t-certificates for C⊥_{1-t} rounds
                let cost = [strict[0] * promise[1], strict[1] * promise[0]];
                let t = usize::from(cost[1] < cost[0]);
                let universe = universe(f, &sides[t], CertKind::Strict)?;
                return Ok(CertAlgorithm {
                    f: f.clone(),
                    variant,
                    target: t == 1,
                    rounds: promise[1 - t],
                    universe,
                    bound: cost[t],
                });
            }
        };
        let t = usize::from(costs[1] < costs[0]);
        let universe = universe(&g, &sides[t], kind)?;
        Ok(CertAlgorithm {
            f: f.clone(),
            variant,
            target: t == 1,
            rounds,
            universe,
            bound: stated.unwrap_or(costs[t] * rounds),
        })
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    /// Replays the procedure, reading coordinates (0-based) through `oracle`.
    pub fn run(&self, oracle: impl Fn(usize) -> bool) -> Result<AlgorithmRun> {
        let t = self.target;
        let mut p = PartialAssignment::empty();
        let query = |p: &mut PartialAssignment, c: &PartialAssignment| {
            for i in c.support_indices() {
                if p.support >> i & 1 == 0 {
                    p.support |= 1 << i;
                    if oracle(i) {
                        p.values |= 1 << i;
                    }
                }
            }
        };
        let done = |p: &PartialAssignment, output: bool| AlgorithmRun {
            output,
            queries: p.size(),
            bound: self.bound,
        };
        for _ in 0..self.rounds {
            if self.variant == Variant::MixedCertificates && !self.consistent_label_exists(&p, t) {
                return Ok(done(&p, !t));
            }
            let Some(c) = self.universe.iter().find(|c| c.agrees_with(p)) else {
                return Ok(done(&p, !t));
            };
            query(&mut p, c);
            if c.agrees_with(p) {
                return Ok(done(&p, t));
            }
        }
        let mut labels = self.f.domain().filter(|&y| p.is_consistent(y)).map(|y| self.f.value(y));
        let first = labels
            .next()
            .ok_or_else(|| Error::Internal("no domain point matches the transcript".into()))?;
        if labels.any(|v| v != first) {
            return Err(Error::Internal("transcript does not determine the output".into()));
        }
        Ok(done(&p, first == Value::One))
    }

    fn consistent_label_exists(&self, p: &PartialAssignment, bit: bool) -> bool {
        let v = Value::from_bit(bit);
        (0..self.f.size() as u32).any(|y| p.is_consistent(y) && self.f.value(y) == v)
    }
}

/// Runs one procedure on the hidden domain input `x`.
pub fn run_cert_bs_algorithm(f: &PartialFunction, x: u32, variant: Variant, budget: usize) -> Result<AlgorithmRun> {
    if (x as usize) >= f.size() || !f.in_domain(x) {
        return Err(Error::Contract {
            point: x,
            detail: "hidden input is outside the domain".into(),
        });
    }
    CertAlgorithm::prepare(f, variant, budget)?.run(|i| x >> i & 1 == 1)
}
