//! Functions on a single Hamming slice: balanced blocks and the adaptive
//! certificate algorithm with its `3n / min(k, n-k) · C · bs` query bound.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boolfn::{make_slice, PartialAssignment, PartialFunction};
use crate::error::{Error, Result};
use crate::measures::algorithms::universe;
use crate::measures::blocks::{
    domain_value, max_disjoint, min_hitting_size, minimal_blocks, minimal_blocks_by, CertKind, Sensitivity,
};

/// A partial function whose domain is exactly the weight-`k` slice.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceInstance {
    pub f: PartialFunction,
    pub k: usize,
}

impl SliceInstance {
    pub fn new(f: PartialFunction) -> Result<Self> {
        let k = f
            .domain()
            .next()
            .ok_or_else(|| Error::InvalidArgument("empty domain is not a slice".into()))?
            .count_ones();
        let exact = (0..f.size() as u32).all(|x| f.in_domain(x) == (x.count_ones() == k));
        if !exact {
            return Err(Error::InvalidArgument("domain is not a single full slice".into()));
        }
        Ok(SliceInstance { f, k: k as usize })
    }

    /// Uniformly random labels on the weight-`k` slice of the `n`-cube.
    pub fn random(n: usize, k: usize, rng: &mut impl Rng) -> Result<Self> {
        let labels = (0..1u32 << n)
            .filter(|x| x.count_ones() as usize == k)
            .map(|x| (x, rng.gen()))
            .collect();
        Self::new(make_slice(n, k, &labels)?)
    }

    pub fn n(&self) -> usize {
        self.f.arity()
    }

    /// `3n / min(k, n-k) · C(f) · bs(f)`, or 0 for a constant labelling.
    pub fn query_bound(&self) -> Result<f64> {
        let (c, bs) = certificate_and_bs(&self.f)?;
        if c * bs == 0 {
            return Ok(0.0);
        }
        let m = self.k.min(self.n() - self.k);
        Ok(3.0 * self.n() as f64 / m as f64 * (c * bs) as f64)
    }
}

/// Maximum `{b,*}`-certificate and maximum block sensitivity over the domain.
fn certificate_and_bs(f: &PartialFunction) -> Result<(usize, usize)> {
    f.domain().try_fold((0, 0), |(c, bs), x| {
        let cert = min_hitting_size(&minimal_blocks(f, x, CertKind::Promise.blocks_to_hit())?);
        let b = max_disjoint(&minimal_blocks(f, x, Sensitivity::Strict)?);
        Ok((c.max(cert), bs.max(b)))
    })
}

/// Whether `block` flips as many ones as zeros of `x`.
pub fn is_balanced(x: u32, block: u32) -> bool {
    (x & block).count_ones() == (!x & block).count_ones()
}

/// Block sensitivity at `x` counted over balanced blocks only.
pub fn balanced_block_sensitivity(s: &SliceInstance, x: u32) -> Result<usize> {
    let v = domain_value(&s.f, x)?;
    let blocks = minimal_blocks_by(s.n(), |b| {
        is_balanced(x, b) && {
            let w = s.f.value(x ^ b);
            w.is_defined() && w != v
        }
    });
    Ok(max_disjoint(&blocks))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceRun {
    pub output: bool,
    pub queries: usize,
    pub bound: f64,
}

/// The prepared slice procedure, reusable across hidden inputs.
#[derive(Clone, Debug)]
pub struct SliceAlgorithm {
    f: PartialFunction,
    mirrored: bool,
    rounds: usize,
    threshold: usize,
    universe: Vec<PartialAssignment>,
    bound: f64,
}

impl SliceAlgorithm {
    /// Mirrors slices above the middle onto weight `n - k`.
    pub fn prepare(s: &SliceInstance) -> Result<Self> {
        let n = s.n();
        let mirrored = 2 * s.k > n;
        let (f, k) = if mirrored {
            (s.f.complement_inputs(), n - s.k)
        } else {
            (s.f.clone(), s.k)
        };
        let (_, bs) = certificate_and_bs(&f)?;
        let universe = universe(&f, &f.preimage(true), CertKind::Promise)?;
        Ok(SliceAlgorithm {
            f,
            mirrored,
            rounds: bs,
            threshold: k.div_ceil(3),
            universe,
            bound: s.query_bound()?,
        })
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Replays the procedure, reading coordinates (0-based) through `oracle`.
    pub fn run(&self, oracle: impl Fn(usize) -> bool) -> Result<SliceRun> {
        let n = self.f.arity();
        let read = |i: usize| oracle(i) != self.mirrored;
        let mut q = PartialAssignment::empty();
        let query = |q: &mut PartialAssignment, support: u32| {
            for i in 0..n {
                if support >> i & 1 == 1 && q.support >> i & 1 == 0 {
                    q.support |= 1 << i;
                    if read(i) {
                        q.values |= 1 << i;
                    }
                }
            }
        };
        let done = |q: &PartialAssignment, output: bool| SliceRun {
            output,
            queries: q.size(),
            bound: self.bound,
        };
        for _ in 0..self.rounds {
            let Some(c) = self.universe.iter().find(|c| c.agrees_with(q)) else {
                return Ok(done(&q, false));
            };
            query(&mut q, c.support);
            if c.agrees_with(q) {
                return Ok(done(&q, true));
            }
            if q.size() >= self.threshold {
                query(&mut q, (self.f.size() - 1) as u32);
                let v = domain_value(&self.f, q.values)?;
                return Ok(done(&q, v.bit() == Some(true)));
            }
        }
        let mut labels = self.f.domain().filter(|&y| q.is_consistent(y)).map(|y| self.f.value(y));
        let first = labels
            .next()
            .ok_or_else(|| Error::Internal("no slice point matches the transcript".into()))?;
        if labels.any(|v| v != first) {
            return Err(Error::Internal("transcript does not determine the output".into()));
        }
        Ok(done(&q, first.bit() == Some(true)))
    }
}

/// Runs the slice procedure on the hidden slice point `x`.
pub fn run_slice_algorithm(s: &SliceInstance, x: u32) -> Result<SliceRun> {
    if (x as usize) >= s.f.size() || !s.f.in_domain(x) {
        return Err(Error::Contract {
            point: x,
            detail: "hidden input is off the slice".into(),
        });
    }
    SliceAlgorithm::prepare(s)?.run(|i| x >> i & 1 == 1)
}
