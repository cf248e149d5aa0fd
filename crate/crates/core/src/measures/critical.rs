//! Critical block sensitivity and critical certificate complexity.
//!
//! Both minimise over completions `f'` of `f` a maximum taken over `Dom(f)`
//! only. The search assigns undefined points one at a time. Unassigned points
//! are treated as agreeing with the input under inspection, which gives a
//! lower bound that can only grow as more points are assigned.

use serde::{Deserialize, Serialize};

use crate::boolfn::{PartialFunction, Value};
use crate::error::{Error, Result};
use crate::measures::blocks::{max_disjoint, min_hitting_size, minimal_blocks_by};

/// Default number of undefined points up to which completions are searched.
pub const DEFAULT_UNDEFINED_BUDGET: usize = 16;

/// A measure value and whether it was computed exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounded {
    pub value: usize,
    pub exact: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Objective {
    BlockSensitivity,
    Certificate,
}

/// Max over `dom` of the objective at `x` in the (possibly partial) labelling
/// `lab`, stopping early once `stop` is reached.
fn domain_max(lab: &PartialFunction, dom: &[u32], obj: Objective, stop: usize) -> usize {
    let n = lab.arity();
    let mut best = 0;
    for &x in dom {
        let v = lab.value(x);
        let blocks = minimal_blocks_by(n, |b| {
            let w = lab.value(x ^ b);
            w.is_defined() && w != v
        });
        let m = match obj {
            Objective::BlockSensitivity => max_disjoint(&blocks),
            Objective::Certificate => min_hitting_size(&blocks),
        };
        best = best.max(m);
        if best >= stop {
            break;
        }
    }
    best
}

struct Search<'a> {
    dom: &'a [u32],
    undefined: &'a [u32],
    /// Completions must keep max block sensitivity at or below this.
    bs_cap: Option<usize>,
    obj: Objective,
    floor: usize,
    best: usize,
    witness: Option<PartialFunction>,
}

impl Search<'_> {
    fn feasible(&self, lab: &PartialFunction) -> bool {
        match self.bs_cap {
            Some(cap) => domain_max(lab, self.dom, Objective::BlockSensitivity, cap + 1) <= cap,
            None => true,
        }
    }

    fn run(&mut self, lab: &mut PartialFunction, depth: usize) {
        if self.best <= self.floor {
            return;
        }
        if depth == self.undefined.len() {
            let v = domain_max(lab, self.dom, self.obj, usize::MAX);
            if v < self.best && self.feasible(lab) {
                self.best = v;
                self.witness = Some(lab.clone());
            }
            return;
        }
        let y = self.undefined[depth];
        let mut children = Vec::with_capacity(2);
        for bit in [false, true] {
            lab.set(y, Value::from_bit(bit));
            let lb = domain_max(lab, self.dom, self.obj, self.best);
            if lb < self.best && self.feasible(lab) {
                children.push((lb, bit));
            }
        }
        lab.set(y, Value::Undefined);
        children.sort();
        for (lb, bit) in children {
            if lb >= self.best {
                continue;
            }
            lab.set(y, Value::from_bit(bit));
            self.run(lab, depth + 1);
            lab.set(y, Value::Undefined);
        }
    }
}

/// Labels each undefined point like its nearest domain point, ties to 0.
fn nearest_completion(f: &PartialFunction) -> PartialFunction {
    let mut g = f.clone();
    let dom: Vec<u32> = f.domain().collect();
    if dom.is_empty() {
        return f.fill_undefined(false);
    }
    for y in f.undefined_points() {
        let dmin = dom.iter().map(|&x| (x ^ y).count_ones()).min().unwrap();
        let ones = dom
            .iter()
            .filter(|&&x| (x ^ y).count_ones() == dmin && f.value(x) == Value::One)
            .count();
        let zeros = dom
            .iter()
            .filter(|&&x| (x ^ y).count_ones() == dmin && f.value(x) == Value::Zero)
            .count();
        g.set(y, Value::from_bit(ones > zeros));
    }
    g
}

/// Result of the exact critical search.
#[derive(Clone, Debug)]
pub struct CriticalWitness {
    pub cbs: usize,
    pub c_crit: usize,
    /// A completion attaining both values.
    pub completion: PartialFunction,
}

fn min_over_completions(
    f: &PartialFunction,
    obj: Objective,
    bs_cap: Option<usize>,
    seed: PartialFunction,
) -> (usize, PartialFunction) {
    let dom: Vec<u32> = f.domain().collect();
    let undefined = f.undefined_points();
    let floor = domain_max(f, &dom, obj, usize::MAX);
    let seed_value = domain_max(&seed, &dom, obj, usize::MAX);
    let mut search = Search {
        dom: &dom,
        undefined: &undefined,
        bs_cap,
        obj,
        floor,
        best: seed_value,
        witness: None,
    };
    let mut lab = f.clone();
    search.run(&mut lab, 0);
    let best = search.best;
    (best, search.witness.unwrap_or(seed))
}

/// `cbs(f)`; exact when `|Dom(f)^c| ≤ budget`, otherwise the upper bound `bs⊥(f)`.
pub fn critical_block_sensitivity(f: &PartialFunction, budget: usize) -> Bounded {
    match exact_cbs(f, budget) {
        Some((value, _)) => Bounded { value, exact: true },
        None => {
            let dom: Vec<u32> = f.domain().collect();
            let n = f.arity();
            let value = dom
                .iter()
                .map(|&x| {
                    let v = f.value(x);
                    max_disjoint(&minimal_blocks_by(n, |b| f.value(x ^ b) != v))
                })
                .max()
                .unwrap_or(0);
            Bounded { value, exact: false }
        }
    }
}

fn exact_cbs(f: &PartialFunction, budget: usize) -> Option<(usize, PartialFunction)> {
    let u = f.size() - f.domain_size();
    if u > budget {
        return None;
    }
    let seed = nearest_completion(f);
    Some(min_over_completions(f, Objective::BlockSensitivity, None, seed))
}

/// Exact `cbs(f)` and `C_crit(f)` with a completion attaining both.
pub fn critical_search(f: &PartialFunction, budget: usize) -> Result<CriticalWitness> {
    let (cbs, bs_witness) = exact_cbs(f, budget).ok_or(Error::CriticalUnavailable)?;
    let (c_crit, completion) = min_over_completions(f, Objective::Certificate, Some(cbs), bs_witness);
    Ok(CriticalWitness {
        cbs,
        c_crit,
        completion,
    })
}

/// `C_crit(f)`; requires `cbs(f)` to be computed exactly.
pub fn critical_certificate(f: &PartialFunction, budget: usize) -> Result<Bounded> {
    critical_search(f, budget).map(|w| Bounded {
        value: w.c_crit,
        exact: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::slice_from_fn;
    use crate::completion::CompletionIterator;
    use crate::measures::blocks::{block_sensitivity, certificate, CertKind, Sensitivity};

    // Full enumeration of completions with the domain-restricted maxima.
    fn oracle(f: &PartialFunction) -> (usize, usize) {
        let scored: Vec<(usize, usize)> = CompletionIterator::new(f)
            .map(|g| {
                let bs = f
                    .domain()
                    .map(|x| block_sensitivity(&g, x, Sensitivity::Strict).unwrap())
                    .max()
                    .unwrap_or(0);
                let c = f
                    .domain()
                    .map(|x| certificate(&g, x, CertKind::Strict).unwrap())
                    .max()
                    .unwrap_or(0);
                (bs, c)
            })
            .collect();
        let cbs = scored.iter().map(|s| s.0).min().unwrap();
        let cc = scored.iter().filter(|s| s.0 == cbs).map(|s| s.1).min().unwrap();
        (cbs, cc)
    }

    #[test]
    fn total_function_is_its_own_completion() {
        let f = PartialFunction::total_from_fn(3, |x| x.count_ones() >= 2).unwrap();
        let w = critical_search(&f, 16).unwrap();
        assert_eq!(w.cbs, 2);
        assert_eq!(w.c_crit, 2);
        assert_eq!(w.completion, f);
    }

    #[test]
    fn constant_minus_origin() {
        let f = PartialFunction::from_fn(3, |x| if x == 0 { Value::Undefined } else { Value::Zero }).unwrap();
        assert_eq!(critical_block_sensitivity(&f, 16), Bounded { value: 0, exact: true });
        assert_eq!(oracle(&f), (0, 0));
    }

    #[test]
    fn dictator_slice_is_sandwiched() {
        let f = slice_from_fn(3, 1, |x| x == 1).unwrap();
        let cbs = critical_block_sensitivity(&f, 16);
        assert!(cbs.exact);
        assert_eq!((cbs.value, critical_certificate(&f, 16).unwrap().value), oracle(&f));
        let over = critical_block_sensitivity(&f, 2);
        assert!(!over.exact);
        assert_eq!(critical_certificate(&f, 2), Err(Error::CriticalUnavailable));
    }

    #[test]
    fn matches_enumeration_on_random_functions() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let n = rng.gen_range(2..=4);
            let f = PartialFunction::from_fn(n, |_| match rng.gen_range(0..4) {
                0 | 1 => Value::from_bit(rng.gen_bool(0.5)),
                _ => Value::Undefined,
            })
            .unwrap();
            if f.size() - f.domain_size() > 9 {
                continue;
            }
            let w = critical_search(&f, 16).unwrap();
            assert_eq!((w.cbs, w.c_crit), oracle(&f), "{f:?}");
            assert!(f.is_completed_by(&w.completion));
        }
    }
}
