//! Exact deterministic query complexity by search over restrictions.
//!
//! A restriction `ρ ∈ {0,1,*}^n` is encoded in base 3 with digit `i` for
//! `x_{i+1}` (0, 1, or 2 for free). `D(ρ) = 0` when the domain points
//! consistent with `ρ` share a label (or there are none), otherwise
//! `1 + min_i max_b D(ρ[x_i = b])`. Off-domain points never constrain a leaf.

use crate::boolfn::{PartialFunction, Value};
use crate::error::{Error, Result};

/// Largest arity searched exhaustively unless the caller raises it.
pub const DEFAULT_EXACT_CAP: usize = 14;

const HAS0: u8 = 1;
const HAS1: u8 = 2;
const UNKNOWN: u8 = u8::MAX;

struct Search {
    n: usize,
    pow3: Vec<usize>,
    status: Vec<u8>,
    exact: Vec<u8>,
    lower: Vec<u8>,
}

impl Search {
    fn new(f: &PartialFunction) -> Self {
        let n = f.arity();
        let pow3: Vec<usize> = (0..=n).map(|i| 3usize.pow(i as u32)).collect();
        let total = pow3[n];
        let mut status = vec![0u8; total];
        // digits of r, least significant first; fixed points come from f directly
        for r in 0..total {
            let mut rest = r;
            let mut free = None;
            let mut bits = 0u32;
            for i in 0..n {
                let d = rest % 3;
                rest /= 3;
                if d == 2 {
                    free.get_or_insert(i);
                } else if d == 1 {
                    bits |= 1 << i;
                }
            }
            status[r] = match free {
                None => match f.value(bits) {
                    Value::Zero => HAS0,
                    Value::One => HAS1,
                    Value::Undefined => 0,
                },
                // r - pow3[i] and r - 2 pow3[i] fix x_i to 1 and 0; both are smaller
                Some(i) => status[r - pow3[i]] | status[r - 2 * pow3[i]],
            };
        }
        Search {
            n,
            pow3,
            status,
            exact: vec![UNKNOWN; total],
            lower: vec![0; total],
        }
    }

    fn root(&self) -> usize {
        self.pow3[self.n] - 1
    }

    /// Exact `D(ρ)` when it is below `cutoff`, otherwise a lower bound that
    /// is at least `cutoff`.
    fn solve(&mut self, r: usize, cutoff: u8) -> u8 {
        if self.status[r] != HAS0 | HAS1 {
            return 0;
        }
        if self.exact[r] != UNKNOWN {
            return self.exact[r];
        }
        if cutoff <= 1 {
            return 1;
        }
        if self.lower[r] >= cutoff {
            return self.lower[r];
        }
        let free: Vec<usize> = (0..self.n).filter(|&i| r / self.pow3[i] % 3 == 2).collect();
        let bound = cutoff.min(free.len() as u8 + 1);
        let mut best = bound;
        // query first the coordinates whose answers split the points most evenly
        let mut order: Vec<(u8, usize)> = free
            .iter()
            .map(|&i| {
                let z = r - 2 * self.pow3[i];
                let o = r - self.pow3[i];
                let mixed = (self.status[z] == HAS0 | HAS1) as u8 + (self.status[o] == HAS0 | HAS1) as u8;
                (mixed, i)
            })
            .collect();
        order.sort();
        for &(_, i) in &order {
            if best <= 1 {
                break;
            }
            let z = r - 2 * self.pow3[i];
            let o = r - self.pow3[i];
            let a = self.solve(z, best - 1);
            if a + 1 >= best {
                continue;
            }
            let b = self.solve(o, best - 1);
            if b + 1 >= best {
                continue;
            }
            best = 1 + a.max(b);
        }
        if best < bound {
            self.exact[r] = best;
            best
        } else {
            self.lower[r] = self.lower[r].max(bound);
            bound
        }
    }
}

/// `D(f)` with the default exhaustive cap.
pub fn deterministic_complexity(f: &PartialFunction) -> Result<usize> {
    deterministic_complexity_capped(f, DEFAULT_EXACT_CAP)
}

pub fn deterministic_complexity_capped(f: &PartialFunction, cap: usize) -> Result<usize> {
    let n = f.arity();
    if n > cap {
        return Err(Error::ExactRefused { n, cap });
    }
    let mut s = Search::new(f);
    let root = s.root();
    let d = s.solve(root, n as u8 + 2);
    if d as usize > n {
        return Err(Error::Internal("tree depth exceeds arity".into()));
    }
    Ok(d as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{make_symmetric, Value::*};

    // Plain minimax over restrictions with no pruning or memo.
    fn oracle(f: &PartialFunction, support: u32, values: u32) -> usize {
        let pts: Vec<Value> = (0..f.size() as u32)
            .filter(|y| (y ^ values) & support == 0)
            .map(|y| f.value(y))
            .filter(|v| v.is_defined())
            .collect();
        if pts.windows(2).all(|w| w[0] == w[1]) {
            return 0;
        }
        (0..f.arity())
            .filter(|i| support >> i & 1 == 0)
            .map(|i| {
                let a = oracle(f, support | 1 << i, values);
                let b = oracle(f, support | 1 << i, values | 1 << i);
                1 + a.max(b)
            })
            .min()
            .unwrap()
    }

    #[test]
    fn examples() {
        let xor3 = PartialFunction::total_from_fn(3, |x| x.count_ones() % 2 == 1).unwrap();
        assert_eq!(deterministic_complexity(&xor3).unwrap(), 3);
        let f = make_symmetric(4, &[Zero, Undefined, Undefined, Undefined, One]).unwrap();
        assert_eq!(deterministic_complexity(&f).unwrap(), 1);
        let dj = make_symmetric(4, &[Zero, Undefined, One, Undefined, Zero]).unwrap();
        assert_eq!(deterministic_complexity(&dj).unwrap(), 3);
        assert_eq!(oracle(&dj, 0, 0), 3);
    }

    #[test]
    fn refuses_above_cap() {
        let f = PartialFunction::constant(5, false).unwrap();
        assert_eq!(
            deterministic_complexity_capped(&f, 4),
            Err(Error::ExactRefused { n: 5, cap: 4 })
        );
        assert_eq!(deterministic_complexity_capped(&f, 5).unwrap(), 0);
    }

    #[test]
    fn matches_unpruned_minimax() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1..=4);
            let f = PartialFunction::from_fn(n, |_| match rng.gen_range(0..3) {
                0 => Zero,
                1 => One,
                _ => Undefined,
            })
            .unwrap();
            assert_eq!(deterministic_complexity(&f).unwrap(), oracle(&f, 0, 0), "{f:?}");
        }
    }
}
