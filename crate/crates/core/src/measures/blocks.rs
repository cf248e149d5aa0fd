//! Sensitive blocks, disjoint packings and hitting sets at a single input.
//!
//! A block `B` is strictly sensitive at `x` when `f(x^B) = 1 - f(x)` and
//! promise-sensitive when `f(x^B) ∈ {1 - f(x), *}`. Block sensitivity is a
//! maximum packing of minimal sensitive blocks. A strict certificate must hit
//! every promise-sensitive block and a promise certificate every strictly
//! sensitive one, so certificate sizes are minimum hitting sets.

use serde::{Deserialize, Serialize};

use crate::boolfn::{PartialFunction, Value};
use crate::error::{Error, Result};

/// Which outputs count as a flip away from `f(x)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sensitivity {
    /// Only the opposite label.
    Strict,
    /// The opposite label or undefined.
    Promise,
}

impl Sensitivity {
    pub fn from_flag(promise: bool) -> Self {
        if promise {
            Sensitivity::Promise
        } else {
            Sensitivity::Strict
        }
    }

    #[inline]
    pub fn flips(self, base: Value, other: Value) -> bool {
        match self {
            Sensitivity::Strict => other.is_defined() && other != base,
            Sensitivity::Promise => other != base,
        }
    }
}

/// Certificate flavour: strict `b`-certificates or `{b,*}`-certificates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CertKind {
    Strict,
    Promise,
}

impl CertKind {
    /// The blocks a certificate of this kind has to hit.
    pub fn blocks_to_hit(self) -> Sensitivity {
        match self {
            CertKind::Strict => Sensitivity::Promise,
            CertKind::Promise => Sensitivity::Strict,
        }
    }
}

pub(crate) fn domain_value(f: &PartialFunction, x: u32) -> Result<Value> {
    if x as usize >= f.size() {
        return Err(Error::InvalidArgument(format!(
            "point {x} outside a {}-cube",
            f.arity()
        )));
    }
    let v = f.value(x);
    if !v.is_defined() {
        return Err(Error::OffDomain(x));
    }
    Ok(v)
}

pub fn sensitivity(f: &PartialFunction, x: u32, kind: Sensitivity) -> Result<usize> {
    let v = domain_value(f, x)?;
    Ok((0..f.arity()).filter(|&i| kind.flips(v, f.value(x ^ 1 << i))).count())
}

/// Inclusion-minimal blocks among those accepted by `sensitive`.
///
/// Visits blocks in increasing order so every proper subset is settled first.
pub fn minimal_blocks_by(n: usize, sensitive: impl Fn(u32) -> bool) -> Vec<u32> {
    let size = 1usize << n;
    let mut below = vec![false; size];
    let mut out = Vec::new();
    for b in 1..size as u32 {
        let mut rest = b;
        let mut sub = false;
        while rest != 0 {
            let low = rest & rest.wrapping_neg();
            if below[(b ^ low) as usize] {
                sub = true;
                break;
            }
            rest ^= low;
        }
        let s = sensitive(b);
        if s && !sub {
            out.push(b);
        }
        below[b as usize] = s || sub;
    }
    out
}

/// Minimal sensitive blocks of `f` at `x`.
pub fn minimal_blocks(f: &PartialFunction, x: u32, kind: Sensitivity) -> Result<Vec<u32>> {
    let v = domain_value(f, x)?;
    Ok(minimal_blocks_by(f.arity(), |b| kind.flips(v, f.value(x ^ b))))
}

/// Largest number of pairwise disjoint sets among `blocks`.
pub fn max_disjoint(blocks: &[u32]) -> usize {
    let mut sorted: Vec<u32> = blocks.to_vec();
    sorted.sort_by_key(|b| (b.count_ones(), *b));
    sorted.dedup();
    let mut best = greedy_disjoint(&sorted);
    pack(&sorted, u32::MAX, 0, &mut best);
    best
}

fn greedy_disjoint(sorted: &[u32]) -> usize {
    let mut used = 0u32;
    let mut count = 0;
    for &b in sorted {
        if b & used == 0 {
            used |= b;
            count += 1;
        }
    }
    count
}

fn pack(sorted: &[u32], avail: u32, count: usize, best: &mut usize) {
    let mut union = 0u32;
    let mut min_size = u32::MAX;
    for &b in sorted.iter().filter(|&&b| b & !avail == 0) {
        union |= b;
        min_size = min_size.min(b.count_ones());
    }
    if union == 0 {
        *best = (*best).max(count);
        return;
    }
    if count + (union.count_ones() / min_size) as usize <= *best {
        return;
    }
    let e = union & union.wrapping_neg();
    for &b in sorted.iter().filter(|&&b| b & e != 0 && b & !avail == 0) {
        pack(sorted, avail & !b, count + 1, best);
    }
    pack(sorted, avail & !e, count, best);
}

/// Smallest set meeting every block, returned as a mask.
pub fn min_hitting_set(blocks: &[u32]) -> u32 {
    let mut sorted: Vec<u32> = blocks.to_vec();
    sorted.sort_by_key(|b| (b.count_ones(), *b));
    sorted.dedup();
    let mut best = greedy_hitting(&sorted);
    hit(&sorted, 0, 0, &mut best);
    best
}

pub fn min_hitting_size(blocks: &[u32]) -> usize {
    min_hitting_set(blocks).count_ones() as usize
}

fn greedy_hitting(sorted: &[u32]) -> u32 {
    let mut chosen = 0u32;
    loop {
        let open: Vec<u32> = sorted.iter().copied().filter(|&b| b & chosen == 0).collect();
        if open.is_empty() {
            return chosen;
        }
        let union = open.iter().fold(0, |u, b| u | b);
        let e = (0..32)
            .filter(|&i| union >> i & 1 == 1)
            .max_by_key(|&i| (open.iter().filter(|&&b| b >> i & 1 == 1).count(), std::cmp::Reverse(i)))
            .unwrap();
        chosen |= 1 << e;
    }
}

fn hit(sorted: &[u32], chosen: u32, forbidden: u32, best: &mut u32) {
    let open: Vec<u32> = sorted.iter().copied().filter(|&b| b & chosen == 0).collect();
    if open.is_empty() {
        if chosen.count_ones() < best.count_ones() {
            *best = chosen;
        }
        return;
    }
    if open.iter().any(|&b| b & !forbidden == 0) {
        return;
    }
    let size = chosen.count_ones() as usize;
    if size + greedy_disjoint(&open) >= best.count_ones() as usize {
        return;
    }
    let pivot = *open.iter().min_by_key(|&&b| (b & !forbidden).count_ones()).unwrap();
    let mut excluded = forbidden;
    let mut rest = pivot & !forbidden;
    while rest != 0 {
        let e = rest & rest.wrapping_neg();
        hit(sorted, chosen | e, excluded, best);
        excluded |= e;
        rest ^= e;
    }
}

/// Block sensitivity of `f` at `x`.
pub fn block_sensitivity(f: &PartialFunction, x: u32, kind: Sensitivity) -> Result<usize> {
    Ok(max_disjoint(&minimal_blocks(f, x, kind)?))
}

/// Size of the smallest certificate of the given kind for `x`.
pub fn certificate(f: &PartialFunction, x: u32, kind: CertKind) -> Result<usize> {
    Ok(min_hitting_size(&minimal_blocks(f, x, kind.blocks_to_hit())?))
}

/// Lexicographically first `k`-subset of `0..n` meeting every block.
///
/// Subsets compare by their sorted index lists.
pub fn lex_first_hitting_set(n: usize, k: usize, blocks: &[u32]) -> Option<u32> {
    fn rec(n: usize, k: usize, start: usize, chosen: u32, blocks: &[u32]) -> Option<u32> {
        if k == 0 {
            return blocks.iter().all(|&b| b & chosen != 0).then_some(chosen);
        }
        (start..=n - k).find_map(|i| rec(n, k - 1, i + 1, chosen | 1 << i, blocks))
    }
    if k > n {
        return None;
    }
    rec(n, k, 0, 0, blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn or3() -> PartialFunction {
        PartialFunction::total_from_fn(3, |x| x != 0).unwrap()
    }

    fn dictator_slice3() -> PartialFunction {
        crate::boolfn::slice_from_fn(3, 1, |x| x == 1).unwrap()
    }

    fn zero_minus_origin() -> PartialFunction {
        PartialFunction::from_fn(3, |x| if x == 0 { Value::Undefined } else { Value::Zero }).unwrap()
    }

    fn separating_slice() -> PartialFunction {
        crate::boolfn::slice_from_fn(4, 1, |x| x.trailing_zeros() < 2).unwrap()
    }

    // Brute force over every block, independent of the minimal-block machinery.
    fn oracle_bs(f: &PartialFunction, x: u32, kind: Sensitivity) -> usize {
        let v = f.value(x);
        let sens: Vec<u32> = (1..f.size() as u32)
            .filter(|&b| kind.flips(v, f.value(x ^ b)))
            .collect();
        fn best(sens: &[u32], used: u32, from: usize) -> usize {
            let mut m = 0;
            for i in from..sens.len() {
                if sens[i] & used == 0 {
                    m = m.max(1 + best(sens, used | sens[i], i + 1));
                }
            }
            m
        }
        best(&sens, 0, 0)
    }

    // Checks every support in order of size; consistent points are enumerated directly.
    fn oracle_cert(f: &PartialFunction, x: u32, kind: CertKind) -> usize {
        let b = f.value(x);
        let n = f.arity();
        (0..=n)
            .find(|&k| {
                (0..1u32 << n).filter(|s| s.count_ones() as usize == k).any(|s| {
                    (0..1u32 << n).filter(|y| (y ^ x) & s == 0).all(|y| match kind {
                        CertKind::Strict => f.value(y) == b,
                        CertKind::Promise => f.value(y) == b || !f.value(y).is_defined(),
                    })
                })
            })
            .unwrap()
    }

    #[test]
    fn sensitivity_examples() {
        assert_eq!(sensitivity(&or3(), 0, Sensitivity::Strict).unwrap(), 3);
        assert_eq!(sensitivity(&dictator_slice3(), 1, Sensitivity::Strict).unwrap(), 0);
        assert_eq!(sensitivity(&dictator_slice3(), 1, Sensitivity::Promise).unwrap(), 3);
        assert_eq!(
            sensitivity(&dictator_slice3(), 0, Sensitivity::Strict),
            Err(Error::OffDomain(0))
        );
    }

    #[test]
    fn block_sensitivity_examples() {
        assert_eq!(block_sensitivity(&or3(), 0, Sensitivity::Strict).unwrap(), 3);
        let g = zero_minus_origin();
        assert_eq!(block_sensitivity(&g, 0b001, Sensitivity::Promise).unwrap(), 1);
        assert_eq!(oracle_bs(&g, 0b001, Sensitivity::Promise), 1);
        assert_eq!(block_sensitivity(&g, 0b001, Sensitivity::Strict).unwrap(), 0);
    }

    #[test]
    fn certificate_examples() {
        let f = separating_slice();
        assert_eq!(certificate(&f, 0b0001, CertKind::Promise).unwrap(), 1);
        assert_eq!(oracle_cert(&f, 0b0001, CertKind::Promise), 1);
        assert_eq!(certificate(&f, 0b0001, CertKind::Strict).unwrap(), 4);
        assert_eq!(oracle_cert(&f, 0b0001, CertKind::Strict), 4);
        assert_eq!(certificate(&or3(), 0, CertKind::Strict).unwrap(), 3);
    }

    #[test]
    fn lex_first_examples() {
        let blocks = [0b011, 0b110];
        assert_eq!(lex_first_hitting_set(3, 1, &blocks), Some(0b010));
        assert_eq!(lex_first_hitting_set(3, 2, &blocks), Some(0b011));
        assert_eq!(lex_first_hitting_set(3, 0, &[]), Some(0));
        assert_eq!(lex_first_hitting_set(3, 1, &[0b001, 0b100]), None);
    }

    fn arb_partial(max_n: usize) -> impl Strategy<Value = PartialFunction> {
        (1..=max_n).prop_flat_map(|n| {
            proptest::collection::vec(0u8..3, 1 << n).prop_map(move |codes| {
                let vals: Vec<Value> = codes
                    .iter()
                    .map(|c| match c {
                        0 => Value::Zero,
                        1 => Value::One,
                        _ => Value::Undefined,
                    })
                    .collect();
                PartialFunction::from_values(n, &vals).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn packing_and_hitting_match_brute_force(f in arb_partial(4)) {
            for x in f.domain() {
                for kind in [Sensitivity::Strict, Sensitivity::Promise] {
                    prop_assert_eq!(block_sensitivity(&f, x, kind).unwrap(), oracle_bs(&f, x, kind));
                }
                for kind in [CertKind::Strict, CertKind::Promise] {
                    prop_assert_eq!(certificate(&f, x, kind).unwrap(), oracle_cert(&f, x, kind));
                }
            }
        }

        #[test]
        fn minimal_blocks_are_minimal(f in arb_partial(5)) {
            for x in f.domain() {
                let blocks = minimal_blocks(&f, x, Sensitivity::Promise).unwrap();
                for &b in &blocks {
                    prop_assert!(blocks.iter().all(|&c| c == b || c & !b != 0));
                }
            }
        }
    }
}
