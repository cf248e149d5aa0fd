//! Partial Boolean functions on the n-cube.
//!
//! # Conventions
//!
//! These hold everywhere in the crate, including file I/O:
//!
//! * A point of `{0,1}^n` is stored as an integer whose bit `i - 1` (least
//!   significant first) is `x_i`. Truth tables are indexed by that integer.
//! * In the `{-1,1}` view the mapping is `0 ↔ +1` and `1 ↔ -1`, for inputs
//!   and for outputs alike. The character `χ_S(x)` therefore equals
//!   `(-1)^{|S ∩ x|}` when `S` and `x` are bit masks.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_ARITY: usize = 24;

/// Output of a partial function at a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Value {
    Zero,
    One,
    Undefined,
}

impl Value {
    pub fn from_bit(b: bool) -> Self {
        if b {
            Value::One
        } else {
            Value::Zero
        }
    }

    pub fn bit(self) -> Option<bool> {
        match self {
            Value::Zero => Some(false),
            Value::One => Some(true),
            Value::Undefined => None,
        }
    }

    pub fn is_defined(self) -> bool {
        self != Value::Undefined
    }

    /// `+1` for `Zero`, `-1` for `One`.
    pub fn sign(self) -> Option<f64> {
        self.bit().map(|b| if b { -1.0 } else { 1.0 })
    }

    pub fn to_char(self) -> char {
        match self {
            Value::Zero => '0',
            Value::One => '1',
            Value::Undefined => '*',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            '0' => Some(Value::Zero),
            '1' => Some(Value::One),
            '*' => Some(Value::Undefined),
            _ => None,
        }
    }

    fn code(self) -> u64 {
        match self {
            Value::Zero => 0,
            Value::One => 1,
            Value::Undefined => 2,
        }
    }

    fn from_code(c: u64) -> Self {
        match c {
            0 => Value::Zero,
            1 => Value::One,
            _ => Value::Undefined,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// A point of the cube together with its arity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Input {
    pub n: usize,
    pub bits: u32,
}

impl Input {
    pub fn new(n: usize, bits: u32) -> Self {
        debug_assert!(n <= MAX_ARITY && (n == 32 || bits >> n == 0));
        Input { n, bits }
    }

    /// Parses a bit string whose first character is `x_1`.
    pub fn from_bitstring(s: &str) -> Result<Self> {
        let n = s.len();
        if n == 0 || n > MAX_ARITY {
            return Err(Error::UnsupportedArity(n));
        }
        let mut bits = 0u32;
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << i,
                _ => return Err(Error::InvalidArgument(format!("bad bit character {c:?}"))),
            }
        }
        Ok(Input { n, bits })
    }

    pub fn to_bitstring(self) -> String {
        bitstring(self.bits, self.n)
    }

    pub fn weight(self) -> u32 {
        self.bits.count_ones()
    }

    pub fn bit(self, i: usize) -> bool {
        self.bits >> i & 1 == 1
    }

    /// Coordinate `i` (0-based) in the `±1` convention.
    pub fn sign(self, i: usize) -> f64 {
        if self.bit(i) {
            -1.0
        } else {
            1.0
        }
    }

    pub fn flip(self, block: Block) -> Input {
        Input {
            n: self.n,
            bits: self.bits ^ block.mask,
        }
    }
}

/// `x^B`: flip the coordinates of `x` selected by `block`.
pub fn flip(x: Input, block: Block) -> Input {
    x.flip(block)
}

/// A subset of coordinates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Block {
    pub mask: u32,
}

impl Block {
    pub fn new(mask: u32) -> Self {
        Block { mask }
    }

    /// Block from 1-based coordinate indices.
    pub fn from_indices(indices: &[usize]) -> Self {
        Block {
            mask: indices.iter().fold(0, |m, &i| m | 1 << (i - 1)),
        }
    }

    pub fn len(self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.mask == 0
    }
}

/// An element of `{0,1,*}^n`: bits outside `support` are ignored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartialAssignment {
    pub support: u32,
    pub values: u32,
}

impl PartialAssignment {
    pub fn empty() -> Self {
        PartialAssignment { support: 0, values: 0 }
    }

    /// The restriction of `x` to `support`.
    pub fn restrict(x: u32, support: u32) -> Self {
        PartialAssignment {
            support,
            values: x & support,
        }
    }

    pub fn size(self) -> usize {
        self.support.count_ones() as usize
    }

    pub fn is_consistent(self, x: u32) -> bool {
        (x ^ self.values) & self.support == 0
    }

    /// Two assignments agree where both are fixed.
    pub fn agrees_with(self, other: PartialAssignment) -> bool {
        (self.values ^ other.values) & self.support & other.support == 0
    }

    pub fn merge(self, other: PartialAssignment) -> PartialAssignment {
        PartialAssignment {
            support: self.support | other.support,
            values: (self.values & self.support) | (other.values & other.support),
        }
    }

    /// Sorted 0-based support coordinates.
    pub fn support_indices(self) -> Vec<usize> {
        (0..32).filter(|&i| self.support >> i & 1 == 1).collect()
    }

    /// Renders over `{0,1,*}` with `x_1` first.
    pub fn render(self, n: usize) -> String {
        (0..n)
            .map(|i| {
                if self.support >> i & 1 == 0 {
                    '*'
                } else if self.values >> i & 1 == 1 {
                    '1'
                } else {
                    '0'
                }
            })
            .collect()
    }
}

/// Renders the low `n` bits of `bits` with `x_1` first.
pub fn bitstring(bits: u32, n: usize) -> String {
    (0..n).map(|i| if bits >> i & 1 == 1 { '1' } else { '0' }).collect()
}

const PER_WORD: usize = 32;

/// `f : {0,1}^n → {0, 1, *}` stored as a packed truth table (2 bits per entry).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PartialFunction {
    n: usize,
    words: Vec<u64>,
}

impl fmt::Debug for PartialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n <= 6 {
            write!(f, "PartialFunction(n={}, {})", self.n, self.table_string())
        } else {
            write!(f, "PartialFunction(n={}, |Dom|={})", self.n, self.domain_size())
        }
    }
}

#[derive(Serialize, Deserialize)]
struct TableForm {
    n: usize,
    table: String,
}

impl Serialize for PartialFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TableForm {
            n: self.n,
            table: self.table_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PartialFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let t = TableForm::deserialize(d)?;
        let values = t
            .table
            .chars()
            .map(|c| Value::from_char(c).ok_or_else(|| serde::de::Error::custom(format!("bad table character {c:?}"))))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        PartialFunction::from_values(t.n, &values).map_err(serde::de::Error::custom)
    }
}

impl PartialFunction {
    fn blank(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_ARITY {
            return Err(Error::UnsupportedArity(n));
        }
        let size = 1usize << n;
        // code 2 (Undefined) in every slot
        let fill = 0xAAAA_AAAA_AAAA_AAAAu64;
        Ok(PartialFunction {
            n,
            words: vec![fill; size.div_ceil(PER_WORD)],
        })
    }

    pub fn from_values(n: usize, values: &[Value]) -> Result<Self> {
        let mut f = Self::blank(n)?;
        if values.len() != f.size() {
            return Err(Error::TableLength {
                expected: f.size(),
                got: values.len(),
            });
        }
        for (x, &v) in values.iter().enumerate() {
            f.set(x as u32, v);
        }
        Ok(f)
    }

    pub fn from_fn(n: usize, mut g: impl FnMut(u32) -> Value) -> Result<Self> {
        let mut f = Self::blank(n)?;
        for x in 0..f.size() as u32 {
            f.set(x, g(x));
        }
        Ok(f)
    }

    pub fn total_from_fn(n: usize, mut g: impl FnMut(u32) -> bool) -> Result<Self> {
        Self::from_fn(n, |x| Value::from_bit(g(x)))
    }

    pub fn constant(n: usize, bit: bool) -> Result<Self> {
        Self::total_from_fn(n, |_| bit)
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    /// `2^n`.
    pub fn size(&self) -> usize {
        1 << self.n
    }

    /// Table lookup by point index. Panics if `x >= 2^n`.
    #[inline]
    pub fn value(&self, x: u32) -> Value {
        let x = x as usize;
        assert!(x < self.size(), "point {x} outside a {}-cube", self.n);
        let w = self.words[x / PER_WORD];
        Value::from_code(w >> (2 * (x % PER_WORD)) & 3)
    }

    pub fn set(&mut self, x: u32, v: Value) {
        let x = x as usize;
        assert!(x < self.size());
        let shift = 2 * (x % PER_WORD);
        let w = &mut self.words[x / PER_WORD];
        *w = (*w & !(3 << shift)) | (v.code() << shift);
    }

    pub fn evaluate(&self, x: Input) -> Result<Value> {
        if x.n != self.n {
            return Err(Error::ArityMismatch {
                expected: self.n,
                got: x.n,
            });
        }
        Ok(self.value(x.bits))
    }

    pub fn values(&self) -> Vec<Value> {
        (0..self.size() as u32).map(|x| self.value(x)).collect()
    }

    pub fn domain(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.size() as u32).filter(move |&x| self.value(x).is_defined())
    }

    pub fn undefined_points(&self) -> Vec<u32> {
        (0..self.size() as u32)
            .filter(|&x| !self.value(x).is_defined())
            .collect()
    }

    pub fn domain_size(&self) -> usize {
        self.domain().count()
    }

    pub fn in_domain(&self, x: u32) -> bool {
        self.value(x).is_defined()
    }

    pub fn is_total(&self) -> bool {
        (0..self.size() as u32).all(|x| self.value(x).is_defined())
    }

    /// The common label when `f` is constant on a nonempty domain.
    pub fn constant_value(&self) -> Option<bool> {
        let mut seen = None;
        for x in self.domain() {
            let b = self.value(x).bit();
            match seen {
                None => seen = b,
                Some(s) if Some(s) != b => return None,
                _ => {}
            }
        }
        seen
    }

    /// True when no two domain points carry different labels (including an
    /// empty domain).
    pub fn is_constant_on_domain(&self) -> bool {
        self.domain_size() == 0 || self.constant_value().is_some()
    }

    /// Points with the given label.
    pub fn preimage(&self, bit: bool) -> Vec<u32> {
        let v = Value::from_bit(bit);
        (0..self.size() as u32).filter(|&x| self.value(x) == v).collect()
    }

    /// Table characters over `01*`, index 0 first.
    pub fn table_string(&self) -> String {
        (0..self.size() as u32).map(|x| self.value(x).to_char()).collect()
    }

    /// Replaces every undefined point with `bit`.
    pub fn fill_undefined(&self, bit: bool) -> PartialFunction {
        let mut g = self.clone();
        for x in self.undefined_points() {
            g.set(x, Value::from_bit(bit));
        }
        g
    }

    /// `x ↦ f(¬x)`.
    pub fn complement_inputs(&self) -> PartialFunction {
        let mask = (self.size() - 1) as u32;
        let mut g = self.clone();
        for x in 0..self.size() as u32 {
            g.set(x, self.value(x ^ mask));
        }
        g
    }

    /// Whether `other` is total and agrees with `self` on `Dom(self)`.
    pub fn is_completed_by(&self, other: &PartialFunction) -> bool {
        other.n == self.n && other.is_total() && self.domain().all(|x| self.value(x) == other.value(x))
    }
}

/// `f(x) = profile[wt(x)]`; `profile` has `n + 1` entries.
pub fn make_symmetric(n: usize, profile: &[Value]) -> Result<PartialFunction> {
    if profile.len() != n + 1 {
        return Err(Error::InvalidArgument(format!(
            "profile has {} weights, expected {}",
            profile.len(),
            n + 1
        )));
    }
    PartialFunction::from_fn(n, |x| profile[x.count_ones() as usize])
}

/// Function whose domain is exactly the weight-`k` slice, labelled by `labels`.
pub fn make_slice(n: usize, k: usize, labels: &BTreeMap<u32, bool>) -> Result<PartialFunction> {
    if k > n {
        return Err(Error::InvalidArgument(format!("slice {k} exceeds arity {n}")));
    }
    if let Some((&x, _)) = labels
        .iter()
        .find(|(&x, _)| x.count_ones() as usize != k || (n < 32 && x >> n != 0))
    {
        return Err(Error::InvalidArgument(format!(
            "labelled point {} is not on the {k}-slice",
            bitstring(x, n)
        )));
    }
    let mut f = PartialFunction::blank(n)?;
    for x in 0..f.size() as u32 {
        if x.count_ones() as usize == k {
            let b = labels.get(&x).ok_or(Error::MissingLabel(x))?;
            f.set(x, Value::from_bit(*b));
        }
    }
    Ok(f)
}

/// Slice function from a labelling closure.
pub fn slice_from_fn(n: usize, k: usize, label: impl Fn(u32) -> bool) -> Result<PartialFunction> {
    let labels = (0..1u32 << n)
        .filter(|x| x.count_ones() as usize == k)
        .map(|x| (x, label(x)))
        .collect();
    make_slice(n, k, &labels)
}

/// Uniform labels with exactly `undefined` uniformly chosen points left
/// undefined; at least one point stays in the domain.
pub fn random_partial(n: usize, undefined: usize, rng: &mut impl Rng) -> Result<PartialFunction> {
    if n == 0 || n > MAX_ARITY {
        return Err(Error::UnsupportedArity(n));
    }
    let size = 1usize << n;
    if undefined >= size {
        return Err(Error::InvalidArgument(format!(
            "{undefined} undefined points leave an empty domain"
        )));
    }
    let mut f = PartialFunction::from_fn(n, |_| Value::from_bit(rng.gen()))?;
    for x in rand::seq::index::sample(rng, size, undefined) {
        f.set(x as u32, Value::Undefined);
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn or3() -> PartialFunction {
        PartialFunction::total_from_fn(3, |x| x != 0).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let f = or3();
        assert_eq!(f.evaluate(Input::from_bitstring("000").unwrap()).unwrap(), Value::Zero);
        assert_eq!(f.evaluate(Input::from_bitstring("101").unwrap()).unwrap(), Value::One);
        let g = PartialFunction::from_fn(3, |x| if x == 0 { Value::Undefined } else { Value::Zero }).unwrap();
        assert_eq!(g.evaluate(Input::new(3, 0)).unwrap(), Value::Undefined);
        assert!(matches!(
            f.evaluate(Input::new(4, 0)),
            Err(Error::ArityMismatch { expected: 3, got: 4 })
        ));
    }

    #[test]
    fn flip_examples() {
        let x = Input::from_bitstring("000").unwrap();
        assert_eq!(flip(x, Block::from_indices(&[1])).to_bitstring(), "100");
        let y = Input::from_bitstring("101").unwrap();
        assert_eq!(flip(y, Block::from_indices(&[1, 3])).to_bitstring(), "000");
        assert_eq!(flip(y, Block::from_indices(&[1])).to_bitstring(), "001");
        assert_eq!(flip(y, Block::default()), y);
    }

    #[test]
    fn flip_is_an_involution_exhaustively() {
        for n in 1..=12usize {
            let size = 1u32 << n;
            let step = if n > 8 { 37 } else { 1 };
            for x in (0..size).step_by(step) {
                for b in (0..size).step_by(step) {
                    let xi = Input::new(n, x);
                    let blk = Block::new(b);
                    let y = flip(xi, blk);
                    assert_eq!((y.bits ^ x), b);
                    assert_eq!(flip(y, blk), xi);
                }
            }
        }
    }

    #[test]
    fn packed_storage_round_trips() {
        let vals: Vec<Value> = (0..100)
            .map(|i| match i % 3 {
                0 => Value::Zero,
                1 => Value::One,
                _ => Value::Undefined,
            })
            .chain(std::iter::repeat_n(Value::One, 28))
            .collect();
        let f = PartialFunction::from_values(7, &vals).unwrap();
        assert_eq!(f.values(), vals);
        assert!(PartialFunction::from_values(7, &vals[..10]).is_err());
        assert!(PartialFunction::constant(25, true).is_err());
    }

    #[test]
    fn symmetric_examples() {
        use Value::*;
        let f = make_symmetric(4, &[Zero, Undefined, Undefined, Undefined, One]).unwrap();
        assert_eq!(f.domain_size(), 2);
        let dj = make_symmetric(4, &[Zero, Undefined, One, Undefined, Zero]).unwrap();
        assert_eq!(dj.domain_size(), 2 + 6);
        let c = make_symmetric(5, &[One; 6]).unwrap();
        assert!(c.is_total());
        assert_eq!(c.constant_value(), Some(true));
    }

    #[test]
    fn slice_examples() {
        let labels: BTreeMap<u32, bool> = [(0b001, true), (0b010, false), (0b100, false)].into();
        let f = make_slice(3, 1, &labels).unwrap();
        assert_eq!(f.domain().collect::<Vec<_>>(), vec![1, 2, 4]);
        let mut missing = labels.clone();
        missing.remove(&0b100);
        assert_eq!(make_slice(3, 1, &missing), Err(Error::MissingLabel(0b100)));
        let single: BTreeMap<u32, bool> = [(0, true)].into();
        let g = make_slice(2, 0, &single).unwrap();
        assert_eq!(g.domain().collect::<Vec<_>>(), vec![0]);
        let sep = slice_from_fn(4, 1, |x| x.trailing_zeros() < 2).unwrap();
        assert_eq!(sep.value(0b0010), Value::One);
        assert_eq!(sep.value(0b0100), Value::Zero);
    }

    #[test]
    fn partial_assignment_consistency() {
        let a = PartialAssignment::restrict(0b101, 0b011);
        assert_eq!(a.size(), 2);
        assert!(a.is_consistent(0b001));
        assert!(a.is_consistent(0b101));
        assert!(!a.is_consistent(0b011));
        assert_eq!(a.render(3), "10*");
    }

    #[test]
    fn random_partial_has_requested_undefined_count() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for u in [0, 1, 7, 15] {
            let f = random_partial(4, u, &mut rng).unwrap();
            assert_eq!(f.size() - f.domain_size(), u);
        }
        assert!(random_partial(2, 4, &mut rng).is_err());
    }
}
