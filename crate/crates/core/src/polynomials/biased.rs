//! The `p`-biased orthonormal basis.
//!
//! Under `π_p` each coordinate independently takes the value `-1` (bit 1)
//! with probability `p` and `+1` (bit 0) with probability `1 - p`, so
//! `E[x_i] = μ = 1 - 2p` and `φ(x_i) = (x_i - μ)/σ` has mean 0 and variance 1.

use serde::{Deserialize, Serialize};

use crate::boolfn::PartialFunction;
use crate::error::{Error, Result};
use crate::polynomials::{Basis, MultilinearPoly};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasedBasis {
    pub p: f64,
    pub mu: f64,
    pub sigma: f64,
    pub beta: f64,
}

impl BiasedBasis {
    pub fn new(p: f64) -> Self {
        assert!(p > 0.0 && p < 1.0, "bias {p} outside (0,1)");
        BiasedBasis {
            p,
            mu: 1.0 - 2.0 * p,
            sigma: 2.0 * (p * (1.0 - p)).sqrt(),
            beta: (p / (1.0 - p)).sqrt().max(((1.0 - p) / p).sqrt()),
        }
    }

    pub fn checked(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidArgument(format!("bias {p} outside (0,1)")));
        }
        Ok(Self::new(p))
    }

    /// `φ` at a coordinate holding `bit` (`true` is `x_i = -1`).
    pub fn phi(&self, bit: bool) -> f64 {
        let x = if bit { -1.0 } else { 1.0 };
        (x - self.mu) / self.sigma
    }

    /// Probability of `bit` at one coordinate.
    pub fn weight(&self, bit: bool) -> f64 {
        if bit {
            self.p
        } else {
            1.0 - self.p
        }
    }

    /// `π_p(x)` for a cube point of arity `n`.
    pub fn point_weight(&self, n: usize, x: u32) -> f64 {
        (0..n).map(|i| self.weight(x >> i & 1 == 1)).product()
    }

    /// Coefficients to values, in place.
    pub fn synthesize(&self, v: &mut [f64]) {
        let (p0, p1) = (self.phi(false), self.phi(true));
        self.butterfly(v, |a, b| (a + b * p0, a + b * p1));
    }

    /// Values to coefficients, in place.
    pub fn analyze(&self, v: &mut [f64]) {
        let (p0, p1) = (self.phi(false), self.phi(true));
        let (w0, w1) = (1.0 - self.p, self.p);
        self.butterfly(v, |a, b| (w0 * a + w1 * b, w0 * a * p0 + w1 * b * p1));
    }

    fn butterfly(&self, v: &mut [f64], op: impl Fn(f64, f64) -> (f64, f64)) {
        let mut h = 1;
        while h < v.len() {
            for s in 0..v.len() {
                if s & h == 0 {
                    let (a, b) = op(v[s], v[s | h]);
                    v[s] = a;
                    v[s | h] = b;
                }
            }
            h *= 2;
        }
    }
}

/// Biased expansion of a total function with `±1` outputs.
pub fn biased_expand(f: &PartialFunction, bias: f64) -> Result<MultilinearPoly> {
    BiasedBasis::checked(bias)?;
    MultilinearPoly::from_function(f, Basis::Biased { bias })
}

/// `K_{n,d,p} = Σ_{l<d} C(n-1, l) β^{2l}`.
pub fn biased_k(n: usize, d: usize, bias: f64) -> f64 {
    let b2 = BiasedBasis::new(bias).beta.powi(2);
    let mut binom = 1.0;
    let mut total = 0.0;
    for l in 0..d.min(n) {
        total += binom * b2.powi(l as i32);
        binom = binom * (n - 1 - l) as f64 / (l + 1) as f64;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn orthonormal_by_two_point_sums() {
        for p in [0.1, 0.25, 0.5, 0.7, 0.93] {
            let b = BiasedBasis::new(p);
            let mean = b.weight(false) * b.phi(false) + b.weight(true) * b.phi(true);
            let second = b.weight(false) * b.phi(false).powi(2) + b.weight(true) * b.phi(true).powi(2);
            assert!(mean.abs() <= 1e-12);
            assert!((second - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn half_bias_is_uniform() {
        let f = PartialFunction::total_from_fn(4, |x| x.count_ones() >= 2 || x == 8).unwrap();
        let b = biased_expand(&f, 0.5).unwrap();
        let u = MultilinearPoly::from_function(&f, Basis::Fourier).unwrap();
        for s in 0..16 {
            assert!((b.coeff(s) - u.coeff(s)).abs() < 1e-12);
        }
        for n in 1..8 {
            for d in 0..=n {
                let expect: f64 = (0..d).map(|l| binom(n - 1, l)).sum();
                assert!((biased_k(n, d, 0.5) - expect).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn closed_form_k() {
        let beta2 = 0.2f64 / 0.8;
        let b2 = (1.0 / beta2).max(beta2);
        let expect = 1.0 + 4.0 * b2 + 6.0 * b2 * b2;
        assert!((biased_k(5, 3, 0.2) - expect).abs() < 1e-9);
    }

    fn binom(n: usize, k: usize) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn thresholded_phi_round_trip() {
        let bias = 0.3;
        let b = BiasedBasis::new(bias);
        let f = PartialFunction::total_from_fn(3, |x| b.phi(x & 1 == 1) < 0.0).unwrap();
        let p = biased_expand(&f, bias).unwrap();
        for x in 0..8 {
            assert!((p.evaluate(x) - f.value(x).sign().unwrap()).abs() < 1e-9);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn biased_parseval(n in 1usize..=10, bias in 0.05f64..0.95, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let vals: Vec<f64> = (0..1 << n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let p = MultilinearPoly::interpolate(n, Basis::Biased { bias }, &vals).unwrap();
            let b = BiasedBasis::new(bias);
            let lhs: f64 = p.coeffs.values().map(|c| c * c).sum();
            let rhs: f64 = (0..1u32 << n).map(|x| b.point_weight(n, x) * vals[x as usize].powi(2)).sum();
            prop_assert!((lhs - rhs).abs() <= 1e-9);
            let back = p.values();
            for x in 0..vals.len() {
                prop_assert!((back[x] - vals[x]).abs() <= 1e-9);
            }
        }
    }
}
