//! Multilinear polynomials on the cube.
//!
//! Coefficients are keyed by subset masks. In the Fourier basis the monomial
//! for `S` is the character `χ_S(x) = Π_{i∈S} x_i` over `±1` inputs; in the
//! monomial basis it is `Π_{i∈S} x_i` over `0/1` inputs; the biased basis uses
//! the orthonormal `φ_S` of [`BiasedBasis`]. Points are always cube indices.

pub mod biased;
pub mod degree;
pub mod fourier;
pub mod sign;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::boolfn::{PartialFunction, MAX_ARITY};
use crate::error::{Error, Result};

pub use biased::{biased_expand, biased_k, BiasedBasis};
pub use degree::{
    approx_degree, approx_degree_witness, exact_degree, exact_degree_witness, DegreeWitness, DEFAULT_EPSILON,
};
pub use fourier::{discrete_derivative, influence, mobius_coefficients, partial_derivative, sparsity, sparsity_at};
pub use sign::{compose_boost, sign_polynomial, Composed, SignPolynomial, SIGN_DEGREE_CONSTANT};

/// Coefficients with magnitude below this are dropped.
pub const COEFF_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Basis {
    Fourier,
    Monomial,
    Biased { bias: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultilinearPoly {
    pub n: usize,
    pub basis: Basis,
    pub coeffs: BTreeMap<u32, f64>,
}

impl MultilinearPoly {
    pub fn zero(n: usize, basis: Basis) -> Self {
        MultilinearPoly {
            n,
            basis,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, basis: Basis, c: f64) -> Self {
        Self::from_coeffs(n, basis, [(0, c)])
    }

    pub fn from_coeffs(n: usize, basis: Basis, coeffs: impl IntoIterator<Item = (u32, f64)>) -> Self {
        let mut p = Self::zero(n, basis);
        for (s, c) in coeffs {
            assert!(n >= 32 || s >> n == 0, "subset {s:#b} outside [{n}]");
            *p.coeffs.entry(s).or_insert(0.0) += c;
        }
        p.prune();
        p
    }

    /// The Fourier character `χ_S`.
    pub fn character(n: usize, s: u32) -> Self {
        Self::from_coeffs(n, Basis::Fourier, [(s, 1.0)])
    }

    fn prune(&mut self) {
        self.coeffs.retain(|_, c| c.abs() >= COEFF_EPS);
    }

    pub fn coeff(&self, s: u32) -> f64 {
        self.coeffs.get(&s).copied().unwrap_or(0.0)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(|s| s.count_ones() as usize).max().unwrap_or(0)
    }

    /// Number of nonzero coefficients.
    pub fn sparsity(&self) -> usize {
        self.coeffs.len()
    }

    fn check_arity(n: usize) -> Result<()> {
        if n == 0 || n > MAX_ARITY {
            return Err(Error::UnsupportedArity(n));
        }
        Ok(())
    }

    /// Value at cube point `x`.
    pub fn evaluate(&self, x: u32) -> f64 {
        match self.basis {
            Basis::Fourier => self
                .coeffs
                .iter()
                .map(|(&s, &c)| if (s & x).count_ones() % 2 == 1 { -c } else { c })
                .sum(),
            Basis::Monomial => self.coeffs.iter().filter(|(&s, _)| s & !x == 0).map(|(_, &c)| c).sum(),
            Basis::Biased { bias } => {
                let b = BiasedBasis::new(bias);
                self.coeffs
                    .iter()
                    .map(|(&s, &c)| {
                        (0..self.n)
                            .filter(|i| s >> i & 1 == 1)
                            .fold(c, |acc, i| acc * b.phi(x >> i & 1 == 1))
                    })
                    .sum()
            }
        }
    }

    /// Values on the whole cube, indexed by point.
    pub fn values(&self) -> Vec<f64> {
        let mut v = vec![0.0; 1 << self.n];
        for (&s, &c) in &self.coeffs {
            v[s as usize] = c;
        }
        match self.basis {
            Basis::Fourier => fourier::walsh_hadamard(&mut v),
            Basis::Monomial => fourier::zeta(&mut v),
            Basis::Biased { bias } => BiasedBasis::new(bias).synthesize(&mut v),
        }
        v
    }

    /// The unique multilinear polynomial with the given values.
    pub fn interpolate(n: usize, basis: Basis, values: &[f64]) -> Result<Self> {
        Self::check_arity(n)?;
        if values.len() != 1 << n {
            return Err(Error::TableLength {
                expected: 1 << n,
                got: values.len(),
            });
        }
        let mut c = values.to_vec();
        match basis {
            Basis::Fourier => {
                fourier::walsh_hadamard(&mut c);
                let scale = 1.0 / (1u64 << n) as f64;
                c.iter_mut().for_each(|v| *v *= scale);
            }
            Basis::Monomial => fourier::mobius(&mut c),
            Basis::Biased { bias } => BiasedBasis::new(bias).analyze(&mut c),
        }
        Ok(Self::from_coeffs(
            n,
            basis,
            c.into_iter().enumerate().map(|(s, v)| (s as u32, v)),
        ))
    }

    pub fn to_basis(&self, basis: Basis) -> MultilinearPoly {
        if basis == self.basis {
            return self.clone();
        }
        Self::interpolate(self.n, basis, &self.values()).expect("arity already validated")
    }

    pub fn to_fourier(&self) -> MultilinearPoly {
        self.to_basis(Basis::Fourier)
    }

    pub fn scale(&self, k: f64) -> MultilinearPoly {
        Self::from_coeffs(self.n, self.basis, self.coeffs.iter().map(|(&s, &c)| (s, c * k)))
    }

    /// Sum in the basis of `self`.
    pub fn add(&self, other: &MultilinearPoly) -> MultilinearPoly {
        let o = other.to_basis(self.basis);
        Self::from_coeffs(
            self.n,
            self.basis,
            self.coeffs.iter().chain(&o.coeffs).map(|(&s, &c)| (s, c)),
        )
    }

    /// Pointwise product on the cube, in the basis of `self`.
    pub fn mul(&self, other: &MultilinearPoly) -> MultilinearPoly {
        let a = self.values();
        let b = other.values();
        let v: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        Self::interpolate(self.n, self.basis, &v).expect("arity already validated")
    }

    /// Largest absolute value on the cube.
    pub fn sup_norm(&self) -> f64 {
        self.values().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `p(x) = f(x)` on a total function, with `0 ↦ +1` and `1 ↦ -1` in the
    /// Fourier basis and `0/1` outputs in the monomial basis.
    pub fn from_function(f: &PartialFunction, basis: Basis) -> Result<Self> {
        if !f.is_total() {
            return Err(Error::NotTotal);
        }
        let v: Vec<f64> = f
            .values()
            .iter()
            .map(|v| match basis {
                Basis::Monomial => f64::from(u8::from(v.bit().unwrap())),
                _ => v.sign().unwrap(),
            })
            .collect();
        Self::interpolate(f.arity(), basis, &v)
    }
}
