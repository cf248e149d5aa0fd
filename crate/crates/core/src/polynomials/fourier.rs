//! Fast transforms on value tables and Fourier-side quantities.

use crate::boolfn::PartialFunction;
use crate::error::{Error, Result};
use crate::polynomials::{Basis, MultilinearPoly};

/// In-place unnormalised Walsh-Hadamard transform.
pub fn walsh_hadamard(v: &mut [f64]) {
    let mut h = 1;
    while h < v.len() {
        for i in (0..v.len()).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (v[j], v[j + h]);
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Subset sums: `v[S] ← Σ_{T⊆S} v[T]`.
pub fn zeta(v: &mut [f64]) {
    let mut h = 1;
    while h < v.len() {
        for s in 0..v.len() {
            if s & h != 0 {
                v[s] += v[s ^ h];
            }
        }
        h *= 2;
    }
}

/// Inverse of [`zeta`].
pub fn mobius(v: &mut [f64]) {
    let mut h = 1;
    while h < v.len() {
        for s in 0..v.len() {
            if s & h != 0 {
                v[s] -= v[s ^ h];
            }
        }
        h *= 2;
    }
}

/// Monomial-basis coefficients of a total function with `0/1` outputs.
pub fn mobius_coefficients(f: &PartialFunction) -> Result<MultilinearPoly> {
    if !f.is_total() {
        return Err(Error::NotTotal);
    }
    MultilinearPoly::from_function(f, Basis::Monomial)
}

/// `Inf_i[p] = Σ_{S∋i} p̂(S)²` (0-based `i`).
pub fn influence(p: &MultilinearPoly, i: usize) -> f64 {
    p.to_fourier()
        .coeffs
        .iter()
        .filter(|(&s, _)| s >> i & 1 == 1)
        .map(|(_, c)| c * c)
        .sum()
}

/// Number of nonzero Fourier coefficients.
pub fn sparsity(p: &MultilinearPoly) -> usize {
    p.to_fourier().sparsity()
}

/// Number of nonzero Fourier coefficients on sets containing `i`.
pub fn sparsity_at(p: &MultilinearPoly, i: usize) -> usize {
    p.to_fourier().coeffs.keys().filter(|&&s| s >> i & 1 == 1).count()
}

/// `D_i p(x) = (p(x) - p(x^i)) / 2`, which equals `Σ_{S∋i} p̂(S) χ_S`.
pub fn discrete_derivative(p: &MultilinearPoly, i: usize) -> MultilinearPoly {
    let f = p.to_fourier();
    MultilinearPoly::from_coeffs(
        f.n,
        Basis::Fourier,
        f.coeffs.iter().filter(|(&s, _)| s >> i & 1 == 1).map(|(&s, &c)| (s, c)),
    )
}

/// `Σ_{S∋i} p̂(S) χ_{S∖{i}}`, half the difference between `x_i = +1` and
/// `x_i = -1`. Equals `x_i · D_i p(x)` pointwise.
pub fn partial_derivative(p: &MultilinearPoly, i: usize) -> MultilinearPoly {
    let f = p.to_fourier();
    MultilinearPoly::from_coeffs(
        f.n,
        Basis::Fourier,
        f.coeffs
            .iter()
            .filter(|(&s, _)| s >> i & 1 == 1)
            .map(|(&s, &c)| (s & !(1 << i), c)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn and2() -> PartialFunction {
        PartialFunction::total_from_fn(2, |x| x == 3).unwrap()
    }

    // Inclusion-exclusion straight from the definition.
    fn oracle_mobius(f: &PartialFunction, s: u32) -> f64 {
        (0..f.size() as u32)
            .filter(|t| t & !s == 0)
            .map(|t| {
                let sign = if (s.count_ones() - t.count_ones()) % 2 == 1 {
                    -1.0
                } else {
                    1.0
                };
                sign * f64::from(u8::from(f.value(t).bit().unwrap()))
            })
            .sum()
    }

    #[test]
    fn mobius_examples() {
        let m = mobius_coefficients(&and2()).unwrap();
        assert_eq!(m.coeffs.len(), 1);
        assert!((m.coeff(0b11) - 1.0).abs() < 1e-12);
        let one = mobius_coefficients(&PartialFunction::constant(3, true).unwrap()).unwrap();
        assert_eq!(one.coeffs.into_iter().collect::<Vec<_>>(), vec![(0, 1.0)]);
        let xor2 = PartialFunction::total_from_fn(2, |x| x.count_ones() == 1).unwrap();
        let m = mobius_coefficients(&xor2).unwrap();
        for s in 0..4 {
            assert!((m.coeff(s) - oracle_mobius(&xor2, s)).abs() < 1e-12);
        }
        assert_eq!((m.coeff(1), m.coeff(2), m.coeff(3)), (1.0, 1.0, -2.0));
        let partial = PartialFunction::from_values(1, &[crate::Value::One, crate::Value::Undefined]).unwrap();
        assert_eq!(mobius_coefficients(&partial), Err(Error::NotTotal));
    }

    #[test]
    fn gap_majority_influence() {
        let n = 6;
        let p = MultilinearPoly::from_coeffs(n, Basis::Fourier, (0..n).map(|i| (1u32 << i, 1.0 / n as f64)));
        for i in 0..n {
            assert!((influence(&p, i) - 1.0 / 36.0).abs() < 1e-12);
            assert_eq!(sparsity_at(&p, i), 1);
        }
        let c = MultilinearPoly::constant(4, Basis::Fourier, 1.0);
        assert!((0..4).all(|i| influence(&c, i) == 0.0));
    }

    #[test]
    fn derivative_of_character() {
        let chi = MultilinearPoly::character(2, 0b11);
        assert_eq!(partial_derivative(&chi, 0), MultilinearPoly::character(2, 0b10));
        let d = discrete_derivative(&chi, 0);
        for x in 0..4u32 {
            let expect = (chi.evaluate(x) - chi.evaluate(x ^ 1)) / 2.0;
            assert!((d.evaluate(x) - expect).abs() < 1e-12);
            assert!((d.evaluate(x).abs() - partial_derivative(&chi, 0).evaluate(x).abs()).abs() < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn derivative_identity(n in 1usize..=10, seed in any::<u64>(), i in 0usize..10) {
            use rand::{Rng, SeedableRng};
            let i = i % n;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let vals: Vec<f64> = (0..1 << n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let p = MultilinearPoly::interpolate(n, Basis::Fourier, &vals).unwrap();
            let d = discrete_derivative(&p, i).values();
            let pd = partial_derivative(&p, i).values();
            for x in 0..(1usize << n) {
                let expect = (vals[x] - vals[x ^ (1 << i)]) / 2.0;
                prop_assert!((d[x] - expect).abs() < 1e-9);
                let xi = if x >> i & 1 == 1 { -1.0 } else { 1.0 };
                prop_assert!((pd[x] * xi - expect).abs() < 1e-9);
            }
        }

        #[test]
        fn edge_bound_from_influence_and_sparsity(n in 1usize..=8, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let p = MultilinearPoly::from_coeffs(
                n,
                Basis::Fourier,
                (0..6).map(|_| (rng.gen_range(0..1u32 << n), rng.gen_range(-1.0..1.0))),
            );
            let v = p.values();
            for i in 0..n {
                let bound = 2.0 * (sparsity_at(&p, i) as f64 * influence(&p, i)).sqrt();
                for x in 0..(1usize << n) {
                    prop_assert!((v[x] - v[x ^ (1 << i)]).abs() <= bound + 1e-9);
                }
            }
        }
    }
}
