//! Exact and approximate degree by linear programming.
//!
//! For a candidate degree `d` the program minimises `t` over polynomials with
//! characters of size at most `d`, subject to `|p(x) - f(x)| ≤ t` on the domain
//! and `0 ≤ p(x) ≤ 1` on the whole cube. Characters are used as the column
//! basis because their `±1` entries keep the program well conditioned.

use crate::boolfn::PartialFunction;
use crate::error::{Error, Result};
use crate::lp::{Cmp, LinearProgram, Sense, LP_TOLERANCE};
use crate::polynomials::{Basis, MultilinearPoly};

pub const DEFAULT_EPSILON: f64 = 1.0 / 3.0;

/// A degree together with the polynomial attaining it.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeWitness {
    pub degree: usize,
    /// Largest error on the domain.
    pub error: f64,
    /// Monomial-basis witness with `0/1` semantics.
    pub poly: MultilinearPoly,
}

fn best_error(f: &PartialFunction, d: usize) -> Result<(f64, MultilinearPoly)> {
    let n = f.arity();
    let sets: Vec<u32> = (0..1u32 << n).filter(|s| s.count_ones() as usize <= d).collect();
    let mut lp = LinearProgram::new(Sense::Minimize);
    let coef: Vec<usize> = sets.iter().map(|_| lp.free_var(0.0)).collect();
    let t = lp.var(1.0, 0.0, f64::INFINITY);
    for x in 0..f.size() as u32 {
        let row: Vec<(usize, f64)> = sets
            .iter()
            .zip(&coef)
            .map(|(&s, &c)| (c, if (s & x).count_ones() % 2 == 1 { -1.0 } else { 1.0 }))
            .collect();
        lp.constraint(&row, Cmp::Ge, 0.0);
        lp.constraint(&row, Cmp::Le, 1.0);
        if let Some(b) = f.value(x).bit() {
            let target = f64::from(u8::from(b));
            let mut hi = row.clone();
            hi.push((t, -1.0));
            lp.constraint(&hi, Cmp::Le, target);
            let mut lo = row;
            lo.push((t, 1.0));
            lp.constraint(&lo, Cmp::Ge, target);
        }
    }
    let sol = lp
        .solve()?
        .ok_or_else(|| Error::Internal("degree LP infeasible".into()))?;
    let fourier = MultilinearPoly::from_coeffs(
        n,
        Basis::Fourier,
        sets.iter().zip(&coef).map(|(&s, &c)| (s, sol.values[c])),
    );
    Ok((sol.values[t].max(0.0), fourier.to_basis(Basis::Monomial)))
}

fn search(f: &PartialFunction, threshold: f64) -> Result<DegreeWitness> {
    if f.domain_size() == 0 {
        return Err(Error::InvalidArgument("degree of a function with empty domain".into()));
    }
    for d in 0..=f.arity() {
        let (error, poly) = best_error(f, d)?;
        if error <= threshold {
            return Ok(DegreeWitness { degree: d, error, poly });
        }
    }
    Err(Error::Internal("full-degree interpolation rejected".into()))
}

pub fn exact_degree_witness(f: &PartialFunction) -> Result<DegreeWitness> {
    search(f, LP_TOLERANCE)
}

/// Smallest degree of a polynomial equal to `f` on its domain and bounded in
/// `[0,1]` on the cube.
pub fn exact_degree(f: &PartialFunction) -> Result<usize> {
    Ok(exact_degree_witness(f)?.degree)
}

pub fn approx_degree_witness(f: &PartialFunction, epsilon: f64) -> Result<DegreeWitness> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::InvalidArgument(format!("epsilon {epsilon} outside (0, 1/2)")));
    }
    search(f, epsilon + LP_TOLERANCE)
}

/// Smallest degree of a bounded `ε`-approximation on the domain.
pub fn approx_degree(f: &PartialFunction, epsilon: f64) -> Result<usize> {
    Ok(approx_degree_witness(f, epsilon)?.degree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{make_symmetric, Value};

    fn and2() -> PartialFunction {
        PartialFunction::total_from_fn(2, |x| x == 3).unwrap()
    }

    #[test]
    fn exact_examples() {
        assert_eq!(exact_degree(&and2()).unwrap(), 2);
        assert!(best_error(&and2(), 1).unwrap().0 > 1e-3);
        let dict = PartialFunction::total_from_fn(3, |x| x & 1 == 1).unwrap();
        assert_eq!(exact_degree(&dict).unwrap(), 1);
        assert_eq!(exact_degree(&PartialFunction::constant(4, true).unwrap()).unwrap(), 0);
    }

    #[test]
    fn approx_examples() {
        let dict = PartialFunction::total_from_fn(3, |x| x & 1 == 1).unwrap();
        assert_eq!(approx_degree(&dict, DEFAULT_EPSILON).unwrap(), 1);
        let w = approx_degree_witness(&and2(), DEFAULT_EPSILON).unwrap();
        assert_eq!(w.degree, 1);
        // (x_1 + x_2)/3 is within 1/3 of AND_2
        let p = MultilinearPoly::from_coeffs(2, Basis::Monomial, [(1, 1.0 / 3.0), (2, 1.0 / 3.0)]);
        for x in 0..4u32 {
            let target = f64::from(u8::from(x == 3));
            assert!((p.evaluate(x) - target).abs() <= DEFAULT_EPSILON + 1e-12);
            assert!((w.poly.evaluate(x) - target).abs() <= DEFAULT_EPSILON + 1e-6);
        }
    }

    #[test]
    fn symmetric_lower_bound() {
        use Value::*;
        let f = make_symmetric(6, &[Zero, Undefined, Undefined, One, Undefined, Undefined, Zero]).unwrap();
        let adeg = approx_degree(&f, DEFAULT_EPSILON).unwrap() as f64;
        assert!(adeg >= (6.0f64 / 9.0).sqrt() - 0.5);
    }

    #[test]
    fn monotone_in_epsilon_and_below_exact() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let n = rng.gen_range(2..=4);
            let f = PartialFunction::from_fn(n, |x| match (x + rng.gen_range(0..3)) % 3 {
                0 => Value::Zero,
                1 => Value::One,
                _ => Value::Undefined,
            })
            .unwrap();
            if f.domain_size() == 0 {
                continue;
            }
            let exact = exact_degree(&f).unwrap();
            let degs: Vec<usize> = [0.05, 0.2, 1.0 / 3.0, 0.45]
                .iter()
                .map(|&e| approx_degree(&f, e).unwrap())
                .collect();
            assert!(degs.windows(2).all(|w| w[0] >= w[1]), "{degs:?}");
            assert!(exact >= degs[0]);
        }
    }
}
