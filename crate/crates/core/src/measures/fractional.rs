//! Fractional certificate complexity and fractional block sensitivity.
//!
//! `FC(f,x) = min Σ_i w_i` subject to `Σ_{i: x_i ≠ y_i} w_i ≥ 1` for every
//! domain point `y` with `f(y) ≠ f(x)`. `fbs(f,x)` is the packing dual
//! `max Σ_y u_y` subject to a load of at most 1 on every coordinate.

use crate::boolfn::PartialFunction;
use crate::error::{Error, Result};
use crate::lp::{Cmp, LinearProgram, Sense};
use crate::measures::blocks::domain_value;

fn conflicts(f: &PartialFunction, x: u32) -> Result<Vec<u32>> {
    let v = domain_value(f, x)?;
    Ok(f.domain().filter(|&y| f.value(y) != v).collect())
}

pub fn fractional_certificate(f: &PartialFunction, x: u32) -> Result<f64> {
    let ys = conflicts(f, x)?;
    if ys.is_empty() {
        return Ok(0.0);
    }
    let n = f.arity();
    let mut lp = LinearProgram::new(Sense::Minimize);
    let w: Vec<usize> = (0..n).map(|_| lp.var(1.0, 0.0, f64::INFINITY)).collect();
    for &y in &ys {
        let d = x ^ y;
        let terms: Vec<(usize, f64)> = (0..n).filter(|i| d >> i & 1 == 1).map(|i| (w[i], 1.0)).collect();
        lp.constraint(&terms, Cmp::Ge, 1.0);
    }
    lp.solve()?
        .map(|s| s.objective)
        .ok_or_else(|| Error::Internal("fractional certificate LP infeasible".into()))
}

pub fn fractional_block_sensitivity(f: &PartialFunction, x: u32) -> Result<f64> {
    let ys = conflicts(f, x)?;
    if ys.is_empty() {
        return Ok(0.0);
    }
    let n = f.arity();
    let mut lp = LinearProgram::new(Sense::Maximize);
    let u: Vec<usize> = ys.iter().map(|_| lp.var(1.0, 0.0, f64::INFINITY)).collect();
    for i in 0..n {
        let terms: Vec<(usize, f64)> = ys
            .iter()
            .zip(&u)
            .filter(|(&y, _)| (x ^ y) >> i & 1 == 1)
            .map(|(_, &v)| (v, 1.0))
            .collect();
        if !terms.is_empty() {
            lp.constraint(&terms, Cmp::Le, 1.0);
        }
    }
    lp.solve()?
        .map(|s| s.objective)
        .ok_or_else(|| Error::Internal("fractional packing LP infeasible".into()))
}

/// `max_{x ∈ Dom} FC(f,x)`.
pub fn fractional_certificate_complexity(f: &PartialFunction) -> Result<f64> {
    f.domain()
        .try_fold(0.0f64, |m, x| Ok(m.max(fractional_certificate(f, x)?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::Value;

    fn or3() -> PartialFunction {
        PartialFunction::total_from_fn(3, |x| x != 0).unwrap()
    }

    #[test]
    fn examples() {
        assert!((fractional_certificate(&or3(), 0).unwrap() - 3.0).abs() < 1e-9);
        assert!((fractional_certificate(&or3(), 0b001).unwrap() - 1.0).abs() < 1e-9);
        let c = PartialFunction::constant(3, true).unwrap();
        assert_eq!(fractional_certificate(&c, 5).unwrap(), 0.0);
        assert_eq!(fractional_block_sensitivity(&c, 5).unwrap(), 0.0);
    }

    #[test]
    fn duality_on_random_functions() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let n = rng.gen_range(2..=6);
            let f = PartialFunction::from_fn(n, |_| match rng.gen_range(0..3) {
                0 => Value::Zero,
                1 => Value::One,
                _ => Value::Undefined,
            })
            .unwrap();
            for x in f.domain() {
                let fc = fractional_certificate(&f, x).unwrap();
                let fbs = fractional_block_sensitivity(&f, x).unwrap();
                assert!((fc - fbs).abs() <= 1e-6, "{fc} {fbs}");
            }
        }
    }
}
