//! Odd polynomial approximations of the sign function on `[-2, 2]` and their
//! composition with multilinear polynomials.
//!
//! The polynomial is fitted by a minimax linear program in the odd Chebyshev
//! basis `T_{2k+1}(x/2)`, with the constraint `|P| ≤ 1 - SAFETY_MARGIN` on a
//! grid over `[0, 2]` and the error target tightened by the same margin. The
//! result is then verified on a `VERIFY_STEP` grid over `[-2, 2]`; violations
//! are added to the fitting grid and the program is solved again.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{Cmp, LinearProgram, Sense};
use crate::polynomials::MultilinearPoly;

/// Slack kept between the fitted polynomial and both contract limits.
pub const SAFETY_MARGIN: f64 = 1e-3;
/// Resolution of the verification grid.
pub const VERIFY_STEP: f64 = 1e-3;
/// Measured constant `c` with `deg P ≤ c · ln(1/ε) / δ`; the largest ratio
/// observed over `δ ∈ [0.05, 2]`, `ε ∈ [0.05, 0.45]` is about 3.8.
pub const SIGN_DEGREE_CONSTANT: f64 = 4.0;
/// Largest degree attempted.
pub const MAX_SIGN_DEGREE: usize = 511;

const FIT_POINTS: usize = 600;
const REFINE_ROUNDS: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignPolynomial {
    /// Coefficient of `T_{2k+1}(x/2)` at index `k`.
    pub chebyshev: Vec<f64>,
    pub delta: f64,
    pub epsilon: f64,
    pub degree: usize,
}

fn odd_chebyshev(y: f64, k: usize) -> Vec<f64> {
    // T_0..T_{2k-1} evaluated at y, odd entries kept
    let mut out = Vec::with_capacity(k);
    let (mut t0, mut t1) = (1.0, y);
    for j in 1..2 * k {
        if j % 2 == 1 {
            out.push(t1);
        }
        let t2 = 2.0 * y * t1 - t0;
        t0 = t1;
        t1 = t2;
    }
    out
}

impl SignPolynomial {
    pub fn evaluate(&self, x: f64) -> f64 {
        odd_chebyshev(x / 2.0, self.chebyshev.len())
            .iter()
            .zip(&self.chebyshev)
            .map(|(t, c)| t * c)
            .sum()
    }

    /// Worst violation of the contract on the verification grid, if any.
    pub fn verify(&self) -> Option<f64> {
        verify_grid().into_iter().find(|&x| !self.within_contract(x))
    }

    fn within_contract(&self, x: f64) -> bool {
        let v = self.evaluate(x);
        if v.abs() > 1.0 {
            return false;
        }
        x.abs() < self.delta || (v - x.signum()).abs() <= self.epsilon
    }
}

fn verify_grid() -> Vec<f64> {
    let steps = (4.0 / VERIFY_STEP).round() as i64;
    (0..=steps).map(|i| -2.0 + i as f64 * VERIFY_STEP).collect()
}

fn initial_grid(delta: f64) -> Vec<f64> {
    let mut g: Vec<f64> = (0..=FIT_POINTS).map(|i| 2.0 * i as f64 / FIT_POINTS as f64).collect();
    // cosine spacing clusters points where high-degree oscillation is largest
    g.extend((0..=FIT_POINTS / 2).map(|i| 2.0 * (std::f64::consts::PI * i as f64 / FIT_POINTS as f64).cos()));
    g.push(delta);
    g.retain(|&y| (0.0..=2.0).contains(&y));
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

fn fit(delta: f64, epsilon: f64, degree: usize) -> Result<Option<SignPolynomial>> {
    let k = degree.div_ceil(2);
    let mut grid = initial_grid(delta);
    for _ in 0..REFINE_ROUNDS {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let c: Vec<usize> = (0..k).map(|_| lp.free_var(0.0)).collect();
        let t = lp.var(1.0, 0.0, f64::INFINITY);
        for &y in &grid {
            let row: Vec<(usize, f64)> = c.iter().copied().zip(odd_chebyshev(y / 2.0, k)).collect();
            lp.constraint(&row, Cmp::Le, 1.0 - SAFETY_MARGIN);
            lp.constraint(&row, Cmp::Ge, -(1.0 - SAFETY_MARGIN));
            if y >= delta {
                let mut hi = row.clone();
                hi.push((t, -1.0));
                lp.constraint(&hi, Cmp::Le, 1.0);
                let mut lo = row;
                lo.push((t, 1.0));
                lp.constraint(&lo, Cmp::Ge, 1.0);
            }
        }
        let sol = lp
            .solve()?
            .ok_or_else(|| Error::SignConstruction("fitting program infeasible".into()))?;
        if sol.values[t] > epsilon - SAFETY_MARGIN {
            return Ok(None);
        }
        let poly = SignPolynomial {
            chebyshev: c.iter().map(|&v| sol.values[v]).collect(),
            delta,
            epsilon,
            degree: 2 * k - 1,
        };
        let bad: Vec<f64> = verify_grid()
            .into_iter()
            .filter(|&x| x >= 0.0 && !poly.within_contract(x))
            .collect();
        if bad.is_empty() {
            return Ok(Some(poly));
        }
        grid.extend(bad);
        grid.sort_by(f64::total_cmp);
        grid.dedup();
    }
    Ok(None)
}

/// Odd `P` with `|P| ≤ 1` on `[-2,2]` and `|P(x) - sign(x)| ≤ ε` for
/// `δ ≤ |x| ≤ 2`, of smallest degree found by doubling then bisection.
pub fn sign_polynomial(delta: f64, epsilon: f64) -> Result<SignPolynomial> {
    if !(delta > 0.0 && delta <= 2.0) {
        return Err(Error::InvalidArgument(format!("delta {delta} outside (0, 2]")));
    }
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::InvalidArgument(format!("epsilon {epsilon} outside (0, 1/2)")));
    }
    let mut lo = 0usize;
    let mut deg = 1usize;
    let best = loop {
        if deg > MAX_SIGN_DEGREE {
            return Err(Error::SignConstruction(format!(
                "no polynomial up to degree {MAX_SIGN_DEGREE}"
            )));
        }
        if let Some(p) = fit(delta, epsilon, deg)? {
            break p;
        }
        lo = deg;
        deg = 2 * deg + 1;
    };
    // bisect odd degrees 2m+1 between the last failure and the first success
    let mut best = best;
    if lo > 0 {
        let (mut fail, mut hi) = ((lo - 1) / 2, (best.degree - 1) / 2);
        while fail + 1 < hi {
            let mid = (fail + hi) / 2;
            match fit(delta, epsilon, 2 * mid + 1)? {
                Some(p) => {
                    best = p;
                    hi = mid;
                }
                None => fail = mid,
            }
        }
    }
    if let Some(x) = best.verify() {
        return Err(Error::SignConstruction(format!("contract fails at {x}")));
    }
    Ok(best)
}

/// `x ↦ P(p(x) / scale)` as a multilinear polynomial in the basis of `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct Composed {
    pub poly: MultilinearPoly,
    /// `deg(P) · deg(p)`; the interpolant itself may have lower degree.
    pub degree_bound: usize,
}

pub fn compose_boost(p: &MultilinearPoly, sign: &SignPolynomial, scale: f64) -> Result<Composed> {
    if scale.is_nan() || scale <= 0.0 {
        return Err(Error::InvalidArgument(format!("scale {scale} must be positive")));
    }
    let vals = p.values();
    let mut out = Vec::with_capacity(vals.len());
    for (x, v) in vals.iter().enumerate() {
        let y = v / scale;
        if y.abs() > 2.0 + 1e-12 {
            return Err(Error::RangeViolation {
                point: x as u32,
                value: y,
            });
        }
        out.push(sign.evaluate(y.clamp(-2.0, 2.0)));
    }
    Ok(Composed {
        poly: MultilinearPoly::interpolate(p.n, p.basis, &out)?,
        degree_bound: sign.degree * p.degree(),
    })
}
