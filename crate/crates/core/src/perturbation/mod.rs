//! Perturbations of approximating polynomials: the domain evaluation matrix
//! and its kernel, slab avoidance, kernel-perturbation boosting, and the
//! 3-SAT → LMA → PF reduction chain.
//!
//! A perturbation `Δ` acts on the characters `φ_1..φ_m` carrying the nonzero
//! Fourier coefficients of `p`: `p_Δ = p + Σ Δ_j φ_j`. Vectors in the kernel
//! of the domain matrix leave `p` unchanged on the domain.

pub mod reduction;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boolfn::PartialFunction;
use crate::error::{Error, Result};
use crate::polynomials::{compose_boost, sign_polynomial, Basis, MultilinearPoly};

pub use reduction::{
    pf_rescale, pf_solve_reduced, reduce_3sat_to_lma, reduce_lma_to_pf, Cnf, LmaInstance, Origin, PerturbationInstance,
    PfVerdict, DEFAULT_EFFORT,
};

/// Singular values at or below this count as zero.
pub const RANK_THRESHOLD: f64 = 1e-10;
/// Largest admissible `‖A_D Δ‖∞` for a kernel perturbation.
pub const KERNEL_RESIDUAL: f64 = 1e-8;
/// Slack when checking margins and the `1/3` boosting contract.
pub const CHECK_TOLERANCE: f64 = 1e-9;

/// Rows are domain points, columns the characters of `p`'s nonzero Fourier
/// coefficients, entry `(i, j) = φ_j(x_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainEvaluationMatrix {
    pub n: usize,
    pub points: Vec<u32>,
    pub characters: Vec<u32>,
    pub matrix: DMatrix<f64>,
}

fn chi(s: u32, x: u32) -> f64 {
    if (s & x).count_ones() % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

pub fn build_domain_matrix(f: &PartialFunction, p: &MultilinearPoly) -> Result<DomainEvaluationMatrix> {
    if p.n != f.arity() {
        return Err(Error::ArityMismatch {
            expected: f.arity(),
            got: p.n,
        });
    }
    let characters: Vec<u32> = p.to_fourier().coeffs.keys().copied().collect();
    let points: Vec<u32> = f.domain().collect();
    let matrix = DMatrix::from_fn(points.len(), characters.len(), |i, j| chi(characters[j], points[i]));
    Ok(DomainEvaluationMatrix {
        n: f.arity(),
        points,
        characters,
        matrix,
    })
}

impl DomainEvaluationMatrix {
    /// `A · coeffs`, the values on the domain.
    pub fn reconstruct(&self, coeffs: &[f64]) -> Vec<f64> {
        self.apply(coeffs)
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.points.len())
            .map(|i| (0..self.characters.len()).map(|j| self.matrix[(i, j)] * v[j]).sum())
            .collect()
    }

    /// `L_x(Δ) = Σ Δ_j φ_j(x)` at any cube point.
    pub fn functional(&self, x: u32) -> Vec<f64> {
        self.characters.iter().map(|&s| chi(s, x)).collect()
    }

    /// Orthonormal kernel basis as columns, from the SVD of `A` padded with
    /// zero rows to a square matrix.
    pub fn kernel(&self) -> DMatrix<f64> {
        let m = self.characters.len();
        if m == 0 {
            return DMatrix::zeros(0, 0);
        }
        let rows = self.points.len().max(m);
        let mut a = DMatrix::zeros(rows, m);
        a.view_mut((0, 0), (self.points.len(), m)).copy_from(&self.matrix);
        let svd = a.svd(false, true);
        let v_t = svd.v_t.expect("requested right singular vectors");
        let null: Vec<usize> = (0..m).filter(|&i| svd.singular_values[i] <= RANK_THRESHOLD).collect();
        DMatrix::from_fn(m, null.len(), |r, c| v_t[(null[c], r)])
    }

    /// `‖A Δ‖∞`.
    pub fn residual(&self, delta: &[f64]) -> f64 {
        self.apply(delta).iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// A vector `v` with `|l_i(v) - b_i| > ε` for every `i`, found by scaling a
/// random direction `u` with all `l_i(u) ≠ 0` past `max_i (|b_i| + ε) / |l_i(u)|`.
pub fn slab_avoid(functionals: &[Vec<f64>], offsets: &[f64], epsilon: f64, rng: &mut impl Rng) -> Result<Vec<f64>> {
    if functionals.len() != offsets.len() {
        return Err(Error::InvalidArgument(format!(
            "{} functionals but {} offsets",
            functionals.len(),
            offsets.len()
        )));
    }
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidArgument(format!("epsilon {epsilon} must be positive")));
    }
    let d = functionals.first().map_or(1, Vec::len);
    if d == 0 {
        return Err(Error::InvalidArgument("zero-dimensional space".into()));
    }
    for (i, l) in functionals.iter().enumerate() {
        if l.len() != d {
            return Err(Error::InvalidArgument(format!(
                "functional {i} has dimension {}",
                l.len()
            )));
        }
        if l.iter().all(|&c| c == 0.0) {
            return Err(Error::InvalidArgument(format!("functional {i} is zero")));
        }
    }
    let dot = |l: &[f64], u: &[f64]| l.iter().zip(u).map(|(a, b)| a * b).sum::<f64>();
    loop {
        let u: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let lu: Vec<f64> = functionals.iter().map(|l| dot(l, &u)).collect();
        let norms = functionals.iter().map(|l| l.iter().map(|c| c.abs()).sum::<f64>());
        if lu.iter().zip(norms).any(|(v, n)| v.abs() <= 1e-9 * n) {
            continue;
        }
        let t = lu
            .iter()
            .zip(offsets)
            .map(|(v, b)| (b.abs() + epsilon) / v.abs())
            .fold(0.0, f64::max);
        return Ok(u.iter().map(|c| 2.0 * t * c).collect());
    }
}

/// One constraint `s·(c + a t) ≥ ε` (signed) or `|c + a t| ≥ ε` (unsigned)
/// along a search line.
#[derive(Clone, Copy, Debug)]
struct LineConstraint {
    c: f64,
    a: f64,
    sign: Option<f64>,
}

impl LineConstraint {
    fn margin(&self, t: f64) -> f64 {
        let v = self.c + self.a * t;
        match self.sign {
            Some(s) => s * v,
            None => v.abs(),
        }
    }

    /// Open interval of `t` violating the constraint.
    fn bad(&self, eps: f64) -> Option<(f64, f64)> {
        if self.a == 0.0 {
            return (self.margin(0.0) < eps).then_some((f64::NEG_INFINITY, f64::INFINITY));
        }
        let (lo, hi) = {
            let x = (-eps - self.c) / self.a;
            let y = (eps - self.c) / self.a;
            (x.min(y), x.max(y))
        };
        match self.sign {
            None => Some((lo, hi)),
            Some(s) if s * self.a > 0.0 => Some((f64::NEG_INFINITY, (s * eps - self.c) / self.a)),
            Some(s) => Some(((s * eps - self.c) / self.a, f64::INFINITY)),
        }
    }
}

/// The `t ∈ [lo, hi]` satisfying every constraint with the largest minimum
/// margin, or `None` when the constraints cover the segment.
fn line_search(cons: &[LineConstraint], lo: f64, hi: f64, eps: f64) -> Option<(f64, f64)> {
    let mut bad: Vec<(f64, f64)> = cons.iter().filter_map(|c| c.bad(eps)).collect();
    bad.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut free = Vec::new();
    let mut cursor = lo;
    for (a, b) in bad {
        if a > cursor && cursor <= hi {
            free.push((cursor, a.min(hi)));
        }
        cursor = cursor.max(b);
    }
    if cursor <= hi {
        free.push((cursor, hi));
    }
    let score = |t: f64| cons.iter().map(|c| c.margin(t)).fold(f64::INFINITY, f64::min);
    free.into_iter()
        .map(|(mut a, mut b)| {
            // the minimum of the margins is concave on a free segment
            for _ in 0..100 {
                let m1 = a + (b - a) / 3.0;
                let m2 = b - (b - a) / 3.0;
                if score(m1) < score(m2) {
                    a = m1;
                } else {
                    b = m2;
                }
            }
            let t = (a + b) / 2.0;
            (t, score(t))
        })
        .filter(|&(_, s)| s >= eps - CHECK_TOLERANCE)
        .max_by(|x, y| x.1.total_cmp(&y.1))
}

/// Where a perturbation may move the polynomial on the domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchMode {
    /// `Δ ∈ Ker(A_D(p))`, so `p_Δ = p` on the domain.
    Kernel,
    /// Any `Δ` keeping `sign(p_Δ) = sign(p)` on the domain; no correctness guarantee.
    SignPreserving,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoostedPerturbation {
    /// Coefficients on [`DomainEvaluationMatrix::characters`].
    pub delta: Vec<f64>,
    pub characters: Vec<u32>,
    pub perturbed: MultilinearPoly,
    /// `min |p_Δ|` over the cube.
    pub gamma: f64,
    pub residual: f64,
    pub boosted: MultilinearPoly,
    pub degree_bound: usize,
    /// `max |p̃(x) - sign(p(x))|` over the domain.
    pub domain_error: f64,
}

/// Searches for `Δ` with `‖Δ‖∞ ≤ B` and `|p_Δ| ≥ ε` on the whole cube, then
/// composes `p_Δ` with a sign polynomial. Each of the `effort` restarts
/// performs an exact line search along a random direction inside the search
/// space; `None` means the budget ran out or the boost failed verification.
pub fn kernel_perturbation_boost(
    f: &PartialFunction,
    p: &MultilinearPoly,
    bound: f64,
    epsilon: f64,
    effort: usize,
    mode: SearchMode,
    seed: u64,
) -> Result<Option<BoostedPerturbation>> {
    if !(bound > 0.0 && epsilon > 0.0) {
        return Err(Error::InvalidArgument("bound and epsilon must be positive".into()));
    }
    let a = build_domain_matrix(f, p)?;
    let p = p.to_fourier();
    let m = a.characters.len();
    let basis = match mode {
        SearchMode::Kernel => a.kernel(),
        SearchMode::SignPreserving => DMatrix::identity(m, m),
    };
    let k = basis.ncols();
    let values = p.values();
    let funcs: Vec<Vec<f64>> = (0..f.size() as u32).map(|x| a.functional(x)).collect();
    let sign_of = |x: usize| match mode {
        SearchMode::SignPreserving if f.in_domain(x as u32) => Some(values[x].signum()),
        _ => None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dot = |l: &[f64], v: &[f64]| l.iter().zip(v).map(|(x, y)| x * y).sum::<f64>();

    let mut found = None;
    for r in 0..effort.max(1) {
        // restart 0 searches from Δ = 0 along the first basis direction
        let dir: Vec<f64> = if k == 0 {
            vec![0.0; m]
        } else if r < k {
            basis.column(r).iter().copied().collect()
        } else {
            let c: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
            (0..m).map(|i| (0..k).map(|j| basis[(i, j)] * c[j]).sum()).collect()
        };
        let start: Vec<f64> = if r == 0 || k == 0 {
            vec![0.0; m]
        } else {
            let c: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v: Vec<f64> = (0..m).map(|i| (0..k).map(|j| basis[(i, j)] * c[j]).sum()).collect();
            let norm = v.iter().fold(0.0, |s: f64, x| s.max(x.abs()));
            let scale = if norm > 0.0 {
                rng.gen_range(0.0..bound) / norm
            } else {
                0.0
            };
            v.iter().map(|x| x * scale).collect()
        };
        let (lo, hi) = box_range(&start, &dir, bound);
        let cons: Vec<LineConstraint> = (0..f.size())
            .map(|x| LineConstraint {
                c: values[x] + dot(&funcs[x], &start),
                a: dot(&funcs[x], &dir),
                sign: sign_of(x),
            })
            .collect();
        if let Some((t, _)) = line_search(&cons, lo, hi, epsilon) {
            let delta: Vec<f64> = start.iter().zip(&dir).map(|(s, d)| s + t * d).collect();
            found = Some(delta);
            break;
        }
    }
    let Some(delta) = found else {
        return Ok(None);
    };
    let residual = match mode {
        SearchMode::Kernel => a.residual(&delta),
        SearchMode::SignPreserving => 0.0,
    };
    let perturbed = p.add(&MultilinearPoly::from_coeffs(
        p.n,
        Basis::Fourier,
        a.characters.iter().copied().zip(delta.iter().copied()),
    ));
    let pv = perturbed.values();
    let gamma = pv.iter().fold(f64::INFINITY, |g, v| g.min(v.abs()));
    let sup = pv.iter().fold(0.0, |g: f64, v| g.max(v.abs()));
    let in_box = delta.iter().all(|d| d.abs() <= bound + CHECK_TOLERANCE);
    if residual > KERNEL_RESIDUAL || !in_box || gamma < epsilon - CHECK_TOLERANCE || gamma <= 0.0 {
        return Ok(None);
    }
    let scale = sup / 2.0;
    let Ok(sign) = sign_polynomial((gamma / scale).min(2.0), 1.0 / 3.0) else {
        return Ok(None);
    };
    let composed = compose_boost(&perturbed, &sign, scale)?;
    let bv = composed.poly.values();
    let domain_error = f
        .domain()
        .map(|x| (bv[x as usize] - values[x as usize].signum()).abs())
        .fold(0.0, f64::max);
    if domain_error > 1.0 / 3.0 + CHECK_TOLERANCE {
        return Ok(None);
    }
    Ok(Some(BoostedPerturbation {
        delta,
        characters: a.characters,
        perturbed,
        gamma,
        residual,
        boosted: composed.poly,
        degree_bound: composed.degree_bound,
        domain_error,
    }))
}

/// Range of `t` with `start + t·dir` inside the box `[-B, B]^m`; only
/// `t = 0` for a zero direction.
fn box_range(start: &[f64], dir: &[f64], bound: f64) -> (f64, f64) {
    let (lo, hi) = start.iter().zip(dir).filter(|(_, d)| d.abs() >= 1e-15).fold(
        (f64::NEG_INFINITY, f64::INFINITY),
        |(lo, hi), (&s, &d)| {
            let x = (-bound - s) / d;
            let y = (bound - s) / d;
            (lo.max(x.min(y)), hi.min(x.max(y)))
        },
    );
    if lo.is_finite() {
        (lo, hi)
    } else {
        (0.0, 0.0)
    }
}
