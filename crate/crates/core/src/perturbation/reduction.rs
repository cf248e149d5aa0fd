//! 3-CNF → Linear Margin Avoidance → Perturbation Finding, with decision
//! procedures for the resulting instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{slab_avoid, CHECK_TOLERANCE};
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::polynomials::{Basis, MultilinearPoly};

/// Restarts for the heuristic search on general instances.
pub const DEFAULT_EFFORT: usize = 256;
/// Largest `n` decided by `±1` enumeration.
pub const MAX_ENUMERATED_VARIABLES: usize = 26;

/// Clauses as DIMACS literals: `v` is `u_v`, `-v` is `¬u_v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cnf {
    pub vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl Cnf {
    /// Bit `i` of `assignment` is the value of `u_{i+1}`.
    pub fn is_satisfied(&self, assignment: u64) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .any(|&l| (assignment >> (l.unsigned_abs() - 1) & 1 == 1) == (l > 0))
        })
    }

    /// First satisfying assignment in increasing order.
    pub fn brute_force(&self) -> Option<u64> {
        (0..1u64 << self.vars).find(|&a| self.is_satisfied(a))
    }

    /// `m` clauses over three distinct variables with random polarities.
    pub fn random_3cnf(vars: usize, m: usize, rng: &mut impl Rng) -> Result<Self> {
        if vars < 3 {
            return Err(Error::InvalidArgument(format!(
                "3-CNF needs at least 3 variables, got {vars}"
            )));
        }
        let clauses = (0..m)
            .map(|_| {
                rand::seq::index::sample(rng, vars, 3)
                    .into_iter()
                    .map(|v| if rng.gen() { v as i32 + 1 } else { -(v as i32 + 1) })
                    .collect()
            })
            .collect();
        Ok(Cnf { vars, clauses })
    }
}

/// Decide `∃Δ, ‖Δ‖∞ ≤ 1, |(AΔ + b)_r| ≥ 1` for every row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LmaInstance {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

impl LmaInstance {
    pub fn rows(&self) -> usize {
        self.b.len()
    }

    pub fn vars(&self) -> usize {
        self.a.first().map_or(0, Vec::len)
    }

    pub fn row_value(&self, r: usize, delta: &[f64]) -> f64 {
        self.a[r].iter().zip(delta).map(|(a, d)| a * d).sum::<f64>() + self.b[r]
    }

    pub fn is_feasible(&self, delta: &[f64]) -> bool {
        delta.iter().all(|d| d.abs() <= 1.0) && (0..self.rows()).all(|r| self.row_value(r, delta).abs() >= 1.0)
    }
}

pub fn reduce_3sat_to_lma(cnf: &Cnf) -> Result<LmaInstance> {
    let n = cnf.vars;
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut b = vec![0.0; n];
    for (index, clause) in cnf.clauses.iter().enumerate() {
        let bad = |detail: String| Error::MalformedClause { index, detail };
        if clause.len() != 3 {
            return Err(bad(format!("{} literals", clause.len())));
        }
        let mut row = vec![0.0; n];
        for &l in clause {
            let v = l.unsigned_abs() as usize;
            if l == 0 || v > n {
                return Err(bad(format!("literal {l} outside 1..={n}")));
            }
            if row[v - 1] != 0.0 {
                return Err(bad(format!("variable {v} repeated")));
            }
            row[v - 1] = if l > 0 { 1.0 } else { -1.0 };
        }
        a.push(row);
        b.push(3.0);
    }
    Ok(LmaInstance { a, b })
}

/// `|p(x) + Σ Δ_j q_j(x)| ≥ ε` on every point of `{-1,1}^t` with
/// `‖Δ‖∞ ≤ B`, polynomials held as value tables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationInstance {
    pub t: usize,
    pub p: Vec<f64>,
    pub q: Vec<Vec<f64>>,
    pub epsilon: f64,
    pub bound: f64,
}

impl PerturbationInstance {
    pub fn new(t: usize, p: Vec<f64>, q: Vec<Vec<f64>>, epsilon: f64, bound: f64) -> Result<Self> {
        let size = 1usize << t;
        if t == 0 || t > crate::boolfn::MAX_ARITY {
            return Err(Error::UnsupportedArity(t));
        }
        if let Some(len) = std::iter::once(p.len())
            .chain(q.iter().map(Vec::len))
            .find(|&l| l != size)
        {
            return Err(Error::TableLength {
                expected: size,
                got: len,
            });
        }
        if !(epsilon > 0.0 && bound > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "epsilon {epsilon} and bound {bound} must be positive"
            )));
        }
        Ok(PerturbationInstance {
            t,
            p,
            q,
            epsilon,
            bound,
        })
    }

    pub fn vars(&self) -> usize {
        self.q.len()
    }

    /// Values of `p_Δ` on the cube.
    pub fn perturbed(&self, delta: &[f64]) -> Vec<f64> {
        (0..self.p.len())
            .map(|x| self.p[x] + self.q.iter().zip(delta).map(|(q, d)| q[x] * d).sum::<f64>())
            .collect()
    }

    /// Box and margin checked on all `2^t` points.
    pub fn is_solution(&self, delta: &[f64]) -> bool {
        delta.len() == self.vars()
            && delta.iter().all(|d| d.abs() <= self.bound + CHECK_TOLERANCE)
            && self
                .perturbed(delta)
                .iter()
                .all(|v| v.abs() >= self.epsilon - CHECK_TOLERANCE)
    }

    /// Fourier interpolants of `p` and each `q_j`.
    pub fn polynomials(&self) -> Result<(MultilinearPoly, Vec<MultilinearPoly>)> {
        let p = MultilinearPoly::interpolate(self.t, Basis::Fourier, &self.p)?;
        let q = self
            .q
            .iter()
            .map(|q| MultilinearPoly::interpolate(self.t, Basis::Fourier, q))
            .collect::<Result<_>>()?;
        Ok((p, q))
    }

    /// Whether every `Δ_j` is pinned to `±B` by a point where only `q_j`
    /// is nonzero, `p` vanishes, and `|q_j| · B = ε`.
    fn forces_sign_vectors(&self) -> bool {
        (0..self.vars()).all(|j| {
            (0..self.p.len()).any(|x| {
                self.p[x] == 0.0
                    && (0..self.vars()).all(|k| k == j || self.q[k][x] == 0.0)
                    && (self.q[j][x].abs() * self.bound - self.epsilon).abs() <= CHECK_TOLERANCE
            })
        })
    }
}

/// `t = ⌈log₂ N⌉` (at least 1), `z_r` the `r`-th point in integer order,
/// `p = b_r`, `q_j = A_{r,j}` on `z_r`; `p = 2`, `q_j = 0` elsewhere.
pub fn reduce_lma_to_pf(lma: &LmaInstance) -> Result<PerturbationInstance> {
    let rows = lma.rows();
    if rows == 0 {
        return Err(Error::InvalidArgument("LMA instance has no rows".into()));
    }
    let t = (rows.next_power_of_two().trailing_zeros() as usize).max(1);
    let size = 1usize << t;
    let p = (0..size).map(|x| if x < rows { lma.b[x] } else { 2.0 }).collect();
    let q = (0..lma.vars())
        .map(|j| (0..size).map(|x| if x < rows { lma.a[x][j] } else { 0.0 }).collect())
        .collect();
    PerturbationInstance::new(t, p, q, 1.0, 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    SatReduced,
    General,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "delta", rename_all = "UPPERCASE")]
pub enum PfVerdict {
    Yes(Vec<f64>),
    No,
    Unknown,
}

/// Exact `±B` enumeration for reduced instances whose unit rows force
/// `|Δ_j| = B`; otherwise a randomized search that answers `Yes` with a
/// verified witness or `Unknown`, never `No`.
pub fn pf_solve_reduced(
    inst: &PerturbationInstance,
    origin: Origin,
    effort: usize,
    seed: u64,
    exec: Exec,
) -> PfVerdict {
    let n = inst.vars();
    if origin == Origin::SatReduced && n <= MAX_ENUMERATED_VARIABLES && inst.forces_sign_vectors() {
        let candidate = |s: u64| -> Vec<f64> {
            (0..n)
                .map(|j| if s >> j & 1 == 1 { inst.bound } else { -inst.bound })
                .collect()
        };
        // enumerate in the order all-true first
        let total = 1u64 << n;
        return match exec.find_first(total as usize, |i| {
            let d = candidate(total - 1 - i as u64);
            inst.is_solution(&d).then_some(d)
        }) {
            Some(d) => PfVerdict::Yes(d),
            None => PfVerdict::No,
        };
    }
    heuristic_search(inst, effort, seed, exec)
}

fn heuristic_search(inst: &PerturbationInstance, effort: usize, seed: u64, exec: Exec) -> PfVerdict {
    let n = inst.vars();
    if n == 0 {
        return if inst.is_solution(&[]) {
            PfVerdict::Yes(vec![])
        } else {
            PfVerdict::Unknown
        };
    }
    let functionals: Vec<Vec<f64>> = (0..inst.p.len())
        .map(|x| inst.q.iter().map(|q| q[x]).collect())
        .collect();
    let found = exec.find_first(effort.max(1), |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64);
        let delta: Vec<f64> = if r == 0 {
            vec![0.0; n]
        } else if r % 2 == 1 {
            (0..n).map(|_| rng.gen_range(-inst.bound..=inst.bound)).collect()
        } else {
            // slab_avoid on the nonzero functionals, pulled back into the box
            let (ls, bs): (Vec<Vec<f64>>, Vec<f64>) = functionals
                .iter()
                .zip(&inst.p)
                .filter(|(l, _)| l.iter().any(|&c| c != 0.0))
                .map(|(l, &p)| (l.clone(), -p))
                .unzip();
            let v = slab_avoid(&ls, &bs, inst.epsilon, &mut rng).ok()?;
            let norm = v.iter().fold(0.0, |m: f64, c| m.max(c.abs()));
            let s = if norm > inst.bound { inst.bound / norm } else { 1.0 };
            v.iter().map(|c| c * s).collect()
        };
        inst.is_solution(&delta).then_some(delta)
    });
    match found {
        Some(d) => PfVerdict::Yes(d),
        None => PfVerdict::Unknown,
    }
}

/// `p' = (ε'/ε)·p`, `q_j' = (ε'/ε)(B/B')·q_j`, so `Δ` solves the original
/// exactly when `(B'/B)·Δ` solves the rescaled instance.
pub fn pf_rescale(inst: &PerturbationInstance, epsilon: f64, bound: f64) -> Result<PerturbationInstance> {
    if !(epsilon > 0.0 && bound > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon {epsilon} and bound {bound} must be positive"
        )));
    }
    let e = epsilon / inst.epsilon;
    let k = e * inst.bound / bound;
    PerturbationInstance::new(
        inst.t,
        inst.p.iter().map(|v| v * e).collect(),
        inst.q.iter().map(|q| q.iter().map(|v| v * k).collect()).collect(),
        epsilon,
        bound,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cnf(vars: usize, clauses: &[[i32; 3]]) -> Cnf {
        Cnf {
            vars,
            clauses: clauses.iter().map(|c| c.to_vec()).collect(),
        }
    }

    // every 3-clause on three variables: the 8 sign patterns
    fn unsat_cnf() -> Cnf {
        let clauses: Vec<[i32; 3]> = (0..8)
            .map(|s| [1, 2, 3].map(|v: i32| if s >> (v - 1) & 1 == 1 { -v } else { v }))
            .collect();
        cnf(3, &clauses)
    }

    #[test]
    fn lma_clause_rows() {
        let l = reduce_3sat_to_lma(&cnf(3, &[[1, 2, 3]])).unwrap();
        assert_eq!(l.rows(), 4);
        assert_eq!(l.a[3], vec![1.0, 1.0, 1.0]);
        assert_eq!(l.b[3], 3.0);
        assert_eq!(l.row_value(3, &[1.0, 1.0, 1.0]), 6.0);
        let neg = reduce_3sat_to_lma(&cnf(3, &[[-1, -2, -3]])).unwrap();
        assert_eq!(neg.row_value(3, &[1.0, 1.0, 1.0]), 0.0);
        assert!(!neg.is_feasible(&[1.0, 1.0, 1.0]));
        assert!(neg.is_feasible(&[1.0, -1.0, 1.0]));
        for i in 0..3 {
            assert_eq!(neg.b[i], 0.0);
            assert_eq!(neg.a[i][i], 1.0);
        }
        let empty = reduce_3sat_to_lma(&cnf(2, &[])).unwrap();
        assert_eq!(empty.rows(), 2);
        for s in [[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]] {
            assert!(empty.is_feasible(&s));
        }
        assert!(!empty.is_feasible(&[0.5, 1.0]));
    }

    #[test]
    fn malformed_clauses_rejected() {
        for c in [vec![1, 2], vec![1, 1, 2], vec![1, 2, 4], vec![0, 1, 2], vec![1, -1, 2]] {
            let f = Cnf {
                vars: 3,
                clauses: vec![vec![1, 2, 3], c],
            };
            assert!(matches!(
                reduce_3sat_to_lma(&f),
                Err(Error::MalformedClause { index: 1, .. })
            ));
        }
    }

    #[test]
    fn pf_padding() {
        let four = LmaInstance {
            a: vec![vec![1.0]; 4],
            b: vec![0.0, 1.0, 2.0, 3.0],
        };
        let pf = reduce_lma_to_pf(&four).unwrap();
        assert_eq!(pf.t, 2);
        assert_eq!(pf.p, vec![0.0, 1.0, 2.0, 3.0]);
        let five = LmaInstance {
            a: vec![vec![1.0, -1.0]; 5],
            b: vec![0.0; 5],
        };
        let pf = reduce_lma_to_pf(&five).unwrap();
        assert_eq!(pf.t, 3);
        assert_eq!(pf.p[5..], [2.0, 2.0, 2.0]);
        assert!(pf.q.iter().all(|q| q[5..] == [0.0, 0.0, 0.0]));
        assert_eq!((pf.epsilon, pf.bound), (1.0, 1.0));
        let one = LmaInstance {
            a: vec![vec![1.0]],
            b: vec![0.0],
        };
        assert_eq!(reduce_lma_to_pf(&one).unwrap().t, 1);
        assert!(reduce_lma_to_pf(&LmaInstance { a: vec![], b: vec![] }).is_err());
    }

    #[test]
    fn pf_value_table_fidelity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let vars = rng.gen_range(3..=8);
            let m = rng.gen_range(0..=12);
            let lma = reduce_3sat_to_lma(&Cnf::random_3cnf(vars, m, &mut rng).unwrap()).unwrap();
            let pf = reduce_lma_to_pf(&lma).unwrap();
            let (p, q) = pf.polynomials().unwrap();
            let delta: Vec<f64> = (0..vars).map(|_| rng.gen_range(-1.0..1.0)).collect();
            for r in 0..lma.rows() {
                let x = r as u32;
                let v = p.evaluate(x) + q.iter().zip(&delta).map(|(q, d)| q.evaluate(x) * d).sum::<f64>();
                assert!((v - lma.row_value(r, &delta)).abs() < 1e-9);
            }
            for x in lma.rows()..pf.p.len() {
                assert!((p.evaluate(x as u32) - 2.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn pf_matches_brute_force_sat() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let mut seen = [0usize; 2];
        for i in 0..20 {
            let vars = rng.gen_range(3..=10);
            let m = rng.gen_range(1..=20);
            let f = Cnf::random_3cnf(vars, m, &mut rng).unwrap();
            let pf = reduce_lma_to_pf(&reduce_3sat_to_lma(&f).unwrap()).unwrap();
            let sat = f.brute_force().is_some();
            let exec = if i % 2 == 0 { Exec::Sequential } else { Exec::Parallel };
            match pf_solve_reduced(&pf, Origin::SatReduced, DEFAULT_EFFORT, 0, exec) {
                PfVerdict::Yes(d) => {
                    assert!(sat);
                    let a = d
                        .iter()
                        .enumerate()
                        .fold(0u64, |a, (j, &v)| a | ((v > 0.0) as u64) << j);
                    assert!(f.is_satisfied(a));
                }
                PfVerdict::No => assert!(!sat),
                PfVerdict::Unknown => panic!("reduced instance left undecided"),
            }
            seen[sat as usize] += 1;
        }
        let un = reduce_lma_to_pf(&reduce_3sat_to_lma(&unsat_cnf()).unwrap()).unwrap();
        assert_eq!(
            pf_solve_reduced(&un, Origin::SatReduced, 16, 0, Exec::Parallel),
            PfVerdict::No
        );
        assert!(seen[1] > 0);
    }

    #[test]
    fn general_mode_never_says_no() {
        let un = reduce_lma_to_pf(&reduce_3sat_to_lma(&unsat_cnf()).unwrap()).unwrap();
        assert_eq!(
            pf_solve_reduced(&un, Origin::General, 64, 3, Exec::Sequential),
            PfVerdict::Unknown
        );
        let easy = PerturbationInstance::new(1, vec![2.0, -2.0], vec![vec![1.0, 1.0]], 1.0, 1.0).unwrap();
        match pf_solve_reduced(&easy, Origin::General, 8, 0, Exec::Sequential) {
            PfVerdict::Yes(d) => assert!(easy.is_solution(&d)),
            v => panic!("{v:?}"),
        }
        // sat-reduced origin without forcing rows falls back to the search
        let loose = PerturbationInstance::new(1, vec![0.0, 0.0], vec![vec![0.5, 0.5]], 1.0, 1.0).unwrap();
        assert_eq!(
            pf_solve_reduced(&loose, Origin::SatReduced, 16, 0, Exec::Sequential),
            PfVerdict::Unknown
        );
    }

    #[test]
    fn general_search_finds_slab_witness() {
        // p = 0 everywhere, q_1 = χ_1 + 2: |Δ(χ_1 + 2)| ≥ 1 needs |Δ| ≥ 1
        let inst = PerturbationInstance::new(1, vec![0.0, 0.0], vec![vec![3.0, 1.0]], 1.0, 1.0).unwrap();
        match pf_solve_reduced(&inst, Origin::General, 64, 5, Exec::Parallel) {
            PfVerdict::Yes(d) => assert!(inst.is_solution(&d)),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn rescale_preserves_decisions() {
        let f = cnf(3, &[[1, -2, 3]]);
        let pf = reduce_lma_to_pf(&reduce_3sat_to_lma(&f).unwrap()).unwrap();
        assert_eq!(pf_rescale(&pf, 1.0, 1.0).unwrap(), pf);
        let scaled = pf_rescale(&pf, 2.0, 3.0).unwrap();
        let PfVerdict::Yes(d) = pf_solve_reduced(&pf, Origin::SatReduced, 16, 0, Exec::Sequential) else {
            panic!("satisfiable formula")
        };
        let d3: Vec<f64> = d.iter().map(|v| 3.0 * v).collect();
        assert!(scaled.is_solution(&d3));
        assert!(matches!(
            pf_solve_reduced(&scaled, Origin::SatReduced, 16, 0, Exec::Sequential),
            PfVerdict::Yes(_)
        ));
        let un = reduce_lma_to_pf(&reduce_3sat_to_lma(&unsat_cnf()).unwrap()).unwrap();
        let un_scaled = pf_rescale(&un, 0.5, 4.0).unwrap();
        assert_eq!(
            pf_solve_reduced(&un_scaled, Origin::SatReduced, 16, 0, Exec::Sequential),
            PfVerdict::No
        );
        assert!(pf_rescale(&pf, 0.0, 1.0).is_err());
        assert!(pf_rescale(&pf, 1.0, -1.0).is_err());
    }
}
