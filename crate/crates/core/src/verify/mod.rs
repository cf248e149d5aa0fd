//! Seeded verification sweeps with versioned JSON reports.
//!
//! Instance `i` of a sweep draws from `ChaCha8Rng::seed_from_u64(seed)` with
//! stream `i`, so reports are identical for identical configurations whatever
//! the execution strategy. Records are listed by instance id.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boolfn::{random_partial, PartialFunction};
use crate::completion::{
    boost_to_natural, completion_complexity, engineered_instance, exact_degree_completion_check, gap_majority,
    junta_indicator_instance, naive_indicator_product, total_measure, CompletionIterator, Measure,
};
use crate::error::{Error, Result};
use crate::formats::{write_dimacs, write_pbf};
use crate::measures::blocks::block_sensitivity;
use crate::measures::{
    deterministic_complexity, fractional_block_sensitivity, fractional_certificate, measure_report,
    speedup_requirements_report, CertAlgorithm, Check, MeasureOptions, Sensitivity, Variant,
};
use crate::par::Exec;
use crate::perturbation::{
    pf_solve_reduced, reduce_3sat_to_lma, reduce_lma_to_pf, Cnf, Origin, PfVerdict, DEFAULT_EFFORT,
};
use crate::polynomials::fourier::mobius_coefficients;
use crate::polynomials::{approx_degree, DEFAULT_EPSILON};
use crate::slice::{balanced_block_sensitivity, SliceAlgorithm, SliceInstance};
use crate::symmetric::{adeg_lower_bound, exact_deterministic, gap, WeightProfile};

pub const SCHEMA: u32 = 1;
/// Largest `|FC - fbs|` accepted as LP duality.
pub const DUALITY_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Suite {
    #[serde(rename = "s3-inequalities")]
    S3Inequalities,
    #[serde(rename = "s4-symmetric")]
    S4Symmetric,
    #[serde(rename = "s4-slice")]
    S4Slice,
    #[serde(rename = "s5-completion")]
    S5Completion,
    #[serde(rename = "s5-admissibility")]
    S5Admissibility,
    #[serde(rename = "s5-pf")]
    S5Pf,
    #[serde(rename = "appendix-ratios")]
    AppendixRatios,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::S3Inequalities,
        Suite::S4Symmetric,
        Suite::S4Slice,
        Suite::S5Completion,
        Suite::S5Admissibility,
        Suite::S5Pf,
        Suite::AppendixRatios,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Suite::S3Inequalities => "s3-inequalities",
            Suite::S4Symmetric => "s4-symmetric",
            Suite::S4Slice => "s4-slice",
            Suite::S5Completion => "s5-completion",
            Suite::S5Admissibility => "s5-admissibility",
            Suite::S5Pf => "s5-pf",
            Suite::AppendixRatios => "appendix-ratios",
        }
    }

    /// Accepts every id plus the short form `s3`.
    pub fn parse(s: &str) -> Result<Self> {
        if s == "s3" {
            return Ok(Suite::S3Inequalities);
        }
        Suite::ALL
            .into_iter()
            .find(|v| v.id() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite {s:?}")))
    }

    /// `(instances, largest arity)` used when the configuration leaves them open.
    pub fn defaults(self) -> (usize, usize) {
        match self {
            Suite::S3Inequalities => (500, 6),
            Suite::S4Symmetric => (200, 10),
            Suite::S4Slice => (50, 8),
            Suite::S5Completion => (20, 4),
            Suite::S5Admissibility => (20, 7),
            Suite::S5Pf => (20, 10),
            Suite::AppendixRatios => (20, 5),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub instances: Option<usize>,
    pub max_n: Option<usize>,
    pub seed: u64,
    pub undefined_budget: usize,
    pub epsilon: f64,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            instances: None,
            max_n: None,
            seed: 1,
            undefined_budget: crate::measures::DEFAULT_UNDEFINED_BUDGET,
            epsilon: DEFAULT_EPSILON,
            exec: Exec::default(),
        }
    }
}

/// A file that reproduces a failing instance with the matching subcommand.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    pub file_name: String,
    pub contents: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub id: usize,
    pub n: usize,
    pub description: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub artifact: Option<Artifact>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema: u32,
    pub suite: Suite,
    pub seed: u64,
    pub instances: usize,
    pub max_n: usize,
    pub passed: bool,
    pub failures: usize,
    /// Id of the smallest failing instance.
    pub minimal_failure: Option<usize>,
    pub records: Vec<InstanceRecord>,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }
}

pub fn instance_rng(seed: u64, id: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id as u64);
    rng
}

pub fn verify_suite(suite: Suite, config: &VerifyConfig) -> Result<SuiteReport> {
    let (default_instances, default_n) = suite.defaults();
    let instances = config.instances.unwrap_or(default_instances);
    let max_n = config.max_n.unwrap_or(default_n);
    let min_n = if suite == Suite::S5Pf { 3 } else { 1 };
    if max_n < min_n || max_n > 12 {
        return Err(Error::InvalidArgument(format!(
            "largest arity {max_n} outside {min_n}..=12"
        )));
    }
    if !(config.epsilon > 0.0 && config.epsilon < 0.5) {
        return Err(Error::InvalidArgument(format!(
            "epsilon {} outside (0, 1/2)",
            config.epsilon
        )));
    }
    // instances fan out; the work inside each instance stays sequential
    let run = |id: usize| -> InstanceRecord {
        let mut rng = instance_rng(config.seed, id);
        let inner = VerifyConfig {
            exec: Exec::Sequential,
            ..*config
        };
        match suite {
            Suite::S3Inequalities => s3_instance(id, max_n, &inner, &mut rng),
            Suite::S4Symmetric => s4_symmetric_instance(id, max_n, &mut rng),
            Suite::S4Slice => s4_slice_instance(id, max_n, &mut rng),
            Suite::S5Completion => s5_completion_instance(id, max_n, &inner, &mut rng),
            Suite::S5Admissibility => s5_admissibility_instance(id, max_n, &mut rng),
            Suite::S5Pf => s5_pf_instance(id, max_n, &mut rng),
            Suite::AppendixRatios => appendix_instance(id, max_n, &inner, &mut rng),
        }
    };
    let records = config.exec.map(instances, run);
    let failing: Vec<&InstanceRecord> = records.iter().filter(|r| !r.passed).collect();
    let minimal_failure = failing
        .iter()
        .min_by_key(|r| (r.n, r.description.len(), r.id))
        .map(|r| r.id);
    Ok(SuiteReport {
        schema: SCHEMA,
        suite,
        seed: config.seed,
        instances,
        max_n,
        passed: failing.is_empty(),
        failures: failing.len(),
        minimal_failure,
        records,
    })
}

fn record(id: usize, n: usize, description: String, checks: Vec<Check>, artifact: Artifact) -> InstanceRecord {
    let passed = checks.iter().all(|c| c.holds);
    InstanceRecord {
        id,
        n,
        description,
        passed,
        checks,
        artifact: (!passed).then_some(artifact),
    }
}

fn error_check(name: &str, e: &Error) -> Check {
    Check::new(name, false, format!("error: {e}"))
}

fn pbf_artifact(suite: &str, id: usize, f: &PartialFunction) -> Artifact {
    Artifact {
        file_name: format!("{suite}-{id}.pbf"),
        contents: write_pbf(f),
    }
}

/// Every measure inequality plus FC/fbs duality at each domain point.
pub fn inequality_checks(f: &PartialFunction, undefined_budget: usize) -> Vec<Check> {
    let opts = MeasureOptions {
        undefined_budget,
        ..MeasureOptions::default()
    };
    let mut checks = match measure_report(f, &opts) {
        Ok(r) => {
            let mut c = r.checks.clone();
            c.extend(speedup_requirements_report(&r).chains);
            c
        }
        Err(e) => vec![error_check("measure report", &e)],
    };
    let gaps: Result<Vec<f64>> = f
        .domain()
        .map(|x| Ok((fractional_certificate(f, x)? - fractional_block_sensitivity(f, x)?).abs()))
        .collect();
    checks.push(match gaps {
        Ok(g) => {
            let worst = g.into_iter().fold(0.0, f64::max);
            Check::new(
                "FC = fbs at every point",
                worst <= DUALITY_TOLERANCE,
                format!("max gap {worst:.3e}"),
            )
        }
        Err(e) => error_check("FC = fbs at every point", &e),
    });
    checks
}

/// Replays each certificate procedure on every domain point.
pub fn replay_checks(f: &PartialFunction, undefined_budget: usize) -> Vec<Check> {
    Variant::ALL
        .into_iter()
        .filter_map(|v| {
            let name = format!("replay {}", v.name());
            let alg = match CertAlgorithm::prepare(f, v, undefined_budget) {
                Ok(a) => a,
                Err(Error::CriticalUnavailable) => return None,
                Err(e) => return Some(error_check(&name, &e)),
            };
            let mut worst = 0;
            for x in f.domain() {
                match alg.run(|i| x >> i & 1 == 1) {
                    Ok(r) if Some(r.output) == f.value(x).bit() => worst = worst.max(r.queries),
                    Ok(r) => {
                        return Some(Check::new(&name, false, format!("output {} at {x:#b}", r.output)));
                    }
                    Err(e) => return Some(error_check(&name, &e)),
                }
            }
            Some(Check::new(
                &name,
                worst <= alg.bound(),
                format!("queries {worst} <= bound {}", alg.bound()),
            ))
        })
        .collect()
}

fn s3_instance(id: usize, max_n: usize, config: &VerifyConfig, rng: &mut ChaCha8Rng) -> InstanceRecord {
    let n = rng.gen_range(1.min(max_n)..=max_n).max(1);
    let size = 1usize << n;
    let undefined = rng.gen_range(0..size);
    let f = random_partial(n, undefined, rng).expect("valid arity and count");
    let mut checks = inequality_checks(&f, config.undefined_budget);
    checks.extend(replay_checks(&f, config.undefined_budget));
    record(id, n, f.table_string(), checks, pbf_artifact("s3-inequalities", id, &f))
}

/// Tree-search `D` against `n - Γ + 1`, and for `n ≤ 8` the LP degree
/// against `√(n/(3Γ)) - 1/2`.
pub fn symmetric_checks(profile: &WeightProfile) -> Vec<Check> {
    let f = match profile.to_function() {
        Ok(f) => f,
        Err(e) => return vec![error_check("profile", &e)],
    };
    let mut checks = vec![match deterministic_complexity(&f) {
        Ok(d) => {
            let e = exact_deterministic(profile);
            Check::new("D = n - gap + 1", d == e, format!("{d} = {e}"))
        }
        Err(e) => error_check("D = n - gap + 1", &e),
    }];
    if profile.n <= 8 && gap(profile).is_some() {
        let check = adeg_lower_bound(profile).and_then(|b| {
            let a = approx_degree(&f, DEFAULT_EPSILON)?;
            Ok(Check::new(
                "adeg >= sqrt(n/(3 gap)) - 1/2",
                a as f64 >= b - 0.5,
                format!("{a} >= {:.4}", b - 0.5),
            ))
        });
        checks.push(check.unwrap_or_else(|e| error_check("adeg >= sqrt(n/(3 gap)) - 1/2", &e)));
    }
    checks
}

fn s4_symmetric_instance(id: usize, max_n: usize, rng: &mut ChaCha8Rng) -> InstanceRecord {
    let n = rng.gen_range(4.min(max_n)..=max_n);
    let profile = WeightProfile::random(n, rng);
    let f = profile.to_function().expect("valid profile");
    record(
        id,
        n,
        profile.render(),
        symmetric_checks(&profile),
        pbf_artifact("s4-symmetric", id, &f),
    )
}

/// Correct output and bounded queries at every slice point, and balanced
/// block sensitivity equal to block sensitivity.
pub fn slice_checks(s: &SliceInstance) -> Vec<Check> {
    let alg = match SliceAlgorithm::prepare(s) {
        Ok(a) => a,
        Err(e) => return vec![error_check("slice algorithm", &e)],
    };
    let mut worst = 0;
    let mut wrong = Vec::new();
    let mut bs_mismatch = Vec::new();
    for x in s.f.domain() {
        match alg.run(|i| x >> i & 1 == 1) {
            Ok(r) => {
                if Some(r.output) != s.f.value(x).bit() {
                    wrong.push(x);
                }
                worst = worst.max(r.queries);
            }
            Err(e) => return vec![error_check("slice algorithm", &e)],
        }
        let balanced = balanced_block_sensitivity(s, x);
        let general = block_sensitivity(&s.f, x, Sensitivity::Strict);
        if balanced.is_err() || balanced != general {
            bs_mismatch.push(x);
        }
    }
    vec![
        Check::new(
            "slice output correct",
            wrong.is_empty(),
            format!("{} wrong", wrong.len()),
        ),
        Check::new(
            "slice queries within bound",
            worst as f64 <= alg.bound(),
            format!("{worst} <= {}", alg.bound()),
        ),
        Check::new(
            "balanced bs = bs",
            bs_mismatch.is_empty(),
            format!("{} mismatches", bs_mismatch.len()),
        ),
    ]
}

fn s4_slice_instance(id: usize, max_n: usize, rng: &mut ChaCha8Rng) -> InstanceRecord {
    let n = rng.gen_range(2.min(max_n)..=max_n);
    let k = rng.gen_range(0..=n);
    let s = SliceInstance::random(n, k, rng).expect("valid slice");
    record(
        id,
        n,
        format!("k={k} {}", s.f.table_string()),
        slice_checks(&s),
        pbf_artifact("s4-slice", id, &s.f),
    )
}

/// `D(f) = min_F D(F)` over every completion, and the parity condition
/// against Möbius coefficients for every completion and level.
pub fn completion_checks(f: &PartialFunction, exec: Exec) -> Vec<Check> {
    let it = CompletionIterator::new(f);
    let total = it.total() as usize;
    let run = || -> Result<Vec<Check>> {
        let d = deterministic_complexity(f)?;
        let values: Vec<usize> = exec
            .map(total, |j| total_measure(&it.completion(j as u64), Measure::D))
            .into_iter()
            .collect::<Result<_>>()?;
        let min = values.iter().copied().min().unwrap_or(0);
        let opt = completion_complexity(f, Measure::D, total.trailing_zeros() as usize, exec)?;
        let mut parity_bad = 0;
        for j in 0..total {
            let g = it.completion(j as u64);
            let mobius = mobius_coefficients(&g)?;
            for level in 0..=f.arity() {
                let vanish = mobius.coeffs.keys().all(|s| s.count_ones() as usize <= level);
                if exact_degree_completion_check(&g, level)? != vanish {
                    parity_bad += 1;
                }
            }
        }
        Ok(vec![
            Check::new(
                "D(f) = min over completions",
                d == min,
                format!("{d} = {min} over {total}"),
            ),
            Check::new(
                "completion optimum attains D(f)",
                opt.exact && opt.value == d && f.is_completed_by(&opt.witness),
                format!("value {} exact {}", opt.value, opt.exact),
            ),
            Check::new(
                "parity condition iff Moebius vanishing",
                parity_bad == 0,
                format!("{parity_bad} disagreements"),
            ),
        ])
    };
    run().unwrap_or_else(|e| vec![error_check("completion identities", &e)])
}

/// The naive product stays within `ε + ε'` of the naive completion.
pub fn naive_checks(n: usize, rng: &mut impl Rng) -> Vec<Check> {
    let q = rng.gen_range(1..=n.min(3));
    let (eps, eps2) = (rng.gen_range(0.0..0.2), rng.gen_range(0.0..0.2));
    let mut run = || -> Result<Vec<Check>> {
        let (f, p, qp) = junta_indicator_instance(n, q, eps, eps2, rng)?;
        [false, true]
            .into_iter()
            .map(|value| {
                let r = naive_indicator_product(&f, &p, &qp, value, eps, eps2)?;
                Ok(Check::new(
                    &format!("naive product error, value {}", u8::from(value)),
                    r.max_error <= eps + eps2 + 1e-9,
                    format!("{:.6} <= {:.6}", r.max_error, eps + eps2),
                ))
            })
            .collect()
    };
    run().unwrap_or_else(|e| vec![error_check("naive product", &e)])
}

fn s5_completion_instance(id: usize, max_n: usize, config: &VerifyConfig, rng: &mut ChaCha8Rng) -> InstanceRecord {
    let n = max_n;
    let undefined = rng.gen_range(0..=8.min((1 << n) - 1));
    let f = random_partial(n, undefined, rng).expect("valid arity and count");
    let mut checks = completion_checks(&f, config.exec);
    let junta_n = rng.gen_range(2..=10);
    checks.extend(naive_checks(junta_n, rng));
    record(id, n, f.table_string(), checks, pbf_artifact("s5-completion", id, &f))
}

fn s5_admissibility_instance(id: usize, max_n: usize, rng: &mut ChaCha8Rng) -> InstanceRecord {
    let artifact = |f: &PartialFunction, p| Artifact {
        file_name: format!("s5-admissibility-{id}.json"),
        contents: serde_json::to_string_pretty(&serde_json::json!({ "function": f, "poly": p }))
            .expect("plain data serializes"),
    };
    if id == 0 {
        let (f, p) = gap_majority(6).expect("fixed arity");
        let checks = [1.0, 2.0, 3.0]
            .into_iter()
            .map(|c| match crate::completion::admissibility(&f, &p, c, None) {
                Ok(r) => Check::new(
                    &format!("gap majority influence criterion false, c={c}"),
                    !r.influence_holds,
                    format!("{:.4} vs eta {:?}", r.influence_sparsity, r.eta),
                ),
                Err(e) => error_check("gap majority", &e),
            })
            .collect();
        return record(id, 6, "gap majority n=6".into(), checks, artifact(&f, &p));
    }
    let n = rng.gen_range(2.min(max_n)..=max_n);
    let (f, p) = engineered_instance(n, rng);
    let checks = match boost_to_natural(&f, &p, 1.0, Some(0.5)) {
        Ok(o) => vec![
            Check::new(
                "Lipschitz criterion holds",
                o.report.lipschitz_holds,
                format!("{:.4}", o.report.lipschitz),
            ),
            Check::new(
                "criterion implies margin",
                o.report.implication_holds,
                format!("{:?}", o.report.min_off_domain),
            ),
            Check::new(
                "boost within 1/3 of natural completion",
                o.within,
                format!("{:.6}", o.max_deviation),
            ),
        ],
        Err(e) => vec![error_check("boost", &e)],
    };
    record(id, n, f.table_string(), checks, artifact(&f, &p))
}

/// PF decision after both reductions against brute-force satisfiability,
/// plus value-table fidelity for a random `Δ`.
pub fn pf_checks(cnf: &Cnf, rng: &mut impl Rng) -> Vec<Check> {
    let mut run = || -> Result<Vec<Check>> {
        let lma = reduce_3sat_to_lma(cnf)?;
        let pf = reduce_lma_to_pf(&lma)?;
        let sat = cnf.brute_force();
        let verdict = pf_solve_reduced(&pf, Origin::SatReduced, DEFAULT_EFFORT, 0, Exec::Sequential);
        let agree = match (&verdict, sat) {
            (PfVerdict::Yes(d), Some(_)) => {
                let a = d
                    .iter()
                    .enumerate()
                    .fold(0u64, |a, (j, &v)| a | u64::from(v > 0.0) << j);
                pf.is_solution(d) && cnf.is_satisfied(a)
            }
            (PfVerdict::No, None) => true,
            _ => false,
        };
        let delta: Vec<f64> = (0..cnf.vars).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let values = pf.perturbed(&delta);
        let worst = (0..lma.rows())
            .map(|r| (values[r] - lma.row_value(r, &delta)).abs())
            .fold(0.0, f64::max);
        let name = match verdict {
            PfVerdict::Yes(_) => "YES",
            PfVerdict::No => "NO",
            PfVerdict::Unknown => "UNKNOWN",
        };
        Ok(vec![
            Check::new(
                "PF verdict = satisfiability",
                agree,
                format!("{name} vs sat={}", sat.is_some()),
            ),
            Check::new("p_delta(z_r) = (A delta + b)_r", worst <= 1e-9, format!("{worst:.3e}")),
        ])
    };
    run().unwrap_or_else(|e| vec![error_check("reduction", &e)])
}

fn s5_pf_instance(id: usize, max_n: usize, rng: &mut ChaCha8Rng) -> InstanceRecord {
    let vars = rng.gen_range(3..=max_n);
    let m = rng.gen_range(1..=20);
    let cnf = Cnf::random_3cnf(vars, m, rng).expect("at least three variables");
    let checks = pf_checks(&cnf, rng);
    let artifact = Artifact {
        file_name: format!("s5-pf-{id}.cnf"),
        contents: write_dimacs(&cnf),
    };
    record(id, vars, format!("{vars} vars {m} clauses"), checks, artifact)
}

fn appendix_instance(id: usize, max_n: usize, config: &VerifyConfig, rng: &mut ChaCha8Rng) -> InstanceRecord {
    let n = rng.gen_range(1.min(max_n)..=max_n).max(1);
    let undefined = rng.gen_range(0..1usize << n);
    let f = random_partial(n, undefined, rng).expect("valid arity and count");
    let check = (|| -> Result<Check> {
        let d = deterministic_complexity(&f)?;
        let a = approx_degree(&f, config.epsilon)?;
        let log = (2.0 + f.domain_size() as f64).ln();
        let ratio = (a > 0).then(|| d as f64 / ((a * a) as f64 * log * log));
        Ok(Check::new(
            "adeg <= D",
            a <= d,
            format!("D={d} adeg={a} |Dom|={} ratio={ratio:?}", f.domain_size()),
        ))
    })()
    .unwrap_or_else(|e| error_check("adeg <= D", &e));
    record(
        id,
        n,
        f.table_string(),
        vec![check],
        pbf_artifact("appendix-ratios", id, &f),
    )
}
