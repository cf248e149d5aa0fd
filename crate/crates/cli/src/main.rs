use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value as Json};

use querylab::completion::{admissibility, completion_complexity, Measure, DEFAULT_BUDGET};
use querylab::formats::{
    parse_dimacs, parse_pbf, parse_pf_json, parse_poly, read_file, write_file, write_pf_json, write_poly,
};
use querylab::lp::LP_TOLERANCE;
use querylab::measures::{
    deterministic_complexity, measure_report, speedup_requirements_report, MeasureOptions, DEFAULT_EXACT_CAP,
};
use querylab::perturbation::{
    pf_solve_reduced, reduce_3sat_to_lma, reduce_lma_to_pf, Origin, PfVerdict, DEFAULT_EFFORT,
};
use querylab::polynomials::{approx_degree_witness, DEFAULT_EPSILON};
use querylab::slice::{SliceAlgorithm, SliceInstance};
use querylab::symmetric::{adeg_lower_bound, exact_deterministic, gap, monte_carlo, regime_report, WeightProfile};
use querylab::verify::{verify_suite, Suite, VerifyConfig};
use querylab::{Exec, PartialFunction};

#[derive(Parser)]
#[command(name = "querylab", version, about = "Query complexity of partial Boolean functions")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Root seed for randomized work.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads; 1 forces the sequential path, 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Every combinatorial measure and the inequality checks.
    Measures {
        file: PathBuf,
        /// Exact completion search runs only up to this many undefined points.
        #[arg(long, default_value_t = querylab::measures::DEFAULT_UNDEFINED_BUDGET)]
        exact_threshold_undefined: usize,
        /// Largest arity for the exhaustive decision-tree search.
        #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
        exact_cap: usize,
    },
    /// Approximate degree by linear programming, with the witness polynomial.
    Adeg {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        /// Write the witness as a .poly file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Symmetric partial function given by a weight profile.
    Symmetric {
        /// Comma-separated `weight:label` pairs, label 0, 1 or *.
        #[arg(long)]
        profile: String,
        #[arg(long)]
        n: usize,
        /// Confirm D by decision-tree search.
        #[arg(long)]
        verify_d: bool,
        /// Trials of the sampling classifier per defined weight.
        #[arg(long)]
        montecarlo: Option<usize>,
        /// Target failure probability of the sampling classifier.
        #[arg(long, default_value_t = 1.0 / 3.0)]
        delta: f64,
    },
    /// Slice algorithm replay on every slice point.
    Slice {
        file: PathBuf,
        /// Fail unless every run stays within the query bound.
        #[arg(long)]
        verify_bound: bool,
    },
    /// Completion complexity of a measure.
    Complete {
        file: PathBuf,
        #[arg(long, default_value = "D")]
        measure: String,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Admissibility criteria of a polynomial for a partial function.
    Admissible {
        file: PathBuf,
        poly: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long)]
        bias: Option<f64>,
    },
    /// Reduce a DIMACS 3-CNF to a perturbation-finding instance.
    PfReduce {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decide a perturbation-finding instance.
    PfSolve {
        file: PathBuf,
        #[arg(long, default_value = "general")]
        origin: String,
        /// Restarts of the heuristic search.
        #[arg(long, default_value_t = DEFAULT_EFFORT)]
        effort: usize,
    },
    /// Seeded verification sweep with a JSON report.
    Verify {
        #[arg(long)]
        suite: String,
        /// Largest arity.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        instances: Option<usize>,
        #[arg(long, default_value_t = querylab::measures::DEFAULT_UNDEFINED_BUDGET)]
        exact_threshold_undefined: usize,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for replay files of failing instances.
        #[arg(long, default_value = ".")]
        artifacts: PathBuf,
    },
}

/// Result of a subcommand: what to print and whether every check held.
struct Outcome {
    json: Json,
    text: String,
    passed: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = match configure_jobs(cli.jobs) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    match run(&cli, exec) {
        Ok(out) => {
            if !out.text.is_empty() || cli.json {
                if cli.json {
                    println!("{}", serde_json::to_string_pretty(&out.json).expect("json value"));
                } else {
                    print!("{}", out.text);
                }
            }
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn configure_jobs(jobs: usize) -> Result<Exec> {
    #[cfg(feature = "parallel")]
    if jobs > 1 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("starting worker pool")?;
    }
    Ok(if jobs == 1 { Exec::Sequential } else { Exec::default() })
}

fn load_pbf(path: &Path) -> Result<PartialFunction> {
    parse_pbf(&read_file(path)?).with_context(|| format!("reading {}", path.display()))
}

fn run(cli: &Cli, exec: Exec) -> Result<Outcome> {
    match &cli.command {
        Command::Measures {
            file,
            exact_threshold_undefined,
            exact_cap,
        } => {
            let f = load_pbf(file)?;
            let opts = MeasureOptions {
                undefined_budget: *exact_threshold_undefined,
                exact_cap: *exact_cap,
            };
            let r = measure_report(&f, &opts)?;
            let speed = speedup_requirements_report(&r);
            let mut text = String::new();
            writeln!(text, "n {} domain {} undefined {}", r.n, r.domain_size, r.undefined)?;
            writeln!(
                text,
                "s {} s_perp {} bs {} bs_perp {}",
                r.s, r.s_promise, r.bs, r.bs_promise
            )?;
            writeln!(text, "C {} C_perp {}", r.c, r.c_perp)?;
            writeln!(text, "cbs {}", bounded(&r.cbs))?;
            if let Some(c) = &r.c_crit {
                writeln!(text, "C_crit {}", bounded(c))?;
            }
            match r.d {
                Some(d) => writeln!(text, "D {d}")?,
                None => writeln!(text, "D skipped (arity above {exact_cap})")?,
            }
            let checks: Vec<_> = r.checks.iter().chain(&speed.chains).collect();
            for c in &checks {
                writeln!(text, "{} {}: {}", verdict(c.holds), c.name, c.detail)?;
            }
            let passed = checks.iter().all(|c| c.holds);
            Ok(Outcome {
                json: json!({ "report": r, "speedup": speed }),
                text,
                passed,
            })
        }
        Command::Adeg { file, epsilon, out } => {
            let f = load_pbf(file)?;
            let w = approx_degree_witness(&f, *epsilon)?;
            let poly = write_poly(&w.poly)?;
            if let Some(path) = out {
                write_file(path, &poly)?;
            }
            Ok(Outcome {
                json: json!({
                    "epsilon": epsilon,
                    "lp_tolerance": LP_TOLERANCE,
                    "degree": w.degree,
                    "error": w.error,
                    "poly": poly,
                }),
                text: format!("adeg {} (epsilon {epsilon}, error {:.6})\n", w.degree, w.error),
                passed: true,
            })
        }
        Command::Symmetric {
            profile,
            n,
            verify_d,
            montecarlo,
            delta,
        } => {
            let p = WeightProfile::parse(*n, profile)?;
            let g = gap(&p);
            let d = exact_deterministic(&p);
            let mut text = format!("profile {}\ngap {}\nD {d}\n", p.render(), opt(g));
            let mut out = json!({ "profile": p.render(), "n": n, "gap": g, "d": d });
            let mut passed = true;
            if let Some(g) = g {
                let lb = adeg_lower_bound(&p)?;
                writeln!(text, "adeg lower bound {lb:.4}")?;
                out["adeg_lower_bound"] = json!(lb);
                if *n >= 2 {
                    let row = regime_report(*n, g)?;
                    writeln!(text, "regime {:?} (n/gap {:.3})", row.regime, row.quantum_order)?;
                    out["regime"] = serde_json::to_value(&row)?;
                }
            }
            if *verify_d {
                let tree = deterministic_complexity(&p.to_function()?)?;
                passed &= tree == d;
                writeln!(text, "{} tree search D {tree}", verdict(tree == d))?;
                out["tree_d"] = json!(tree);
            }
            if let Some(trials) = montecarlo {
                let mut runs = Vec::new();
                for w in (0..=*n).filter(|&w| p.label(w).is_defined()) {
                    let hidden: Vec<bool> = (0..*n).map(|i| i < w).collect();
                    let mc = monte_carlo(&p, &hidden, *delta, *trials, cli.seed, exec)?;
                    passed &= mc.consistent_with(*delta);
                    writeln!(
                        text,
                        "{} weight {w}: {}/{} failures, {} samples, 95% CI [{:.4}, {:.4}]",
                        verdict(mc.consistent_with(*delta)),
                        mc.failures,
                        mc.trials,
                        mc.samples,
                        mc.ci.0,
                        mc.ci.1
                    )?;
                    runs.push(json!({ "weight": w, "result": mc }));
                }
                out["montecarlo"] = json!(runs);
            }
            Ok(Outcome {
                json: out,
                text,
                passed,
            })
        }
        Command::Slice { file, verify_bound } => {
            let s = SliceInstance::new(load_pbf(file)?)?;
            let alg = SliceAlgorithm::prepare(&s)?;
            let mut worst = 0;
            let mut correct = true;
            for x in s.f.domain() {
                let r = alg.run(|i| x >> i & 1 == 1)?;
                correct &= Some(r.output) == s.f.value(x).bit();
                worst = worst.max(r.queries);
            }
            let within = worst as f64 <= alg.bound();
            let passed = correct && (!verify_bound || within);
            Ok(Outcome {
                json: json!({
                    "n": s.n(), "k": s.k, "points": s.f.domain_size(),
                    "correct": correct, "max_queries": worst, "bound": alg.bound(), "within_bound": within,
                }),
                text: format!(
                    "slice n {} k {}\n{} outputs on {} points\n{} max queries {worst} <= bound {:.2}\n",
                    s.n(),
                    s.k,
                    verdict(correct),
                    s.f.domain_size(),
                    verdict(within),
                    alg.bound()
                ),
                passed,
            })
        }
        Command::Complete { file, measure, budget } => {
            let f = load_pbf(file)?;
            let m = Measure::parse(measure)?;
            let opt = completion_complexity(&f, m, *budget, exec)?;
            Ok(Outcome {
                text: format!(
                    "{} completion {}{} over {} completions\nwitness {}\n",
                    m.name(),
                    opt.value,
                    if opt.exact { "" } else { " (upper bound)" },
                    opt.evaluated,
                    opt.witness.table_string()
                ),
                json: serde_json::to_value(&opt)?,
                passed: true,
            })
        }
        Command::Admissible { file, poly, c, bias } => {
            let f = load_pbf(file)?;
            let p = parse_poly(&read_file(poly)?).with_context(|| format!("reading {}", poly.display()))?;
            let r = admissibility(&f, &p, *c, *bias)?;
            let mut text = format!(
                "degree {} margin {:.4} covering radius {} eta {}\n",
                r.degree,
                r.margin,
                r.covering_radius,
                opt(r.eta.map(|e| format!("{e:.4}")))
            );
            writeln!(text, "lipschitz {:.4} holds {}", r.lipschitz, r.lipschitz_holds)?;
            writeln!(
                text,
                "influence-sparsity {:.4} holds {}",
                r.influence_sparsity, r.influence_holds
            )?;
            if let Some(b) = &r.biased {
                writeln!(
                    text,
                    "biased {:.4} at bias {} holds {}",
                    b.max_sqrt_influence, b.bias, b.holds
                )?;
            }
            writeln!(text, "{} criterion implies margin", verdict(r.implication_holds))?;
            Ok(Outcome {
                passed: r.implication_holds,
                json: serde_json::to_value(&r)?,
                text,
            })
        }
        Command::PfReduce { file, out } => {
            let cnf = parse_dimacs(&read_file(file)?).with_context(|| format!("reading {}", file.display()))?;
            let lma = reduce_3sat_to_lma(&cnf)?;
            let inst = reduce_lma_to_pf(&lma)?;
            write_file(out, &write_pf_json(&inst))?;
            Ok(Outcome {
                json: json!({ "vars": cnf.vars, "clauses": cnf.clauses.len(), "rows": lma.rows(), "t": inst.t }),
                text: format!(
                    "{} vars {} clauses -> {} rows, arity {}\n",
                    cnf.vars,
                    cnf.clauses.len(),
                    lma.rows(),
                    inst.t
                ),
                passed: true,
            })
        }
        Command::PfSolve { file, origin, effort } => {
            let inst = parse_pf_json(&read_file(file)?).with_context(|| format!("reading {}", file.display()))?;
            let origin = match origin.as_str() {
                "sat-reduced" => Origin::SatReduced,
                "general" => Origin::General,
                o => bail!("unknown origin {o:?}, expected sat-reduced or general"),
            };
            let v = pf_solve_reduced(&inst, origin, *effort, cli.seed, exec);
            let text = match &v {
                PfVerdict::Yes(d) => format!(
                    "YES\ndelta {}\n",
                    d.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(" ")
                ),
                PfVerdict::No => "NO\n".into(),
                PfVerdict::Unknown => "UNKNOWN\n".into(),
            };
            Ok(Outcome {
                json: serde_json::to_value(&v)?,
                text,
                passed: true,
            })
        }
        Command::Verify {
            suite,
            n,
            instances,
            exact_threshold_undefined,
            epsilon,
            out,
            artifacts,
        } => {
            let suite = Suite::parse(suite)?;
            let config = VerifyConfig {
                instances: *instances,
                max_n: *n,
                seed: cli.seed,
                undefined_budget: *exact_threshold_undefined,
                epsilon: *epsilon,
                exec,
            };
            let report = verify_suite(suite, &config)?;
            let mut text = String::new();
            for r in report.records.iter().filter(|r| !r.passed) {
                for c in r.checks.iter().filter(|c| !c.holds) {
                    writeln!(text, "FAIL instance {} (n {}): {}: {}", r.id, r.n, c.name, c.detail)?;
                }
                if let Some(a) = &r.artifact {
                    let path = artifacts.join(&a.file_name);
                    write_file(&path, &a.contents)?;
                    writeln!(text, "replay file {}", path.display())?;
                }
            }
            if let Some(id) = report.minimal_failure {
                writeln!(text, "minimal failing instance {id}")?;
            }
            writeln!(
                text,
                "{} {}: {} instances, {} failures, seed {}",
                verdict(report.passed),
                suite.id(),
                report.instances,
                report.failures,
                report.seed
            )?;
            if let Some(path) = out {
                write_file(path, &report.to_json())?;
            }
            if cli.json && out.is_none() {
                eprint!("{text}");
                text.clear();
            }
            Ok(Outcome {
                passed: report.passed,
                json: serde_json::to_value(&report)?,
                text,
            })
        }
    }
}

fn verdict(holds: bool) -> &'static str {
    if holds {
        "ok"
    } else {
        "FAIL"
    }
}

fn opt(v: Option<impl std::fmt::Display>) -> String {
    v.map_or_else(|| "none".into(), |v| v.to_string())
}

fn bounded(b: &querylab::measures::Bounded) -> String {
    if b.exact {
        b.value.to_string()
    } else {
        format!("{} (upper bound)", b.value)
    }
}
