use serde::{Deserialize, Serialize};

use crate::boolfn::{bitstring, PartialFunction};
use crate::error::{Error, Result};
use crate::measures::blocks::{max_disjoint, min_hitting_size, minimal_blocks, Sensitivity};
use crate::measures::critical::{critical_block_sensitivity, critical_search, Bounded, DEFAULT_UNDEFINED_BUDGET};
use crate::measures::decision_tree::{deterministic_complexity_capped, DEFAULT_EXACT_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureOptions {
    /// Completion search runs only when at most this many points are undefined.
    pub undefined_budget: usize,
    /// Largest arity for the exhaustive decision-tree search.
    pub exact_cap: usize,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        MeasureOptions {
            undefined_budget: DEFAULT_UNDEFINED_BUDGET,
            exact_cap: DEFAULT_EXACT_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointMeasures {
    pub input: String,
    pub value: u8,
    pub s: usize,
    pub s_promise: usize,
    pub bs: usize,
    pub bs_promise: usize,
    pub strict_cert: usize,
    pub promise_cert: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, holds: bool, detail: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            holds,
            detail: detail.into(),
        }
    }

    pub fn le(name: &str, lhs: usize, rhs: usize) -> Check {
        Check {
            name: name.into(),
            holds: lhs <= rhs,
            detail: format!("{lhs} <= {rhs}"),
        }
    }
}

/// Every combinatorial measure of one function with inequality verdicts.
///
/// `strict_cert[b]` is `C_b` (no undefined point may be consistent) and
/// `promise_cert[b]` is `C_b⊥` (undefined points tolerated);
/// `c = max_b C_b⊥` and `c_perp = max_b C_b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub n: usize,
    pub domain_size: usize,
    pub undefined: usize,
    pub s: usize,
    pub s_promise: usize,
    pub bs: usize,
    pub bs_promise: usize,
    pub strict_cert: [usize; 2],
    pub promise_cert: [usize; 2],
    pub c: usize,
    pub c_perp: usize,
    pub cbs: Bounded,
    pub c_crit: Option<Bounded>,
    pub d: Option<usize>,
    pub points: Vec<PointMeasures>,
    pub checks: Vec<Check>,
}

impl MeasureReport {
    pub fn violations(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.holds)
    }

    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

pub fn point_measures(f: &PartialFunction, x: u32) -> Result<PointMeasures> {
    let strict = minimal_blocks(f, x, Sensitivity::Strict)?;
    let promise = minimal_blocks(f, x, Sensitivity::Promise)?;
    let singles = |bs: &[u32]| bs.iter().filter(|b| b.count_ones() == 1).count();
    Ok(PointMeasures {
        input: bitstring(x, f.arity()),
        value: u8::from(f.value(x) == crate::boolfn::Value::One),
        s: singles(&strict),
        s_promise: singles(&promise),
        bs: max_disjoint(&strict),
        bs_promise: max_disjoint(&promise),
        strict_cert: min_hitting_size(&promise),
        promise_cert: min_hitting_size(&strict),
    })
}

pub fn measure_report(f: &PartialFunction, opts: &MeasureOptions) -> Result<MeasureReport> {
    let points = f.domain().map(|x| point_measures(f, x)).collect::<Result<Vec<_>>>()?;
    let max = |g: fn(&PointMeasures) -> usize| points.iter().map(g).max().unwrap_or(0);
    let side = |b: u8, g: fn(&PointMeasures) -> usize| points.iter().filter(|p| p.value == b).map(g).max().unwrap_or(0);
    let strict_cert = [side(0, |p| p.strict_cert), side(1, |p| p.strict_cert)];
    let promise_cert = [side(0, |p| p.promise_cert), side(1, |p| p.promise_cert)];
    let (cbs, c_crit) = match critical_search(f, opts.undefined_budget) {
        Ok(w) => (
            Bounded {
                value: w.cbs,
                exact: true,
            },
            Some(Bounded {
                value: w.c_crit,
                exact: true,
            }),
        ),
        Err(Error::CriticalUnavailable) => (critical_block_sensitivity(f, opts.undefined_budget), None),
        Err(e) => return Err(e),
    };
    let d = match deterministic_complexity_capped(f, opts.exact_cap) {
        Ok(d) => Some(d),
        Err(Error::ExactRefused { .. }) => None,
        Err(e) => return Err(e),
    };
    let mut report = MeasureReport {
        n: f.arity(),
        domain_size: points.len(),
        undefined: f.size() - points.len(),
        s: max(|p| p.s),
        s_promise: max(|p| p.s_promise),
        bs: max(|p| p.bs),
        bs_promise: max(|p| p.bs_promise),
        c: promise_cert[0].max(promise_cert[1]),
        c_perp: strict_cert[0].max(strict_cert[1]),
        strict_cert,
        promise_cert,
        cbs,
        c_crit,
        d,
        checks: Vec::new(),
        points,
    };
    report.checks = checks(&report, f.is_total(), f.is_constant_on_domain());
    Ok(report)
}

fn point_chain(r: &MeasureReport, name: &str, ok: impl Fn(&PointMeasures) -> bool) -> Check {
    let bad: Vec<&str> = r.points.iter().filter(|p| !ok(p)).map(|p| p.input.as_str()).collect();
    Check {
        name: name.into(),
        holds: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("{} points", r.points.len())
        } else {
            format!("fails at {}", bad.join(","))
        },
    }
}

fn checks(r: &MeasureReport, total: bool, constant: bool) -> Vec<Check> {
    let mut out = vec![
        point_chain(r, "s_promise <= bs_promise <= strict_cert", |p| {
            p.s_promise <= p.bs_promise && p.bs_promise <= p.strict_cert
        }),
        point_chain(r, "s <= bs <= promise_cert", |p| p.s <= p.bs && p.bs <= p.promise_cert),
        point_chain(r, "s <= s_promise and bs <= bs_promise", |p| {
            p.s <= p.s_promise && p.bs <= p.bs_promise
        }),
        Check::le("C <= bs * s_promise", r.c, r.bs * r.s_promise),
    ];
    if r.cbs.exact {
        out.push(Check {
            name: "bs <= cbs <= bs_promise".into(),
            holds: r.bs <= r.cbs.value && r.cbs.value <= r.bs_promise,
            detail: format!("{} <= {} <= {}", r.bs, r.cbs.value, r.bs_promise),
        });
    }
    if let Some(d) = r.d {
        let min_promise = r.promise_cert[0].min(r.promise_cert[1]);
        let min_strict = r.strict_cert[0].min(r.strict_cert[1]);
        out.push(Check::le(
            "D <= min_b C_b_promise * bs_promise",
            d,
            min_promise * r.bs_promise,
        ));
        out.push(Check::le("D <= min_b C_b_strict * bs", d, min_strict * r.bs));
        if let Some(cc) = r.c_crit {
            out.push(Check::le("D <= C_crit * cbs", d, cc.value * r.cbs.value));
        }
        let mixed = (r.strict_cert[1] * r.promise_cert[0]).min(r.strict_cert[0] * r.promise_cert[1]);
        out.push(Check::le("D <= min(C_1 * C_0_promise, C_0 * C_1_promise)", d, mixed));
        if r.bs_promise >= 1 {
            out.push(Check::le("D <= bs_promise^3", d, r.bs_promise.pow(3)));
        }
        if constant {
            out.push(Check::le("constant on domain => D = 0", d, 0));
        }
    }
    if total {
        let mut holds = r.s == r.s_promise && r.bs == r.bs_promise && r.c == r.c_perp;
        holds &= r.cbs.exact && r.cbs.value == r.bs;
        holds &= r.c_crit.is_some_and(|c| c.value == r.c);
        out.push(Check {
            name: "total function: promise measures collapse".into(),
            holds,
            detail: format!(
                "s={} s_promise={} bs={} bs_promise={} cbs={} C={} C_perp={} C_crit={:?}",
                r.s,
                r.s_promise,
                r.bs,
                r.bs_promise,
                r.cbs.value,
                r.c,
                r.c_perp,
                r.c_crit.map(|c| c.value)
            ),
        });
    }
    out
}

/// Ratios between the measures whose polynomial equivalence rules out a
/// speedup, plus concrete chains that must hold for every function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeedupReport {
    pub cbs_over_bs_promise: Option<f64>,
    pub c_crit_over_cbs: Option<f64>,
    pub min_strict_cert_over_cbs: Option<f64>,
    pub c_over_c_perp: Option<f64>,
    pub bs_over_s_promise: Option<f64>,
    pub chains: Vec<Check>,
}

fn ratio(a: usize, b: usize) -> Option<f64> {
    (b != 0).then(|| a as f64 / b as f64)
}

pub fn speedup_requirements_report(r: &MeasureReport) -> SpeedupReport {
    let cbs = r.cbs.exact.then_some(r.cbs.value);
    let mut chains = Vec::new();
    if let Some(d) = r.d {
        let a = r.c * r.bs_promise;
        let b = r.bs * r.s_promise * r.bs_promise;
        let c = r.bs_promise.pow(3);
        chains.push(Check {
            name: "D <= C*bs_promise <= bs*s_promise*bs_promise <= bs_promise^3".into(),
            holds: d <= a && a <= b && b <= c,
            detail: format!("{d} <= {a} <= {b} <= {c}"),
        });
        chains.push(Check::le("D <= C * C_perp", d, r.c * r.c_perp));
    }
    SpeedupReport {
        cbs_over_bs_promise: cbs.and_then(|v| ratio(v, r.bs_promise)),
        c_crit_over_cbs: r.c_crit.and_then(|c| cbs.and_then(|v| ratio(c.value, v))),
        min_strict_cert_over_cbs: cbs.and_then(|v| ratio(r.strict_cert[0].min(r.strict_cert[1]), v)),
        c_over_c_perp: ratio(r.c, r.c_perp),
        bs_over_s_promise: ratio(r.bs, r.s_promise),
        chains,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{make_symmetric, slice_from_fn, Value::*};

    #[test]
    fn total_function_collapses() {
        let maj = PartialFunction::total_from_fn(3, |x| x.count_ones() >= 2).unwrap();
        let r = measure_report(&maj, &MeasureOptions::default()).unwrap();
        assert!(r.all_hold(), "{:?}", r.checks);
        assert_eq!((r.s, r.bs, r.c, r.d), (2, 2, 2, Some(3)));
        let sp = speedup_requirements_report(&r);
        assert_eq!(sp.c_over_c_perp, Some(1.0));
        assert_eq!(sp.cbs_over_bs_promise, Some(1.0));
    }

    #[test]
    fn deutsch_jozsa_chain() {
        let dj = make_symmetric(4, &[Zero, Undefined, One, Undefined, Zero]).unwrap();
        let r = measure_report(&dj, &MeasureOptions::default()).unwrap();
        assert_eq!(r.d, Some(3));
        assert!(r.d.unwrap() <= r.bs_promise.pow(3));
        assert!(r.all_hold(), "{:?}", r.checks);
        assert!(speedup_requirements_report(&r).chains.iter().all(|c| c.holds));
    }

    #[test]
    fn separating_slice_values() {
        let f = slice_from_fn(4, 1, |x| x.trailing_zeros() < 2).unwrap();
        let r = measure_report(&f, &MeasureOptions::default()).unwrap();
        assert_eq!(r.promise_cert, [1, 1]);
        assert_eq!(r.strict_cert, [4, 4]);
        assert_eq!((r.c, r.c_perp), (1, 4));
        assert!(r.all_hold());
    }
}
