//! Symmetric partial functions: gap, exact decision-tree depth, the
//! symmetrization degree bound and the sampling classifier.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boolfn::{make_symmetric, PartialFunction, Value};
use crate::error::{Error, Result};
use crate::par::Exec;

/// Constant `c₀` in `t = c₀ · (n/Γ)² · ln(1/δ)`. Hoeffding with deviation
/// `Γ/(2n)` gives failure at most `2δ^{c₀/2}`, which is `≤ δ` for `δ ≤ 1/2`.
pub const SAMPLING_CONSTANT: f64 = 4.0;

/// Labels indexed by Hamming weight `0..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightProfile {
    pub n: usize,
    pub labels: Vec<Value>,
}

impl WeightProfile {
    pub fn new(n: usize, labels: Vec<Value>) -> Result<Self> {
        if labels.len() != n + 1 {
            return Err(Error::TableLength {
                expected: n + 1,
                got: labels.len(),
            });
        }
        if labels.iter().all(|v| !v.is_defined()) {
            return Err(Error::InvalidArgument("profile has no defined weight".into()));
        }
        Ok(WeightProfile { n, labels })
    }

    /// Parses `"w:label,..."` with labels `0`, `1` or `*`; unlisted weights
    /// are undefined.
    pub fn parse(n: usize, s: &str) -> Result<Self> {
        let mut labels = vec![Value::Undefined; n + 1];
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (w, l) = item
                .split_once(':')
                .ok_or_else(|| Error::InvalidArgument(format!("expected w:label, got {item:?}")))?;
            let w: usize = w
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad weight {w:?}")))?;
            if w > n {
                return Err(Error::InvalidArgument(format!("weight {w} exceeds n = {n}")));
            }
            let mut chars = l.trim().chars();
            let v = match (chars.next(), chars.next()) {
                (Some(c), None) => Value::from_char(c),
                _ => None,
            }
            .ok_or_else(|| Error::InvalidArgument(format!("bad label {l:?}")))?;
            labels[w] = v;
        }
        Self::new(n, labels)
    }

    /// Inverse of [`WeightProfile::parse`], defined weights only.
    pub fn render(&self) -> String {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_defined())
            .map(|(w, v)| format!("{w}:{}", v.to_char()))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn label(&self, w: usize) -> Value {
        self.labels[w]
    }

    pub fn to_function(&self) -> Result<PartialFunction> {
        make_symmetric(self.n, &self.labels)
    }

    /// A profile with each weight labelled `0`, `1` or `*` uniformly, with at
    /// least one defined weight.
    pub fn random(n: usize, rng: &mut impl Rng) -> Self {
        loop {
            let labels: Vec<Value> = (0..=n)
                .map(|_| match rng.gen_range(0..3) {
                    0 => Value::Zero,
                    1 => Value::One,
                    _ => Value::Undefined,
                })
                .collect();
            if let Ok(p) = Self::new(n, labels) {
                return p;
            }
        }
    }
}

/// Smallest weight difference between conflicting defined weights.
pub fn gap(profile: &WeightProfile) -> Option<usize> {
    let weights = |b: bool| {
        profile
            .labels
            .iter()
            .enumerate()
            .filter(move |(_, v)| v.bit() == Some(b))
            .map(|(w, _)| w)
    };
    weights(false)
        .flat_map(|u| weights(true).map(move |v| u.abs_diff(v)))
        .min()
}

/// `n - Γ + 1`, or 0 for a profile constant on its domain.
pub fn exact_deterministic(profile: &WeightProfile) -> usize {
    gap(profile).map_or(0, |g| profile.n - g + 1)
}

/// `√(n / (3Γ))`.
pub fn adeg_lower_bound(profile: &WeightProfile) -> Result<f64> {
    let g = gap(profile).ok_or_else(|| Error::InvalidArgument("constant profile has no degree bound".into()))?;
    Ok((profile.n as f64 / (3.0 * g as f64)).sqrt())
}

/// Number of coordinates sampled for failure probability `delta`, capped at `n`.
pub fn sample_count(n: usize, gap: usize, delta: f64) -> usize {
    let t = SAMPLING_CONSTANT * (n as f64 / gap as f64).powi(2) * (1.0 / delta).ln();
    if t >= n as f64 {
        n
    } else {
        t.ceil() as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub output: bool,
    pub samples: usize,
}

/// Samples coordinates without replacement and outputs the label of the
/// defined weight nearest to the scaled estimate (ties to the lower weight).
pub fn sampling_classifier(
    profile: &WeightProfile,
    oracle: impl Fn(usize) -> bool,
    delta: f64,
    rng: &mut impl Rng,
) -> Result<Classification> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::InvalidArgument(format!(
            "failure probability {delta} outside (0, 1/2]"
        )));
    }
    let Some(g) = gap(profile) else {
        let v = profile
            .labels
            .iter()
            .find_map(|v| v.bit())
            .expect("profile has a defined weight");
        return Ok(Classification { output: v, samples: 0 });
    };
    let n = profile.n;
    let t = sample_count(n, g, delta);
    let ones = index::sample(rng, n, t).into_iter().filter(|&i| oracle(i)).count();
    let estimate = ones as f64 * n as f64 / t as f64;
    let nearest = profile
        .labels
        .iter()
        .enumerate()
        .filter_map(|(w, v)| v.bit().map(|b| (w, b)))
        .min_by(|a, b| {
            (a.0 as f64 - estimate)
                .abs()
                .total_cmp(&(b.0 as f64 - estimate).abs())
                .then(a.0.cmp(&b.0))
        })
        .expect("profile has a defined weight");
    Ok(Classification {
        output: nearest.1,
        samples: t,
    })
}

/// Empirical error of [`sampling_classifier`] on one hidden input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarlo {
    pub trials: usize,
    pub failures: usize,
    pub samples: usize,
    pub rate: f64,
    /// 95% Wilson score interval.
    pub ci: (f64, f64),
}

impl MonteCarlo {
    /// Whether the target rate lies at or above the lower confidence limit.
    pub fn consistent_with(&self, delta: f64) -> bool {
        self.ci.0 <= delta
    }
}

fn wilson(failures: usize, trials: usize) -> (f64, f64) {
    let z = 1.96f64;
    let n = trials as f64;
    let p = failures as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Runs `trials` independent classifications of `hidden`, trial `i` seeded from
/// stream `i` of `seed`.
pub fn monte_carlo(
    profile: &WeightProfile,
    hidden: &[bool],
    delta: f64,
    trials: usize,
    seed: u64,
    exec: Exec,
) -> Result<MonteCarlo> {
    if hidden.len() != profile.n {
        return Err(Error::ArityMismatch {
            expected: profile.n,
            got: hidden.len(),
        });
    }
    let weight = hidden.iter().filter(|&&b| b).count();
    let truth = profile
        .label(weight)
        .bit()
        .ok_or_else(|| Error::InvalidArgument(format!("hidden input of weight {weight} is off the domain")))?;
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial required".into()));
    }
    let runs = exec.map(trials, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        sampling_classifier(profile, |j| hidden[j], delta, &mut rng)
    });
    let runs: Vec<Classification> = runs.into_iter().collect::<Result<_>>()?;
    let failures = runs.iter().filter(|r| r.output != truth).count();
    Ok(MonteCarlo {
        trials,
        failures,
        samples: runs[0].samples,
        rate: failures as f64 / trials as f64,
        ci: wilson(failures, trials),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    None,
    Polynomial,
    Superpolynomial,
    Exponential,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeRow {
    pub n: usize,
    pub gap: usize,
    pub deterministic: usize,
    /// `n/Γ`, the order of the quantum query complexity.
    pub quantum_order: f64,
    pub regime: Regime,
}

/// Classifies by the exponent `q = log_n(n/Γ)`: `q ≤ 1/4` exponential,
/// `q ≤ 2/5` superpolynomial, `q ≤ 3/4` polynomial, otherwise none.
pub fn regime_report(n: usize, gap: usize) -> Result<RegimeRow> {
    if gap == 0 || gap > n || n < 2 {
        return Err(Error::InvalidArgument(format!("gap {gap} outside 1..={n}")));
    }
    let quantum_order = n as f64 / gap as f64;
    let q = quantum_order.ln() / (n as f64).ln();
    let regime = if q <= 0.25 {
        Regime::Exponential
    } else if q <= 0.4 {
        Regime::Superpolynomial
    } else if q <= 0.75 {
        Regime::Polynomial
    } else {
        Regime::None
    };
    Ok(RegimeRow {
        n,
        gap,
        deterministic: n - gap + 1,
        quantum_order,
        regime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::deterministic_complexity;

    fn deutsch_jozsa(n: usize) -> WeightProfile {
        WeightProfile::parse(n, &format!("0:0,{n}:0,{}:1", n / 2)).unwrap()
    }

    #[test]
    fn gap_and_formula_examples() {
        let p = WeightProfile::parse(4, "0:0,4:1").unwrap();
        assert_eq!(gap(&p), Some(4));
        assert_eq!(exact_deterministic(&p), 1);
        let dj = deutsch_jozsa(4);
        assert_eq!(gap(&dj), Some(2));
        assert_eq!(exact_deterministic(&dj), 3);
        assert_eq!(deterministic_complexity(&dj.to_function().unwrap()).unwrap(), 3);
        let zero = WeightProfile::parse(3, "0:0,1:0,2:0,3:0").unwrap();
        assert_eq!(gap(&zero), None);
        assert_eq!(exact_deterministic(&zero), 0);
        assert!(adeg_lower_bound(&zero).is_err());
        assert_eq!(WeightProfile::parse(4, "0:0, 4:1").unwrap().render(), "0:0,4:1");
        assert!(WeightProfile::parse(4, "5:1").is_err());
        assert!(WeightProfile::parse(4, "2:x").is_err());
        assert!(WeightProfile::parse(4, "").is_err());
    }

    #[test]
    fn degree_bound_arithmetic() {
        let p = WeightProfile::parse(12, "0:0,4:1").unwrap();
        assert!((adeg_lower_bound(&p).unwrap() - 1.0).abs() < 1e-12);
        assert!((adeg_lower_bound(&deutsch_jozsa(4)).unwrap() - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    // Hamming distance form of the gap, by brute force over the cube.
    fn oracle_gap(f: &PartialFunction) -> Option<usize> {
        let ones = f.preimage(true);
        f.preimage(false)
            .iter()
            .flat_map(|&x| ones.iter().map(move |&y| (x ^ y).count_ones() as usize))
            .min()
    }

    #[test]
    fn random_profiles_match_tree_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..60 {
            let n = rng.gen_range(1..=8);
            let p = WeightProfile::random(n, &mut rng);
            let f = p.to_function().unwrap();
            assert_eq!(gap(&p), oracle_gap(&f), "{}", p.render());
            assert_eq!(
                deterministic_complexity(&f).unwrap(),
                exact_deterministic(&p),
                "{}",
                p.render()
            );
        }
    }

    #[test]
    fn sampling_sizes_and_full_read() {
        let p = WeightProfile::parse(64, "0:0,64:1").unwrap();
        assert_eq!(sample_count(64, 64, 0.05), (4.0 * (20.0f64).ln()).ceil() as usize);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = sampling_classifier(&p, |_| true, 0.05, &mut rng).unwrap();
        assert!(r.output);
        let small = deutsch_jozsa(6);
        assert_eq!(sample_count(6, 3, 0.1), 6);
        for x in small.to_function().unwrap().domain().collect::<Vec<_>>() {
            let r = sampling_classifier(&small, |j| x >> j & 1 == 1, 0.1, &mut rng).unwrap();
            assert_eq!(Value::from_bit(r.output), small.label(x.count_ones() as usize));
            assert_eq!(r.samples, 6);
        }
        let constant = WeightProfile::parse(5, "2:1").unwrap();
        let r = sampling_classifier(&constant, |_| panic!("no queries"), 0.1, &mut rng).unwrap();
        assert_eq!((r.output, r.samples), (true, 0));
        assert!(sampling_classifier(&p, |_| true, 0.7, &mut rng).is_err());
    }

    #[test]
    fn deutsch_jozsa_monte_carlo() {
        let dj = deutsch_jozsa(64);
        let x: Vec<bool> = (0..64).map(|i| i % 2 == 0).collect();
        let mc = monte_carlo(&dj, &x, 0.05, 1000, 7, Exec::default()).unwrap();
        assert!(mc.samples < 64);
        assert!(mc.consistent_with(0.05), "{mc:?}");
        let again = monte_carlo(&dj, &x, 0.05, 1000, 7, Exec::Sequential).unwrap();
        assert_eq!(mc, again);
    }

    #[test]
    fn regimes() {
        assert_eq!(regime_report(64, 32).unwrap().regime, Regime::Exponential);
        assert_eq!(regime_report(64, 1).unwrap().regime, Regime::None);
        assert_eq!(regime_report(64, 8).unwrap().regime, Regime::Polynomial);
        assert_eq!(regime_report(64, 64 - 8).unwrap().regime, Regime::Exponential);
        assert_eq!(regime_report(64, 8).unwrap().deterministic, 57);
        assert!(regime_report(4, 0).is_err());
    }
}
