//! Proportion of proper elements in types A, B and D: Monte Carlo estimates,
//! exact small-`n` proportions, and the explicit exponential upper bounds.
//!
//! Sampling uses `ChaCha8Rng` from `rand_chacha` 0.3. Sample `i` of a run
//! with seed `s` draws from `ChaCha8Rng::seed_from_u64(s)` on stream `i`, so
//! every draw depends only on `(s, i)` and not on how samples are split
//! across threads.

use std::collections::BTreeMap;
use std::path::Path;

use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumerate::thread_pool;
use crate::error::{Error, Result};
use crate::perm::{insertion_chain_with, sample_uniform, visit_elements, Family, ModelElement};
use crate::proper::is_proper_model;

/// Name and version of the sampling generator, for run manifests.
pub const RNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.3), seed_from_u64(seed), stream = sample index";

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959963984540054;

/// Default cap on group order for [`exhaustive_proportion`].
pub const EXHAUSTIVE_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProportionEstimate {
    pub family: Family,
    pub n: usize,
    pub samples: u64,
    pub hits: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

impl ProportionEstimate {
    /// The confidence interval widened `factor` times about the estimate,
    /// clipped to `[0, 1]`.
    pub fn widened(&self, factor: f64) -> (f64, f64) {
        let lo = self.estimate - factor * (self.estimate - self.ci_low);
        let hi = self.estimate + factor * (self.ci_high - self.estimate);
        (lo.max(0.0), hi.min(1.0))
    }
}

/// Wilson score interval for `hits` successes in `samples` trials.
pub fn wilson_interval(hits: u64, samples: u64, z: f64) -> (f64, f64) {
    if samples == 0 {
        return (0.0, 1.0);
    }
    let n = samples as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // Clamp so that low ≤ p ≤ high survives rounding at p = 0 or 1.
    ((centre - half).clamp(0.0, p), (centre + half).clamp(p, 1.0))
}

/// The generator for sample `index` of a run seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Monte Carlo estimate of `Pr[w is proper]` for `w` uniform in the family's
/// group with `n` values, using `threads` workers (0 = all cores).
pub fn estimate_proportion(family: Family, n: usize, samples: u64, seed: u64, threads: usize) -> Result<ProportionEstimate> {
    if samples == 0 {
        return Err(Error::param("at least one sample is required"));
    }
    if n == 0 {
        return Err(Error::param("n must be at least 1"));
    }
    let pool = thread_pool(threads)?;
    let hits = pool.install(|| {
        (0..samples)
            .into_par_iter()
            .map(|i| {
                let w = sample_uniform(family, n, &mut sample_rng(seed, i));
                is_proper_model(family, &w).map(u64::from)
            })
            .try_reduce(|| 0, |a, b| Ok(a + b))
    })?;
    let (ci_low, ci_high) = wilson_interval(hits, samples, Z_95);
    Ok(ProportionEstimate { family, n, samples, hits, estimate: hits as f64 / samples as f64, ci_low, ci_high, seed })
}

/// Order of the model group with `n` values, if it fits in 64 bits.
pub fn model_order(family: Family, n: usize) -> Option<u64> {
    let fact = (1..=n as u64).try_fold(1u64, |acc, k| acc.checked_mul(k))?;
    match family {
        Family::A => Some(fact),
        Family::B => 1u64.checked_shl(n as u32).and_then(|p| p.checked_mul(fact)),
        Family::D => 1u64.checked_shl(n.saturating_sub(1) as u32).and_then(|p| p.checked_mul(fact)),
    }
}

/// Exact `#proper / |W|`, unreduced so that the order stays visible.
#[derive(Debug, Copy, Clone, PartialEq, Eq)]
pub struct ExactProportion {
    pub proper: u64,
    pub order: u64,
}

impl ExactProportion {
    pub fn ratio(self) -> Ratio<u64> {
        Ratio::new(self.proper, self.order)
    }

    pub fn value(self) -> f64 {
        self.proper as f64 / self.order as f64
    }
}

impl std::fmt::Display for ExactProportion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.proper, self.order)
    }
}

pub fn exhaustive_proportion(family: Family, n: usize, cap: u64) -> Result<ExactProportion> {
    if n == 0 {
        return Err(Error::param("n must be at least 1"));
    }
    let order = model_order(family, n).filter(|&o| o <= cap).ok_or_else(|| {
        Error::Resource(format!("{family}{n} has more than {cap} elements; use sampling instead"))
    })?;
    let mut proper = 0;
    let mut seen = 0;
    let mut failure = None;
    visit_elements(family, n, |w| {
        seen += 1;
        match is_proper_model(family, w) {
            Ok(true) => proper += 1,
            Ok(false) => {}
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    debug_assert_eq!(seen, order);
    Ok(ExactProportion { proper, order })
}

fn check_bound_n(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::param(format!("the bounds need n ≥ 2, got {n}")));
    }
    Ok(n as f64)
}

/// `2e^{−(n−2)/256} + e^{−3n³/(64(n−1)(2n−1))}`, an upper bound on the
/// type-A proportion valid for sufficiently large `n`. It exceeds 1 until
/// `n` is in the hundreds.
pub fn bound_a(n: usize) -> Result<f64> {
    let x = check_bound_n(n)?;
    Ok(2.0 * (-(x - 2.0) / 256.0).exp() + (-3.0 * x.powi(3) / (64.0 * (x - 1.0) * (2.0 * x - 1.0))).exp())
}

/// `2e^{−(n−2)/256} + e^{−3n³/(256(n−1)(2n−1))}`, the type-B and type-D
/// counterpart of [`bound_a`], with the same caveat.
pub fn bound_bd(n: usize) -> Result<f64> {
    let x = check_bound_n(n)?;
    Ok(2.0 * (-(x - 2.0) / 256.0).exp() + (-3.0 * x.powi(3) / (256.0 * (x - 1.0) * (2.0 * x - 1.0))).exp())
}

pub fn bound_for(family: Family, n: usize) -> Option<f64> {
    match family {
        Family::A => bound_a(n).ok(),
        Family::B | Family::D => bound_bd(n).ok(),
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub family: Family,
    pub n: usize,
    pub samples: u64,
    pub hits: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
    pub bound: Option<f64>,
}

impl From<&ProportionEstimate> for CsvRow {
    fn from(e: &ProportionEstimate) -> Self {
        CsvRow {
            family: e.family,
            n: e.n,
            samples: e.samples,
            hits: e.hits,
            estimate: e.estimate,
            ci_low: e.ci_low,
            ci_high: e.ci_high,
            seed: e.seed,
            bound: bound_for(e.family, e.n),
        }
    }
}

pub const CSV_HEADER: &str = "family,n,samples,hits,estimate,ci_low,ci_high,seed,bound";

pub fn emit_csv(path: &Path, estimates: &[ProportionEstimate]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(csv_error)?;
    w.write_record(CSV_HEADER.split(',')).map_err(csv_error)?;
    for e in estimates {
        w.serialize(CsvRow::from(e)).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn parse_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_error)?;
    let header = r.headers().map_err(csv_error)?.iter().collect::<Vec<_>>().join(",");
    if header != CSV_HEADER {
        return Err(Error::Format { path: path.to_path_buf(), line: 1, message: format!("unexpected header {header:?}") });
    }
    r.deserialize()
        .enumerate()
        .map(|(i, row)| {
            row.map_err(|e| Error::Format { path: path.to_path_buf(), line: i + 2, message: e.to_string() })
        })
        .collect()
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Internal(format!("{other:?}")),
    }
}

/// Exact outcome distribution of the insertion chain for `n ≤` small values,
/// by walking every choice path with its exact probability. Keys are one-line
/// notations.
pub fn insertion_chain_distribution(family: Family, n: usize) -> Result<BTreeMap<String, Ratio<u64>>> {
    let options: Vec<u64> = (1..=n as u64)
        .map(|t| match family {
            Family::A => Ok(t),
            Family::B => Ok(2 * t),
            Family::D => Err(Error::param("the insertion chain is defined for families A and B")),
        })
        .collect::<Result<_>>()?;
    let paths: u64 = options.iter().product();
    if paths > EXHAUSTIVE_CAP {
        return Err(Error::Resource(format!("{paths} insertion paths exceed the cap")));
    }
    let mut dist: BTreeMap<String, Ratio<u64>> = BTreeMap::new();
    for path in 0..paths {
        // Mixed-radix digits of `path` give the choice at each step.
        let mut rest = path;
        let mut prob = Ratio::from_integer(1u64);
        let w = insertion_chain_with(family, n, |k| {
            let c = rest % k as u64;
            rest /= k as u64;
            prob /= k as u64;
            c as usize
        })?;
        let key = match &w {
            ModelElement::Perm(p) => p.to_string(),
            ModelElement::Signed(p) => p.to_string(),
        };
        *dist.entry(key).or_insert_with(|| Ratio::from_integer(0)) += prob;
    }
    Ok(dist)
}
