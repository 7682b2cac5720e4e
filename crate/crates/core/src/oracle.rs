//! Ground truth for the bounds: exact convolutions, seeded Monte Carlo
//! tails, and seeded generators for each log-concavity class.
//!
//! All randomness comes from ChaCha20 (`rand_chacha::ChaCha20Rng`) keyed by
//! `seed_from_u64(seed)`; independent substreams are selected with
//! `set_stream`, so a corpus is reproducible from `(seed, parameters)`
//! alone. Corpus parameters: log-concave exponents start with a slope drawn
//! from `U[−2, 2]` and accumulate second differences drawn from `U[−1, 0]`.

use std::fmt;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use statrs::function::factorial::ln_factorial;

use crate::classify::{self, Order};
use crate::dist::GridDensity;
use crate::{io, ContinuousDist, DiscreteDist, Error, Result, Side};

/// Two-sided 99% standard normal quantile.
pub const Z99: f64 = 2.575_829_303_548_901;

/// Seeded generator on a given substream.
pub fn rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut r = ChaCha20Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Exact law of `X + Y`; untracked masses `a`, `b` combine to `a + b − ab`.
pub fn convolve(d1: &DiscreteDist, d2: &DiscreteDist) -> Result<DiscreteDist> {
    let (a, b) = (d1.probs(), d2.probs());
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &p) in a.iter().enumerate() {
        for (j, &q) in b.iter().enumerate() {
            out[i + j] += p * q;
        }
    }
    let (da, db) = (d1.tail_mass_dropped(), d2.tail_mass_dropped());
    DiscreteDist::with_dropped(d1.offset() + d2.offset(), out, da + db - da * db)
}

/// Law of the sum of all `ds`.
pub fn convolve_all(ds: &[DiscreteDist]) -> Result<DiscreteDist> {
    let (first, rest) = ds
        .split_first()
        .ok_or_else(|| Error::InvalidParameter("no summands".into()))?;
    rest.iter()
        .try_fold(first.clone(), |acc, d| convolve(&acc, d))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    /// 99% normal-approximation half-width.
    pub ci_halfwidth: f64,
    pub samples: u64,
}

const SHARDS: u64 = 8;

/// Empirical `P(Σ wᵢXᵢ ≥ t Σ wᵢ)`.
pub fn mc_tail(
    dists: &[ContinuousDist],
    weights: &[f64],
    t: f64,
    n_samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    mc_tail_side(dists, weights, t, Side::Upper, n_samples, seed)
}

/// Empirical `P(Σ wᵢXᵢ ≥ t Σ wᵢ)` or, below, `P(Σ wᵢXᵢ ≤ t Σ wᵢ)`.
///
/// The samples are split into eight shards; shard `s` draws from stream `s`
/// of the seeded generator, so the estimate does not depend on how shards
/// are scheduled.
pub fn mc_tail_side(
    dists: &[ContinuousDist],
    weights: &[f64],
    t: f64,
    side: Side,
    n_samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    if n_samples < 10_000 {
        return Err(Error::InvalidParameter(format!(
            "{n_samples} samples; at least 10000 required"
        )));
    }
    if dists.is_empty() || dists.len() != weights.len() {
        return Err(Error::InvalidParameter(
            "need one weight per summand".into(),
        ));
    }
    let threshold = t * weights.iter().sum::<f64>();
    let per = n_samples / SHARDS;
    let mut hits = 0u64;
    for s in 0..SHARDS {
        let mut r = rng(seed, s);
        let n = if s == SHARDS - 1 {
            n_samples - per * (SHARDS - 1)
        } else {
            per
        };
        for _ in 0..n {
            let total: f64 = dists
                .iter()
                .zip(weights)
                .map(|(d, w)| w * d.sample(&mut r))
                .sum();
            let hit = match side {
                Side::Upper => total >= threshold,
                Side::Lower => total <= threshold,
            };
            if hit {
                hits += 1;
            }
        }
    }
    let p = hits as f64 / n_samples as f64;
    Ok(McEstimate {
        estimate: p,
        ci_halfwidth: Z99 * (p * (1.0 - p) / n_samples as f64).sqrt(),
        samples: n_samples,
    })
}

/// Target class of a generated draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenClass {
    Lc,
    Ulc,
    /// Ultra log-concave of order `n`.
    UlcN(u64),
}

impl GenClass {
    fn stream(self) -> u64 {
        match self {
            GenClass::Lc => 1,
            GenClass::Ulc => 2,
            GenClass::UlcN(n) => 1000 + n,
        }
    }
}

impl fmt::Display for GenClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenClass::Lc => f.write_str("lc"),
            GenClass::Ulc => f.write_str("ulc"),
            GenClass::UlcN(n) => write!(f, "ulc{n}"),
        }
    }
}

/// Random concave sequence of log-weights, starting at zero.
fn concave_exponents<R: Rng>(r: &mut R, len: usize) -> Vec<f64> {
    let mut slope = r.random_range(-2.0..=2.0);
    let mut v = 0.0;
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(v);
        v += slope;
        slope += r.random_range(-1.0..=0.0);
    }
    out
}

/// Normalizes `exp(logw)`, dropping entries below `e^{−600}` relative to the peak.
fn from_log_weights(logw: &[f64]) -> Result<DiscreteDist> {
    let top = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logw
        .iter()
        .map(|l| {
            if l - top < -600.0 {
                0.0
            } else {
                (l - top).exp()
            }
        })
        .collect();
    DiscreteDist::from_weights(0, &w)
}

/// A seeded draw on `{0..support_size−1}` belonging to `class`.
///
/// Panics if the draw fails the class check, which the construction rules out.
pub fn gen_log_concave(seed: u64, support_size: usize, class: GenClass) -> Result<DiscreteDist> {
    if support_size == 0 {
        return Err(Error::InvalidParameter(
            "support size must be at least 1".into(),
        ));
    }
    if let GenClass::UlcN(n) = class {
        if support_size as u64 > n + 1 {
            return Err(Error::InvalidParameter(format!(
                "support size {support_size} exceeds n + 1 = {}",
                n + 1
            )));
        }
    }
    let mut r = rng(seed, class.stream());
    let mut logw = concave_exponents(&mut r, support_size);
    match class {
        GenClass::Lc => {}
        GenClass::Ulc => {
            let lambda: f64 = r.random_range(0.5..=8.0);
            for (k, l) in logw.iter_mut().enumerate() {
                *l += k as f64 * lambda.ln() - ln_factorial(k as u64);
            }
        }
        GenClass::UlcN(n) => {
            let q: f64 = r.random_range(0.1..=0.9);
            for (k, l) in logw.iter_mut().enumerate() {
                let k = k as u64;
                *l += statrs::function::factorial::ln_binomial(n, k)
                    + k as f64 * q.ln()
                    + (n - k) as f64 * (1.0 - q).ln();
            }
        }
    }
    let d = from_log_weights(&logw)?;
    let ok = match class {
        GenClass::Lc => classify::is_log_concave_discrete(&d).is_member,
        GenClass::Ulc => classify::is_ulc(&d, Order::Infinite)?.is_member,
        GenClass::UlcN(n) => classify::is_ulc(&d, Order::Finite(n))?.is_member,
    };
    assert!(
        ok,
        "generated {class} draw for seed {seed} fails its class check"
    );
    Ok(d)
}

/// A seeded log-concave density on `[0, segments/4]`: the log-density is
/// piecewise linear with non-increasing slopes.
pub fn gen_log_concave_density(seed: u64, segments: usize) -> Result<ContinuousDist> {
    if segments == 0 {
        return Err(Error::InvalidParameter(
            "at least one segment required".into(),
        ));
    }
    let mut r = rng(seed, 3);
    let h = 0.25;
    let xs: Vec<f64> = (0..=segments).map(|i| i as f64 * h).collect();
    let mut slope = r.random_range(-2.0..=2.0);
    let mut v = 0.0;
    let mut ln = Vec::with_capacity(segments + 1);
    for _ in 0..=segments {
        ln.push(v);
        v += slope * h;
        slope += r.random_range(-1.0..=0.0);
    }
    let top = ln.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let fs: Vec<f64> = ln.iter().map(|l| (l - top).exp()).collect();
    Ok(ContinuousDist::grid(GridDensity::normalized(xs, fs)?))
}

/// Writes one `{class}_{seed}.csv` file per seed and returns the paths.
pub fn dump_corpus(
    dir: &Path,
    class: GenClass,
    seeds: &[u64],
    support_size: usize,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let d = gen_log_concave(seed, support_size, class)?;
        let path = dir.join(format!("{class}_{seed}.csv"));
        std::fs::write(&path, io::write_pmf(&d))?;
        paths.push(path);
    }
    Ok(paths)
}
