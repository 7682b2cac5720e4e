//! Convex-order machinery: sign partitions of density differences,
//! matched-mean log-affine majorants, monotone pushforwards, and direct
//! certification of `X ≺_cx Z` through the stop-loss gap
//! `Ψ(λ) = E[(Z − λ)₊] − E[(X − λ)₊]`.

use crate::{tol, ContinuousDist, DiscreteDist, DiscreteFamily, Dist, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
    Zero,
}

impl Sign {
    fn of(v: f64) -> Sign {
        if v.abs() <= tol::TIE_BAND {
            Sign::Zero
        } else if v > 0.0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
            Sign::Zero => '0',
        }
    }
}

/// Run of grid indices (inclusive) sharing one sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Run {
    pub lo: i64,
    pub hi: i64,
    pub sign: Sign,
}

/// Minimal sign partition of `f − g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossingReport {
    pub count: usize,
    pub partition: Vec<Run>,
}

impl CrossingReport {
    /// Signs of the partition as a string such as `-+-`.
    pub fn pattern(&self) -> String {
        self.partition.iter().map(|r| r.sign.symbol()).collect()
    }
}

/// Crossing count of `f − g` over a common grid with indices starting at
/// `start`. Ties within `1e−12` are absorbed by their neighbors.
pub fn crossing_count_from(start: i64, f: &[f64], g: &[f64]) -> Result<CrossingReport> {
    if f.len() != g.len() {
        return Err(Error::InvalidParameter(format!(
            "grids differ: {} vs {} points",
            f.len(),
            g.len()
        )));
    }
    let mut runs: Vec<Run> = Vec::new();
    let mut leading_ties = 0i64;
    for (i, (a, b)) in f.iter().zip(g).enumerate() {
        let k = start + i as i64;
        let s = Sign::of(a - b);
        match (s, runs.last_mut()) {
            (Sign::Zero, None) => leading_ties += 1,
            (Sign::Zero, Some(r)) => r.hi = k,
            (s, Some(r)) if r.sign == s => r.hi = k,
            (s, _) => {
                let lo = if runs.is_empty() { k - leading_ties } else { k };
                runs.push(Run { lo, hi: k, sign: s });
            }
        }
    }
    if runs.is_empty() {
        let hi = start + f.len() as i64 - 1;
        return Ok(CrossingReport {
            count: 0,
            partition: vec![Run {
                lo: start,
                hi,
                sign: Sign::Zero,
            }],
        });
    }
    Ok(CrossingReport {
        count: runs.len() - 1,
        partition: runs,
    })
}

pub fn crossing_count(f: &[f64], g: &[f64]) -> Result<CrossingReport> {
    crossing_count_from(0, f, g)
}

/// Crossing count of `P(X = k) − P(Z = k)` over the union of both heads.
pub fn crossing_count_dists(x: &DiscreteDist, z: &DiscreteDist) -> CrossingReport {
    let lo = x.min_k().min(z.min_k());
    let hi = x.max_k().max(z.max_k());
    let f: Vec<f64> = (lo..=hi).map(|k| x.pmf(k)).collect();
    let g: Vec<f64> = (lo..=hi).map(|k| z.pmf(k)).collect();
    crossing_count_from(lo, &f, &g).expect("aligned grids")
}

/// Log-affine reference family used to build a matched-mean majorant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    /// Geometric on `{start, start + 1, …}`.
    GeometricFrom(i64),
    /// Binomial on `{0..n}`.
    Binomial(u64),
    Poisson,
    /// Exponential on `[0, ∞)`.
    Exponential,
}

/// The reference-family law with the same mean as `x`.
pub fn matched_mean_log_affine(x: &Dist, reference: Reference) -> Result<Dist> {
    let m = x.mean()?;
    matched_mean(m, reference)
}

/// The reference-family law with mean `m`.
pub fn matched_mean(m: f64, reference: Reference) -> Result<Dist> {
    let out_of_range =
        |range: &str| Error::Precondition(format!("mean {m} outside achievable range {range}"));
    let z: Dist = match reference {
        Reference::GeometricFrom(start) => {
            if !(m > start as f64 && m.is_finite()) {
                return Err(out_of_range(&format!("({start}, inf)")));
            }
            let p = 1.0 / (m - start as f64 + 1.0);
            DiscreteFamily::geometric_from(p, start)?
                .materialize()?
                .into()
        }
        Reference::Binomial(n) => {
            if !(0.0..=n as f64).contains(&m) {
                return Err(out_of_range(&format!("[0, {n}]")));
            }
            DiscreteFamily::binomial(n, (m / n as f64).min(1.0))?
                .materialize()?
                .into()
        }
        Reference::Poisson => {
            if !(m > 0.0 && m.is_finite()) {
                return Err(out_of_range("(0, inf)"));
            }
            DiscreteFamily::poisson(m)?.materialize()?.into()
        }
        Reference::Exponential => {
            if !(m > 0.0 && m.is_finite()) {
                return Err(out_of_range("(0, inf)"));
            }
            ContinuousDist::exponential(1.0 / m)?.into()
        }
    };
    let mz = z.mean()?;
    if (mz - m).abs() > 1e-10 * m.abs().max(1.0) {
        return Err(Error::MeanMismatch { x: m, z: mz });
    }
    Ok(z)
}

/// Non-decreasing integer map used for pushforwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MonotoneMap {
    /// `k ↦ a k + b` with `a ≥ 0`.
    Affine { a: i64, b: i64 },
    /// `k ↦ (k − r)·1{k ≥ r}`.
    FloorShift(i64),
    /// `k ↦ values[k − start]` on the table, clamped to `values[0]` below
    /// it and continued with slope `extend_slope ≥ 0` above it.
    Table {
        start: i64,
        values: Vec<i64>,
        extend_slope: i64,
    },
}

impl MonotoneMap {
    pub fn identity() -> Self {
        MonotoneMap::Affine { a: 1, b: 0 }
    }

    pub fn affine(a: i64, b: i64) -> Result<Self> {
        if a < 0 {
            return Err(Error::InvalidParameter(format!(
                "affine slope {a} is negative"
            )));
        }
        Ok(MonotoneMap::Affine { a, b })
    }

    pub fn table(start: i64, values: Vec<i64>, extend_slope: i64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("empty table".into()));
        }
        if let Some(i) = values.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter(format!(
                "table decreases at k = {}",
                start + i as i64 + 1
            )));
        }
        if extend_slope < 0 {
            return Err(Error::InvalidParameter(
                "table extension slope is negative".into(),
            ));
        }
        Ok(MonotoneMap::Table {
            start,
            values,
            extend_slope,
        })
    }

    pub fn apply(&self, k: i64) -> i64 {
        match self {
            MonotoneMap::Affine { a, b } => a * k + b,
            MonotoneMap::FloorShift(r) => {
                if k >= *r {
                    k - r
                } else {
                    0
                }
            }
            MonotoneMap::Table {
                start,
                values,
                extend_slope,
            } => {
                let i = k - start;
                if i < 0 {
                    values[0]
                } else if (i as usize) < values.len() {
                    values[i as usize]
                } else {
                    let last = values.len() as i64 - 1;
                    values[last as usize] + extend_slope * (i - last)
                }
            }
        }
    }
}

/// Law of `T(X)`. A truncated law keeps its dropped mass, now untracked.
pub fn pushforward(d: &DiscreteDist, t: &MonotoneMap) -> Result<DiscreteDist> {
    let images: Vec<i64> = (d.min_k()..=d.max_k()).map(|k| t.apply(k)).collect();
    if let Some(w) = images.windows(2).find(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter(format!(
            "map decreases: {} then {}",
            w[0], w[1]
        )));
    }
    let lo = images[0];
    let hi = *images.last().expect("non-empty");
    let mut probs = vec![0.0; (hi - lo + 1) as usize];
    for (y, p) in images.iter().zip(d.probs()) {
        probs[(y - lo) as usize] += p;
    }
    DiscreteDist::with_dropped(lo, probs, d.tail_mass_dropped())
}

/// Outcome of a stop-loss certification of `X ≺_cx Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexOrderReport {
    /// `(λ, Ψ(λ))` on the grid.
    pub psi: Vec<(f64, f64)>,
    pub min_psi: f64,
    pub argmin: f64,
    /// `max(0, −min Ψ)`.
    pub max_violation: f64,
    pub tolerance: f64,
    pub is_member: bool,
}

/// Stop-loss gap `Ψ(λ) = E[(Z − λ)₊] − E[(X − λ)₊]` on `grid`.
/// Equal means are required; the verdict is `min Ψ ≥ −tolerance` where the
/// tolerance is `1e−9` plus the untracked mass times the grid span.
pub fn verify_convex_order(x: &Dist, z: &Dist, grid: &[f64]) -> Result<ConvexOrderReport> {
    let (mx, mz) = (x.mean()?, z.mean()?);
    if (mx - mz).abs() > tol::MEAN_MATCH * mx.abs().max(1.0) {
        return Err(Error::MeanMismatch { x: mx, z: mz });
    }
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty lambda grid".into()));
    }
    let span = grid.iter().map(|l| l.abs()).fold(1.0, f64::max);
    let tolerance = tol::CONVEX_ORDER + (x.truncation_mass() + z.truncation_mass()) * span;
    let mut psi = Vec::with_capacity(grid.len());
    let mut min_psi = f64::INFINITY;
    let mut argmin = grid[0];
    for &l in grid {
        let v = z.stop_loss(l)? - x.stop_loss(l)?;
        if v < min_psi {
            min_psi = v;
            argmin = l;
        }
        psi.push((l, v));
    }
    Ok(ConvexOrderReport {
        psi,
        min_psi,
        argmin,
        max_violation: (-min_psi).max(0.0),
        tolerance,
        is_member: min_psi >= -tolerance,
    })
}

/// Support points and midpoints for discrete pairs (exact, since Ψ is
/// piecewise linear between integers), and 512 points across the joint
/// effective support once a continuous law is involved.
///
/// Above the top of a bounded `x`, `Ψ(λ) = E[(Z − λ)₊] ≥ 0`, so the grid
/// stops there instead of following a long reference head.
pub fn default_lambda_grid(x: &Dist, z: &Dist) -> Vec<f64> {
    let range = |d: &Dist| match d {
        Dist::Discrete(d) => (d.min_k() as f64, d.max_k() as f64),
        Dist::Continuous(c) => {
            let s = c.effective_support(1e-12);
            (s.lo, s.hi)
        }
    };
    let (a, b) = (range(x), range(z));
    let lo = a.0.min(b.0) - 1.0;
    let hi = if x.support().hi.is_finite() {
        a.1 + 1.0
    } else {
        a.1.max(b.1) + 1.0
    };
    let mut grid: Vec<f64> = match (x, z) {
        (Dist::Discrete(_), Dist::Discrete(_)) => {
            let n = ((hi - lo) * 2.0) as usize;
            (0..=n).map(|i| lo + 0.5 * i as f64).collect()
        }
        _ => (0..512)
            .map(|i| lo + (hi - lo) * i as f64 / 511.0)
            .collect(),
    };
    for d in [x, z] {
        if let Dist::Discrete(d) = d {
            grid.extend(
                (d.min_k()..=d.max_k())
                    .map(|k| k as f64)
                    .filter(|&k| k <= hi),
            );
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// Both codes paths on one pair: the sign pattern of `f − g` and the
/// stop-loss certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoCrossingCheck {
    pub crossings: CrossingReport,
    /// At most two crossings with `g ≥ f` outside an interval (`-+-` or
    /// a sub-pattern of it).
    pub pattern_holds: bool,
    pub convex_order: ConvexOrderReport,
    /// `pattern_holds ⟹ convex_order.is_member`.
    pub consistent: bool,
}

/// Checks that the interval crossing pattern implies convex order.
pub fn two_crossing_implies_cx_check(
    x: &DiscreteDist,
    z: &DiscreteDist,
) -> Result<TwoCrossingCheck> {
    let mass_gap = (x.head_mass() + x.untracked_mass()) - (z.head_mass() + z.untracked_mass());
    if mass_gap.abs() > tol::MEAN_MATCH {
        return Err(Error::Precondition(format!(
            "total masses differ by {mass_gap}"
        )));
    }
    let crossings = crossing_count_dists(x, z);
    if crossings.count == 1 {
        return Err(Error::Precondition(
            "one crossing with equal masses and means is impossible".into(),
        ));
    }
    let pattern = crossings.pattern();
    let pattern_holds =
        crossings.count <= 2 && ["0", "-", "-+-", "+-", "-+", "+"].contains(&pattern.as_str());
    let (xd, zd): (Dist, Dist) = (x.clone().into(), z.clone().into());
    let convex_order = verify_convex_order(&xd, &zd, &default_lambda_grid(&xd, &zd))?;
    let consistent = !pattern_holds || convex_order.is_member;
    Ok(TwoCrossingCheck {
        crossings,
        pattern_holds,
        convex_order,
        consistent,
    })
}

/// Geometric law on `{start, …}` whose image under `t` has mean `target`,
/// found by bisection on the success probability.
pub fn geometric_matching_map(start: i64, t: &MonotoneMap, target: f64) -> Result<DiscreteDist> {
    let mean_of = |p: f64| -> Result<f64> {
        let z = DiscreteFamily::geometric_from(p, start)?;
        Ok(z.expect(|k| t.apply(k) as f64).expect("tagged"))
    };
    // E[T(Z)] decreases in p.
    let (mut lo, mut hi) = (1e-4, 1.0 - 1e-9);
    let (m_lo, m_hi) = (mean_of(lo)?, mean_of(hi)?);
    if !(target <= m_lo && target >= m_hi) {
        return Err(Error::Precondition(format!(
            "target {target} outside attainable range [{m_hi}, {m_lo}]"
        )));
    }
    while hi - lo > tol::BISECTION {
        let mid = 0.5 * (lo + hi);
        if mean_of(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    DiscreteFamily::geometric_from(0.5 * (lo + hi), start)?.materialize()
}
