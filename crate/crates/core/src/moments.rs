//! Factorial moments, log-concavity of normalized factorial-moment
//! sequences, and moment comparison inequalities with explicit constants.

use statrs::function::gamma::ln_gamma;

use crate::classify::{self, Order};
use crate::dist::ContinuousFamily;
use crate::format::g12;
use crate::{tol, ContinuousDist, DiscreteDist, Dist, Error, Result};

/// `(m)_n = m (m − 1) ⋯ (m − n + 1)`, zero when `m < n`.
///
/// ```
/// use lcx_core::moments::falling_factorial;
/// assert_eq!(falling_factorial(5, 2).unwrap(), 20);
/// assert_eq!(falling_factorial(3, 5).unwrap(), 0);
/// assert_eq!(falling_factorial(7, 0).unwrap(), 1);
/// ```
pub fn falling_factorial(m: i64, n: i64) -> Result<u128> {
    if m < 0 || n < 0 {
        return Err(Error::InvalidParameter(format!(
            "falling factorial ({m})_{n} needs m, n >= 0"
        )));
    }
    if m < n {
        return Ok(0);
    }
    let mut acc: u128 = 1;
    for j in 0..n {
        acc = acc
            .checked_mul((m - j) as u128)
            .ok_or_else(|| Error::InvalidParameter(format!("({m})_{n} overflows 128 bits")))?;
    }
    Ok(acc)
}

/// `(k)_p` as a float, exact whenever the integer fits in 128 bits.
fn falling_f64(k: i64, p: usize) -> f64 {
    match falling_factorial(k, p as i64) {
        Ok(v) => v as f64,
        Err(_) => (0..p as i64).map(|j| (k - j) as f64).product(),
    }
}

/// Stirling number of the second kind `S(m, j)`.
pub fn stirling2(m: usize, j: usize) -> u128 {
    let mut row = vec![1u128];
    for i in 1..=m {
        let mut next = vec![0u128; i + 1];
        for (k, slot) in next.iter_mut().enumerate().skip(1) {
            let stay = if k < row.len() { k as u128 * row[k] } else { 0 };
            *slot = stay + row[k - 1];
        }
        row = next;
    }
    row.get(j).copied().unwrap_or(0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// `E[(X)_p]`.
    Raw,
    /// `E[(X)_p] / p!`.
    Keilson,
    /// `E[(X)_p] / (n)_p`, with `0/0 = 0` past `n`.
    UlcN(u64),
}

/// Factorial moments indexed by `p ∈ {0..P}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorialMomentTable {
    pub values: Vec<f64>,
    pub normalization: Normalization,
}

impl FactorialMomentTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,value\n");
        for (p, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{p},{}\n", g12(*v)));
        }
        out
    }
}

fn require_nonnegative(d: &DiscreteDist) -> Result<()> {
    if d.min_k() < 0 {
        return Err(Error::Precondition(format!(
            "support starts at {} < 0",
            d.min_k()
        )));
    }
    Ok(())
}

/// `E[(X)_p]` for `p = 0..=max_p`, normalized.
pub fn factorial_moments(
    d: &DiscreteDist,
    max_p: usize,
    normalization: Normalization,
) -> Result<FactorialMomentTable> {
    require_nonnegative(d)?;
    let mut values = Vec::with_capacity(max_p + 1);
    for p in 0..=max_p {
        let raw = d.expect(|k| falling_f64(k, p));
        let v = match normalization {
            Normalization::Raw => raw,
            Normalization::Keilson => (raw.ln() - ln_gamma(p as f64 + 1.0)).exp(),
            Normalization::UlcN(n) => {
                let denom = falling_f64(n as i64, p);
                if denom == 0.0 {
                    0.0
                } else {
                    raw / denom
                }
            }
        };
        values.push(v);
    }
    Ok(FactorialMomentTable {
        values,
        normalization,
    })
}

/// Per-index log-slacks of a sequence inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct LogConcavityReport {
    /// `(p, slack)` for every index checked.
    pub slacks: Vec<(usize, f64)>,
    /// Zero when no index was checked.
    pub min_log_slack: f64,
    pub witness: Option<usize>,
    pub holds: bool,
}

impl LogConcavityReport {
    fn from_slacks(slacks: Vec<(usize, f64)>, slack: f64) -> Self {
        let min_log_slack = slacks.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
        let min_log_slack = if min_log_slack == f64::INFINITY {
            0.0
        } else {
            min_log_slack
        };
        let witness = slacks.iter().find(|s| s.1 < -slack).map(|s| s.0);
        LogConcavityReport {
            slacks,
            min_log_slack,
            witness,
            holds: witness.is_none(),
        }
    }
}

/// `2 log v[p] − log v[p−1] − log v[p+1] − log c(p)` at interior indices,
/// stopping where the sequence hits zero.
fn sequence_slacks<C: Fn(usize) -> f64>(
    v: &[f64],
    range: std::ops::Range<usize>,
    ln_c: C,
) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    for p in range {
        if p == 0 || p + 1 >= v.len() {
            continue;
        }
        if v[p + 1] <= 0.0 || v[p] <= 0.0 {
            break;
        }
        out.push((p, 2.0 * v[p].ln() - v[p - 1].ln() - v[p + 1].ln() - ln_c(p)));
    }
    out
}

/// Log-concavity of `p ↦ E[(X)_p]/p!` for `p ≤ max_p`, without checking
/// that `d` itself is log-concave.
pub fn keilson_slack(d: &DiscreteDist, max_p: usize) -> Result<LogConcavityReport> {
    let t = factorial_moments(d, max_p, Normalization::Keilson)?;
    Ok(LogConcavityReport::from_slacks(
        sequence_slacks(&t.values, 1..max_p, |_| 0.0),
        tol::FACTORIAL_SLACK,
    ))
}

/// [`keilson_slack`] for a log-concave `d`.
pub fn keilson_check(d: &DiscreteDist, max_p: usize) -> Result<LogConcavityReport> {
    if !classify::is_log_concave_discrete(d).is_member {
        return Err(Error::Precondition(
            "distribution is not log-concave".into(),
        ));
    }
    keilson_slack(d, max_p)
}

/// `E[(X)_p]² ≥ c(p) E[(X)_{p+1}] E[(X)_{p−1}]` with `c(p) = 1 + 1/(n − p)`
/// (finite order, `p < n`) or `c = 1` (infinite order), for `1 ≤ p < max_p`.
pub fn ulc_factorial_check(
    d: &DiscreteDist,
    order: Order,
    max_p: usize,
) -> Result<LogConcavityReport> {
    if !classify::is_ulc(d, order)?.is_member {
        return Err(Error::Precondition(
            "distribution is not ultra log-concave of the given order".into(),
        ));
    }
    ulc_factorial_slack(d, order, max_p)
}

/// [`ulc_factorial_check`] without the class precondition.
pub fn ulc_factorial_slack(
    d: &DiscreteDist,
    order: Order,
    max_p: usize,
) -> Result<LogConcavityReport> {
    let t = factorial_moments(d, max_p, Normalization::Raw)?;
    let slacks = match order {
        Order::Finite(n) => {
            let top = max_p.min(n as usize);
            sequence_slacks(&t.values, 1..top, |p| (1.0 / (n as f64 - p as f64)).ln_1p())
        }
        Order::Infinite => sequence_slacks(&t.values, 1..max_p, |_| 0.0),
    };
    Ok(LogConcavityReport::from_slacks(
        slacks,
        tol::FACTORIAL_SLACK,
    ))
}

/// Smallest `log v[r]/r − log v[r+1]/(r+1)` over `1 ≤ r < len − 1`: the
/// root chain `v[r+1]^{1/(r+1)} ≤ v[r]^{1/r}` holds when it is `≥ 0`.
pub fn root_chain_slack(v: &[f64]) -> f64 {
    let mut min = f64::INFINITY;
    for r in 1..v.len().saturating_sub(1) {
        if v[r + 1] <= 0.0 {
            break;
        }
        let s = v[r].ln() / r as f64 - v[r + 1].ln() / (r + 1) as f64;
        min = min.min(s);
    }
    if min == f64::INFINITY {
        0.0
    } else {
        min
    }
}

/// `E[X^α]` for `α > 0` on a non-negative law (`0^α = 0`).
pub fn moment(d: &Dist, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "moment order {alpha} must be positive"
        )));
    }
    match d {
        Dist::Discrete(d) => {
            require_nonnegative(d)?;
            let v = d.expect(|k| if k == 0 { 0.0 } else { (k as f64).powf(alpha) });
            if !v.is_finite() {
                return Err(Error::Quadrature(format!(
                    "moment of order {alpha} diverges"
                )));
            }
            Ok(v)
        }
        Dist::Continuous(c) => c.moment(alpha),
    }
}

/// `Γ(β+1)^{1/β} / Γ(α+1)^{1/α}`.
pub fn gamma_ratio(alpha: f64, beta: f64) -> f64 {
    (ln_gamma(beta + 1.0) / beta - ln_gamma(alpha + 1.0) / alpha).exp()
}

/// `Γ(α+1)^{1/α}` next to `α`; the first never exceeds the second for `α ≥ 1`.
pub fn gamma_root(alpha: f64) -> f64 {
    (ln_gamma(alpha + 1.0) / alpha).exp()
}

/// `A_{α,β} = E[Z^β]^{1/β} / E[Z^α]^{1/α}` for a log-affine `z`.
pub fn moment_comparison_constant(alpha: f64, beta: f64, z: &Dist) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= beta) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < alpha <= beta, got {alpha}, {beta}"
        )));
    }
    if !classify::is_log_affine(z, z.support()).is_member {
        return Err(Error::Precondition(
            "reference is not log-affine on its support".into(),
        ));
    }
    if alpha == beta {
        return Ok(1.0);
    }
    Ok(moment(z, beta)?.powf(1.0 / beta) / moment(z, alpha)?.powf(1.0 / alpha))
}

/// Which moment comparison to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentCorollary {
    /// Discrete log-concave on ℕ, `1 ≤ α ≤ β`: factor `Γ-ratio · e^{1/E[X]}`.
    DiscreteGeneral,
    /// Discrete log-concave on ℕ with `E[X] ≥ 1`, `1 ≤ α ≤ β`: factor `e · Γ-ratio`.
    DiscreteMeanAtLeastOne,
    /// Discrete log-concave on ℕ, `α ∈ (0, 1]`, `β ≥ α`:
    /// `2^{1/α − 1} Γ-ratio (E[X^α]^{1/α} + 1)`.
    DiscreteSmallAlpha,
    /// Non-negative continuous log-concave: factor `Γ-ratio`.
    Continuous,
}

/// `E[X^β]^{1/β}` against a corollary's right-hand side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentBound {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`.
    pub slack: f64,
    pub holds: bool,
}

pub fn corollary_moment_bounds(
    d: &Dist,
    alpha: f64,
    beta: f64,
    which: MomentCorollary,
) -> Result<MomentBound> {
    match which {
        MomentCorollary::Continuous => {
            let c = d
                .as_continuous()
                .ok_or_else(|| Error::Precondition("continuous law required".into()))?;
            check_continuous_lc(c)?;
            if !(alpha > 0.0 && alpha <= beta) {
                return Err(Error::InvalidParameter(format!(
                    "need 0 < alpha <= beta, got {alpha}, {beta}"
                )));
            }
        }
        _ => {
            let x = d
                .as_discrete()
                .ok_or_else(|| Error::Precondition("discrete law required".into()))?;
            require_nonnegative(x)?;
            if !classify::is_log_concave_discrete(x).is_member {
                return Err(Error::Precondition(
                    "distribution is not log-concave".into(),
                ));
            }
            let ok = match which {
                MomentCorollary::DiscreteSmallAlpha => alpha > 0.0 && alpha <= 1.0 && beta >= alpha,
                _ => alpha >= 1.0 && beta >= alpha,
            };
            if !ok {
                return Err(Error::InvalidParameter(format!(
                    "orders ({alpha}, {beta}) outside the corollary's range"
                )));
            }
            if which == MomentCorollary::DiscreteMeanAtLeastOne && x.mean() < 1.0 {
                return Err(Error::Precondition(format!("mean {} < 1", x.mean())));
            }
        }
    }
    let lhs = moment(d, beta)?.powf(1.0 / beta);
    let root_alpha = moment(d, alpha)?.powf(1.0 / alpha);
    let g = gamma_ratio(alpha, beta);
    let rhs = match which {
        MomentCorollary::DiscreteGeneral => g * root_alpha * (1.0 / d.mean()?).exp(),
        MomentCorollary::DiscreteMeanAtLeastOne => std::f64::consts::E * g * root_alpha,
        MomentCorollary::DiscreteSmallAlpha => {
            2f64.powf(1.0 / alpha - 1.0) * g * (root_alpha + 1.0)
        }
        MomentCorollary::Continuous => g * root_alpha,
    };
    let slack = rhs - lhs;
    let scale = lhs.abs().max(1.0);
    Ok(MomentBound {
        lhs,
        rhs,
        slack,
        holds: slack >= -1e-9 * scale,
    })
}

fn check_continuous_lc(c: &ContinuousDist) -> Result<()> {
    if c.support().lo < 0.0 {
        return Err(Error::Precondition("support must be non-negative".into()));
    }
    let ok = match c.family() {
        ContinuousFamily::Exponential { .. } | ContinuousFamily::Uniform { .. } => true,
        ContinuousFamily::Gaussian { .. } => false,
        ContinuousFamily::Grid(g) => {
            classify::is_log_concave_continuous(c, g.breakpoints()).is_member
        }
    };
    if !ok {
        return Err(Error::Precondition("density is not log-concave".into()));
    }
    Ok(())
}
