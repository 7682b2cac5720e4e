//! Rényi entropies, the expectation criterion that implies an entropy
//! comparison, maximum-entropy checks against log-concave majorants, and
//! the explicit failure of the comparison for orders above one.

use std::fmt;

use crate::classify::{self, Classifier};
use crate::dist::ContinuousFamily;
use crate::format::g12;
use crate::{tol, ContinuousDist, DiscreteDist, DiscreteFamily, Dist, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyKind {
    /// `H_α` of a probability mass function.
    Discrete,
    /// `h_α` of a Lebesgue density.
    Differential,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyValue {
    /// Order in `[0, ∞]`.
    pub alpha: f64,
    pub value: f64,
    pub kind: EntropyKind,
}

impl fmt::Display for EntropyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = match self.kind {
            EntropyKind::Discrete => "H",
            EntropyKind::Differential => "h",
        };
        write!(f, "{sym}_{} = {}", g12(self.alpha), g12(self.value))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_nan() || alpha < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "entropy order {alpha} must be in [0, inf]"
        )));
    }
    Ok(())
}

/// Rényi entropy of order `alpha` (`f64::INFINITY` for min-entropy).
pub fn renyi(d: &Dist, alpha: f64) -> Result<EntropyValue> {
    match d {
        Dist::Discrete(d) => renyi_discrete(d, alpha),
        Dist::Continuous(c) => renyi_continuous(c, alpha),
    }
}

pub fn renyi_discrete(d: &DiscreteDist, alpha: f64) -> Result<EntropyValue> {
    check_alpha(alpha)?;
    let value = if alpha == 0.0 {
        if d.family().is_infinite() {
            f64::INFINITY
        } else {
            (d.probs().iter().filter(|p| **p > 0.0).count() as f64).ln()
        }
    } else if alpha == f64::INFINITY {
        -d.probs().iter().cloned().fold(0.0, f64::max).ln()
    } else if alpha == 1.0 {
        d.sum_terms(|_, p| -p * p.ln())
    } else {
        d.sum_terms(|_, p| p.powf(alpha)).ln() / (1.0 - alpha)
    };
    Ok(EntropyValue {
        alpha,
        value,
        kind: EntropyKind::Discrete,
    })
}

pub fn renyi_continuous(c: &ContinuousDist, alpha: f64) -> Result<EntropyValue> {
    check_alpha(alpha)?;
    let inf = alpha == f64::INFINITY;
    let value = match c.family() {
        ContinuousFamily::Exponential { rate } => {
            let base = -rate.ln();
            if alpha == 0.0 {
                f64::INFINITY
            } else if inf {
                base
            } else if alpha == 1.0 {
                1.0 + base
            } else {
                base - alpha.ln() / (1.0 - alpha)
            }
        }
        ContinuousFamily::Uniform { a, b } => (b - a).ln(),
        ContinuousFamily::Gaussian { var, .. } => {
            let base = 0.5 * (2.0 * std::f64::consts::PI * var).ln();
            if alpha == 0.0 {
                f64::INFINITY
            } else if inf {
                base
            } else if alpha == 1.0 {
                base + 0.5
            } else {
                base + alpha.ln() / (2.0 * (alpha - 1.0))
            }
        }
        ContinuousFamily::Grid(g) => {
            if (g.mass() - 1.0).abs() > tol::GRID_MASS {
                return Err(Error::InvalidDistribution(format!(
                    "grid density has mass {}",
                    g.mass()
                )));
            }
            if alpha == 0.0 {
                g.support_length().ln()
            } else if inf {
                -g.max_value().ln()
            } else if alpha == 1.0 {
                g.shannon()
            } else {
                g.power_integral(alpha).ln() / (1.0 - alpha)
            }
        }
    };
    Ok(EntropyValue {
        alpha,
        value,
        kind: EntropyKind::Differential,
    })
}

/// Allowance for mass a truncated law no longer tracks:
/// `dropped · |log(smallest kept probability)|`.
pub fn truncation_budget(d: &Dist) -> f64 {
    match d {
        Dist::Discrete(d) => {
            let dropped = d.untracked_mass();
            if dropped == 0.0 {
                return 0.0;
            }
            let smallest = d
                .probs()
                .iter()
                .cloned()
                .filter(|p| *p > 0.0)
                .fold(1.0, f64::min);
            dropped * smallest.ln().abs()
        }
        Dist::Continuous(_) => 0.0,
    }
}

/// Outcome of the expectation criterion for one order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionReport {
    pub alpha: f64,
    /// `E[g^{α−1}(X)]`, or `−E[log g(X)]` at `α = 1`.
    pub lhs: f64,
    /// The same functional under `Z`.
    pub rhs: f64,
    /// `false` when `g` vanishes somewhere `x` has mass and the functional
    /// is infinite there.
    pub support_ok: bool,
    pub condition_holds: bool,
    pub h_x: f64,
    pub h_z: f64,
    pub conclusion_holds: bool,
}

/// Evaluates the expectation criterion with `g` the density of `z`,
/// together with the entropy comparison it is meant to imply.
pub fn expectation_criterion_check(x: &Dist, z: &Dist, alpha: f64) -> Result<CriterionReport> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "order {alpha} must be positive and finite"
        )));
    }
    let functional = |v: f64| {
        if alpha == 1.0 {
            -v.ln()
        } else {
            v.powf(alpha - 1.0)
        }
    };
    let (lhs, rhs, support_ok) = match (x, z) {
        (Dist::Discrete(xd), Dist::Discrete(zd)) => {
            let mut support_ok = true;
            let lhs = xd.sum_terms(|k, p| {
                let g = zd.pmf(k);
                if g <= 0.0 && alpha <= 1.0 {
                    support_ok = false;
                }
                if g <= 0.0 && alpha > 1.0 {
                    0.0
                } else {
                    p * functional(g)
                }
            });
            (lhs, zd.sum_terms(|_, p| p * functional(p)), support_ok)
        }
        (Dist::Continuous(xc), Dist::Continuous(zc)) => {
            let (xs, zs) = (xc.support(), zc.support());
            let support_ok = alpha > 1.0 || (xs.lo >= zs.lo && xs.hi <= zs.hi);
            let g = |t: f64| zc.pdf(t);
            let lhs = if support_ok {
                xc.expect(|t| match g(t) {
                    v if v > 0.0 => functional(v),
                    _ => 0.0,
                })?
            } else {
                f64::INFINITY
            };
            let rhs = zc.expect(|t| match g(t) {
                v if v > 0.0 => functional(v),
                _ => 0.0,
            })?;
            (lhs, rhs, support_ok)
        }
        _ => {
            return Err(Error::Precondition(
                "cannot compare a discrete law with a continuous one".into(),
            ))
        }
    };
    let lhs = if support_ok { lhs } else { f64::INFINITY };
    let slack = 1e-12 * rhs.abs().max(1.0);
    let condition_holds = support_ok
        && if alpha > 1.0 {
            lhs >= rhs - slack
        } else {
            lhs <= rhs + slack
        };
    let h_x = renyi(x, alpha)?.value;
    let h_z = renyi(z, alpha)?.value;
    let budget = tol::ENTROPY + truncation_budget(x) + truncation_budget(z);
    Ok(CriterionReport {
        alpha,
        lhs,
        rhs,
        support_ok,
        condition_holds,
        h_x,
        h_z,
        conclusion_holds: h_x <= h_z + budget,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyRow {
    pub alpha: f64,
    pub h_x: f64,
    pub h_z: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyCurve {
    pub rows: Vec<EntropyRow>,
    /// Tolerance added to `h_z` in every row.
    pub tolerance: f64,
}

impl EntropyCurve {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }

    /// Smallest `h_z − h_x`.
    pub fn min_slack(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.h_z - r.h_x)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,H_x,H_z,holds\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                g12(r.alpha),
                g12(r.h_x),
                g12(r.h_z),
                r.holds
            ));
        }
        out
    }
}

/// `H_α(x) ≤ H_α(z)` over `alphas ⊆ (0, 1]` for `x` log-concave relative
/// to `z` with the same mean.
pub fn max_entropy_check(x: &Dist, z: &Dist, alphas: &[f64]) -> Result<EntropyCurve> {
    if let Some(a) = alphas.iter().find(|a| !(**a > 0.0 && **a <= 1.0)) {
        return Err(Error::InvalidParameter(format!("order {a} outside (0, 1]")));
    }
    let grid = match x {
        Dist::Continuous(c) => classify::default_grid(c.effective_support(1e-12), 257),
        Dist::Discrete(_) => Vec::new(),
    };
    let verdict = Classifier::default().relative_dist(x, z, &grid)?;
    if !verdict.is_member {
        return Err(Error::Precondition(
            "x is not log-concave relative to the reference".into(),
        ));
    }
    let (mx, mz) = (x.mean()?, z.mean()?);
    if (mx - mz).abs() > tol::MEAN_MATCH * mx.abs().max(1.0) {
        return Err(Error::MeanMismatch { x: mx, z: mz });
    }
    let tolerance = tol::ENTROPY + truncation_budget(x) + truncation_budget(z);
    let mut rows = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let h_x = renyi(x, alpha)?.value;
        let h_z = renyi(z, alpha)?.value;
        rows.push(EntropyRow {
            alpha,
            h_x,
            h_z,
            holds: h_x <= h_z + tolerance,
        });
    }
    Ok(EntropyCurve { rows, tolerance })
}

/// Bernoulli law against the matched-mean geometric law for one `(α, p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleReport {
    pub alpha: f64,
    pub p: f64,
    /// Law of `X`: Bernoulli with parameter `(1 − p)/p`.
    pub bernoulli: DiscreteDist,
    /// Law of `Z`: geometric on `{0, 1, …}` with success probability `p`.
    pub geometric: DiscreteDist,
    pub h_bernoulli: f64,
    pub h_geometric: f64,
    /// `p^{2α} − [(1−p)^α + (2p−1)^α](1 − (1−p)^α)`.
    pub excess: f64,
    /// `H_α(X) > H_α(Z)`, equivalently `excess > 0`.
    pub strict_violation: bool,
    /// `excess / (p − 1)²`.
    pub ratio_to_limit: f64,
    /// `|ratio − α| ≤ 10 (1 − p)`.
    pub envelope_ok: bool,
}

/// `p^{2α} − [(1−p)^α + (2p−1)^α](1 − (1−p)^α)` without cancellation as `p → 1`.
pub fn counterexample_excess(alpha: f64, p: f64) -> f64 {
    let e = 1.0 - p;
    let b = (alpha * (-2.0 * e).ln_1p()).exp();
    let c = e.powf(alpha);
    // p^{2α} − (1−2e)^α = (1−2e)^α · expm1(α log((1−e)²/(1−2e))).
    let head = b * (alpha * (e * e / (1.0 - 2.0 * e)).ln_1p()).exp_m1();
    // 1 − (1−2e)^α − e^α.
    let rest = -(alpha * (-2.0 * e).ln_1p()).exp_m1() - c;
    head - c * rest
}

pub fn bernoulli_geometric_counterexample(alpha: f64, p: f64) -> Result<CounterexampleReport> {
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "order {alpha} must exceed 1"
        )));
    }
    if !(p > 0.5 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} outside (1/2, 1)")));
    }
    let bernoulli = DiscreteDist::bernoulli((1.0 - p) / p)?;
    let geometric = DiscreteFamily::geometric_from(p, 0)?.materialize()?;
    let e = 1.0 - p;
    let s_x = (e / p).powf(alpha) + ((2.0 * p - 1.0) / p).powf(alpha);
    let s_z = p.powf(alpha) / (1.0 - e.powf(alpha));
    let excess = counterexample_excess(alpha, p);
    let ratio_to_limit = excess / (e * e);
    Ok(CounterexampleReport {
        alpha,
        p,
        bernoulli,
        geometric,
        h_bernoulli: s_x.ln() / (1.0 - alpha),
        h_geometric: s_z.ln() / (1.0 - alpha),
        excess,
        strict_violation: excess > 0.0,
        ratio_to_limit,
        envelope_ok: (ratio_to_limit - alpha).abs() <= 10.0 * e,
    })
}
