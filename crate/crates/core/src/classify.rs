//! Membership tests for the log-concavity classes.
//!
//! Every test reduces to an inequality of the form
//! `2 log x_k − log x_{k−1} − log x_{k+1} ≥ log c_k` checked in log-space.
//! The verdict's `margin` is the smallest left-minus-right slack; a law is a
//! member when every slack is at least `−slack` (the classifier tolerance),
//! and support gaps make the margin `−∞`.

use std::fmt;

use crate::dist::ContinuousFamily;
use crate::{tol, ContinuousDist, DiscreteDist, Dist, Error, Interval, Result};

/// Where the first violated inequality sits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Witness {
    Index(i64),
    Point(f64),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Index(k) => write!(f, "{k}"),
            Witness::Point(x) => write!(f, "{}", crate::format::g12(*x)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassVerdict {
    pub is_member: bool,
    pub witness: Option<Witness>,
    /// Minimum log-space slack. Zero when no inequality applies.
    pub margin: f64,
}

impl ClassVerdict {
    fn member(margin: f64) -> Self {
        ClassVerdict {
            is_member: true,
            witness: None,
            margin,
        }
    }

    fn violation(witness: Witness, margin: f64) -> Self {
        ClassVerdict {
            is_member: false,
            witness: Some(witness),
            margin,
        }
    }
}

/// Order of ultra log-concavity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Finite(u64),
    Infinite,
}

/// Runs class tests at a fixed tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classifier {
    pub discrete_slack: f64,
    pub continuous_slack: f64,
}

impl Default for Classifier {
    fn default() -> Self {
        Classifier {
            discrete_slack: tol::DISCRETE_SLACK,
            continuous_slack: tol::CONTINUOUS_SLACK,
        }
    }
}

impl Classifier {
    /// Zero tolerance.
    pub fn strict() -> Self {
        Classifier {
            discrete_slack: 0.0,
            continuous_slack: 0.0,
        }
    }

    /// Log-concavity of `exp(ln_vals)` at support points `offset..`, with
    /// `ln_coef(k)` the logarithm of the multiplier on the right-hand side.
    fn sequence<C: Fn(i64) -> f64>(
        &self,
        offset: i64,
        ln_vals: &[f64],
        ln_coef: C,
    ) -> ClassVerdict {
        let Some(first) = ln_vals.iter().position(|v| *v > f64::NEG_INFINITY) else {
            return ClassVerdict::member(0.0);
        };
        let last = ln_vals
            .iter()
            .rposition(|v| *v > f64::NEG_INFINITY)
            .expect("has entry");
        let vals = &ln_vals[first..=last];
        let base = offset + first as i64;
        if let Some(gap) = vals.iter().position(|v| *v == f64::NEG_INFINITY) {
            return ClassVerdict::violation(Witness::Index(base + gap as i64), f64::NEG_INFINITY);
        }
        let mut margin = f64::INFINITY;
        let mut witness = None;
        for i in 1..vals.len().saturating_sub(1) {
            let k = base + i as i64;
            let s = 2.0 * vals[i] - vals[i - 1] - vals[i + 1] - ln_coef(k);
            if s < margin {
                margin = s;
            }
            if s < -self.discrete_slack && witness.is_none() {
                witness = Some(Witness::Index(k));
            }
        }
        if margin == f64::INFINITY {
            margin = 0.0;
        }
        match witness {
            Some(w) => ClassVerdict::violation(w, margin),
            None => ClassVerdict::member(margin),
        }
    }

    pub fn log_concave(&self, d: &DiscreteDist) -> ClassVerdict {
        let ln: Vec<f64> = d.probs().iter().map(|p| p.ln()).collect();
        self.sequence(d.offset(), &ln, |_| 0.0)
    }

    /// ULC(n) for finite `n`, ULC for [`Order::Infinite`].
    pub fn ulc(&self, d: &DiscreteDist, order: Order) -> Result<ClassVerdict> {
        if d.min_k() < 0 {
            return Err(Error::Precondition(format!(
                "support starts at {} < 0",
                d.min_k()
            )));
        }
        let ln: Vec<f64> = d.probs().iter().map(|p| p.ln()).collect();
        match order {
            Order::Finite(n) => {
                if d.support().hi > n as f64 {
                    return Err(Error::Precondition(format!(
                        "support reaches {} beyond {{0..{n}}}",
                        d.support().hi
                    )));
                }
                let n = n as f64;
                Ok(self.sequence(d.offset(), &ln, |k| {
                    let k = k as f64;
                    (1.0 / k).ln_1p() + (1.0 / (n - k)).ln_1p()
                }))
            }
            Order::Infinite => Ok(self.sequence(d.offset(), &ln, |k| (1.0 / k as f64).ln_1p())),
        }
    }

    /// `x ≺_lc z`: the ratio `P(X = k)/P(Z = k)` (zero off z's support) is a
    /// log-concave sequence.
    pub fn relative(&self, x: &DiscreteDist, z: &DiscreteDist) -> Result<ClassVerdict> {
        if !z.is_contiguous() {
            return Err(Error::Precondition("reference has a support gap".into()));
        }
        let zs = z.support();
        let mut ln = Vec::with_capacity(x.len());
        for (k, p) in x.iter() {
            if p == 0.0 {
                ln.push(f64::NEG_INFINITY);
                continue;
            }
            if !zs.contains(k as f64) {
                return Ok(ClassVerdict::violation(
                    Witness::Index(k),
                    f64::NEG_INFINITY,
                ));
            }
            ln.push(p.ln() - z.ln_pmf(k));
        }
        Ok(self.sequence(x.offset(), &ln, |_| 0.0))
    }

    /// Log-affinity on the whole of `reference`.
    pub fn log_affine(&self, d: &Dist, reference: Interval) -> ClassVerdict {
        match d {
            Dist::Discrete(d) => self.log_affine_discrete(d, reference),
            Dist::Continuous(c) => self.log_affine_continuous(c, reference),
        }
    }

    fn log_affine_discrete(&self, d: &DiscreteDist, reference: Interval) -> ClassVerdict {
        let s = d.support();
        if s.lo != reference.lo {
            return ClassVerdict::violation(
                Witness::Index(s.lo.min(reference.lo) as i64),
                f64::NEG_INFINITY,
            );
        }
        if s.hi != reference.hi {
            let at = if s.hi < reference.hi {
                s.hi + 1.0
            } else {
                reference.hi + 1.0
            };
            return ClassVerdict::violation(Witness::Index(at as i64), f64::NEG_INFINITY);
        }
        if !d.is_contiguous() {
            let gap = d
                .iter()
                .find(|&(_, p)| p == 0.0)
                .map(|(k, _)| k)
                .expect("gap");
            return ClassVerdict::violation(Witness::Index(gap), f64::NEG_INFINITY);
        }
        let ln: Vec<f64> = d.probs().iter().map(|p| p.ln()).collect();
        let mut margin = 0.0f64;
        for i in 1..ln.len().saturating_sub(1) {
            let dev = -(2.0 * ln[i] - ln[i - 1] - ln[i + 1]).abs();
            if dev < -tol::LOG_AFFINE.max(self.discrete_slack) {
                return ClassVerdict::violation(Witness::Index(d.offset() + i as i64), dev);
            }
            margin = margin.min(dev);
        }
        ClassVerdict::member(margin)
    }

    fn log_affine_continuous(&self, c: &ContinuousDist, reference: Interval) -> ClassVerdict {
        let s = c.support();
        let mismatch = |x: f64| ClassVerdict::violation(Witness::Point(x), f64::NEG_INFINITY);
        if s.lo != reference.lo {
            return mismatch(s.lo.min(reference.lo));
        }
        if s.hi != reference.hi {
            return mismatch(s.hi.min(reference.hi));
        }
        match c.family() {
            ContinuousFamily::Exponential { .. } | ContinuousFamily::Uniform { .. } => {
                ClassVerdict::member(0.0)
            }
            ContinuousFamily::Gaussian { mean, .. } => mismatch(*mean),
            ContinuousFamily::Grid(g) => {
                let slopes = g.log_slopes();
                let xs = g.breakpoints();
                let Some(Some(first)) = slopes.first().copied() else {
                    return mismatch(xs[0]);
                };
                let mut margin = 0.0f64;
                for (i, s) in slopes.iter().enumerate() {
                    let Some(s) = s else { return mismatch(xs[i]) };
                    let dev = -(s - first).abs();
                    if dev < -self.continuous_slack * first.abs().max(1.0) {
                        return ClassVerdict::violation(Witness::Point(xs[i]), dev);
                    }
                    margin = margin.min(dev);
                }
                ClassVerdict::member(margin)
            }
        }
    }

    /// `x ≺_LC z` tested on `grid` refined with the breakpoints of both laws.
    pub fn relative_continuous(
        &self,
        x: &ContinuousDist,
        z: &ContinuousDist,
        grid: &[f64],
    ) -> ClassVerdict {
        let pts = refinement(x, z, grid);
        let zs = z.support();
        let mut ln = Vec::with_capacity(pts.len());
        for &t in &pts {
            let g = x.pdf(t);
            if g <= 0.0 {
                ln.push(f64::NEG_INFINITY);
                continue;
            }
            let h = z.pdf(t);
            if h <= 0.0 || !zs.contains(t) {
                return ClassVerdict::violation(Witness::Point(t), f64::NEG_INFINITY);
            }
            ln.push(x.ln_pdf(t) - z.ln_pdf(t));
        }
        self.concave_on(&pts, &ln)
    }

    /// Log-concavity of a continuous density across `grid` and its breakpoints.
    pub fn log_concave_continuous(&self, x: &ContinuousDist, grid: &[f64]) -> ClassVerdict {
        let pts = refinement(x, x, grid);
        let ln: Vec<f64> = pts.iter().map(|&t| x.ln_pdf(t)).collect();
        self.concave_on(&pts, &ln)
    }

    /// Non-increasing slopes of `ln` over `pts`, with `−∞` allowed only at the ends.
    fn concave_on(&self, pts: &[f64], ln: &[f64]) -> ClassVerdict {
        let Some(first) = ln.iter().position(|v| *v > f64::NEG_INFINITY) else {
            return ClassVerdict::member(0.0);
        };
        let last = ln
            .iter()
            .rposition(|v| *v > f64::NEG_INFINITY)
            .expect("has entry");
        if let Some(gap) = (first..=last).find(|&i| ln[i] == f64::NEG_INFINITY) {
            return ClassVerdict::violation(Witness::Point(pts[gap]), f64::NEG_INFINITY);
        }
        let slope = |i: usize| (ln[i + 1] - ln[i]) / (pts[i + 1] - pts[i]);
        let mut margin = f64::INFINITY;
        let mut witness = None;
        for i in first + 1..last {
            let (a, b) = (slope(i - 1), slope(i));
            let s = a - b;
            let scale = a.abs().max(b.abs()).max(1.0);
            margin = margin.min(s / scale);
            if s < -self.continuous_slack * scale && witness.is_none() {
                witness = Some(Witness::Point(pts[i]));
            }
        }
        if margin == f64::INFINITY {
            margin = 0.0;
        }
        match witness {
            Some(w) => ClassVerdict::violation(w, margin),
            None => ClassVerdict::member(margin),
        }
    }

    /// Dispatch on the kinds of both laws; mixed discrete/continuous pairs
    /// are refused.
    pub fn relative_dist(&self, x: &Dist, z: &Dist, grid: &[f64]) -> Result<ClassVerdict> {
        match (x, z) {
            (Dist::Discrete(x), Dist::Discrete(z)) => self.relative(x, z),
            (Dist::Continuous(x), Dist::Continuous(z)) => Ok(self.relative_continuous(x, z, grid)),
            _ => Err(Error::Precondition(
                "cannot compare a discrete law with a continuous one".into(),
            )),
        }
    }
}

/// Sorted union of `grid` and the breakpoints of both laws, restricted to
/// the effective support of `x`.
pub fn refinement(x: &ContinuousDist, z: &ContinuousDist, grid: &[f64]) -> Vec<f64> {
    let s = x.effective_support(1e-300);
    let mut pts: Vec<f64> = grid.iter().copied().filter(|t| s.contains(*t)).collect();
    for d in [x, z] {
        if let Some(g) = d.as_grid() {
            pts.extend(g.breakpoints().iter().copied().filter(|t| s.contains(*t)));
        }
    }
    if pts.is_empty() {
        pts = default_grid(s, 257);
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// `n` evenly spaced points spanning `s`.
pub fn default_grid(s: Interval, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| s.lo + (s.hi - s.lo) * i as f64 / (n - 1) as f64)
        .collect()
}

pub fn is_log_concave_discrete(d: &DiscreteDist) -> ClassVerdict {
    Classifier::default().log_concave(d)
}

pub fn is_ulc(d: &DiscreteDist, order: Order) -> Result<ClassVerdict> {
    Classifier::default().ulc(d, order)
}

pub fn relative_lc(x: &DiscreteDist, z: &DiscreteDist) -> Result<ClassVerdict> {
    Classifier::default().relative(x, z)
}

pub fn is_log_affine(d: &Dist, reference: Interval) -> ClassVerdict {
    Classifier::default().log_affine(d, reference)
}

pub fn relative_lc_continuous(
    x: &ContinuousDist,
    z: &ContinuousDist,
    grid: &[f64],
) -> ClassVerdict {
    Classifier::default().relative_continuous(x, z, grid)
}

pub fn is_log_concave_continuous(x: &ContinuousDist, grid: &[f64]) -> ClassVerdict {
    Classifier::default().log_concave_continuous(x, grid)
}
