//! Chernoff bounds by numerical Legendre transform, and closed-form tail
//! bounds for sums of log-concave and ultra log-concave variables.
//!
//! With `d(t) = t − 1 − log t`, the closed forms are
//!
//! | function | event | bound |
//! |---|---|---|
//! | [`bound_sum_discrete_lc`] | `S ≥ t E[S]` | `exp(−(E[S]/max E[X_i]) d(t))` |
//! | [`bound_single_lc`] | `X ≥ t E[X]` | `t e^{1−t}` |
//! | [`bound_weighted_continuous`] | `Σλ_i X_i ≥ t Σλ_i` | `exp(−λ min λ_i d(t))` |
//! | [`bound_weighted_discrete`] | `Σa_i X_i ≥ t E[Σa_i X_i]` | `exp(−min(a_i E[X_i]) E[Σa_i X_i] d(t))` |
//! | [`bound_ulc_n`] | `X ≥ (μ + t) n` | `exp(−n D(μ + t ‖ μ))` |
//! | [`bound_ulc`] | `X ≥ E[X] + t` | `exp(−t²/(2(t + E[X])))` |
//!
//! and the mirrored lower-tail events. All probability bounds are clamped to 1.

use crate::format::{g12, g12_opt};
use crate::{tol, Error, RateFunction, Result, Side};

const GOLDEN: f64 = 0.618_033_988_749_894_9;
const MAX_DOUBLINGS: usize = 60;
const LAMBDA_CAP: f64 = 1e6;

/// Value of `sup_λ (λt − Λ(λ))` on one side of the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegendreValue {
    pub value: f64,
    pub optimizer: f64,
    /// `t` was on the wrong side of the mean; the bound is trivial.
    pub vacuous: bool,
}

/// Legendre transform `Λ*₊(t)` (side [`Side::Upper`], λ ≥ 0) or `Λ*₋(t)`
/// (side [`Side::Lower`], λ ≤ 0) by golden-section search.
pub fn legendre(rate: &RateFunction, t: f64, side: Side) -> LegendreValue {
    let m = rate.mean();
    let sign = match side {
        Side::Upper => 1.0,
        Side::Lower => -1.0,
    };
    if sign * (t - m) <= 0.0 {
        return LegendreValue {
            value: 0.0,
            optimizer: 0.0,
            vacuous: sign * (t - m) < 0.0,
        };
    }
    // Search over s = |λ| ≥ 0.
    let objective = |s: f64| -> f64 {
        let l = sign * s;
        match rate.eval(l) {
            Ok(c) if c.is_finite() => l * t - c,
            _ => f64::NEG_INFINITY,
        }
    };
    let boundary = match side {
        Side::Upper => rate.domain_pos.hi,
        Side::Lower => -rate.domain_neg.lo,
    };
    let hi = if boundary.is_finite() {
        boundary - tol::DOMAIN_EDGE
    } else {
        let mut b = 1.0;
        for _ in 0..MAX_DOUBLINGS {
            if b >= LAMBDA_CAP || objective(2.0 * b) <= objective(b) {
                break;
            }
            b *= 2.0;
        }
        2.0 * b
    };
    let (mut a, mut b) = (0.0, hi);
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (objective(c), objective(d));
    while b - a > tol::LEGENDRE * b.abs().max(1.0) {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = objective(d);
        }
    }
    let mut best = (0.0, 0.0);
    for s in [0.5 * (a + b), hi] {
        let v = objective(s);
        if v > best.1 {
            best = (s, v);
        }
    }
    LegendreValue {
        value: best.1,
        optimizer: sign * best.0,
        vacuous: false,
    }
}

/// `exp(−Λ*(t))`, the Chernoff bound on `P(Z ≥ t)` or `P(Z ≤ t)`.
pub fn chernoff_bound(rate: &RateFunction, t: f64, side: Side) -> f64 {
    (-legendre(rate, t, side).value).exp().min(1.0)
}

fn deviation(t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "deviation parameter t = {t} must be positive"
        )));
    }
    Ok(t - 1.0 - t.ln())
}

fn check_side(t: f64, side: Side) -> Result<()> {
    match side {
        Side::Upper if t < 1.0 => Err(Error::Precondition(format!(
            "upper tail needs t >= 1, got {t}"
        ))),
        Side::Lower if t > 1.0 => Err(Error::Precondition(format!(
            "lower tail needs t <= 1, got {t}"
        ))),
        _ => Ok(()),
    }
}

fn clamp(exponent: f64) -> f64 {
    (-exponent).exp().min(1.0)
}

/// Sum of independent discrete log-concave variables on `{1, 2, …}` with
/// the given means.
pub fn bound_sum_discrete_lc(means: &[f64], t: f64, side: Side) -> Result<f64> {
    let d = deviation(t)?;
    check_side(t, side)?;
    if means.is_empty() {
        return Err(Error::InvalidParameter("no summands".into()));
    }
    if let Some(m) = means.iter().find(|m| !(**m >= 1.0 && m.is_finite())) {
        return Err(Error::Precondition(format!(
            "mean {m} < 1 is impossible on {{1, 2, ...}}"
        )));
    }
    let total: f64 = means.iter().sum();
    let max = means.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(clamp(total / max * d))
}

/// Single discrete log-concave variable on `{1, 2, …}`: `t e^{1−t}`.
pub fn bound_single_lc(mean: f64, t: f64, side: Side) -> Result<f64> {
    bound_sum_discrete_lc(&[mean], t, side)
}

/// Weighted sum `Σλ_i X_i` of unit-mean positive continuous log-concave
/// variables, with the exponent `λ (min λ_i) d(t)`.
pub fn bound_weighted_continuous(weights: &[f64], t: f64, side: Side) -> Result<f64> {
    let d = deviation(t)?;
    check_side(t, side)?;
    check_weights(weights)?;
    let total: f64 = weights.iter().sum();
    let min = weights.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(clamp(total * min * d))
}

/// Weighted sum `Σa_i X_i` of discrete log-concave variables on `{1, 2, …}`,
/// exponent `min(a_i E[X_i]) · E[Σa_i X_i] · d(t)`.
pub fn bound_weighted_discrete(a: &[f64], means: &[f64], t: f64, side: Side) -> Result<f64> {
    let d = deviation(t)?;
    check_side(t, side)?;
    check_weights(a)?;
    if a.len() != means.len() {
        return Err(Error::InvalidParameter(format!(
            "{} weights for {} means",
            a.len(),
            means.len()
        )));
    }
    let scaled: Vec<f64> = a.iter().zip(means).map(|(a, m)| a * m).collect();
    let total: f64 = scaled.iter().sum();
    let min = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(clamp(min * total * d))
}

fn check_weights(w: &[f64]) -> Result<()> {
    if w.is_empty() {
        return Err(Error::InvalidParameter("no weights".into()));
    }
    if let Some(x) = w.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
        return Err(Error::InvalidParameter(format!(
            "weight {x} must be positive"
        )));
    }
    Ok(())
}

/// Bernoulli relative entropy with `0 log 0 = 0`.
pub fn relative_entropy(p: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "D({p} || {q}) needs p in [0, 1], q in (0, 1)"
        )));
    }
    let term = |a: f64, b: f64| if a == 0.0 { 0.0 } else { a * (a / b).ln() };
    Ok(term(p, q) + term(1.0 - p, 1.0 - q))
}

/// ULC(n) law with `E[X] = μ n`: `exp(−n D(μ ± t ‖ μ))`.
pub fn bound_ulc_n(n: u64, mu: f64, t: f64, side: Side) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("order n must be at least 1".into()));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "t = {t} must be non-negative"
        )));
    }
    let target = match side {
        Side::Upper => mu + t,
        Side::Lower => mu - t,
    };
    if !(0.0..=1.0).contains(&target) {
        return Err(Error::InvalidParameter(format!(
            "mu {} t = {target} leaves [0, 1]",
            side.symbol()
        )));
    }
    Ok(clamp(n as f64 * relative_entropy(target, mu)?))
}

/// ULC law: `exp(−t²/(2(t + E[X])))` above, `exp(−t²/(2E[X]))` below.
pub fn bound_ulc(mean: f64, t: f64, side: Side) -> Result<f64> {
    if !(mean > 0.0 && mean.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "mean {mean} must be positive"
        )));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "t = {t} must be non-negative"
        )));
    }
    Ok(match side {
        Side::Upper => clamp(t * t / (2.0 * (t + mean))),
        Side::Lower => clamp(t * t / (2.0 * mean)),
    })
}

/// `exp(−(λ/p) log(1 − θ/λ))`, an upper bound on the MGF at `θ` of a
/// geometric(p) law on `{1, 2, …}` and of an exponential law with rate `p`.
pub fn mgf_bound_lemma(p: f64, theta: f64, lambda: f64) -> Result<f64> {
    if !(theta < lambda && lambda <= p && lambda > 0.0 && p <= 1.0) {
        return Err(Error::Precondition(format!(
            "need theta < lambda <= p <= 1 with lambda > 0, got theta={theta}, lambda={lambda}, p={p}"
        )));
    }
    Ok((-(lambda / p) * (-theta / lambda).ln_1p()).exp())
}

/// Side-by-side evaluation of the weighted-sum exponent at unit weights and
/// the unweighted sum bound. The two differ unless all means equal one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedCrossCheck {
    pub weighted: f64,
    pub sum: f64,
    /// `|weighted − sum| ≤ 1e−12`.
    pub agree: bool,
}

pub fn weighted_vs_sum(means: &[f64], t: f64, side: Side) -> Result<WeightedCrossCheck> {
    let ones = vec![1.0; means.len()];
    let weighted = bound_weighted_discrete(&ones, means, t, side)?;
    let sum = bound_sum_discrete_lc(means, t, side)?;
    Ok(WeightedCrossCheck {
        weighted,
        sum,
        agree: (weighted - sum).abs() <= 1e-12,
    })
}

/// One row of a bound curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRow {
    pub t: f64,
    pub bound: f64,
    pub oracle: Option<f64>,
    /// `oracle ≤ bound + slack` when an oracle value exists.
    pub dominated: Option<bool>,
}

/// Bound values over a grid of deviation parameters, with oracle values.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoundCurve {
    pub rows: Vec<BoundRow>,
}

impl BoundCurve {
    /// Evaluates `bound` and, when given, `oracle` at each `t`. An oracle
    /// tail counts as dominated when it is at most `bound + slack`.
    pub fn sweep<B, O>(ts: &[f64], bound: B, oracle: Option<O>, slack: f64) -> Result<Self>
    where
        B: Fn(f64) -> Result<f64>,
        O: Fn(f64) -> Result<f64>,
    {
        let mut rows = Vec::with_capacity(ts.len());
        for &t in ts {
            let b = bound(t)?;
            let o = match &oracle {
                Some(f) => Some(f(t)?),
                None => None,
            };
            rows.push(BoundRow {
                t,
                bound: b,
                oracle: o,
                dominated: o.map(|o| o <= b + slack),
            });
        }
        Ok(BoundCurve { rows })
    }

    pub fn all_dominated(&self) -> bool {
        self.rows.iter().all(|r| r.dominated != Some(false))
    }

    /// Smallest `bound − oracle` over rows with an oracle.
    pub fn min_slack(&self) -> Option<f64> {
        self.rows
            .iter()
            .filter_map(|r| r.oracle.map(|o| r.bound - o))
            .fold(None, |acc, s| Some(acc.map_or(s, |a: f64| a.min(s))))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,bound,oracle,dominated\n");
        for r in &self.rows {
            let dom = r.dominated.map(|d| d.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{}\n",
                g12(r.t),
                g12(r.bound),
                g12_opt(r.oracle),
                dom
            ));
        }
        out
    }
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{ContinuousDist, DiscreteFamily};
    use proptest::prelude::*;

    fn poisson_rate(l: f64) -> RateFunction {
        RateFunction::from_discrete(&DiscreteFamily::poisson(l).unwrap().materialize().unwrap())
    }

    #[test]
    fn legendre_closed_forms() {
        let v = legendre(&poisson_rate(1.0), 2.0, Side::Upper);
        assert!((v.value - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-12);
        assert!((v.optimizer - 2f64.ln()).abs() < 1e-6);

        let e = RateFunction::from_continuous(&ContinuousDist::exponential(1.0).unwrap()).unwrap();
        let v = legendre(&e, 2.0, Side::Upper);
        assert!((v.value - (1.0 - 2f64.ln())).abs() < 1e-12);

        let v = legendre(&poisson_rate(1.0), 1.0, Side::Upper);
        assert_eq!((v.value, v.vacuous), (0.0, false));
        let v = legendre(&poisson_rate(1.0), 0.5, Side::Upper);
        assert!(v.vacuous && v.value == 0.0);

        // Lower side, Poisson: Λ*₋(t) = t log t − t + 1.
        let v = legendre(&poisson_rate(1.0), 0.25, Side::Lower);
        assert!((v.value - (0.25 * 0.25f64.ln() - 0.25 + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn closed_form_spot_values() {
        let b = bound_sum_discrete_lc(&[2.0, 2.0], 2.0, Side::Upper).unwrap();
        assert!((b - 0.541341).abs() < 1e-6);
        assert_eq!(
            bound_sum_discrete_lc(&[3.0, 5.0], 1.0, Side::Upper).unwrap(),
            1.0
        );
        // One summand: the exponent factor is E[X]/E[X] = 1, giving t e^{1−t}.
        let b = bound_sum_discrete_lc(&[2.0], 3.0, Side::Upper).unwrap();
        assert!((b - bound_single_lc(2.0, 3.0, Side::Upper).unwrap()).abs() < 1e-15);

        assert!(
            (bound_single_lc(2.0, 3.0, Side::Upper).unwrap() - 3.0 * (-2.0f64).exp()).abs() < 1e-15
        );
        assert_eq!(bound_single_lc(2.0, 1.0, Side::Upper).unwrap(), 1.0);

        assert_eq!(
            bound_weighted_continuous(&[1.0, 1.0], 1.0, Side::Upper).unwrap(),
            1.0
        );
        let b = bound_weighted_continuous(&[0.5, 1.5], 2.0, Side::Upper).unwrap();
        assert!((b - (-(1.0 - 2f64.ln())).exp()).abs() < 1e-15);

        let b = bound_weighted_discrete(&[2.0], &[2.0], 2.0, Side::Upper).unwrap();
        assert!((b - (-16.0 * (1.0 - 2f64.ln())).exp()).abs() < 1e-16);

        let b = bound_ulc_n(10, 0.5, 0.2, Side::Upper).unwrap();
        assert!((b - 0.439188).abs() < 1e-6);
        assert_eq!(bound_ulc_n(10, 0.5, 0.0, Side::Upper).unwrap(), 1.0);
        assert!((bound_ulc_n(10, 0.3, 0.7, Side::Upper).unwrap() - 0.3f64.powi(10)).abs() < 1e-18);

        assert!((bound_ulc(1.0, 2.0, Side::Upper).unwrap() - (-2.0f64 / 3.0).exp()).abs() < 1e-15);
        assert!((bound_ulc(1.0, 1.0, Side::Lower).unwrap() - (-0.5f64).exp()).abs() < 1e-15);
        assert_eq!(bound_ulc(1.0, 0.0, Side::Upper).unwrap(), 1.0);
    }

    #[test]
    fn errors() {
        assert!(bound_sum_discrete_lc(&[2.0], 0.0, Side::Upper).is_err());
        assert!(bound_sum_discrete_lc(&[2.0], 0.5, Side::Upper).is_err());
        assert!(bound_weighted_continuous(&[1.0, 0.0], 2.0, Side::Upper).is_err());
        assert!(bound_ulc_n(10, 0.5, 0.6, Side::Upper).is_err());
        assert!(bound_ulc(0.0, 1.0, Side::Upper).is_err());
        assert!(mgf_bound_lemma(0.5, 0.5, 0.5).is_err());
        assert!(mgf_bound_lemma(0.5, 0.1, 0.6).is_err());
    }

    #[test]
    fn lemma_values() {
        assert_eq!(mgf_bound_lemma(0.7, 0.0, 0.3).unwrap(), 1.0);
        // λ = p makes the bound the exponential MGF p/(p − θ).
        assert!((mgf_bound_lemma(0.5, 0.25, 0.5).unwrap() - 2.0).abs() < 1e-14);
        assert!((mgf_bound_lemma(0.5, 0.25, 0.3).unwrap() - (0.6 * 6f64.ln()).exp()).abs() < 1e-14);
    }

    #[test]
    fn weighted_form_needs_unit_means() {
        let c = weighted_vs_sum(&[2.0, 2.0], 2.0, Side::Upper).unwrap();
        assert!(!c.agree);
        let c = weighted_vs_sum(&[1.0, 1.0, 1.0], 2.0, Side::Upper).unwrap();
        assert!(c.agree);
    }

    #[test]
    fn curve_csv() {
        let c = BoundCurve::sweep(
            &[1.0, 3.0],
            |t| bound_single_lc(2.0, t, Side::Upper),
            Some(|t: f64| Ok(0.5f64.powf(2.0 * t - 1.0))),
            tol::BOUND_SLACK,
        )
        .unwrap();
        assert!(c.all_dominated());
        assert_eq!(
            c.to_csv(),
            "t,bound,oracle,dominated\n1,1,0.5,true\n3,0.40600584971,0.03125,true\n"
        );
        let none =
            BoundCurve::sweep(&[1.0], |_| Ok(1.0), None::<fn(f64) -> Result<f64>>, 0.0).unwrap();
        assert_eq!(none.to_csv(), "t,bound,oracle,dominated\n1,1,,\n");
    }

    proptest! {
        #[test]
        fn bounds_decrease_past_the_mean(t1 in 1.0f64..10.0, dt in 0.0f64..5.0, m in 1.0f64..10.0) {
            let t2 = t1 + dt;
            let up = |t| bound_sum_discrete_lc(&[m, 2.0 * m], t, Side::Upper).unwrap();
            prop_assert!(up(t2) <= up(t1) + 1e-15);
            let w = |t| bound_weighted_continuous(&[0.3, 2.0], t, Side::Upper).unwrap();
            prop_assert!(w(t2) <= w(t1) + 1e-15);
            let u = |t| bound_ulc(m, t, Side::Upper).unwrap();
            prop_assert!(u(t2) <= u(t1) + 1e-15);
        }

        #[test]
        fn chernoff_never_exceeds_one(l in 0.1f64..20.0, t in 0.0f64..60.0) {
            let r = poisson_rate(l);
            for side in [Side::Upper, Side::Lower] {
                let b = chernoff_bound(&r, t, side);
                prop_assert!(b > 0.0 || t > 4.0 * l && b >= 0.0);
                prop_assert!(b <= 1.0);
            }
        }
    }
}
