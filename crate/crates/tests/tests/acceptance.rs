//! One line per acceptance criterion; exits non-zero if any fails.

use std::process::ExitCode;

use clap::Parser;
use lcx_cli::Cli;

use lcx_core::chernoff::{
    bound_single_lc, bound_sum_discrete_lc, bound_ulc, bound_ulc_n, bound_weighted_continuous,
    chernoff_bound, legendre, linspace, mgf_bound_lemma,
};
use lcx_core::classify::Order;
use lcx_core::entropy::{bernoulli_geometric_counterexample, max_entropy_check};
use lcx_core::majorize::{
    default_lambda_grid, matched_mean_log_affine, verify_convex_order, Reference,
};
use lcx_core::moments::{
    corollary_moment_bounds, keilson_check, ulc_factorial_check, ulc_factorial_slack,
    MomentCorollary,
};
use lcx_core::oracle::{convolve_all, gen_log_concave, gen_log_concave_density, mc_tail, GenClass};
use lcx_core::report::{crossing_trial, mean_at_least_one};
use lcx_core::{ContinuousDist, DiscreteDist, DiscreteFamily, Dist, RateFunction, Side};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn e<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn discrete_draw(seed: u64, size: usize, class: GenClass) -> Result<Dist, String> {
    gen_log_concave(seed, size, class)
        .map(Into::into)
        .map_err(e)
}

fn majorization() -> Outcome {
    let cases = [
        ("geometric", GenClass::Lc, Reference::GeometricFrom(0)),
        ("poisson", GenClass::Ulc, Reference::Poisson),
        ("binomial", GenClass::UlcN(10), Reference::Binomial(10)),
    ];
    let mut worst = f64::INFINITY;
    let mut draws = 0;
    for (name, class, reference) in cases {
        for seed in 0..200u64 {
            let x = discrete_draw(seed, 2 + (seed % 10) as usize, class)?;
            if x.as_discrete().is_some_and(|d| d.len() == 1) {
                continue;
            }
            let z = matched_mean_log_affine(&x, reference).map_err(e)?;
            let rep = verify_convex_order(&x, &z, &default_lambda_grid(&x, &z)).map_err(e)?;
            if rep.min_psi < -1e-9 - rep.tolerance {
                return Err(format!("{name} seed {seed}: min psi {}", rep.min_psi));
            }
            worst = worst.min(rep.min_psi);
            draws += 1;
        }
    }
    for seed in 0..200u64 {
        let x: Dist = gen_log_concave_density(seed, 8 + (seed % 30) as usize)
            .map_err(e)?
            .into();
        let z = matched_mean_log_affine(&x, Reference::Exponential).map_err(e)?;
        let rep = verify_convex_order(&x, &z, &default_lambda_grid(&x, &z)).map_err(e)?;
        if rep.min_psi < -1e-9 - rep.tolerance {
            return Err(format!("exponential seed {seed}: min psi {}", rep.min_psi));
        }
        worst = worst.min(rep.min_psi);
        draws += 1;
    }
    Ok(format!("{draws} draws, min psi {worst:.3e}"))
}

fn crossings() -> Outcome {
    let row = crossing_trial(7, 50, 50).map_err(e)?;
    check(
        row.fail == 0 && row.pass == 2500,
        format!("{} pass, {} fail", row.pass, row.fail),
    )
}

fn domination_on<B, O>(what: &str, ts: &[f64], bound: B, oracle: O) -> Result<f64, String>
where
    B: Fn(f64) -> f64,
    O: Fn(f64) -> f64,
{
    let mut worst = f64::INFINITY;
    for &t in ts {
        let slack = bound(t) - oracle(t);
        if slack < -1e-10 {
            return Err(format!(
                "{what} t={t}: bound {} < oracle {}",
                bound(t),
                oracle(t)
            ));
        }
        worst = worst.min(slack);
    }
    Ok(worst)
}

fn geometric_mean(m: f64) -> Result<DiscreteDist, String> {
    DiscreteFamily::geometric(1.0 / m)
        .and_then(|f| f.materialize())
        .map_err(e)
}

fn bound_domination() -> Outcome {
    let means = [2.0, 2.0];
    let sum = convolve_all(&[geometric_mean(2.0)?, geometric_mean(2.0)?]).map_err(e)?;
    let mut worst = domination_on(
        "t1.1",
        &linspace(1.0, 5.0, 50),
        |t| bound_sum_discrete_lc(&means, t, Side::Upper).unwrap(),
        |t| sum.tail(4.0 * t, Side::Upper),
    )?;
    let b = DiscreteFamily::binomial(10, 0.5)
        .and_then(|f| f.materialize())
        .map_err(e)?;
    worst = worst.min(domination_on(
        "t1.3",
        &linspace(0.0, 0.5, 50),
        |t| bound_ulc_n(10, 0.5, t, Side::Lower).unwrap(),
        |t| b.tail((0.5 - t) * 10.0, Side::Lower),
    )?);
    let p = DiscreteFamily::poisson(1.0)
        .and_then(|f| f.materialize())
        .map_err(e)?;
    worst = worst.min(domination_on(
        "t1.4",
        &linspace(0.0, 8.0, 50),
        |t| bound_ulc(1.0, t, Side::Upper).unwrap(),
        |t| p.tail(1.0 + t, Side::Upper),
    )?);
    let g = geometric_mean(2.0)?;
    worst = worst.min(domination_on(
        "c3.3",
        &linspace(1.0, 8.0, 50),
        |t| bound_single_lc(2.0, t, Side::Upper).unwrap(),
        |t| g.tail(2.0 * t, Side::Upper),
    )?);
    let spots = [
        (
            sum.tail(8.0, Side::Upper),
            0.0625,
            bound_sum_discrete_lc(&means, 2.0, Side::Upper).unwrap(),
            0.54134,
        ),
        (
            b.tail(3.0, Side::Lower),
            0.171875,
            bound_ulc_n(10, 0.5, 0.2, Side::Lower).unwrap(),
            0.4392,
        ),
        (
            p.tail(3.0, Side::Upper),
            0.08030,
            bound_ulc(1.0, 2.0, Side::Upper).unwrap(),
            0.51342,
        ),
        (
            g.tail(6.0, Side::Upper),
            0.03125,
            bound_single_lc(2.0, 3.0, Side::Upper).unwrap(),
            0.40601,
        ),
    ];
    for (oracle, want_o, bound, want_b) in spots {
        if (oracle - want_o).abs() > 1e-5 || (bound - want_b).abs() > 1e-4 {
            return Err(format!(
                "spot value oracle {oracle} (want {want_o}), bound {bound} (want {want_b})"
            ));
        }
    }
    Ok(format!("min slack {worst:.3e}; spot values match"))
}

fn engine_consistency() -> Outcome {
    let mut worst_gap = f64::INFINITY;
    for m in [0.5, 1.0, 4.0] {
        let rate = RateFunction::from_discrete(
            &DiscreteFamily::poisson(m)
                .and_then(|f| f.materialize())
                .map_err(e)?,
        );
        for t in linspace(0.0, 6.0, 50) {
            let gap =
                bound_ulc(m, t, Side::Upper).unwrap() - chernoff_bound(&rate, m + t, Side::Upper);
            if gap < -1e-10 {
                return Err(format!(
                    "poisson {m} t={t}: engine above closed form by {}",
                    -gap
                ));
            }
            worst_gap = worst_gap.min(gap);
        }
    }
    let parts = [
        RateFunction::from_discrete(&geometric_mean(2.0)?),
        RateFunction::from_discrete(&geometric_mean(3.0)?),
    ];
    let rate = RateFunction::sum(&parts);
    for t in linspace(1.0, 4.0, 50) {
        let gap = bound_sum_discrete_lc(&[2.0, 3.0], t, Side::Upper).unwrap()
            - chernoff_bound(&rate, 5.0 * t, Side::Upper);
        if gap < -1e-10 {
            return Err(format!("geometric sum t={t}: engine above closed form"));
        }
        worst_gap = worst_gap.min(gap);
    }
    let rate = RateFunction::from_discrete(
        &DiscreteFamily::poisson(1.0)
            .and_then(|f| f.materialize())
            .map_err(e)?,
    );
    let (engine, closed) = (
        chernoff_bound(&rate, 2.0, Side::Upper),
        bound_ulc(1.0, 1.0, Side::Upper).unwrap(),
    );
    if (engine - 0.6796).abs() > 1e-4 || (closed - 0.7788).abs() > 1e-4 {
        return Err(format!(
            "poisson t=1: engine {engine}, closed form {closed}"
        ));
    }
    let mut legendre_err: f64 = 0.0;
    for a in linspace(0.1, 6.0, 40) {
        let side = if a > 1.0 { Side::Upper } else { Side::Lower };
        let v = legendre(&rate, a, side).value;
        legendre_err = legendre_err.max((v - (a * a.ln() - a + 1.0)).abs());
    }
    let exp =
        RateFunction::from_continuous(&ContinuousDist::exponential(2.0).map_err(e)?).map_err(e)?;
    for a in linspace(0.05, 3.0, 40) {
        let side = if a > 0.5 { Side::Upper } else { Side::Lower };
        let v = legendre(&exp, a, side).value;
        legendre_err = legendre_err.max((v - (2.0 * a - 1.0 - (2.0 * a).ln())).abs());
    }
    check(
        legendre_err <= 1e-8,
        format!("engine {engine:.4} <= {closed:.4}; min gap {worst_gap:.3e}; legendre error {legendre_err:.2e}"),
    )
}

fn weighted_monte_carlo() -> Outcome {
    let u = ContinuousDist::uniform(0.0, 2.0).map_err(e)?;
    let mut parts = Vec::new();
    let mut ok = true;
    for t in [1.25, 1.5, 1.75] {
        let est = mc_tail(&[u.clone(), u.clone()], &[1.0, 1.0], t, 1_000_000, 7).map_err(e)?;
        let bound = bound_weighted_continuous(&[1.0, 1.0], t, Side::Upper).map_err(e)?;
        ok &= est.estimate <= bound + 3.0 * est.ci_halfwidth;
        parts.push(format!("t={t}: {:.5} <= {:.5}", est.estimate, bound));
    }
    check(ok, parts.join("; "))
}

fn factorial_moments() -> Outcome {
    let mut worst = f64::INFINITY;
    for seed in 0..500u64 {
        let d = gen_log_concave(seed, 2 + (seed % 14) as usize, GenClass::Lc).map_err(e)?;
        let rep = keilson_check(&d, 12).map_err(e)?;
        if rep.min_log_slack < -1e-9 {
            return Err(format!("keilson seed {seed}: {}", rep.min_log_slack));
        }
        worst = worst.min(rep.min_log_slack);

        let n = 2 + seed % 11;
        let u = gen_log_concave(seed, (n + 1) as usize, GenClass::UlcN(n)).map_err(e)?;
        let rep = ulc_factorial_check(&u, Order::Finite(n), 14).map_err(e)?;
        if rep.min_log_slack < -1e-9 {
            return Err(format!("ulc({n}) seed {seed}: {}", rep.min_log_slack));
        }
        worst = worst.min(rep.min_log_slack);

        let v = gen_log_concave(seed, 2 + (seed % 14) as usize, GenClass::Ulc).map_err(e)?;
        let rep = ulc_factorial_check(&v, Order::Infinite, 12).map_err(e)?;
        if rep.min_log_slack < -1e-9 {
            return Err(format!("ulc seed {seed}: {}", rep.min_log_slack));
        }
        worst = worst.min(rep.min_log_slack);
    }
    let mut exact: f64 = 0.0;
    for n in [4u64, 10, 20] {
        let b = DiscreteFamily::binomial(n, 0.35)
            .and_then(|f| f.materialize())
            .map_err(e)?;
        let rep = ulc_factorial_slack(&b, Order::Finite(n), n as usize).map_err(e)?;
        exact = exact.max(rep.slacks.iter().map(|s| s.1.abs()).fold(0.0, f64::max));
    }
    for m in [0.5, 3.0] {
        let p = DiscreteFamily::poisson(m)
            .and_then(|f| f.materialize())
            .map_err(e)?;
        let rep = ulc_factorial_slack(&p, Order::Infinite, 12).map_err(e)?;
        exact = exact.max(rep.slacks.iter().map(|s| s.1.abs()).fold(0.0, f64::max));
    }
    check(
        exact <= 1e-9,
        format!("1500 draws, min log-slack {worst:.3e}; equality cases within {exact:.2e}"),
    )
}

fn max_entropy() -> Outcome {
    const ALPHAS: [f64; 4] = [0.25, 0.5, 0.75, 1.0];
    let cases = [
        ("geometric", GenClass::Lc, Reference::GeometricFrom(0)),
        ("poisson", GenClass::Ulc, Reference::Poisson),
        ("binomial", GenClass::UlcN(8), Reference::Binomial(8)),
    ];
    let mut worst = f64::INFINITY;
    let mut rows = 0;
    for (name, class, reference) in cases {
        for seed in 0..200u64 {
            let x = discrete_draw(seed, 2 + (seed % 8) as usize, class)?;
            if x.as_discrete().is_some_and(|d| d.len() == 1) {
                continue;
            }
            let z = matched_mean_log_affine(&x, reference).map_err(e)?;
            let c = max_entropy_check(&x, &z, &ALPHAS).map_err(e)?;
            if !c.all_hold() {
                return Err(format!("{name} seed {seed}: slack {}", c.min_slack()));
            }
            worst = worst.min(c.min_slack());
            rows += c.rows.len();
        }
    }
    for seed in 0..200u64 {
        let x: Dist = gen_log_concave_density(seed, 8 + (seed % 30) as usize)
            .map_err(e)?
            .into();
        let z = matched_mean_log_affine(&x, Reference::Exponential).map_err(e)?;
        let c = max_entropy_check(&x, &z, &ALPHAS).map_err(e)?;
        if !c.all_hold() {
            return Err(format!("exponential seed {seed}: slack {}", c.min_slack()));
        }
        worst = worst.min(c.min_slack());
        rows += c.rows.len();
    }
    Ok(format!("{rows} comparisons, min H_z - H_x {worst:.3e}"))
}

fn counterexample() -> Outcome {
    let r = bernoulli_geometric_counterexample(2.0, 0.99).map_err(e)?;
    let mut ok = r.strict_violation
        && r.h_bernoulli > r.h_geometric
        && (r.ratio_to_limit - 1.9206).abs() <= 1e-3;
    let mut parts = vec![format!(
        "alpha=2 p=0.99: ratio {:.5}, strict {}",
        r.ratio_to_limit, r.strict_violation
    )];
    for alpha in [1.5, 2.0, 3.0] {
        let r = bernoulli_geometric_counterexample(alpha, 1.0 - 1e-4).map_err(e)?;
        let near = (r.ratio_to_limit - alpha).abs() <= 1e-2;
        ok &= near;
        parts.push(format!(
            "alpha={alpha}: ratio {:.5}{}",
            r.ratio_to_limit,
            if near { "" } else { " (off by more than 1e-2)" }
        ));
    }
    check(ok, parts.join("; "))
}

fn moment_corollaries() -> Outcome {
    let x: Dist = ContinuousDist::exponential(1.0).map_err(e)?.into();
    let r = corollary_moment_bounds(&x, 1.0, 2.0, MomentCorollary::Continuous).map_err(e)?;
    let gap = (r.lhs - r.rhs).abs();
    if gap > 1e-9 {
        return Err(format!("exponential: |lhs - rhs| = {gap}"));
    }
    let mut worst = f64::INFINITY;
    for seed in 0..200u64 {
        let d = mean_at_least_one(
            gen_log_concave(seed, 1 + (seed % 14) as usize, GenClass::Lc).map_err(e)?,
        );
        let d: Dist = d.into();
        for (a, b) in [(1.0, 2.0), (1.0, 3.0), (2.0, 4.0)] {
            for which in [
                MomentCorollary::DiscreteGeneral,
                MomentCorollary::DiscreteMeanAtLeastOne,
            ] {
                let r = corollary_moment_bounds(&d, a, b, which).map_err(e)?;
                if !r.holds {
                    return Err(format!(
                        "seed {seed} ({a},{b}) {which:?}: {} > {}",
                        r.lhs, r.rhs
                    ));
                }
                worst = worst.min(r.slack);
            }
        }
        for (a, b) in [(0.25, 1.0), (0.5, 2.0)] {
            let r = corollary_moment_bounds(&d, a, b, MomentCorollary::DiscreteSmallAlpha)
                .map_err(e)?;
            if !r.holds {
                return Err(format!(
                    "seed {seed} ({a},{b}) small alpha: {} > {}",
                    r.lhs, r.rhs
                ));
            }
            worst = worst.min(r.slack);
        }
    }
    Ok(format!(
        "exponential gap {gap:.2e}; discrete min slack {worst:.3e}"
    ))
}

fn mgf_chain() -> Outcome {
    let mut worst = f64::INFINITY;
    for p in [0.2, 0.5, 0.8] {
        let g = DiscreteFamily::geometric(p)
            .and_then(|f| f.materialize())
            .map_err(e)?;
        let x = ContinuousDist::exponential(p).map_err(e)?;
        for lambda in [p, p / 2.0, p / 4.0] {
            for i in 0..20 {
                let theta = -2.0 + (0.999 * lambda + 2.0) * i as f64 / 19.0;
                let (mg, mx) = (g.mgf(theta).map_err(e)?, x.mgf(theta).map_err(e)?);
                let lemma = mgf_bound_lemma(p, theta, lambda).map_err(e)?;
                let slack = (mx - mg).min(lemma - mx);
                if slack < -1e-12 {
                    return Err(format!(
                        "p={p} lambda={lambda} theta={theta}: slack {slack}"
                    ));
                }
                worst = worst.min(slack);
            }
        }
    }
    Ok(format!("180 points, min slack {worst:.3e}"))
}

fn determinism() -> Outcome {
    let run = || -> Result<(lcx_cli::Outcome, String), String> {
        let cli = Cli::try_parse_from(["lcx", "report", "all", "--seed", "7"]).map_err(e)?;
        let mut out = Vec::new();
        let status = lcx_cli::run(cli, None, &mut out).map_err(e)?;
        Ok((status, String::from_utf8(out).map_err(e)?))
    };
    let ((status, a), (_, b)) = (run()?, run()?);
    let body = |s: &str| {
        s.lines()
            .filter(|l| !l.starts_with('#'))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let same = body(&a) == body(&b);
    let rows = body(&a).lines().count().saturating_sub(1);
    check(
        same && status == lcx_cli::Outcome::Holds && rows > 0,
        format!("{rows} rows, identical {same}, {status:?}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("majorization by log-affine references", majorization),
        ("crossing monotonicity", crossings),
        ("bound domination", bound_domination),
        ("chernoff engine consistency", engine_consistency),
        ("weighted continuous sum, monte carlo", weighted_monte_carlo),
        ("factorial moment log-concavity", factorial_moments),
        ("maximum entropy", max_entropy),
        ("bernoulli-geometric counterexample", counterexample),
        ("moment corollaries", moment_corollaries),
        ("mgf domination chain", mgf_chain),
        ("report determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
