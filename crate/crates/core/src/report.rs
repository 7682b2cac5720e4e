//! Seeded property suites over generated corpora. Each property yields one
//! summary row `property,pass,fail,min_slack`.

use std::str::FromStr;

use rand::Rng;

use crate::classify::{self, Classifier, Order};
use crate::entropy::{expectation_criterion_check, max_entropy_check, renyi};
use crate::format::g12;
use crate::majorize::{
    crossing_count_dists, default_lambda_grid, matched_mean_log_affine, pushforward,
    verify_convex_order, MonotoneMap, Reference,
};
use crate::moments::{
    corollary_moment_bounds, factorial_moments, keilson_check, root_chain_slack,
    ulc_factorial_check, MomentCorollary, Normalization,
};
use crate::oracle::{gen_log_concave, gen_log_concave_density, rng, GenClass};
use crate::{tol, DiscreteDist, Dist, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Majorize,
    Moments,
    Entropy,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "majorize" => Ok(Suite::Majorize),
            "moments" => Ok(Suite::Moments),
            "entropy" => Ok(Suite::Entropy),
            "all" => Ok(Suite::All),
            other => Err(Error::InvalidParameter(format!("unknown suite `{other}`"))),
        }
    }
}

/// Pass/fail counts for one property and the smallest slack observed.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyRow {
    pub property: String,
    pub pass: u64,
    pub fail: u64,
    /// Zero when nothing was measured.
    pub min_slack: f64,
}

impl PropertyRow {
    pub fn new(property: &str) -> Self {
        PropertyRow {
            property: property.to_owned(),
            pass: 0,
            fail: 0,
            min_slack: f64::INFINITY,
        }
    }

    pub fn record(&mut self, ok: bool, slack: f64) {
        if ok {
            self.pass += 1;
        } else {
            self.fail += 1;
        }
        self.min_slack = self.min_slack.min(slack);
    }

    fn finish(mut self) -> Self {
        if self.min_slack == f64::INFINITY {
            self.min_slack = 0.0;
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub rows: Vec<PropertyRow>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.fail == 0)
    }

    /// CSV body, preceded by `# {header}` when given.
    pub fn to_csv(&self, header: Option<&str>) -> String {
        let mut out = String::new();
        if let Some(h) = header {
            out.push_str(&format!("# {h}\n"));
        }
        out.push_str("property,pass,fail,min_slack\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.property,
                r.pass,
                r.fail,
                g12(r.min_slack)
            ));
        }
        out
    }
}

pub fn run(suite: Suite, seed: u64, draws: usize) -> Result<Report> {
    if draws == 0 {
        return Err(Error::InvalidParameter("at least one draw required".into()));
    }
    let mut rows = Vec::new();
    if matches!(suite, Suite::Majorize | Suite::All) {
        rows.extend(majorize_suite(seed, draws)?);
    }
    if matches!(suite, Suite::Moments | Suite::All) {
        rows.extend(moments_suite(seed, draws)?);
    }
    if matches!(suite, Suite::Entropy | Suite::All) {
        rows.extend(entropy_suite(seed, draws)?);
    }
    Ok(Report {
        rows: rows.into_iter().map(PropertyRow::finish).collect(),
    })
}

/// Per-draw seed and support size, from a dedicated stream per property.
fn draw_plan(seed: u64, stream: u64, draws: usize, max_size: usize) -> Vec<(u64, usize)> {
    let mut r = rng(seed, 10_000 + stream);
    (0..draws)
        .map(|_| (r.random::<u64>(), r.random_range(1..=max_size)))
        .collect()
}

fn order_plan(seed: u64, stream: u64, draws: usize) -> Vec<(u64, u64, usize)> {
    let mut r = rng(seed, 20_000 + stream);
    (0..draws)
        .map(|_| {
            let n = r.random_range(2..=12u64);
            (r.random::<u64>(), n, r.random_range(1..=n as usize + 1))
        })
        .collect()
}

/// A point mass at the bottom of the reference support is its own majorant.
fn is_degenerate(d: &DiscreteDist) -> bool {
    d.len() == 1 && d.min_k() == 0
}

fn convex_order_row(
    name: &str,
    class: GenClass,
    reference: Reference,
    plan: &[(u64, usize)],
) -> Result<PropertyRow> {
    let mut row = PropertyRow::new(name);
    for &(s, size) in plan {
        let x = gen_log_concave(s, size, class)?;
        if is_degenerate(&x) {
            row.record(true, 0.0);
            continue;
        }
        record_convex_order(&mut row, &x.into(), reference)?;
    }
    Ok(row)
}

fn record_convex_order(row: &mut PropertyRow, x: &Dist, reference: Reference) -> Result<()> {
    let z = matched_mean_log_affine(x, reference)?;
    let grid = match x {
        Dist::Continuous(c) => classify::default_grid(c.effective_support(1e-12), 257),
        Dist::Discrete(_) => Vec::new(),
    };
    let related = Classifier::default().relative_dist(x, &z, &grid)?.is_member;
    let rep = verify_convex_order(x, &z, &default_lambda_grid(x, &z))?;
    row.record(related && rep.is_member, rep.min_psi);
    Ok(())
}

/// Crossing counts of `pairs` random density pairs before and after
/// `maps` random non-decreasing maps each; slack is `before − after`.
pub fn crossing_trial(seed: u64, pairs: usize, maps: usize) -> Result<PropertyRow> {
    let mut row = PropertyRow::new("crossings_monotone");
    let mut r = rng(seed, 30_000);
    for _ in 0..pairs {
        let x = gen_log_concave(r.random(), r.random_range(1..=12), GenClass::Lc)?;
        let z = gen_log_concave(r.random(), r.random_range(1..=12), GenClass::Lc)?;
        let before = crossing_count_dists(&x, &z).count as f64;
        let lo = x.min_k().min(z.min_k());
        let len = (x.max_k().max(z.max_k()) - lo + 1) as usize;
        for _ in 0..maps {
            let mut v = r.random_range(-3..=3i64);
            let values: Vec<i64> = (0..len)
                .map(|_| {
                    let out = v;
                    v += r.random_range(0..=2i64);
                    out
                })
                .collect();
            let t = MonotoneMap::table(lo, values, r.random_range(0..=2))?;
            let after =
                crossing_count_dists(&pushforward(&x, &t)?, &pushforward(&z, &t)?).count as f64;
            row.record(after <= before, before - after);
        }
    }
    Ok(row)
}

fn majorize_suite(seed: u64, draws: usize) -> Result<Vec<PropertyRow>> {
    let mut rows = vec![
        convex_order_row(
            "convex_order_geometric",
            GenClass::Lc,
            Reference::GeometricFrom(0),
            &draw_plan(seed, 1, draws, 12),
        )?,
        convex_order_row(
            "convex_order_poisson",
            GenClass::Ulc,
            Reference::Poisson,
            &draw_plan(seed, 2, draws, 12),
        )?,
    ];
    let mut row = PropertyRow::new("convex_order_binomial");
    for (s, n, size) in order_plan(seed, 3, draws) {
        let x = gen_log_concave(s, size, GenClass::UlcN(n))?;
        if is_degenerate(&x) {
            row.record(true, 0.0);
            continue;
        }
        record_convex_order(&mut row, &x.into(), Reference::Binomial(n))?;
    }
    rows.push(row);
    let mut row = PropertyRow::new("convex_order_exponential");
    for (s, size) in draw_plan(seed, 4, draws, 40) {
        let x: Dist = gen_log_concave_density(s, size.max(4))?.into();
        record_convex_order(&mut row, &x, Reference::Exponential)?;
    }
    rows.push(row);
    rows.push(crossing_trial(seed, draws, 10)?);
    Ok(rows)
}

fn moments_suite(seed: u64, draws: usize) -> Result<Vec<PropertyRow>> {
    let mut keilson = PropertyRow::new("keilson");
    let mut chain = PropertyRow::new("factorial_root_chain");
    for (s, size) in draw_plan(seed, 5, draws, 12) {
        let d = gen_log_concave(s, size, GenClass::Lc)?;
        let p = (d.max_k().max(0) as usize).clamp(2, 12);
        let rep = keilson_check(&d, p)?;
        keilson.record(rep.holds, rep.min_log_slack);
        let c = root_chain_slack(&factorial_moments(&d, p, Normalization::Keilson)?.values);
        chain.record(c >= -tol::FACTORIAL_SLACK, c);
    }

    let mut ulc_n = PropertyRow::new("ulc_factorial_n");
    let mut chain_n = PropertyRow::new("factorial_root_chain_n");
    for (s, n, size) in order_plan(seed, 6, draws) {
        let d = gen_log_concave(s, size, GenClass::UlcN(n))?;
        let rep = ulc_factorial_check(&d, Order::Finite(n), 12)?;
        ulc_n.record(rep.holds, rep.min_log_slack);
        let c =
            root_chain_slack(&factorial_moments(&d, n as usize, Normalization::UlcN(n))?.values);
        chain_n.record(c >= -tol::FACTORIAL_SLACK, c);
    }

    let mut ulc = PropertyRow::new("ulc_factorial_inf");
    for (s, size) in draw_plan(seed, 7, draws, 12) {
        let d = gen_log_concave(s, size, GenClass::Ulc)?;
        let rep = ulc_factorial_check(&d, Order::Infinite, 12)?;
        ulc.record(rep.holds, rep.min_log_slack);
    }

    let mut disc = PropertyRow::new("moment_corollary_discrete");
    let mut small = PropertyRow::new("moment_corollary_small_alpha");
    for (s, size) in draw_plan(seed, 8, draws, 12) {
        let x: Dist = mean_at_least_one(gen_log_concave(s, size, GenClass::Lc)?).into();
        for (a, b) in [(1.0, 2.0), (1.5, 3.0), (2.0, 4.0)] {
            for which in [
                MomentCorollary::DiscreteMeanAtLeastOne,
                MomentCorollary::DiscreteGeneral,
            ] {
                let r = corollary_moment_bounds(&x, a, b, which)?;
                disc.record(r.holds, r.slack);
            }
        }
        for (a, b) in [(0.25, 1.0), (0.5, 2.0), (1.0, 3.0)] {
            let r = corollary_moment_bounds(&x, a, b, MomentCorollary::DiscreteSmallAlpha)?;
            small.record(r.holds, r.slack);
        }
    }

    let mut cont = PropertyRow::new("moment_corollary_continuous");
    for (s, size) in draw_plan(seed, 9, draws, 40) {
        let x: Dist = gen_log_concave_density(s, size.max(4))?.into();
        for (a, b) in [(1.0, 2.0), (0.5, 3.0), (2.0, 3.0)] {
            let r = corollary_moment_bounds(&x, a, b, MomentCorollary::Continuous)?;
            cont.record(r.holds, r.slack);
        }
    }
    Ok(vec![keilson, chain, ulc_n, chain_n, ulc, disc, small, cont])
}

/// Shifts a draw on `{0, …}` right by one when its mean is below one.
pub fn mean_at_least_one(d: DiscreteDist) -> DiscreteDist {
    if d.mean() < 1.0 {
        d.shifted(1)
    } else {
        d
    }
}

const ENTROPY_ALPHAS: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

fn max_entropy_row(row: &mut PropertyRow, x: &Dist, reference: Reference) -> Result<()> {
    let z = matched_mean_log_affine(x, reference)?;
    let c = max_entropy_check(x, &z, &ENTROPY_ALPHAS)?;
    row.record(c.all_hold(), c.min_slack());
    Ok(())
}

fn entropy_suite(seed: u64, draws: usize) -> Result<Vec<PropertyRow>> {
    let mut mono = PropertyRow::new("renyi_monotone");
    let mut lemma = PropertyRow::new("criterion_implies_entropy");
    let mut geo = PropertyRow::new("max_entropy_geometric");
    for (s, size) in draw_plan(seed, 11, draws, 12) {
        let d = gen_log_concave(s, size, GenClass::Lc)?;
        let x: Dist = d.clone().into();
        let hs: Vec<f64> = [0.0, 0.25, 0.5, 1.0, 2.0, f64::INFINITY]
            .iter()
            .map(|&a| renyi(&x, a).map(|h| h.value))
            .collect::<Result<_>>()?;
        let gap = hs
            .windows(2)
            .map(|w| w[0] - w[1])
            .fold(f64::INFINITY, f64::min);
        mono.record(gap >= -tol::ENTROPY, gap);
        if is_degenerate(&d) {
            lemma.record(true, 0.0);
            geo.record(true, 0.0);
            continue;
        }
        let z = matched_mean_log_affine(&x, Reference::GeometricFrom(0))?;
        for a in [0.25, 0.5, 0.75, 1.0, 2.0] {
            let r = expectation_criterion_check(&x, &z, a)?;
            if r.condition_holds {
                lemma.record(r.conclusion_holds, r.h_z - r.h_x);
            } else {
                lemma.record(true, 0.0);
            }
        }
        max_entropy_row(&mut geo, &x, Reference::GeometricFrom(0))?;
    }

    let mut poi = PropertyRow::new("max_entropy_poisson");
    for (s, size) in draw_plan(seed, 12, draws, 12) {
        let d = gen_log_concave(s, size, GenClass::Ulc)?;
        if is_degenerate(&d) {
            poi.record(true, 0.0);
            continue;
        }
        max_entropy_row(&mut poi, &d.into(), Reference::Poisson)?;
    }
    let mut bin = PropertyRow::new("max_entropy_binomial");
    for (s, n, size) in order_plan(seed, 13, draws) {
        let d = gen_log_concave(s, size, GenClass::UlcN(n))?;
        if is_degenerate(&d) {
            bin.record(true, 0.0);
            continue;
        }
        max_entropy_row(&mut bin, &d.into(), Reference::Binomial(n))?;
    }
    let mut exp = PropertyRow::new("max_entropy_exponential");
    for (s, size) in draw_plan(seed, 14, draws, 40) {
        let x: Dist = gen_log_concave_density(s, size.max(4))?.into();
        max_entropy_row(&mut exp, &x, Reference::Exponential)?;
    }
    Ok(vec![mono, lemma, geo, poi, bin, exp])
}
