//! `lcx`: classification verdicts, bound-versus-oracle curves, moment and
//! entropy tables, and seeded property reports for log-concave laws.
//!
//! Exit status: 0 when everything checked holds, 1 when an inequality or
//! class membership fails, 2 on usage or parse errors.

use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use lcx_core::chernoff::{self, BoundCurve};
use lcx_core::classify::{self, ClassVerdict, Classifier, Order};
use lcx_core::entropy::{bernoulli_geometric_counterexample, max_entropy_check, renyi};
use lcx_core::format::g12;
use lcx_core::majorize::{matched_mean_log_affine, Reference};
use lcx_core::moments::{self, factorial_moments, Normalization};
use lcx_core::oracle::{self, GenClass};
use lcx_core::report::{self, Suite};
use lcx_core::{io, ContinuousDist, DiscreteDist, DiscreteFamily, Dist, Error, RateFunction, Side};

const FAMILY_HELP: &str = "Family specs have the form `name:param[,param]`:
  geometric:p[,start]   p(1-p)^(k-start) on {start, ...}; start defaults to 1
  poisson:lambda        binomial:n,p          bernoulli:q
  uniform:a,b           discrete uniform on {a..b}
  point:k               exponential:rate
  cuniform:a,b          uniform density on [a, b]
  gaussian:mean,var

Exit status: 0 all checks hold, 1 an inequality or membership fails, 2 usage or parse error.
LCX_SEED, when set, overrides --seed.";

#[derive(Parser)]
#[command(name = "lcx", version, about = "Log-concavity classes and certified inequalities", after_help = FAMILY_HELP)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Class membership verdict for one law.
    Classify(ClassifyArgs),
    /// Closed-form tail bound against an exact or Monte Carlo oracle.
    Bound(BoundArgs),
    /// Seeded property suites.
    Report(ReportArgs),
    /// Factorial-moment tables and sequence checks.
    Moments(MomentsArgs),
    /// Rényi entropies and maximum-entropy comparisons.
    Entropy(EntropyArgs),
    /// Write seeded generator draws as PMF CSV files.
    Corpus(CorpusArgs),
}

#[derive(Args)]
struct Input {
    /// PMF CSV with rows `k,p`.
    #[arg(long, group = "input")]
    pmf: Option<PathBuf>,
    /// Gridded density CSV with rows `x,f`.
    #[arg(long, group = "input")]
    grid: Option<PathBuf>,
    /// Family spec, e.g. `binomial:10,0.3`.
    #[arg(long, group = "input")]
    family: Option<String>,
}

impl Input {
    fn is_given(&self) -> bool {
        self.pmf.is_some() || self.grid.is_some() || self.family.is_some()
    }

    fn load(&self) -> Result<Dist, Error> {
        if let Some(p) = &self.pmf {
            return Ok(io::read_pmf(p)?.into());
        }
        if let Some(p) = &self.grid {
            return Ok(ContinuousDist::grid(io::read_grid(p)?).into());
        }
        if let Some(f) = &self.family {
            return io::parse_family(f);
        }
        Err(Error::InvalidParameter(
            "one of --pmf, --grid, --family is required".into(),
        ))
    }
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    input: Input,
    /// Test log-concavity relative to this family spec.
    #[arg(long)]
    relative_to: Option<String>,
    /// Test ultra log-concavity of order N, or `inf`.
    #[arg(long, value_name = "N|inf")]
    ulc: Option<String>,
    /// Use zero slack in every inequality.
    #[arg(long)]
    strict: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundKind {
    /// Sum of lc variables on {1, 2, ...} with given means; oracle: geometric convolution.
    #[value(name = "t1_1")]
    T11,
    /// Weighted sum of unit-mean continuous lc variables; oracle: Monte Carlo.
    #[value(name = "t1_2")]
    T12,
    /// ULC(n) with mean mu*n; oracle: binomial.
    #[value(name = "t1_3")]
    T13,
    /// ULC with given mean; oracle: Poisson.
    #[value(name = "t1_4")]
    T14,
    /// Single lc variable on {1, 2, ...}; oracle: geometric.
    #[value(name = "c3_3")]
    C33,
    /// exp(-Legendre transform) of a family's cgf at mean +/- t; oracle: the family's tail.
    Chernoff,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Upper,
    Lower,
}

#[derive(Clone, Copy, ValueEnum)]
enum McLaw {
    /// uniform(0, 2)
    Uniform,
    /// exponential(1)
    Exponential,
}

#[derive(Args)]
struct BoundArgs {
    kind: BoundKind,
    /// Grid `a:b:step`, a list `a,b,...`, or one value.
    #[arg(long, allow_hyphen_values = true)]
    t: String,
    #[arg(long, value_enum, default_value = "on")]
    oracle: Switch,
    /// Tail side; multiplicative bounds default to upper for t >= 1 and lower below.
    #[arg(long, value_enum)]
    side: Option<SideArg>,
    /// Summand means (t1_1).
    #[arg(long, value_delimiter = ',')]
    means: Vec<f64>,
    /// Summand weights (t1_2).
    #[arg(long, value_delimiter = ',')]
    weights: Vec<f64>,
    /// Summand law for the Monte Carlo oracle (t1_2).
    #[arg(long, value_enum, default_value = "uniform")]
    law: McLaw,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    /// Mean (t1_4, c3_3).
    #[arg(long)]
    mean: Option<f64>,
    /// Order (t1_3).
    #[arg(long)]
    n: Option<u64>,
    /// Normalized mean E[X]/n (t1_3).
    #[arg(long)]
    mu: Option<f64>,
    /// Family spec (chernoff).
    #[arg(long)]
    family: Option<String>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(value_parser = parse_suite)]
    suite: Suite,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    draws: usize,
    /// Omit the `#` header line.
    #[arg(long)]
    no_header: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MomentsArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, default_value_t = 12)]
    max_p: usize,
    /// `raw`, `keilson`, or `ulc:N`.
    #[arg(long, default_value = "raw")]
    normalization: String,
    /// Check a sequence inequality instead: `keilson`, `ulc:N`, or `ulc:inf`.
    #[arg(long)]
    check: Option<String>,
}

#[derive(Args)]
struct EntropyArgs {
    #[command(flatten)]
    input: Input,
    /// Orders; `inf` gives min-entropy.
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75,1")]
    alpha: Vec<String>,
    /// Compare against this family spec.
    #[arg(long, group = "reference")]
    against: Option<String>,
    /// Compare against the matched-mean law: `geometric[:start]`, `poisson`, `binomial:N`, `exponential`.
    #[arg(long, group = "reference")]
    matched: Option<String>,
    /// Bernoulli-versus-geometric comparison at this p for each order above one.
    #[arg(long)]
    counterexample: Option<f64>,
}

#[derive(Args)]
struct CorpusArgs {
    /// `lc`, `ulc`, or `ulc:N`.
    #[arg(long)]
    class: String,
    /// Seed range `a..b` (exclusive) or list.
    #[arg(long, default_value = "0..10")]
    seeds: String,
    #[arg(long, default_value_t = 8)]
    size: usize,
    #[arg(long)]
    dir: PathBuf,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Holds,
    Fails,
}

/// Runs one parsed command, writing its CSV to `out`. `env_seed` is the
/// value of `LCX_SEED`, which replaces any `--seed`.
pub fn run(cli: Cli, env_seed: Option<&str>, out: &mut dyn Write) -> Result<Outcome, Error> {
    match cli.command {
        Command::Classify(a) => classify_cmd(out, a),
        Command::Bound(a) => bound_cmd(out, env_seed, a),
        Command::Report(a) => report_cmd(out, env_seed, a),
        Command::Moments(a) => moments_cmd(out, a),
        Command::Entropy(a) => entropy_cmd(out, a),
        Command::Corpus(a) => corpus_cmd(out, a),
    }
}

fn outcome(ok: bool) -> Outcome {
    if ok {
        Outcome::Holds
    } else {
        Outcome::Fails
    }
}

fn seed_override(seed: u64, env_seed: Option<&str>) -> Result<u64, Error> {
    match env_seed {
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("LCX_SEED `{v}` is not an integer"))),
        None => Ok(seed),
    }
}

fn emit(out: &mut dyn Write, text: &str, path: Option<&PathBuf>) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => write!(out, "{text}")?,
    }
    Ok(())
}

fn parse_order(s: &str) -> Result<Order, Error> {
    if s == "inf" {
        return Ok(Order::Infinite);
    }
    s.parse()
        .map(Order::Finite)
        .map_err(|_| Error::InvalidParameter(format!("order `{s}` is not an integer or `inf`")))
}

fn verdict_csv(class: &str, v: &ClassVerdict) -> String {
    let w = v.witness.map(|w| w.to_string()).unwrap_or_default();
    format!(
        "class,is_member,witness,margin\n{class},{},{w},{}\n",
        v.is_member,
        g12(v.margin)
    )
}

fn classify_cmd(out: &mut dyn Write, a: ClassifyArgs) -> Result<Outcome, Error> {
    let x = a.input.load()?;
    let c = if a.strict {
        Classifier::strict()
    } else {
        Classifier::default()
    };
    let (class, v) = if let Some(spec) = &a.relative_to {
        let z = io::parse_family(spec)?;
        let grid = match &x {
            Dist::Continuous(xc) => classify::default_grid(xc.effective_support(1e-12), 257),
            Dist::Discrete(_) => Vec::new(),
        };
        ("relative", c.relative_dist(&x, &z, &grid)?)
    } else if let Some(order) = &a.ulc {
        let d = x.as_discrete().ok_or_else(|| {
            Error::Precondition("ultra log-concavity needs a discrete law".into())
        })?;
        ("ulc", c.ulc(d, parse_order(order)?)?)
    } else {
        let v = match &x {
            Dist::Discrete(d) => c.log_concave(d),
            Dist::Continuous(xc) => c.log_concave_continuous(
                xc,
                &classify::default_grid(xc.effective_support(1e-12), 257),
            ),
        };
        ("log_concave", v)
    };
    write!(out, "{}", verdict_csv(class, &v))?;
    Ok(outcome(v.is_member))
}

fn parse_ts(s: &str) -> Result<Vec<f64>, Error> {
    let num = |v: &str| {
        v.trim()
            .parse::<f64>()
            .map_err(|_| Error::InvalidParameter(format!("`{v}` is not a number")))
    };
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if !(step > 0.0) || b < a {
                return Err(Error::InvalidParameter(format!("bad grid `{s}`")));
            }
            let n = ((b - a) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|i| a + step * i as f64).collect())
        }
        [one] => one.split(',').map(num).collect(),
        _ => Err(Error::InvalidParameter(format!(
            "bad grid `{s}`; expected a:b:step or a list"
        ))),
    }
}

fn multiplicative_side(side: Option<SideArg>, t: f64) -> Side {
    match side {
        Some(SideArg::Upper) => Side::Upper,
        Some(SideArg::Lower) => Side::Lower,
        None if t >= 1.0 => Side::Upper,
        None => Side::Lower,
    }
}

fn fixed_side(side: Option<SideArg>) -> Side {
    match side {
        Some(SideArg::Lower) => Side::Lower,
        _ => Side::Upper,
    }
}

fn require<T>(v: Option<T>, flag: &str) -> Result<T, Error> {
    v.ok_or_else(|| Error::InvalidParameter(format!("--{flag} is required for this bound")))
}

fn geometric_sum(means: &[f64]) -> Result<DiscreteDist, Error> {
    let parts = means
        .iter()
        .map(|m| DiscreteFamily::geometric(1.0 / m)?.materialize())
        .collect::<Result<Vec<_>, _>>()?;
    oracle::convolve_all(&parts)
}

fn bound_cmd(out: &mut dyn Write, env_seed: Option<&str>, a: BoundArgs) -> Result<Outcome, Error> {
    let ts = parse_ts(&a.t)?;
    let seed = seed_override(a.seed, env_seed)?;
    let with_oracle = a.oracle == Switch::On;
    let side = a.side;
    let curve = match a.kind {
        BoundKind::T11 | BoundKind::C33 => {
            let means = match a.kind {
                BoundKind::C33 => vec![require(a.mean, "mean")?],
                _ if a.means.is_empty() => {
                    return Err(Error::InvalidParameter(
                        "--means is required for t1_1".into(),
                    ))
                }
                _ => a.means.clone(),
            };
            let total: f64 = means.iter().sum();
            let sum = if with_oracle {
                Some(geometric_sum(&means)?)
            } else {
                None
            };
            sweep(
                &ts,
                |t| chernoff::bound_sum_discrete_lc(&means, t, multiplicative_side(side, t)),
                sum.map(|s| move |t: f64| Ok(s.tail(t * total, multiplicative_side(side, t)))),
            )?
        }
        BoundKind::T12 => {
            if a.weights.is_empty() {
                return Err(Error::InvalidParameter(
                    "--weights is required for t1_2".into(),
                ));
            }
            let law = match a.law {
                McLaw::Uniform => ContinuousDist::uniform(0.0, 2.0)?,
                McLaw::Exponential => ContinuousDist::exponential(1.0)?,
            };
            let laws = vec![law; a.weights.len()];
            let weights = a.weights.clone();
            let samples = a.samples;
            let mut rows = sweep(
                &ts,
                |t| chernoff::bound_weighted_continuous(&weights, t, multiplicative_side(side, t)),
                with_oracle.then_some(|t: f64| {
                    oracle::mc_tail_side(
                        &laws,
                        &weights,
                        t,
                        multiplicative_side(side, t),
                        samples,
                        seed,
                    )
                    .map(|m| m.estimate)
                }),
            )?;
            if with_oracle {
                // Monte Carlo rows count as dominated within three half-widths.
                for r in &mut rows.rows {
                    let o = r.oracle.expect("oracle on");
                    let ci = oracle::Z99 * (o * (1.0 - o) / samples as f64).sqrt();
                    r.dominated = Some(o <= r.bound + 3.0 * ci);
                }
            }
            rows
        }
        BoundKind::T13 => {
            let n = require(a.n, "n")?;
            let mu = require(a.mu, "mu")?;
            let s = fixed_side(side);
            let b = if with_oracle {
                Some(DiscreteFamily::binomial(n, mu)?.materialize()?)
            } else {
                None
            };
            sweep(
                &ts,
                |t| chernoff::bound_ulc_n(n, mu, t, s),
                b.map(|b| {
                    move |t: f64| {
                        let k = match s {
                            Side::Upper => (mu + t) * n as f64,
                            Side::Lower => (mu - t) * n as f64,
                        };
                        Ok(b.tail(k, s))
                    }
                }),
            )?
        }
        BoundKind::T14 => {
            let m = require(a.mean, "mean")?;
            let s = fixed_side(side);
            let p = if with_oracle {
                Some(DiscreteFamily::poisson(m)?.materialize()?)
            } else {
                None
            };
            sweep(
                &ts,
                |t| chernoff::bound_ulc(m, t, s),
                p.map(|p| move |t: f64| Ok(p.tail(additive(m, t, s), s))),
            )?
        }
        BoundKind::Chernoff => {
            let z = io::parse_family(&require(a.family.clone(), "family")?)?;
            let m = z.mean()?;
            let s = fixed_side(side);
            let rate = RateFunction::from_dist(&z)?;
            sweep(
                &ts,
                |t| Ok(chernoff::chernoff_bound(&rate, additive(m, t, s), s)),
                with_oracle.then_some(|t: f64| z.tail(additive(m, t, s), s)),
            )?
        }
    };
    let text = curve.to_csv();
    emit(out, &text, a.out.as_ref())?;
    Ok(outcome(curve.all_dominated()))
}

fn additive(m: f64, t: f64, s: Side) -> f64 {
    match s {
        Side::Upper => m + t,
        Side::Lower => m - t,
    }
}

fn sweep<B, O>(ts: &[f64], bound: B, oracle: Option<O>) -> Result<BoundCurve, Error>
where
    B: Fn(f64) -> Result<f64, Error>,
    O: Fn(f64) -> Result<f64, Error>,
{
    BoundCurve::sweep(ts, bound, oracle, lcx_core::tol::BOUND_SLACK)
}

fn report_cmd(
    out: &mut dyn Write,
    env_seed: Option<&str>,
    a: ReportArgs,
) -> Result<Outcome, Error> {
    let seed = seed_override(a.seed, env_seed)?;
    let rep = report::run(a.suite, seed, a.draws)?;
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let header = format!("lcx report seed={seed} draws={} generated={stamp}", a.draws);
    let text = rep.to_csv((!a.no_header).then_some(header.as_str()));
    emit(out, &text, a.out.as_ref())?;
    Ok(outcome(rep.all_pass()))
}

fn parse_normalization(s: &str) -> Result<Normalization, Error> {
    match s {
        "raw" => Ok(Normalization::Raw),
        "keilson" => Ok(Normalization::Keilson),
        _ => match s.strip_prefix("ulc:").map(str::parse::<u64>) {
            Some(Ok(n)) => Ok(Normalization::UlcN(n)),
            _ => Err(Error::InvalidParameter(format!(
                "normalization `{s}`; expected raw, keilson, or ulc:N"
            ))),
        },
    }
}

fn moments_cmd(out: &mut dyn Write, a: MomentsArgs) -> Result<Outcome, Error> {
    let x = a.input.load()?;
    let d = x
        .as_discrete()
        .ok_or_else(|| Error::Precondition("factorial moments need a discrete law".into()))?;
    let Some(check) = &a.check else {
        let t = factorial_moments(d, a.max_p, parse_normalization(&a.normalization)?)?;
        write!(out, "{}", t.to_csv())?;
        return Ok(Outcome::Holds);
    };
    let rep = match check.as_str() {
        "keilson" => moments::keilson_check(d, a.max_p)?,
        other => match other.strip_prefix("ulc:") {
            Some(o) => moments::ulc_factorial_check(d, parse_order(o)?, a.max_p)?,
            None => {
                return Err(Error::InvalidParameter(format!(
                    "check `{other}`; expected keilson or ulc:N"
                )))
            }
        },
    };
    let mut text = String::from("p,log_slack\n");
    for (p, s) in &rep.slacks {
        text.push_str(&format!("{p},{}\n", g12(*s)));
    }
    write!(out, "{text}")?;
    Ok(outcome(rep.holds))
}

fn parse_alpha(s: &str) -> Result<f64, Error> {
    match s.trim() {
        "inf" => Ok(f64::INFINITY),
        v => v
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("order `{v}` is not a number"))),
    }
}

fn parse_reference(s: &str) -> Result<Reference, Error> {
    let bad = || Error::InvalidParameter(format!("reference `{s}`"));
    let (name, arg) = s.split_once(':').map_or((s, None), |(a, b)| (a, Some(b)));
    match (name, arg) {
        ("geometric", None) => Ok(Reference::GeometricFrom(1)),
        ("geometric", Some(v)) => v.parse().map(Reference::GeometricFrom).map_err(|_| bad()),
        ("poisson", None) => Ok(Reference::Poisson),
        ("exponential", None) => Ok(Reference::Exponential),
        ("binomial", Some(v)) => v.parse().map(Reference::Binomial).map_err(|_| bad()),
        _ => Err(bad()),
    }
}

fn entropy_cmd(out: &mut dyn Write, a: EntropyArgs) -> Result<Outcome, Error> {
    let alphas = a
        .alpha
        .iter()
        .map(|s| parse_alpha(s))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(p) = a.counterexample {
        let mut text = String::from("alpha,p,H_bernoulli,H_geometric,strict_violation,ratio\n");
        for &al in &alphas {
            let r = bernoulli_geometric_counterexample(al, p)?;
            text.push_str(&format!(
                "{},{},{},{},{},{}\n",
                g12(al),
                g12(p),
                g12(r.h_bernoulli),
                g12(r.h_geometric),
                r.strict_violation,
                g12(r.ratio_to_limit)
            ));
        }
        write!(out, "{text}")?;
        return Ok(Outcome::Holds);
    }
    if !a.input.is_given() {
        return Err(Error::InvalidParameter(
            "one of --pmf, --grid, --family is required".into(),
        ));
    }
    let x = a.input.load()?;
    let z = match (&a.against, &a.matched) {
        (Some(spec), _) => Some(io::parse_family(spec)?),
        (None, Some(r)) => Some(matched_mean_log_affine(&x, parse_reference(r)?)?),
        (None, None) => None,
    };
    let Some(z) = z else {
        let mut text = String::from("alpha,H\n");
        for &al in &alphas {
            text.push_str(&format!("{},{}\n", g12(al), g12(renyi(&x, al)?.value)));
        }
        write!(out, "{text}")?;
        return Ok(Outcome::Holds);
    };
    let c = max_entropy_check(&x, &z, &alphas)?;
    write!(out, "{}", c.to_csv())?;
    Ok(outcome(c.all_hold()))
}

fn parse_class(s: &str) -> Result<GenClass, Error> {
    match s {
        "lc" => Ok(GenClass::Lc),
        "ulc" => Ok(GenClass::Ulc),
        _ => match s.strip_prefix("ulc:").map(str::parse::<u64>) {
            Some(Ok(n)) => Ok(GenClass::UlcN(n)),
            _ => Err(Error::InvalidParameter(format!(
                "class `{s}`; expected lc, ulc, or ulc:N"
            ))),
        },
    }
}

fn parse_seeds(s: &str) -> Result<Vec<u64>, Error> {
    let bad = || Error::InvalidParameter(format!("seeds `{s}`; expected a..b or a list"));
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (u64, u64) = (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        );
        return Ok((a..b).collect());
    }
    s.split(',')
        .map(|v| v.trim().parse().map_err(|_| bad()))
        .collect()
}

fn corpus_cmd(out: &mut dyn Write, a: CorpusArgs) -> Result<Outcome, Error> {
    let class = parse_class(&a.class)?;
    let paths = oracle::dump_corpus(&a.dir, class, &parse_seeds(&a.seeds)?, a.size)?;
    for p in paths {
        writeln!(out, "{}", p.display())?;
    }
    Ok(Outcome::Holds)
}
