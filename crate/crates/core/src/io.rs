//! CSV readers and writers for PMFs and gridded densities, and the
//! one-line family spec grammar `name:param[,param]`.
//!
//! | spec                  | law                                   |
//! |-----------------------|---------------------------------------|
//! | `geometric:p[,start]` | `p(1−p)^{k−start}` on `{start, …}`, start defaults to 1 |
//! | `poisson:λ`           | Poisson                               |
//! | `binomial:n,p`        | binomial on `{0..n}`                  |
//! | `bernoulli:q`         | `{0, 1}`                              |
//! | `uniform:a,b`         | discrete uniform on `{a..b}`          |
//! | `point:k`             | point mass                            |
//! | `exponential:rate`    | exponential density                   |
//! | `cuniform:a,b`        | uniform density on `[a, b]`           |
//! | `gaussian:mean,var`   | normal density                        |

use std::path::Path;

use crate::dist::GridDensity;
use crate::format::g12;
use crate::{ContinuousDist, DiscreteDist, DiscreteFamily, Dist, Error, Result};

/// Inputs whose mass is off by more than this are rejected; closer ones
/// are renormalized.
pub const MASS_SLACK: f64 = 1e-6;

fn records(text: &str) -> Vec<(u64, Vec<String>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in rdr.records() {
        let Ok(rec) = rec else { continue };
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        out.push((line, rec.iter().map(str::to_owned).collect()));
    }
    out
}

/// Two numeric columns per row; a non-numeric first row is a header.
fn numeric_rows(text: &str, names: (&str, &str)) -> Result<Vec<(u64, f64, f64)>> {
    let mut rows = Vec::new();
    for (i, (line, fields)) in records(text).into_iter().enumerate() {
        if fields.len() != 2 {
            return Err(Error::Parse {
                line,
                msg: format!(
                    "expected 2 fields `{},{}`, found {}",
                    names.0,
                    names.1,
                    fields.len()
                ),
            });
        }
        let a = fields[0].parse::<f64>();
        let b = fields[1].parse::<f64>();
        match (a, b) {
            (Ok(a), Ok(b)) => rows.push((line, a, b)),
            _ if i == 0 => continue,
            _ => {
                return Err(Error::Parse {
                    line,
                    msg: format!("non-numeric row `{}`", fields.join(",")),
                })
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 1,
            msg: "no data rows".into(),
        });
    }
    Ok(rows)
}

/// Parses `k,p` rows with strictly increasing integer `k`; skipped values
/// of `k` carry zero mass.
pub fn parse_pmf(text: &str) -> Result<DiscreteDist> {
    const MAX_SPAN: i64 = 10_000_000;
    let rows = numeric_rows(text, ("k", "p"))?;
    let mut probs = Vec::with_capacity(rows.len());
    let mut offset = 0i64;
    for (i, &(line, k, p)) in rows.iter().enumerate() {
        if k.fract() != 0.0 || !k.is_finite() || k.abs() > 1e15 {
            return Err(Error::Parse {
                line,
                msg: format!("k = {k} is not an integer"),
            });
        }
        let k = k as i64;
        if i == 0 {
            offset = k;
        } else {
            let next = offset + probs.len() as i64;
            if k < next {
                return Err(Error::Parse {
                    line,
                    msg: format!("k = {k} does not increase; expected at least {next}"),
                });
            }
            if k - offset > MAX_SPAN {
                return Err(Error::Parse {
                    line,
                    msg: format!("support {offset}..{k} is too wide"),
                });
            }
            probs.resize((k - offset) as usize, 0.0);
        }
        if !(p >= 0.0 && p.is_finite()) {
            return Err(Error::Parse {
                line,
                msg: format!("probability {p} is negative or not finite"),
            });
        }
        probs.push(p);
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > MASS_SLACK {
        let line = rows.last().map(|r| r.0).unwrap_or(1);
        return Err(Error::Parse {
            line,
            msg: format!("probabilities sum to {total}"),
        });
    }
    DiscreteDist::from_weights(offset, &probs)
}

pub fn read_pmf(path: &Path) -> Result<DiscreteDist> {
    parse_pmf(&std::fs::read_to_string(path)?)
}

pub fn write_pmf(d: &DiscreteDist) -> String {
    let mut out = String::from("k,p\n");
    for (k, p) in d.iter() {
        out.push_str(&format!("{k},{}\n", g12(p)));
    }
    out
}

/// Parses `x,f` rows with strictly increasing `x`.
pub fn parse_grid(text: &str) -> Result<GridDensity> {
    let rows = numeric_rows(text, ("x", "f"))?;
    for w in rows.windows(2) {
        if !(w[1].1 > w[0].1) {
            return Err(Error::Parse {
                line: w[1].0,
                msg: format!("x = {} does not increase", w[1].1),
            });
        }
    }
    if rows.len() < 2 {
        return Err(Error::Parse {
            line: rows[0].0,
            msg: "a grid needs at least two points".into(),
        });
    }
    if let Some(&(line, _, f)) = rows.iter().find(|r| !(r.2 >= 0.0 && r.2.is_finite())) {
        return Err(Error::Parse {
            line,
            msg: format!("density value {f} is negative or not finite"),
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let fs: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let raw = GridDensity::normalized(xs.clone(), fs.clone())?;
    let scale = fs
        .iter()
        .zip(raw.values())
        .find(|(f, _)| **f > 0.0)
        .map(|(f, g)| f / g)
        .unwrap_or(1.0);
    if (scale - 1.0).abs() > MASS_SLACK {
        return Err(Error::Parse {
            line: rows[rows.len() - 1].0,
            msg: format!("density integrates to {scale}"),
        });
    }
    Ok(raw)
}

pub fn read_grid(path: &Path) -> Result<GridDensity> {
    parse_grid(&std::fs::read_to_string(path)?)
}

pub fn write_grid(g: &GridDensity) -> String {
    let mut out = String::from("x,f\n");
    for (x, f) in g.breakpoints().iter().zip(g.values()) {
        out.push_str(&format!("{},{}\n", g12(*x), g12(*f)));
    }
    out
}

/// Parses a family spec such as `binomial:10,0.3`.
pub fn parse_family(spec: &str) -> Result<Dist> {
    let bad = |msg: String| Error::InvalidParameter(format!("family spec `{spec}`: {msg}"));
    let (name, args) = spec
        .split_once(':')
        .ok_or_else(|| bad("expected `name:param[,param]`".into()))?;
    let params: Vec<f64> = args
        .split(',')
        .map(|a| {
            a.trim()
                .parse::<f64>()
                .map_err(|_| bad(format!("`{a}` is not a number")))
        })
        .collect::<Result<_>>()?;
    let arity = |lo: usize, hi: usize| {
        if (lo..=hi).contains(&params.len()) {
            Ok(())
        } else {
            Err(bad(format!(
                "expected {lo}..={hi} parameters, found {}",
                params.len()
            )))
        }
    };
    let int = |v: f64| {
        if v.fract() == 0.0 && v.is_finite() {
            Ok(v as i64)
        } else {
            Err(bad(format!("{v} is not an integer")))
        }
    };
    let d: Dist = match name.trim() {
        "geometric" => {
            arity(1, 2)?;
            let start = params.get(1).map(|&s| int(s)).transpose()?.unwrap_or(1);
            DiscreteFamily::geometric_from(params[0], start)?
                .materialize()?
                .into()
        }
        "poisson" => {
            arity(1, 1)?;
            DiscreteFamily::poisson(params[0])?.materialize()?.into()
        }
        "binomial" => {
            arity(2, 2)?;
            let n = int(params[0])?;
            if n < 0 {
                return Err(bad("n must be non-negative".into()));
            }
            DiscreteFamily::binomial(n as u64, params[1])?
                .materialize()?
                .into()
        }
        "bernoulli" => {
            arity(1, 1)?;
            DiscreteDist::bernoulli(params[0])?.into()
        }
        "uniform" => {
            arity(2, 2)?;
            DiscreteDist::uniform(int(params[0])?, int(params[1])?)?.into()
        }
        "point" => {
            arity(1, 1)?;
            DiscreteDist::point(int(params[0])?).into()
        }
        "exponential" => {
            arity(1, 1)?;
            ContinuousDist::exponential(params[0])?.into()
        }
        "cuniform" => {
            arity(2, 2)?;
            ContinuousDist::uniform(params[0], params[1])?.into()
        }
        "gaussian" => {
            arity(2, 2)?;
            ContinuousDist::gaussian(params[0], params[1])?.into()
        }
        other => return Err(bad(format!("unknown family `{other}`"))),
    };
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pmf_roundtrip_and_header() {
        let d = parse_pmf("k,p\n0,0.25\n1,0.5\n2,0.25\n").unwrap();
        assert_eq!(d.probs(), &[0.25, 0.5, 0.25]);
        let again = parse_pmf(&write_pmf(&d)).unwrap();
        assert_eq!(again, d);
        let shifted = parse_pmf("# comment\n3,0.5\n4,0.5000001\n").unwrap();
        assert_eq!(shifted.min_k(), 3);
        assert!((shifted.head_mass() - 1.0).abs() < 1e-15);
        let gap = parse_pmf("k,p\n0,0.5\n2,0.5\n").unwrap();
        assert_eq!(gap.probs(), &[0.5, 0.0, 0.5]);
    }

    #[test]
    fn pmf_errors_carry_lines() {
        let line = |t: &str| match parse_pmf(t) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("{other:?}"),
        };
        assert_eq!(line("k,p\n0,0.5\n2,0.3\n1,0.2\n"), 4);
        assert_eq!(line("k,p\n0,0.5\n0,0.5\n"), 3);
        assert_eq!(line("k,p\n0,0.5\n1,-0.1\n2,0.6\n"), 3);
        assert_eq!(line("k,p\n0,0.5\n1,abc\n"), 3);
        assert_eq!(line("0,0.5\n1,0.4\n"), 2);
        assert_eq!(line("k,p\n0,0.5,1\n"), 2);
    }

    #[test]
    fn grid_parsing() {
        let g = parse_grid("x,f\n0,1\n0.5,1\n1,1\n").unwrap();
        assert!((g.mass() - 1.0).abs() < 1e-15);
        assert_eq!(parse_grid(&write_grid(&g)).unwrap(), g);
        assert!(matches!(
            parse_grid("x,f\n0,1\n0,1\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_grid("x,f\n0,2\n1,2\n"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn family_specs() {
        let b = parse_family("binomial:10,0.3").unwrap();
        assert!((b.mean().unwrap() - 3.0).abs() < 1e-12);
        let g = parse_family("geometric:0.5").unwrap();
        assert!((g.mean().unwrap() - 2.0).abs() < 1e-12);
        let g0 = parse_family("geometric:0.5,0").unwrap();
        assert!((g0.mean().unwrap() - 1.0).abs() < 1e-12);
        assert!(parse_family("exponential:2")
            .unwrap()
            .as_continuous()
            .is_some());
        for bad in [
            "binomial:10",
            "nope:1",
            "poisson",
            "binomial:2.5,0.1",
            "poisson:x",
        ] {
            assert!(parse_family(bad).is_err(), "{bad}");
        }
    }
}
