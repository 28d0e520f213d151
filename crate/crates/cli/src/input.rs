//! Parsing of graph sources, frequency tokens and inflow amplitudes.

use std::f64::consts::PI;
use std::path::Path;

use gwalk_core::laplacian::SingularSet;
use gwalk_core::{generators, Complex64, Graph, Inflow};

use crate::CliError;

/// Loads a graph from a JSON file or the builtin `complete:N:L`.
pub fn load_graph(source: &str) -> Result<Graph, CliError> {
    if let Some(rest) = source.strip_prefix("complete:") {
        let parts: Vec<&str> = rest.split(':').collect();
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| CliError::Input(format!("bad builtin graph `{source}`")))
        };
        let (n, l) = match parts.as_slice() {
            [n, l] => (parse(n)?, parse(l)?),
            _ => return Err(CliError::Input(format!("expected complete:N:L, got `{source}`"))),
        };
        return generators::complete(n, l).map_err(|e| CliError::Input(format!("{source}: {e}")));
    }
    let path = Path::new(source);
    if !path.is_file() {
        return Err(CliError::Input(format!("graph file `{source}` not found")));
    }
    Graph::load(path).map_err(|e| CliError::Input(format!("{source}: {e}")))
}

/// A frequency before it is resolved against a graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaToken {
    Value(f64),
    /// `±theta_star`: the smallest positive nontrivial singular angle.
    ThetaStar(f64),
}

impl ThetaToken {
    pub fn parse(token: &str) -> Result<Self, CliError> {
        let t = token.trim();
        let (sign, body) = match t.strip_prefix('-') {
            Some(rest) => (-1.0, rest),
            None => (1.0, t.strip_prefix('+').unwrap_or(t)),
        };
        let bad = || CliError::Input(format!("bad angle `{token}`"));
        let value = match body {
            "theta_star" => return Ok(Self::ThetaStar(sign)),
            "pi" => PI,
            _ => {
                if let Some(den) = body.strip_prefix("pi/") {
                    PI / den.parse::<f64>().map_err(|_| bad())?
                } else if let Some(num) = body.strip_suffix("*pi") {
                    num.parse::<f64>().map_err(|_| bad())? * PI
                } else {
                    body.parse::<f64>().map_err(|_| bad())?
                }
            }
        };
        if !value.is_finite() {
            return Err(bad());
        }
        Ok(Self::Value(sign * value))
    }

    pub fn resolve(self, singular: &SingularSet) -> Result<f64, CliError> {
        match self {
            Self::Value(v) => Ok(v),
            Self::ThetaStar(sign) => singular
                .first_nontrivial()
                .map(|t| sign * t)
                .ok_or_else(|| CliError::Input("theta_star: the graph has no nontrivial singular frequency".into())),
        }
    }
}

/// Parses either a comma-separated list of angles or a linspace
/// `start:end:count` (both endpoints included).
pub fn parse_thetas(spec: &str) -> Result<Vec<ThetaToken>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [start, end, count] => {
            let count: usize = count
                .trim()
                .parse()
                .map_err(|_| CliError::Input(format!("bad linspace count in `{spec}`")))?;
            let (start, end) = (ThetaToken::parse(start)?, ThetaToken::parse(end)?);
            let (ThetaToken::Value(a), ThetaToken::Value(b)) = (start, end) else {
                return Err(CliError::Input(
                    "theta_star is not allowed as a linspace endpoint".into(),
                ));
            };
            if count < 2 {
                return Ok(vec![ThetaToken::Value(a)]);
            }
            let step = (b - a) / (count - 1) as f64;
            Ok((0..count)
                .map(|k| ThetaToken::Value(if k + 1 == count { b } else { a + step * k as f64 }))
                .collect())
        }
        [_] => spec
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(ThetaToken::parse)
            .collect(),
        _ => Err(CliError::Input(format!("bad θ list `{spec}`"))),
    }
}

/// Parses one amplitude: `re+imj`, `re,im`, or a plain real number.
pub fn parse_amplitude(token: &str) -> Result<Complex64, CliError> {
    let t = token.trim();
    let bad = || CliError::Input(format!("bad inflow amplitude `{token}`"));
    if let Some((re, im)) = t.split_once(',') {
        let re = re.trim().parse::<f64>().map_err(|_| bad())?;
        let im = im.trim().parse::<f64>().map_err(|_| bad())?;
        return Ok(Complex64::new(re, im));
    }
    let z: Complex64 = t.parse().map_err(|_| bad())?;
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(bad())
    }
}

/// Builds the inflow from `--inflow` values; defaults to `e₁`.
///
/// Amplitudes are separated by `;` or whitespace, or given by repeating the
/// flag. A single value with exactly `r ≥ 2` comma-separated fields (e.g.
/// `1,0` on two tails) is read as a list of `r` amplitudes, since a lone
/// `re,im` pair could not match the boundary size.
pub fn parse_inflow(values: &[String], g: &Graph) -> Result<Inflow, CliError> {
    let r = g.boundary_count();
    if values.is_empty() {
        return Ok(Inflow::basis(r, 0));
    }
    let pieces: Vec<&str> = values
        .iter()
        .flat_map(|v| v.split(|c: char| c == ';' || c.is_whitespace()))
        .filter(|s| !s.is_empty())
        .collect();
    let pieces = match pieces.as_slice() {
        [one] if r >= 2 && one.split(',').count() == r => one.split(',').collect(),
        _ => pieces,
    };
    let amplitudes = pieces.into_iter().map(parse_amplitude).collect::<Result<Vec<_>, _>>()?;
    if amplitudes.len() != r {
        return Err(CliError::Input(format!(
            "inflow has {} amplitudes but the graph has {r} boundary vertices",
            amplitudes.len()
        )));
    }
    Ok(Inflow::new(amplitudes))
}
