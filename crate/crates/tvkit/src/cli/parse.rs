//! Spec-string parsers for the CLI surface.
//!
//! Polynomial: comma-separated ascending coefficients, e.g. "-6,11,-6,1"
//! for x^3 - 6x^2 + 11x - 6. Trig: "cos=a0,a1,...;sin=b0,b1,...".
//! Density: "gauss", "gauss:mean,sigma", "lebesgue:a,b",
//! "restrict:a,b:<base>". Grid: "lo:hi:points" (geometric).
//! MultiPoly: newline- or semicolon-separated lines "coeff: e1 e2 ... ed".

use crate::error::{Error, Result};
use crate::funcspace::{MultiPoly, Polynomial, TrigPolynomial};
use crate::measures::DensityModel;
use crate::tvmetrics::ModulusCurve;

fn parse_f64(tok: &str) -> Result<f64> {
    // tolerate the typographic minus that pasted input often carries
    let clean = tok.trim().replace('\u{2212}', "-");
    clean
        .parse::<f64>()
        .map_err(|_| Error::Input(format!("cannot parse number from '{tok}'")))
}

fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(parse_f64).collect()
}

pub fn parse_polynomial(s: &str) -> Result<Polynomial> {
    let coeffs = parse_f64_list(s)?;
    if coeffs.is_empty() {
        return Err(Error::Input("empty coefficient list".into()));
    }
    Ok(Polynomial::new(coeffs))
}

pub fn parse_trig(s: &str) -> Result<TrigPolynomial> {
    let mut cos = None;
    let mut sin = None;
    for part in s.split(';') {
        let (key, val) = part
            .split_once('=')
            .ok_or_else(|| Error::Input(format!("expected key=list in '{part}'")))?;
        match key.trim() {
            "cos" => cos = Some(parse_f64_list(val)?),
            "sin" => sin = Some(parse_f64_list(val)?),
            other => return Err(Error::Input(format!("unknown trig key '{other}'"))),
        }
    }
    let cos = cos.ok_or_else(|| Error::Input("missing cos=... part".into()))?;
    let sin = match sin {
        Some(s) => s,
        None => vec![0.0; cos.len()],
    };
    TrigPolynomial::new(cos, sin)
}

pub fn parse_density(s: &str) -> Result<DensityModel> {
    let s = s.trim();
    if s == "gauss" {
        return Ok(DensityModel::standard_gaussian());
    }
    if let Some(rest) = s.strip_prefix("gauss:") {
        let v = parse_f64_list(rest)?;
        if v.len() != 2 {
            return Err(Error::Input(format!(
                "gauss:mean,sigma needs 2 numbers in '{s}'"
            )));
        }
        return DensityModel::gaussian(v[0], v[1]);
    }
    if let Some(rest) = s.strip_prefix("lebesgue:") {
        let v = parse_f64_list(rest)?;
        if v.len() != 2 {
            return Err(Error::Input(format!(
                "lebesgue:a,b needs 2 numbers in '{s}'"
            )));
        }
        return DensityModel::lebesgue_on(v[0], v[1]);
    }
    if let Some(rest) = s.strip_prefix("restrict:") {
        let (ab, base) = rest
            .split_once(':')
            .ok_or_else(|| Error::Input(format!("restrict:a,b:<base> missing base in '{s}'")))?;
        let v = parse_f64_list(ab)?;
        if v.len() != 2 {
            return Err(Error::Input(format!(
                "restrict:a,b needs 2 numbers in '{s}'"
            )));
        }
        return DensityModel::restricted(parse_density(base)?, v[0], v[1]);
    }
    Err(Error::Input(format!("unknown density spec '{s}'")))
}

/// "lo:hi:points" geometric grid.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Input(format!(
            "grid spec must be lo:hi:points, got '{s}'"
        )));
    }
    let lo = parse_f64(parts[0])?;
    let hi = parse_f64(parts[1])?;
    let points: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| Error::Input(format!("cannot parse point count from '{}'", parts[2])))?;
    ModulusCurve::geometric_grid(lo, hi, points)
}

/// Lines "coeff: e1 e2 ... ed", separated by ';' or newlines.
pub fn parse_multipoly(s: &str) -> Result<MultiPoly> {
    let mut terms = Vec::new();
    let mut dim = None;
    for line in s.split([';', '\n']) {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (c, exps) = line
            .split_once(':')
            .ok_or_else(|| Error::Input(format!("expected 'coeff: e1 e2 ...' in '{line}'")))?;
        let coeff = parse_f64(c)?;
        let exps: Vec<u32> = exps
            .split_whitespace()
            .map(|t| {
                t.parse::<u32>()
                    .map_err(|_| Error::Input(format!("cannot parse exponent '{t}'")))
            })
            .collect::<Result<_>>()?;
        match dim {
            None => dim = Some(exps.len()),
            Some(d) if d != exps.len() => {
                return Err(Error::Input(format!(
                    "inconsistent dimensions: {d} vs {} in '{line}'",
                    exps.len()
                )))
            }
            _ => {}
        }
        terms.push((coeff, exps));
    }
    let dim = dim.ok_or_else(|| Error::Input("empty multivariate polynomial spec".into()))?;
    MultiPoly::new(dim, terms)
}
