//! Scan strings: `2^-4`, `0.5`, lists `16,32,64`, dyadic ranges
//! `8:128:dyadic` and `2^-4:2^-9:dyadic`.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ScanError {
    #[error("cannot parse number `{0}`")]
    Number(String),
    #[error("malformed range `{0}`: expected `start:end:dyadic`")]
    Range(String),
    #[error("`{0}` is not a dyadic range: end/start must be a power of two")]
    NotDyadic(String),
    #[error("empty scan")]
    Empty,
    #[error("`{0}` is not an integer")]
    Integer(String),
}

/// A real number, optionally written as `base^exponent`.
pub fn parse_number(text: &str) -> Result<f64, ScanError> {
    let t = text.trim();
    let bad = || ScanError::Number(t.to_string());
    let value = match t.split_once('^') {
        Some((base, exp)) => {
            let b: f64 = base.trim().parse().map_err(|_| bad())?;
            let e: f64 = exp.trim().parse().map_err(|_| bad())?;
            b.powf(e)
        }
        None => t.parse().map_err(|_| bad())?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

pub fn parse_scan(text: &str) -> Result<Vec<f64>, ScanError> {
    let t = text.trim();
    if t.is_empty() {
        return Err(ScanError::Empty);
    }
    if t.contains(':') {
        return parse_range(t);
    }
    t.split(',').map(parse_number).collect()
}

fn parse_range(t: &str) -> Result<Vec<f64>, ScanError> {
    let parts: Vec<&str> = t.split(':').collect();
    if parts.len() != 3 || parts[2].trim() != "dyadic" {
        return Err(ScanError::Range(t.to_string()));
    }
    let start = parse_number(parts[0])?;
    let end = parse_number(parts[1])?;
    if !(start > 0.0 && end > 0.0) {
        return Err(ScanError::Range(t.to_string()));
    }
    let steps = (end / start).log2();
    if (steps - steps.round()).abs() > 1e-9 {
        return Err(ScanError::NotDyadic(t.to_string()));
    }
    let steps = steps.round() as i32;
    let dir = steps.signum();
    Ok((0..=steps.abs()).map(|j| start * 2f64.powi(dir * j)).collect())
}

pub fn parse_int_scan(text: &str) -> Result<Vec<i64>, ScanError> {
    parse_scan(text)?
        .into_iter()
        .map(|v| {
            if v.fract() == 0.0 && v.abs() < 9.0e15 {
                Ok(v as i64)
            } else {
                Err(ScanError::Integer(v.to_string()))
            }
        })
        .collect()
}
