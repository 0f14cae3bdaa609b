//! Line-oriented `key = value` system description.
//!
//! ```text
//! # Mathieu equation, h = 1
//! intervals = [[0, pi]]
//! p = 0
//! q = "3.979 - cos(2*t)"
//! n = 3
//! ```
//!
//! Numeric fields accept constant expressions (`2*pi`). `t0` defaults to the
//! smallest coordinate and `period` to the span of all coordinates.

use std::path::Path;

use thiserror::Error;
use tsfloquet::{Expr, PeriodicTimeScale, Segment, SystemSpec};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Validation(String),
}

fn parse_err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError::Parse {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Default)]
pub struct Config {
    pub t0: Option<f64>,
    pub period: Option<f64>,
    pub points: Vec<f64>,
    pub intervals: Vec<(f64, f64)>,
    pub p: Option<Expr>,
    pub q: Option<Expr>,
    pub qprime: Option<Expr>,
    pub n: Option<usize>,
    pub tol: Option<f64>,
    pub rk_tol: Option<f64>,
    pub oracle: bool,
    pub shi: bool,
}

const KEYS: [&str; 12] = [
    "t0", "period", "points", "intervals", "p", "q", "qprime", "n", "tol", "rk_tol", "oracle", "shi",
];

pub fn load_config(path: &Path) -> Result<Config, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<Config, ConfigError> {
    let mut cfg = Config::default();
    let mut seen: Vec<&str> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = strip_comment(raw).trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| parse_err(line, "expected `key = value`"))?;
        let key = key.trim();
        let value = value.trim();
        let Some(&key) = KEYS.iter().find(|k| **k == key) else {
            return Err(parse_err(line, format!("unknown key `{key}`")));
        };
        if seen.contains(&key) {
            return Err(parse_err(line, format!("duplicate key `{key}`")));
        }
        seen.push(key);
        match key {
            "t0" => cfg.t0 = Some(number(value, line)?),
            "period" => cfg.period = Some(number(value, line)?),
            "points" => {
                cfg.points = list(value, line)?
                    .iter()
                    .map(|item| number(item, line))
                    .collect::<Result<_, _>>()?
            }
            "intervals" => {
                cfg.intervals = list(value, line)?
                    .iter()
                    .map(|item| {
                        let pair = list(item, line)?;
                        if pair.len() != 2 {
                            return Err(parse_err(line, format!("interval `{item}` needs two endpoints")));
                        }
                        Ok((number(&pair[0], line)?, number(&pair[1], line)?))
                    })
                    .collect::<Result<_, _>>()?
            }
            "p" => cfg.p = Some(expression(value, line)?),
            "q" => cfg.q = Some(expression(value, line)?),
            "qprime" => cfg.qprime = Some(expression(value, line)?),
            "n" => {
                cfg.n = Some(
                    value
                        .parse()
                        .map_err(|_| parse_err(line, format!("n must be a non-negative integer, got `{value}`")))?,
                )
            }
            "tol" => cfg.tol = Some(positive(value, line)?),
            "rk_tol" => cfg.rk_tol = Some(positive(value, line)?),
            "oracle" => cfg.oracle = boolean(value, line)?,
            "shi" => cfg.shi = boolean(value, line)?,
            _ => unreachable!("key list and match arms agree"),
        }
    }
    Ok(cfg)
}

/// Drops a `#` comment that is not inside a quoted string.
fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

fn unquote(value: &str) -> &str {
    value
        .strip_prefix('"')
        .and_then(|v| v.strip_suffix('"'))
        .unwrap_or(value)
}

fn expression(value: &str, line: usize) -> Result<Expr, ConfigError> {
    Expr::parse(unquote(value)).map_err(|e| parse_err(line, e.to_string()))
}

fn number(value: &str, line: usize) -> Result<f64, ConfigError> {
    let e = expression(value, line)?;
    if !e.is_constant() {
        return Err(parse_err(line, format!("`{value}` is not a constant")));
    }
    let v = e.eval(0.0).map_err(|e| parse_err(line, e.to_string()))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("`{value}` is not finite")));
    }
    Ok(v)
}

fn positive(value: &str, line: usize) -> Result<f64, ConfigError> {
    let v = number(value, line)?;
    if v <= 0.0 {
        return Err(parse_err(line, format!("`{value}` must be positive")));
    }
    Ok(v)
}

fn boolean(value: &str, line: usize) -> Result<bool, ConfigError> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(parse_err(line, format!("expected true or false, got `{value}`"))),
    }
}

/// Splits `[a, b, ...]` at top-level commas.
fn list(value: &str, line: usize) -> Result<Vec<String>, ConfigError> {
    let inner = value
        .trim()
        .strip_prefix('[')
        .and_then(|v| v.strip_suffix(']'))
        .ok_or_else(|| parse_err(line, format!("expected a bracketed list, got `{value}`")))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut items = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in inner.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                items.push(inner[start..i].trim().to_string());
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err(parse_err(line, "unbalanced brackets"));
        }
    }
    if depth != 0 {
        return Err(parse_err(line, "unbalanced brackets"));
    }
    items.push(inner[start..].trim().to_string());
    if items.iter().any(String::is_empty) {
        return Err(parse_err(line, "empty list item"));
    }
    Ok(items)
}

impl Config {
    /// Assembles and validates the system.
    pub fn to_spec(&self) -> Result<SystemSpec, ConfigError> {
        let q = self
            .q
            .clone()
            .ok_or_else(|| ConfigError::Validation("q required".into()))?;
        let p = self.p.clone().unwrap_or(Expr::Const(0.0));

        let mut segments: Vec<Segment> = self.points.iter().map(|&x| Segment::Point(x)).collect();
        segments.extend(self.intervals.iter().map(|&(a, b)| Segment::Interval(a, b)));
        if segments.is_empty() {
            return Err(ConfigError::Validation(
                "the time scale needs at least one point or interval".into(),
            ));
        }
        segments.sort_by(|x, y| x.left().total_cmp(&y.left()));
        let lo = segments.iter().map(Segment::left).fold(f64::INFINITY, f64::min);
        let hi = segments.iter().map(Segment::right).fold(f64::NEG_INFINITY, f64::max);
        let t0 = self.t0.unwrap_or(lo);
        let period = self.period.unwrap_or(hi - t0);

        let ts = PeriodicTimeScale::new(t0, period, segments)
            .validate()
            .map_err(|e| ConfigError::Validation(e.to_string()))?;
        let mut spec = SystemSpec::new(ts, p, q);
        if let Some(qp) = &self.qprime {
            spec = spec.with_qprime(qp.clone());
        }
        if let Some(tol) = self.tol {
            spec = spec.with_quad_tol(tol);
        }
        Ok(spec)
    }
}
