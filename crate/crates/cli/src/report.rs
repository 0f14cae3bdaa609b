use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use tsfloquet::oracle::CheckResult;
use tsfloquet::{FloquetReport, Verdict};

/// Oracle comparison attached by `--oracle`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub a_oracle: f64,
    pub b_oracle: f64,
    pub a_delta: f64,
    pub b_delta: f64,
    /// Truncation bound plus the check tolerance.
    pub a_allowed: f64,
    pub passed: bool,
}

impl From<&CheckResult> for OracleSummary {
    fn from(c: &CheckResult) -> Self {
        Self {
            a_oracle: c.a_oracle,
            b_oracle: c.b_oracle,
            a_delta: c.a_delta,
            b_delta: c.b_delta,
            a_allowed: c.a_allowed,
            passed: true,
        }
    }
}

/// Everything one analysis produces, at full precision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    /// True for purely discrete scales (series evaluated exactly).
    pub discrete: bool,
    pub n: usize,
    pub method: String,
    pub a_terms: Vec<f64>,
    pub a_partial: f64,
    pub err_bound: f64,
    pub err_bound_exact: bool,
    pub a_interval: [f64; 2],
    pub b: f64,
    /// Multiplier moduli for the point value `𝒜(n)`.
    pub rho: [f64; 2],
    /// Enclosures of the smaller and larger modulus over `a_interval`.
    pub moduli: [[f64; 2]; 2],
    pub verdict: String,
    pub justification: String,
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSummary>,
    pub elapsed_ms: f64,
}

/// `|(A ∓ √(A² − 4B))/2|`, in that order.
pub fn point_moduli(a: f64, b: f64) -> [f64; 2] {
    let disc = a * a - 4.0 * b;
    if disc >= 0.0 {
        let r = disc.sqrt();
        [((a - r) / 2.0).abs(), ((a + r) / 2.0).abs()]
    } else {
        let m = ((a / 2.0).powi(2) - disc / 4.0).sqrt();
        [m, m]
    }
}

impl Report {
    pub fn new(r: &FloquetReport, discrete: bool, elapsed_ms: f64) -> Self {
        Self {
            file: None,
            discrete,
            n: r.n,
            method: r.method.name().to_string(),
            a_terms: r.a_terms.clone(),
            a_partial: r.a_partial,
            err_bound: r.err_bound.value(),
            err_bound_exact: r.err_bound.is_exact(),
            a_interval: [r.a_interval.lo, r.a_interval.hi],
            b: r.b,
            rho: point_moduli(r.a_partial, r.b),
            moduli: r.moduli.map(|m| [m.lo, m.hi]),
            verdict: r.verdict.as_str().to_string(),
            justification: r.justification.clone(),
            warnings: r.warnings.clone(),
            oracle: None,
            elapsed_ms,
        }
    }

    /// 0 for (exponentially) stable, 1 unstable, 2 undetermined, 3 when
    /// the oracle disagrees.
    pub fn exit_code(&self) -> i32 {
        if self.oracle.as_ref().is_some_and(|o| !o.passed) {
            return 3;
        }
        match self.verdict.as_str() {
            v if v == Verdict::Unstable.as_str() => 1,
            v if v == Verdict::Undetermined.as_str() => 2,
            _ => 0,
        }
    }

    /// Human-readable report with six-decimal values.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let [r1, r2] = self.rho;
        if self.discrete {
            let _ = writeln!(out, "The value of A is {:.6}", self.a_partial);
            let _ = writeln!(out, "The value of B is {:.6}", self.b);
            let _ = writeln!(out, "The modulus of multipliers are {r1:.6} {r2:.6}.");
        } else {
            let n = self.n;
            let _ = writeln!(out, "The value of A({n}) is {:.6}", self.a_partial);
            let _ = writeln!(out, "The value of B is {:.6}", self.b);
            let _ = writeln!(out, "The {n}th approximate modulus are {r1:.6} {r2:.6}.");
        }
        out.push('\n');
        let _ = writeln!(out, "A({}) = {:.6}", self.n, self.a_partial);
        let _ = writeln!(out, "B = {:.6}", self.b);
        let _ = writeln!(out, "|rho| = {r1:.6}, {r2:.6}");
        if self.err_bound_exact {
            let _ = writeln!(out, "error bound = exact");
        } else {
            let _ = writeln!(out, "error bound = {:.6}", self.err_bound);
        }
        if let Some(o) = &self.oracle {
            let _ = writeln!(
                out,
                "oracle A = {:.6}, B = {:.6}, |dA| = {:.3e}, |dB| = {:.3e} ({})",
                o.a_oracle,
                o.b_oracle,
                o.a_delta,
                o.b_delta,
                if o.passed { "ok" } else { "FAILED" }
            );
        }
        let _ = writeln!(out, "verdict = {}", self.verdict);
        let _ = writeln!(out, "reason = {}", self.justification);
        out
    }
}
