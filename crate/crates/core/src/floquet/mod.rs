//! Floquet multipliers of `x^ΔΔ + p x^Δ + q x = 0` on a periodic time scale.
//!
//! The entry point is [`analyze`]; the individual stages (phase table,
//! series terms, truncation bound, Shi's continuous formula, multipliers and
//! verdict) are exposed for testing and for callers that need only a part.

mod bounds;
mod phase;
mod series;
mod shi;
mod verdict;

pub use bounds::{error_bound, estimate_bounds, tail_sum, BoundConstants, ErrorBound, SUPREMUM_GRID};
pub use phase::{PhaseTable, JUNCTION_TOL, PHI_VANISH_TOL};
pub use series::{a_partial, a_term, a_terms, SeriesMethod, MAX_DENSE_DEPTH};
pub use shi::{shi_continuous_a, shi_terms};
pub use verdict::{multipliers, verdict, Verdict, B_UNIT_TOL};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::interval::Interval;
use crate::timescale::{Piece, ValidatedTimeScale};
use crate::tscalc::{ts_exponential_real, DEFAULT_TOL};

/// `|1 − μp + μ²q|` at or below this is treated as zero.
pub const REGRESSIVE_TOL: f64 = 1e-12;

/// `|q|` at or below this at a scattered point is treated as zero.
pub const ZERO_Q_TOL: f64 = 1e-14;

/// The equation to analyze: time scale, coefficients and quadrature tolerance.
#[derive(Debug, Clone)]
pub struct SystemSpec {
    pub ts: ValidatedTimeScale,
    pub p: Expr,
    pub q: Expr,
    /// Derivative of `q`, used for `φ^Δ = q′/(2√q)` on dense parts.
    pub qprime: Expr,
    pub quad_tol: f64,
}

impl SystemSpec {
    /// `q′` is obtained symbolically; the tolerance defaults to `1e-9`.
    pub fn new(ts: ValidatedTimeScale, p: Expr, q: Expr) -> Self {
        let qprime = q.differentiate();
        Self {
            ts,
            p,
            q,
            qprime,
            quad_tol: DEFAULT_TOL,
        }
    }

    pub fn with_qprime(mut self, qprime: Expr) -> Self {
        self.qprime = qprime;
        self
    }

    pub fn with_quad_tol(mut self, tol: f64) -> Self {
        self.quad_tol = tol;
        self
    }

    pub fn p_at(&self, t: f64) -> Result<f64> {
        Ok(self.p.eval(t)?)
    }

    pub fn q_at(&self, t: f64) -> Result<f64> {
        Ok(self.q.eval(t)?)
    }

    pub fn qprime_at(&self, t: f64) -> Result<f64> {
        Ok(self.qprime.eval(t)?)
    }

    /// Checks regressivity and `q ≠ 0` at every scattered point of the period.
    /// Positivity of `q` on dense parts is checked wherever `q` is evaluated.
    pub fn validate(&self) -> Result<()> {
        if !(self.quad_tol.is_finite() && self.quad_tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "quadrature tolerance must be positive, got {}",
                self.quad_tol
            )));
        }
        for piece in self.ts.pieces() {
            if let Piece::Jump { t, mu } = piece {
                let p = self.p_at(t)?;
                let q = self.q_at(t)?;
                let factor = 1.0 - mu * p + mu * mu * q;
                if factor.abs() <= REGRESSIVE_TOL {
                    return Err(Error::NotRegressive { t, factor });
                }
                if q.abs() <= ZERO_Q_TOL {
                    return Err(Error::ZeroQ { t });
                }
            }
        }
        Ok(())
    }

    /// `ℬ = e_{−p+μq}(t0+T, t0)`, the determinant of the monodromy matrix.
    pub fn compute_b(&self) -> Result<f64> {
        let ts = &self.ts;
        ts_exponential_real(
            |t| {
                let mu = ts.mu(t)?;
                let p = self.p_at(t)?;
                if mu == 0.0 {
                    Ok(-p)
                } else {
                    Ok(-p + mu * self.q_at(t)?)
                }
            },
            ts.end(),
            ts.t0(),
            ts,
            self.quad_tol,
        )
    }

    /// `n` used when the caller does not choose one: the number of scattered
    /// points for purely discrete scales (where the series terminates), else 3.
    pub fn default_order(&self) -> usize {
        if self.ts.is_discrete() {
            self.ts.scattered_count()
        } else {
            3
        }
    }
}

#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    /// Series order; `None` picks [`SystemSpec::default_order`].
    pub n: Option<usize>,
    pub method: SeriesMethod,
    /// Multiplier applied to the estimated suprema `K1`, `K2`, `K3`.
    pub safety_factor: f64,
    /// Use Shi's formula for `𝒜` (continuous scales with `ℬ = 1` only).
    pub shi: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            n: None,
            method: SeriesMethod::Auto,
            safety_factor: 1.0,
            shi: false,
        }
    }
}

/// Result of [`analyze`].
#[derive(Debug, Clone)]
pub struct FloquetReport {
    pub n: usize,
    /// `𝒜_0 … 𝒜_n` (for the Shi path: `2cosΦ` followed by the 2m-fold terms).
    pub a_terms: Vec<f64>,
    /// `𝒜(n)`.
    pub a_partial: f64,
    pub err_bound: ErrorBound,
    /// `[𝒜(n) − ε, 𝒜(n) + ε]`.
    pub a_interval: Interval,
    pub b: f64,
    /// Enclosures of the smaller and the larger multiplier modulus.
    pub moduli: [Interval; 2],
    pub verdict: Verdict,
    pub justification: String,
    pub method: SeriesMethod,
    pub bounds: Option<BoundConstants>,
    pub warnings: Vec<String>,
}

/// Full pipeline: validate, solve for `φ`, compute `ℬ`, `𝒜(n)` and its
/// truncation bound, then the multiplier enclosures and the verdict.
pub fn analyze(spec: &SystemSpec, opts: &AnalysisOptions) -> Result<FloquetReport> {
    spec.validate()?;
    let table = PhaseTable::solve(spec)?;
    let b = spec.compute_b()?;
    let n = opts.n.unwrap_or_else(|| spec.default_order());

    let (a_terms, method) = if opts.shi {
        (shi_terms(spec, n)?, SeriesMethod::Shi)
    } else {
        let method = opts.method.resolve(spec, n);
        (a_terms(&table, n, method)?, method)
    };
    let a_partial: f64 = a_terms.iter().sum();

    let ts = &spec.ts;
    let (err_bound, bounds) = if ts.is_discrete() && n >= ts.scattered_count() {
        (ErrorBound::Exact, None)
    } else {
        let k = estimate_bounds(&table, opts.safety_factor)?;
        (error_bound(&k, n), Some(k))
    };

    let a_interval = Interval::around(a_partial, err_bound.value());
    let moduli = multipliers(a_interval, b);
    let (verdict, justification) = verdict(a_interval, b);

    Ok(FloquetReport {
        n,
        a_terms,
        a_partial,
        err_bound,
        a_interval,
        b,
        moduli,
        verdict,
        justification,
        method,
        bounds,
        warnings: table.warnings().to_vec(),
    })
}
