//! Floquet multipliers and certified stability verdicts for
//!
//! ```text
//! x^ΔΔ + p(t) x^Δ + q(t) x = 0
//! ```
//!
//! on a periodic time scale (discrete, continuous or hybrid).
//!
//! The multipliers are the roots of `ρ² − 𝒜ρ + ℬ = 0`, where `ℬ` is the
//! generalized exponential `e_{−p+μq}(t0+T, t0)` and `𝒜` is the trace of the
//! monodromy matrix, computed here as a convergent series of nested delta
//! integrals with an explicit truncation bound. An independent monodromy
//! integrator lives in [`oracle`] for cross-checking.
//!
//! Module map:
//!
//! * [`timescale`] – one period of a periodic time scale, `σ` and `μ`.
//! * [`expr`] – the coefficient expression language (parse, eval, d/dt).
//! * [`tscalc`] – delta integrals, the generalized exponential, `cos_φ`/`sin_φ`.
//! * [`floquet`] – phase table, series terms, error bound, multipliers, verdict.
//! * [`oracle`] – brute-force monodromy matrix.

pub mod error;
pub mod expr;
pub mod floquet;
pub mod interval;
pub mod oracle;
pub mod quadrature;
pub mod timescale;
pub mod tscalc;

pub use error::{Error, Result};
pub use expr::Expr;
pub use floquet::{
    analyze, AnalysisOptions, ErrorBound, FloquetReport, PhaseTable, SeriesMethod, SystemSpec,
    Verdict,
};
pub use interval::Interval;
pub use timescale::{PeriodicTimeScale, Segment, ValidatedTimeScale};
