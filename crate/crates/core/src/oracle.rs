//! Brute-force monodromy matrix of `Y^Δ = S(t)Y`, `S = [[0, 1], [−q, −p]]`.
//!
//! Dense stretches are integrated with an adaptive Dormand–Prince 5(4) pair;
//! scattered points apply `Y ← (I + μS)Y`. Only coefficient evaluation is
//! shared with the series path.

use std::fmt;
use std::ops::{Add, Mul};

use crate::error::{Error, Result};
use crate::floquet::{analyze, AnalysisOptions, SystemSpec};
use crate::timescale::Piece;

pub const DEFAULT_RK_TOL: f64 = 1e-10;

/// Row-major 2×2 real matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2 {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

impl Matrix2 {
    pub const IDENTITY: Matrix2 = Matrix2::new(1.0, 0.0, 0.0, 1.0);

    pub const fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(c * self.a11, c * self.a12, c * self.a21, c * self.a22)
    }

    pub fn max_abs(&self) -> f64 {
        self.a11.abs().max(self.a12.abs()).max(self.a21.abs()).max(self.a22.abs())
    }

    pub fn is_finite(&self) -> bool {
        self.a11.is_finite() && self.a12.is_finite() && self.a21.is_finite() && self.a22.is_finite()
    }
}

impl Add for Matrix2 {
    type Output = Matrix2;
    fn add(self, o: Matrix2) -> Matrix2 {
        Matrix2::new(self.a11 + o.a11, self.a12 + o.a12, self.a21 + o.a21, self.a22 + o.a22)
    }
}

impl Mul for Matrix2 {
    type Output = Matrix2;
    fn mul(self, o: Matrix2) -> Matrix2 {
        Matrix2::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }
}

impl fmt::Display for Matrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a11, self.a12, self.a21, self.a22)
    }
}

fn system_matrix(spec: &SystemSpec, t: f64) -> Result<Matrix2> {
    Ok(Matrix2::new(0.0, 1.0, -spec.q_at(t)?, -spec.p_at(t)?))
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `Y′ = S(t)Y` across the dense stretch `[a, b]`. Coefficients
/// are sampled no further right than just left of `b`, whose own value may
/// belong to a scattered point.
fn integrate_dense(spec: &SystemSpec, y0: Matrix2, a: f64, b: f64, rk_tol: f64) -> Result<Matrix2> {
    let left_of_b = b - (1e-10 * b.abs().max(1.0)).min(0.5 * (b - a));
    let s_at = |t: f64| system_matrix(spec, t.min(left_of_b));
    let mut t = a;
    let mut y = y0;
    let mut h = (b - a) / 16.0;
    let min_step = 1e-14 * a.abs().max(b.abs()).max(1.0);
    let mut k = [Matrix2::IDENTITY; 7];
    while t < b {
        if h < min_step {
            return Err(Error::StepSizeUnderflow { t });
        }
        let last = t + h >= b;
        let step = if last { b - t } else { h };
        for stage in 0..7 {
            let mut ys = y;
            for (j, coeff) in A[stage].iter().enumerate().take(stage) {
                if *coeff != 0.0 {
                    ys = ys + k[j].scale(step * coeff);
                }
            }
            k[stage] = s_at(t + C[stage] * step)? * ys;
        }
        let mut y5 = y;
        let mut diff = Matrix2::new(0.0, 0.0, 0.0, 0.0);
        for stage in 0..7 {
            y5 = y5 + k[stage].scale(step * B5[stage]);
            diff = diff + k[stage].scale(step * (B5[stage] - B4[stage]));
        }
        let scale = rk_tol * (1.0 + y.max_abs().max(y5.max_abs()));
        let err = diff.max_abs() / scale;
        if !y5.is_finite() {
            h = step * 0.25;
            continue;
        }
        if err <= 1.0 {
            t = if last { b } else { t + step };
            y = y5;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = step * factor;
    }
    Ok(y)
}

/// Monodromy matrix `Φ(t0+T, t0)`.
pub fn monodromy(spec: &SystemSpec, rk_tol: f64) -> Result<Matrix2> {
    let mut y = Matrix2::IDENTITY;
    for piece in spec.ts.pieces() {
        y = match piece {
            Piece::Jump { t, mu } => (Matrix2::IDENTITY + system_matrix(spec, t)?.scale(mu)) * y,
            Piece::Dense { a, b } => integrate_dense(spec, y, a, b, rk_tol)?,
        };
    }
    Ok(y)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub a_series: f64,
    pub a_oracle: f64,
    pub b_liouville: f64,
    pub b_oracle: f64,
    /// `|𝒜_oracle − 𝒜(n)|`.
    pub a_delta: f64,
    /// `|ℬ_oracle − ℬ|`.
    pub b_delta: f64,
    /// Truncation bound plus `tol`.
    pub a_allowed: f64,
}

/// Compares the series result of order `n` with the oracle:
/// `|ℬ_oracle − ℬ| ≤ tol` and `|𝒜_oracle − 𝒜(n)| ≤ bound(n) + tol`.
pub fn cross_check(spec: &SystemSpec, n: usize, tol: f64) -> Result<CheckResult> {
    let opts = AnalysisOptions {
        n: Some(n),
        ..AnalysisOptions::default()
    };
    let report = analyze(spec, &opts)?;
    cross_check_report(spec, report.a_partial, report.b, report.err_bound.value(), tol, DEFAULT_RK_TOL)
}

/// As [`cross_check`], for an already computed `𝒜(n)`, `ℬ` and bound.
pub fn cross_check_report(
    spec: &SystemSpec,
    a_series: f64,
    b_liouville: f64,
    bound: f64,
    tol: f64,
    rk_tol: f64,
) -> Result<CheckResult> {
    let m = monodromy(spec, rk_tol)?;
    let a_oracle = m.trace();
    let b_oracle = m.det();
    let a_delta = (a_oracle - a_series).abs();
    let b_delta = (b_oracle - b_liouville).abs();
    let a_allowed = bound + tol;
    if b_delta > tol || a_delta.is_nan() || a_delta > a_allowed {
        return Err(Error::CheckFailed {
            a_series,
            a_oracle,
            a_allowed,
            b_liouville,
            b_oracle,
        });
    }
    Ok(CheckResult {
        a_series,
        a_oracle,
        b_liouville,
        b_oracle,
        a_delta,
        b_delta,
        a_allowed,
    })
}
