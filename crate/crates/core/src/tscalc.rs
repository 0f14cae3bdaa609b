//! Delta integrals, the generalized exponential and the trigonometric
//! functions `cos_φ`, `sin_φ` on a validated time scale.
//!
//! Scattered contributions are exact (`μ·f` sums, `1 + μg` products); only
//! dense stretches use quadrature.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, GaussRule, QuadValue};
use crate::timescale::{approx_eq, Piece, ValidatedTimeScale};

/// Default absolute tolerance for dense quadrature.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Jump factors `|1 + μg|` below this are treated as zero.
pub const REGRESSIVITY_TOL: f64 = 1e-14;

fn check_endpoints(ts: &ValidatedTimeScale, a: f64, b: f64) -> Result<()> {
    if !(ts.contains(a) && ts.contains(b)) || b < a && !approx_eq(a, b) {
        return Err(Error::EndpointsNotInTimeScale { a, b });
    }
    Ok(())
}

/// `∫_a^b f(s) Δs` for `a ≤ b` in the time scale.
pub fn delta_integral<T, F>(f: F, a: f64, b: f64, ts: &ValidatedTimeScale, tol: f64) -> Result<T>
where
    T: QuadValue,
    F: Fn(f64) -> Result<T>,
{
    check_endpoints(ts, a, b)?;
    let mut sum = T::zero();
    for piece in ts.pieces_between(a, b)? {
        sum = sum
            + match piece {
                Piece::Jump { t, mu } => f(t)? * mu,
                Piece::Dense { a, b } => integrate(&f, a, b, tol)?,
            };
    }
    Ok(sum)
}

/// Generalized exponential `e_g(t, s)`. For `t < s` this is `1 / e_g(s, t)`.
pub fn ts_exponential<F>(g: F, t: f64, s: f64, ts: &ValidatedTimeScale, tol: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    if t < s && !approx_eq(t, s) {
        return Ok(ts_exponential(g, s, t, ts, tol)?.inv());
    }
    check_endpoints(ts, s, t)?;
    let mut product = Complex64::new(1.0, 0.0);
    let mut exponent = Complex64::new(0.0, 0.0);
    for piece in ts.pieces_between(s, t)? {
        match piece {
            Piece::Jump { t, mu } => {
                let factor = Complex64::new(1.0, 0.0) + g(t)? * mu;
                if factor.norm() < REGRESSIVITY_TOL {
                    return Err(Error::NotRegressive {
                        t,
                        factor: factor.norm(),
                    });
                }
                product *= factor;
            }
            Piece::Dense { a, b } => exponent += integrate(&g, a, b, tol)?,
        }
    }
    Ok(product * exponent.exp())
}

/// Real-valued convenience wrapper of [`ts_exponential`].
pub fn ts_exponential_real<F>(g: F, t: f64, s: f64, ts: &ValidatedTimeScale, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    Ok(ts_exponential(|x| Ok(Complex64::new(g(x)?, 0.0)), t, s, ts, tol)?.re)
}

/// `e_{iφ}(t, s)`.
pub fn exp_i_phi<F>(phi: F, t: f64, s: f64, ts: &ValidatedTimeScale, tol: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Result<f64>,
{
    ts_exponential(|x| Ok(Complex64::new(0.0, phi(x)?)), t, s, ts, tol)
}

pub fn cos_phi<F>(phi: F, t: f64, s: f64, ts: &ValidatedTimeScale, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    Ok(exp_i_phi(phi, t, s, ts, tol)?.re)
}

pub fn sin_phi<F>(phi: F, t: f64, s: f64, ts: &ValidatedTimeScale, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    Ok(exp_i_phi(phi, t, s, ts, tol)?.im)
}

/// Where a [`DeltaGrid`] node sits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodeKind {
    /// Right-scattered point carrying the jump `μ`.
    Jump { mu: f64 },
    /// Interior Gauss node of a dense panel.
    Dense,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    first: usize,
    half_width: f64,
}

/// Discretization of `[a, b)` for repeated nested delta integration.
///
/// Every right-scattered point is a node with weight `μ`; every dense stretch
/// is split into panels carrying the interior nodes of a fixed Gauss rule.
/// Dense endpoints are never nodes, so piecewise coefficients that take
/// special values at segment ends are only seen at their scattered points.
#[derive(Debug, Clone)]
pub struct DeltaGrid {
    pub t: Vec<f64>,
    pub kind: Vec<NodeKind>,
    panels: Vec<Panel>,
    /// For each node, the panel it belongs to (dense) or `usize::MAX`.
    panel_of: Vec<usize>,
    rule: GaussRule,
}

impl DeltaGrid {
    /// `panels` is the number of panels a dense stretch of length `b − a`
    /// would receive; shorter stretches get proportionally fewer (at least one).
    pub fn new(ts: &ValidatedTimeScale, a: f64, b: f64, panels: usize, rule: GaussRule) -> Result<Self> {
        check_endpoints(ts, a, b)?;
        let span = (b - a).max(f64::MIN_POSITIVE);
        let mut grid = DeltaGrid {
            t: Vec::new(),
            kind: Vec::new(),
            panels: Vec::new(),
            panel_of: Vec::new(),
            rule,
        };
        for piece in ts.pieces_between(a, b)? {
            match piece {
                Piece::Jump { t, mu } => {
                    grid.t.push(t);
                    grid.kind.push(NodeKind::Jump { mu });
                    grid.panel_of.push(usize::MAX);
                }
                Piece::Dense { a: da, b: db } => {
                    let count = ((panels as f64) * (db - da) / span).ceil().max(1.0) as usize;
                    let width = (db - da) / count as f64;
                    for k in 0..count {
                        let left = da + width * k as f64;
                        let right = if k + 1 == count { db } else { left + width };
                        let half = 0.5 * (right - left);
                        let mid = 0.5 * (right + left);
                        grid.panels.push(Panel {
                            first: grid.t.len(),
                            half_width: half,
                        });
                        let panel_idx = grid.panels.len() - 1;
                        for &x in &grid.rule.nodes {
                            grid.t.push(mid + half * x);
                            grid.kind.push(NodeKind::Dense);
                            grid.panel_of.push(panel_idx);
                        }
                    }
                }
            }
        }
        Ok(grid)
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn is_purely_scattered(&self) -> bool {
        self.panels.is_empty()
    }

    /// `∫_a^b f Δs` from node values.
    pub fn integral<T: QuadValue>(&self, f: &[T]) -> T {
        let m = self.rule.len();
        let mut sum = T::zero();
        let mut i = 0;
        while i < self.len() {
            match self.kind[i] {
                NodeKind::Jump { mu } => {
                    sum = sum + f[i] * mu;
                    i += 1;
                }
                NodeKind::Dense => {
                    let panel = self.panels[self.panel_of[i]];
                    let mut s = T::zero();
                    for j in 0..m {
                        s = s + f[panel.first + j] * self.rule.weights[j];
                    }
                    sum = sum + s * panel.half_width;
                    i += m;
                }
            }
        }
        sum
    }

    /// `C_i = ∫_a^{t_i} f Δs` at every node. A scattered node's own jump is
    /// not included.
    pub fn cumulative<T: QuadValue>(&self, f: &[T]) -> Vec<T> {
        let m = self.rule.len();
        let mut out = vec![T::zero(); self.len()];
        let mut base = T::zero();
        let mut i = 0;
        while i < self.len() {
            match self.kind[i] {
                NodeKind::Jump { mu } => {
                    out[i] = base;
                    base = base + f[i] * mu;
                    i += 1;
                }
                NodeKind::Dense => {
                    let panel = self.panels[self.panel_of[i]];
                    let vals = &f[panel.first..panel.first + m];
                    let mut total = T::zero();
                    for (j, &v) in vals.iter().enumerate() {
                        total = total + v * self.rule.weights[j];
                    }
                    for k in 0..m {
                        let row = &self.rule.cumulative[k];
                        let mut s = T::zero();
                        for (j, &v) in vals.iter().enumerate() {
                            s = s + v * row[j];
                        }
                        out[panel.first + k] = base + s * panel.half_width;
                    }
                    base = base + total * panel.half_width;
                    i += m;
                }
            }
        }
        out
    }

    /// `e_g(t_i, a)` at every node, plus `e_g(b, a)`.
    pub fn exponential(&self, g: &[Complex64]) -> Result<(Vec<Complex64>, Complex64)> {
        let dense: Vec<Complex64> = g
            .iter()
            .zip(&self.kind)
            .map(|(&v, k)| match k {
                NodeKind::Dense => v,
                NodeKind::Jump { .. } => Complex64::new(0.0, 0.0),
            })
            .collect();
        // Cumulative dense exponent; jumps contribute nothing to it.
        let exponent = self.cumulative(&dense);
        let total_exponent = self.integral(&dense);
        let mut product = Complex64::new(1.0, 0.0);
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            out.push(product * exponent[i].exp());
            if let NodeKind::Jump { mu } = self.kind[i] {
                let factor = Complex64::new(1.0, 0.0) + g[i] * mu;
                if factor.norm() < REGRESSIVITY_TOL {
                    return Err(Error::NotRegressive {
                        t: self.t[i],
                        factor: factor.norm(),
                    });
                }
                product *= factor;
            }
        }
        Ok((out, product * total_exponent.exp()))
    }
}

/// Nested delta integral of the constant `c` over the simplex
/// `a ≤ t_n < … < t_1 < b` (with `n ≥ 1`).
pub fn nested_simplex_constant(c: f64, n: usize, a: f64, b: f64, ts: &ValidatedTimeScale) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("simplex dimension must be at least 1".into()));
    }
    // The integrand is polynomial on dense parts; a 16-point rule with n ≤ 15
    // is exact per panel.
    let grid = DeltaGrid::new(ts, a, b, 4, GaussRule::new(16))?;
    let mut g = vec![c; grid.len()];
    for _ in 1..n {
        g = grid.cumulative(&g);
    }
    Ok(grid.integral(&g))
}
