//! Shi's formula for continuous scales with `ℬ = 1`:
//!
//! ```text
//! 𝒜 = 2cosΦ(t0+T) + Σ_m 2^{1−2m} ∫…∫ cos(Φ(t0+T) − 2Φ(t1,t2) − … − 2Φ(t_{2m−1},t_{2m})) Π h(t_i)
//! ```
//!
//! with `Φ(t,s) = ∫_s^t √q`, `h = −p − q′/(2q)` and `t0 ≤ t_{2m} ≤ … ≤ t_1 ≤ t0+T`.
//! Writing the cosine as `Re e^{iΨ}` separates the integrand, so the 2m-fold
//! integral is again a chain of cumulative integrals.

use num_complex::Complex64;

use super::verdict::B_UNIT_TOL;
use super::SystemSpec;
use crate::error::{Error, Result};
use crate::quadrature::GaussRule;
use crate::tscalc::DeltaGrid;

const PANEL_ORDER: usize = 16;
const INITIAL_PANELS: usize = 4;
const MAX_GRID_NODES: usize = 1 << 20;

fn terms_on_grid(spec: &SystemSpec, grid: &DeltaGrid, order: usize) -> Result<Vec<f64>> {
    let len = grid.len();
    let mut phi = Vec::with_capacity(len);
    let mut h = Vec::with_capacity(len);
    for &t in &grid.t {
        let q = spec.q_at(t)?;
        if q <= 0.0 {
            return Err(Error::NegativeQOnDense { t, value: q });
        }
        phi.push(q.sqrt());
        h.push(-spec.p_at(t)? - spec.qprime_at(t)? / (2.0 * q));
    }
    let big_phi = grid.cumulative(&phi);
    let total = grid.integral(&phi);
    let outer = Complex64::new(0.0, total).exp();
    // h·e^{∓2iΦ}: odd positions (t1, t3, …) carry the minus sign.
    let odd: Vec<Complex64> = (0..len)
        .map(|i| Complex64::new(0.0, -2.0 * big_phi[i]).exp() * h[i])
        .collect();
    let even: Vec<Complex64> = (0..len)
        .map(|i| Complex64::new(0.0, 2.0 * big_phi[i]).exp() * h[i])
        .collect();

    let mut terms = vec![2.0 * total.cos()];
    for m in 1..=order / 2 {
        let folds = 2 * m;
        // Innermost variable t_{2m} first.
        let mut inner = grid.cumulative(&even);
        for position in (2..folds).rev() {
            let w = if position % 2 == 1 { &odd } else { &even };
            let f: Vec<Complex64> = (0..len).map(|i| w[i] * inner[i]).collect();
            inner = grid.cumulative(&f);
        }
        let f: Vec<Complex64> = (0..len).map(|i| odd[i] * inner[i]).collect();
        let s1 = grid.integral(&f);
        terms.push(2f64.powi(1 - 2 * m as i32) * (outer * s1).re);
    }
    Ok(terms)
}

/// `2cosΦ(t0+T)` followed by the 2-fold, 4-fold, … terms, through the
/// largest even fold `≤ order`.
pub fn shi_terms(spec: &SystemSpec, order: usize) -> Result<Vec<f64>> {
    let ts = &spec.ts;
    if !ts.is_continuous() {
        return Err(Error::NotContinuousScale);
    }
    let b = spec.compute_b()?;
    if (b - 1.0).abs() > B_UNIT_TOL {
        return Err(Error::BNotOne(b));
    }
    let build = |panels: usize| -> Result<Vec<f64>> {
        let grid = DeltaGrid::new(ts, ts.t0(), ts.end(), panels, GaussRule::new(PANEL_ORDER))?;
        terms_on_grid(spec, &grid, order)
    };
    let mut panels = INITIAL_PANELS;
    let mut coarse = build(panels)?;
    loop {
        panels *= 2;
        if panels * PANEL_ORDER > MAX_GRID_NODES {
            return Err(Error::QuadratureNonConvergence {
                a: ts.t0(),
                b: ts.end(),
                tol: spec.quad_tol,
            });
        }
        let fine = build(panels)?;
        let change = coarse
            .iter()
            .zip(&fine)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if change <= spec.quad_tol {
            return Ok(fine);
        }
        coarse = fine;
    }
}

/// Partial sum of Shi's formula through the largest even fold `≤ order`.
pub fn shi_continuous_a(spec: &SystemSpec, order: usize) -> Result<f64> {
    Ok(shi_terms(spec, order)?.iter().sum())
}
