//! The series `𝒜 = Σ 𝒜_n` for the trace of the monodromy matrix.
//!
//! With `E(t) = e_{iφ}(t, t0)` the kernels reduce to
//! `P(t,s) = Im(E(t)/E(σ(s)))/φ(σ(s))` and `Q(t,s) = φ(t)Re(E(t)/E(σ(s)))/φ(σ(s))`,
//! so every nested integral factors through a single complex cumulative
//! integral per level:
//!
//! ```text
//! G_0 = φ·Im E,  H_0 = φ·Re E
//! G_j(r) = φ(r)·Re(E(r)·∫_{t0}^{r} h G_{j−1} / (φ^σ E^σ) Δs)       (same for H)
//! 𝒜_n = −Im(E(t0+T)·I_G) + φ(t0+T)/φ(t0)·Re(E(t0+T)·I_H)
//! ```
//!
//! where `I_G`, `I_H` are the level-`n` integrals over the whole period.

use num_complex::Complex64;

use super::{PhaseTable, SystemSpec};
use crate::error::{Error, Result};
use crate::quadrature::GaussRule;
use crate::tscalc::{DeltaGrid, NodeKind};

/// Deepest nesting allowed on scales with dense parts.
pub const MAX_DENSE_DEPTH: usize = 8;

/// Gauss nodes per dense panel.
const PANEL_ORDER: usize = 16;
const INITIAL_PANELS: usize = 4;
/// Refinement stops with an error beyond this many grid nodes.
const MAX_GRID_NODES: usize = 1 << 20;
/// Above this many tuples the enumeration hands over to the recursion.
const MAX_ENUMERATION_TUPLES: f64 = 2e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesMethod {
    /// Enumeration on purely discrete scales, recursion otherwise.
    Auto,
    /// Sum over strictly decreasing tuples of scattered points (discrete only).
    Enumeration,
    /// Level-by-level cumulative integration on a [`DeltaGrid`].
    Recursion,
    /// Shi's formula for continuous scales with `ℬ = 1`.
    Shi,
}

impl SeriesMethod {
    pub(crate) fn resolve(self, spec: &SystemSpec, n: usize) -> SeriesMethod {
        match self {
            SeriesMethod::Auto if spec.ts.is_discrete() => {
                let k = spec.ts.scattered_count();
                if binomial(k, n) <= MAX_ENUMERATION_TUPLES {
                    SeriesMethod::Enumeration
                } else {
                    SeriesMethod::Recursion
                }
            }
            SeriesMethod::Auto => SeriesMethod::Recursion,
            other => other,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SeriesMethod::Auto => "auto",
            SeriesMethod::Enumeration => "enumeration",
            SeriesMethod::Recursion => "recursion",
            SeriesMethod::Shi => "shi",
        }
    }
}

fn binomial(k: usize, n: usize) -> f64 {
    if n > k {
        return 0.0;
    }
    let n = n.min(k - n);
    (0..n).fold(1.0, |acc, i| acc * (k - i) as f64 / (i + 1) as f64)
}

/// Per-node data shared by every level of the recursion.
struct NodeData {
    phi: Vec<f64>,
    phi_sigma: Vec<f64>,
    h: Vec<f64>,
    e: Vec<Complex64>,
    e_sigma: Vec<Complex64>,
    e_end: Complex64,
    phi0: f64,
    phi_end: f64,
}

fn node_data(table: &PhaseTable, grid: &DeltaGrid) -> Result<NodeData> {
    let len = grid.len();
    let mut phi = Vec::with_capacity(len);
    let mut phi_sigma = Vec::with_capacity(len);
    let mut h = Vec::with_capacity(len);
    for &t in &grid.t {
        phi.push(table.phi(t)?);
        phi_sigma.push(table.phi_sigma(t)?);
        h.push(table.h(t)?);
    }
    let i_phi: Vec<Complex64> = phi.iter().map(|&f| Complex64::new(0.0, f)).collect();
    let (e, e_end) = grid.exponential(&i_phi)?;
    let e_sigma = e
        .iter()
        .zip(&grid.kind)
        .zip(&phi)
        .map(|((&e, kind), &f)| match *kind {
            NodeKind::Jump { mu } => e * Complex64::new(1.0, mu * f),
            NodeKind::Dense => e,
        })
        .collect();
    Ok(NodeData {
        phi,
        phi_sigma,
        h,
        e,
        e_sigma,
        e_end,
        phi0: table.phi_t0()?,
        phi_end: table.phi_end(),
    })
}

fn first_term(d: &NodeData) -> f64 {
    (1.0 + d.phi_end / d.phi0) * d.e_end.re
}

fn recursion_terms(grid: &DeltaGrid, d: &NodeData, n: usize) -> Vec<f64> {
    let mut terms = vec![first_term(d)];
    let mut g: Vec<f64> = d.phi.iter().zip(&d.e).map(|(&f, e)| f * e.im).collect();
    let mut hh: Vec<f64> = d.phi.iter().zip(&d.e).map(|(&f, e)| f * e.re).collect();
    let weight: Vec<Complex64> = (0..grid.len())
        .map(|i| d.h[i] / (d.e_sigma[i] * d.phi_sigma[i]))
        .collect();
    let ratio = d.phi_end / d.phi0;
    for level in 1..=n {
        let fg: Vec<Complex64> = weight.iter().zip(&g).map(|(w, &v)| w * v).collect();
        let fh: Vec<Complex64> = weight.iter().zip(&hh).map(|(w, &v)| w * v).collect();
        let ig = grid.integral(&fg);
        let ih = grid.integral(&fh);
        terms.push(-(d.e_end * ig).im + ratio * (d.e_end * ih).re);
        if level < n {
            let cg = grid.cumulative(&fg);
            let ch = grid.cumulative(&fh);
            for i in 0..grid.len() {
                g[i] = d.phi[i] * (d.e[i] * cg[i]).re;
                hh[i] = d.phi[i] * (d.e[i] * ch[i]).re;
            }
        }
    }
    terms
}

fn recursion(table: &PhaseTable, n: usize) -> Result<Vec<f64>> {
    let spec = table.spec();
    let ts = &spec.ts;
    let build = |panels: usize| -> Result<Vec<f64>> {
        let grid = DeltaGrid::new(ts, ts.t0(), ts.end(), panels, GaussRule::new(PANEL_ORDER))?;
        let data = node_data(table, &grid)?;
        Ok(recursion_terms(&grid, &data, n))
    };
    if ts.is_discrete() {
        return build(1);
    }
    if n > MAX_DENSE_DEPTH {
        return Err(Error::DepthBudgetExceeded {
            n,
            max: MAX_DENSE_DEPTH,
        });
    }
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

fn enumeration(table: &PhaseTable, n: usize) -> Result<Vec<f64>> {
    let ts = &table.spec().ts;
    if !ts.is_discrete() {
        return Err(Error::InvalidArgument(
            "tuple enumeration needs a purely discrete time scale".into(),
        ));
    }
    let grid = DeltaGrid::new(ts, ts.t0(), ts.end(), 1, GaussRule::new(1))?;
    let d = node_data(table, &grid)?;
    let k = grid.len();
    let mu: Vec<f64> = grid
        .kind
        .iter()
        .map(|kind| match *kind {
            NodeKind::Jump { mu } => mu,
            NodeKind::Dense => 0.0,
        })
        .collect();
    // Outer factor in t_1 (latest point) and inner factor in t_n (earliest).
    let ratio = d.phi_end / d.phi0;
    let q_end: Vec<f64> = (0..k)
        .map(|s| ratio * (d.e_end / d.e_sigma[s]).re / d.phi_sigma[s])
        .collect();
    let p_end: Vec<f64> = (0..k)
        .map(|s| (d.e_end / d.e_sigma[s]).im / d.phi_sigma[s])
        .collect();
    let kernel = |t: usize, s: usize| d.phi[t] * (d.e[t] / d.e_sigma[s]).re / d.phi_sigma[s];
    let closing = |t: usize, s: usize| d.phi[t] * (d.e[t].re * q_end[s] - d.e[t].im * p_end[s]);

    let mut terms = vec![first_term(&d)];
    for level in 1..=n {
        if level > k {
            terms.push(0.0);
            continue;
        }
        // Depth-first over t_1 > t_2 > … > t_level carrying Π μ h Q.
        #[allow(clippy::too_many_arguments)]
        fn walk(
            depth: usize,
            level: usize,
            first: usize,
            last: usize,
            weight: f64,
            mu: &[f64],
            h: &[f64],
            kernel: &dyn Fn(usize, usize) -> f64,
            closing: &dyn Fn(usize, usize) -> f64,
        ) -> f64 {
            if depth == level {
                return weight * closing(last, first);
            }
            let remaining = level - depth;
            let mut sum = 0.0;
            for next in (remaining - 1)..last {
                let w = weight * mu[next] * h[next] * kernel(last, next);
                sum += walk(depth + 1, level, first, next, w, mu, h, kernel, closing);
            }
            sum
        }
        let mut total = 0.0;
        for first in (level - 1)..k {
            let w = mu[first] * d.h[first];
            total += walk(1, level, first, first, w, &mu, &d.h, &kernel, &closing);
        }
        terms.push(total);
    }
    Ok(terms)
}

/// `𝒜_0 … 𝒜_n` by the chosen method.
pub fn a_terms(table: &PhaseTable, n: usize, method: SeriesMethod) -> Result<Vec<f64>> {
    match method.resolve(table.spec(), n) {
        SeriesMethod::Enumeration => enumeration(table, n),
        SeriesMethod::Recursion => recursion(table, n),
        SeriesMethod::Shi => super::shi::shi_terms(table.spec(), n),
        SeriesMethod::Auto => unreachable!("resolved above"),
    }
}

/// `𝒜_n`.
pub fn a_term(table: &PhaseTable, n: usize) -> Result<f64> {
    Ok(a_terms(table, n, SeriesMethod::Auto)?[n])
}

/// `𝒜(n) = 𝒜_0 + … + 𝒜_n`.
pub fn a_partial(table: &PhaseTable, n: usize) -> Result<f64> {
    Ok(a_terms(table, n, SeriesMethod::Auto)?.iter().sum())
}
