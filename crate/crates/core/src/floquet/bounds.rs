//! Truncation bound `|𝒜 − 𝒜(n)| ≤ (K1/K2)·Σ_{k>n} (K2·K3·T)^k / k!`.
//!
//! `K1 ≥ sup|h(t,s)|` (for `t ≤ s`) with
//! `h(t,s) = φ(t)·(cos_φ(t)·Q(t0+T,s)/φ(t0) − sin_φ(t)·P(t0+T,s))`,
//! `K2 ≥ sup|Q(t,s)|` (for `t ≥ σ(s)`) and `K3 ≥ sup|h|`. The suprema are
//! estimated on every scattered point plus a uniform grid per dense stretch,
//! then polished by a local search around the best grid candidates.

use num_complex::Complex64;

use super::PhaseTable;
use crate::error::Result;
use crate::timescale::Piece;

/// Grid points per dense stretch for the supremum estimates.
pub const SUPREMUM_GRID: usize = 512;
const POLISH_CANDIDATES: usize = 3;
const POLISH_ROUNDS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConstants {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub period: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErrorBound {
    /// The series has terminated: `𝒜(n) = 𝒜`.
    Exact,
    Bound(f64),
}

impl ErrorBound {
    pub fn value(&self) -> f64 {
        match *self {
            ErrorBound::Exact => 0.0,
            ErrorBound::Bound(b) => b,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ErrorBound::Exact)
    }
}

/// `Σ_{k>n} x^k / k!` summed directly (no cancellation against `e^x`).
pub fn tail_sum(x: f64, n: usize) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mut term = 1.0;
    for k in 1..=n + 1 {
        term *= x / k as f64;
    }
    let mut sum = 0.0;
    let mut k = n + 1;
    while term > 0.0 {
        sum += term;
        if term <= 1e-18 * sum && (k as f64) > x {
            break;
        }
        k += 1;
        term *= x / k as f64;
    }
    sum
}

/// The truncation bound for `𝒜(n)`.
pub fn error_bound(k: &BoundConstants, n: usize) -> ErrorBound {
    let value = if k.k2 == 0.0 {
        // Only the first-order family survives.
        if n == 0 {
            k.k1 * k.k3 * k.period
        } else {
            0.0
        }
    } else {
        (k.k1 / k.k2) * tail_sum(k.k2 * k.k3 * k.period, n)
    };
    if value == 0.0 {
        ErrorBound::Exact
    } else {
        ErrorBound::Bound(value)
    }
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    t: f64,
    /// Dense stretch `[lo, hi]` containing `t`, for the local search.
    dense: Option<(f64, f64)>,
    /// `σ(t)` (equal to `t` on dense parts).
    sigma: f64,
    phi: f64,
    phi_sigma: f64,
    h: f64,
    e: Complex64,
    e_sigma: Complex64,
}

struct Context<'a> {
    table: &'a PhaseTable,
    e_end: Complex64,
    ratio: f64,
}

impl Context<'_> {
    fn dense_sample(&self, t: f64, stretch: (f64, f64)) -> Result<Sample> {
        let table = self.table;
        let e = table.e(t, table.spec().ts.t0())?;
        let phi = table.phi(t)?;
        Ok(Sample {
            t,
            dense: Some(stretch),
            sigma: t,
            phi,
            phi_sigma: phi,
            h: table.h(t)?,
            e,
            e_sigma: e,
        })
    }

    /// `h(t,s)` from the bound definition.
    fn closing(&self, t: &Sample, s: &Sample) -> f64 {
        let r = self.e_end / s.e_sigma;
        let q_end = self.ratio * r.re / s.phi_sigma;
        let p_end = r.im / s.phi_sigma;
        t.phi * (t.e.re * q_end - t.e.im * p_end)
    }

    fn kernel(&self, t: &Sample, s: &Sample) -> f64 {
        t.phi * (t.e / s.e_sigma).re / s.phi_sigma
    }
}

fn samples(ctx: &Context<'_>) -> Result<Vec<Sample>> {
    let table = ctx.table;
    let ts = &table.spec().ts;
    let mut out: Vec<Sample> = Vec::new();
    let mut last_t = ts.t0();
    let mut e = Complex64::new(1.0, 0.0);
    let mut push = |t: f64, dense: Option<(f64, f64)>, sigma: f64, mu: f64| -> Result<Sample> {
        e *= table.e(t, last_t)?;
        last_t = t;
        let phi = table.phi(t)?;
        let phi_sigma = table.phi_sigma(t)?;
        let e_sigma = e * Complex64::new(1.0, mu * phi);
        Ok(Sample {
            t,
            dense,
            sigma,
            phi,
            phi_sigma,
            h: table.h(t)?,
            e,
            e_sigma,
        })
    };
    for piece in ts.pieces() {
        match piece {
            Piece::Jump { t, mu } => out.push(push(t, None, t + mu, mu)?),
            Piece::Dense { a, b } => {
                // Stay off the right end, which is a scattered point or t0+T.
                let hi = b - (1e-9 * b.abs().max(1.0)).min(0.25 * (b - a));
                let m = SUPREMUM_GRID;
                for i in 0..m {
                    let t = a + (hi - a) * i as f64 / (m - 1) as f64;
                    out.push(push(t, Some((a, hi)), t, 0.0)?);
                }
            }
        }
    }
    Ok(out)
}

/// Local maximization of `f` around `start` over the free (dense)
/// coordinates, keeping `admissible` true.
fn polish<F, A>(start: [f64; 2], free: [Option<(f64, f64)>; 2], mut f: F, admissible: A) -> Result<f64>
where
    F: FnMut([f64; 2]) -> Result<f64>,
    A: Fn([f64; 2]) -> bool,
{
    let mut best_x = start;
    let mut best = f(start)?.abs();
    let mut radius = [0.0; 2];
    for (i, r) in radius.iter_mut().enumerate() {
        if let Some((lo, hi)) = free[i] {
            *r = (hi - lo) / (SUPREMUM_GRID - 1) as f64;
        }
    }
    let offsets = [-1.0, -0.5, 0.0, 0.5, 1.0];
    for _ in 0..POLISH_ROUNDS {
        let center = best_x;
        for &d0 in &offsets {
            for &d1 in &offsets {
                if (d0 == 0.0 && d1 == 0.0) || (free[0].is_none() && d0 != 0.0) || (free[1].is_none() && d1 != 0.0) {
                    continue;
                }
                let mut x = center;
                for (i, d) in [d0, d1].into_iter().enumerate() {
                    if let Some((lo, hi)) = free[i] {
                        x[i] = (center[i] + d * radius[i]).clamp(lo, hi);
                    }
                }
                if !admissible(x) {
                    continue;
                }
                let v = f(x)?.abs();
                if v > best {
                    best = v;
                    best_x = x;
                }
            }
        }
        radius[0] *= 0.5;
        radius[1] *= 0.5;
    }
    Ok(best)
}

/// The few best-scoring index pairs seen so far.
#[derive(Default)]
struct Top(Vec<(f64, usize, usize)>);

impl Top {
    fn offer(&mut self, score: f64, i: usize, j: usize) {
        if self.0.len() < POLISH_CANDIDATES || score > self.0[self.0.len() - 1].0 {
            self.0.push((score, i, j));
            self.0.sort_by(|a, b| b.0.total_cmp(&a.0));
            self.0.truncate(POLISH_CANDIDATES);
        }
    }
}

/// Estimates `K1`, `K2`, `K3`, each multiplied by `safety`.
pub fn estimate_bounds(table: &PhaseTable, safety: f64) -> Result<BoundConstants> {
    let spec = table.spec();
    let ts = &spec.ts;
    let e_end = table.e(ts.end(), ts.t0())?;
    let ctx = Context {
        table,
        e_end,
        ratio: table.phi_end() / table.phi_t0()?,
    };
    let s = samples(&ctx)?;

    // K3
    let mut k3 = s.iter().map(|x| x.h.abs()).fold(0.0, f64::max);
    let mut dense_h = Top::default();
    for (i, x) in s.iter().enumerate().filter(|(_, x)| x.dense.is_some()) {
        dense_h.offer(x.h.abs(), i, i);
    }
    for (_, i, _) in dense_h.0 {
        let v = polish(
            [s[i].t, s[i].t],
            [s[i].dense, None],
            |x| table.h(x[0]),
            |_| true,
        )?;
        k3 = k3.max(v);
    }

    // K1 over t ≤ s, K2 over t ≥ σ(s).
    let mut k1 = 0.0f64;
    let mut k2 = 0.0f64;
    let mut cand1 = Top::default();
    let mut cand2 = Top::default();
    for (j, sj) in s.iter().enumerate() {
        for (i, si) in s.iter().enumerate() {
            if si.t <= sj.t {
                let v = ctx.closing(si, sj).abs();
                k1 = k1.max(v);
                if si.dense.is_some() || sj.dense.is_some() {
                    cand1.offer(v, i, j);
                }
            }
            if si.t >= sj.sigma {
                let v = ctx.kernel(si, sj).abs();
                k2 = k2.max(v);
                if si.dense.is_some() || sj.dense.is_some() {
                    cand2.offer(v, i, j);
                }
            }
        }
    }

    let point = |idx: usize, x: f64| -> Result<Sample> {
        match s[idx].dense {
            Some(stretch) => ctx.dense_sample(x, stretch),
            None => Ok(s[idx]),
        }
    };
    for (_, i, j) in cand1.0 {
        let v = polish(
            [s[i].t, s[j].t],
            [s[i].dense, s[j].dense],
            |x| Ok(ctx.closing(&point(i, x[0])?, &point(j, x[1])?)),
            |x| x[0] <= x[1],
        )?;
        k1 = k1.max(v);
    }
    for (_, i, j) in cand2.0 {
        let sigma_j = s[j].sigma;
        let dense_j = s[j].dense.is_some();
        let v = polish(
            [s[i].t, s[j].t],
            [s[i].dense, s[j].dense],
            |x| Ok(ctx.kernel(&point(i, x[0])?, &point(j, x[1])?)),
            |x| if dense_j { x[0] >= x[1] } else { x[0] >= sigma_j },
        )?;
        k2 = k2.max(v);
    }

    Ok(BoundConstants {
        k1: k1 * safety,
        k2: k2 * safety,
        k3: k3 * safety,
        period: ts.period(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_matches_closed_form() {
        let x = std::f64::consts::FRAC_PI_2;
        let want = x.exp() - (1.0 + x + x * x / 2.0 + x * x * x / 6.0);
        assert!((tail_sum(x, 3) - want).abs() < 1e-15);
        assert!((tail_sum(x, 3) - 0.360016406528039).abs() < 1e-14);
        assert_eq!(tail_sum(0.0, 2), 0.0);
        assert!(tail_sum(2.0, 10) < tail_sum(2.0, 9));
    }

    #[test]
    fn bound_cases() {
        let k = BoundConstants {
            k1: 1.0,
            k2: 1.0,
            k3: 0.5,
            period: std::f64::consts::PI,
        };
        assert!((error_bound(&k, 3).value() - 0.360016406528039).abs() < 1e-14);
        let zero = BoundConstants { k3: 0.0, ..k };
        assert_eq!(error_bound(&zero, 1), ErrorBound::Exact);
    }
}
