//! Property checks shared by the integration tests and the acceptance runner.

use num_complex::Complex64;
use proptest::prelude::*;
use tsfloquet::floquet::{a_partial, a_terms, error_bound, estimate_bounds};
use tsfloquet::oracle::{monodromy, DEFAULT_RK_TOL};
use tsfloquet::tscalc::nested_simplex_constant;
use tsfloquet::{analyze, AnalysisOptions, PhaseTable, SeriesMethod, SystemSpec};

use super::rel_close;

fn c_close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
}

/// Scattered points and a few dense points of `[t0, t0+T)`.
fn sample_points(spec: &SystemSpec, fractions: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let ts = &spec.ts;
    let scattered = ts.scattered_points_in(ts.t0(), ts.end()).unwrap();
    let mut dense = Vec::new();
    for seg in ts.segments() {
        if let tsfloquet::Segment::Interval(a, b) = *seg {
            dense.extend(fractions.iter().map(|f| a + f * (b - a)));
        }
    }
    (scattered, dense)
}

#[allow(clippy::needless_range_loop)]
pub fn check_identities(spec: &SystemSpec, fractions: &[f64]) -> Result<(), TestCaseError> {
    let table = PhaseTable::solve(spec).unwrap();
    let ts = &spec.ts;
    let (scattered, dense) = sample_points(spec, fractions);
    let mut all: Vec<f64> = scattered.iter().chain(&dense).copied().collect();
    all.push(ts.t0());
    all.sort_by(f64::total_cmp);

    for &t in &scattered {
        let mu = ts.mu(t).unwrap();
        let sigma = ts.sigma(t).unwrap();
        let phi = table.phi(t).unwrap();

        // φ(σ(t))φ(t) = q(t).
        let q = spec.q_at(t).unwrap();
        prop_assert!(rel_close(table.phi(sigma).unwrap() * phi, q, 1e-12));

        // e(σ(t), t) = 1 + iμφ(t).
        let jump = table.e(sigma, t).unwrap();
        prop_assert!(c_close(jump, Complex64::new(1.0, mu * phi), 1e-12), "{jump}");

        // X(σ(t)) = (I + μA(t))X(t), A = [[0, 1], [−q, φ^Δ/φ]].
        let x = table.fundamental_matrix(t).unwrap();
        let xs = table.fundamental_matrix(sigma).unwrap();
        let ratio = table.phi_delta(t).unwrap() / phi;
        let step = [[1.0, mu], [-mu * q, 1.0 + mu * ratio]];
        for i in 0..2 {
            for j in 0..2 {
                let want = step[i][0] * x[0][j] + step[i][1] * x[1][j];
                prop_assert!(rel_close(xs[i][j], want, 1e-10), "X(σ)[{i}][{j}] = {} vs {want}", xs[i][j]);
            }
        }
    }

    // Dense parts: φ² = q and X^Δ = AX by central differences.
    for &t in &dense {
        let phi = table.phi(t).unwrap();
        let q = spec.q_at(t).unwrap();
        prop_assert!(rel_close(phi * phi, q, 1e-12));
        let Some(stretch) = ts.segments().iter().find_map(|seg| match *seg {
            tsfloquet::Segment::Interval(a, b) if a < t && t < b => Some((a, b)),
            _ => None,
        }) else { continue };
        let step = 1e-5;
        if t - step <= stretch.0 || t + step >= stretch.1 {
            continue;
        }
        let x = table.fundamental_matrix(t).unwrap();
        let xp = table.fundamental_matrix(t + step).unwrap();
        let xm = table.fundamental_matrix(t - step).unwrap();
        let ratio = table.phi_delta(t).unwrap() / phi;
        let a = [[0.0, 1.0], [-q, ratio]];
        for r in 0..2 {
            for c in 0..2 {
                let fd = (xp[r][c] - xm[r][c]) / (2.0 * step);
                let want = a[r][0] * x[0][c] + a[r][1] * x[1][c];
                prop_assert!(rel_close(fd, want, 1e-6), "X^Δ[{r}][{c}] at {t}: {fd} vs {want}");
            }
        }
    }

    for (i, &t) in all.iter().enumerate() {
        let x = table.fundamental_matrix(t).unwrap();
        let inv = table.fundamental_matrix_inverse(t).unwrap();
        let scale = x.iter().flatten().chain(inv.iter().flatten()).fold(1.0f64, |m, v| m.max(v.abs()));
        for r in 0..2 {
            for c in 0..2 {
                let v = x[r][0] * inv[0][c] + x[r][1] * inv[1][c];
                let id = if r == c { 1.0 } else { 0.0 };
                prop_assert!((v - id).abs() <= 1e-10 * scale * scale, "X·X⁻¹ at {t}: {v}");
            }
        }

        for &s in &scattered {
            let mu = ts.mu(s).unwrap();
            let sigma = ts.sigma(s).unwrap();
            let mphi = mu * table.phi(s).unwrap();
            let (c, sn) = (table.cos_phi(s, t).unwrap(), table.sin_phi(s, t).unwrap());
            prop_assert!(rel_close(table.sin_phi(sigma, t).unwrap(), sn + mphi * c, 1e-10));
            prop_assert!(rel_close(table.cos_phi(sigma, t).unwrap(), c - mphi * sn, 1e-10));
        }

        for &s in &all[..=i] {
            let w = table.e_mu_phi2(t, s).unwrap();
            prop_assert!(rel_close(table.sin_phi(t, s).unwrap(), -w * table.sin_phi(s, t).unwrap(), 1e-10));
            prop_assert!(rel_close(table.cos_phi(t, s).unwrap(), w * table.cos_phi(s, t).unwrap(), 1e-10));

            let ts_ = table.e(t, s).unwrap();
            let st = table.e(s, t).unwrap();
            prop_assert!(c_close(ts_ * st, Complex64::new(1.0, 0.0), 1e-9), "flip at ({t}, {s})");
            let r = all[0];
            let direct = table.e(t, r).unwrap();
            let chained = table.e(t, s).unwrap() * table.e(s, r).unwrap();
            prop_assert!(c_close(direct, chained, 1e-12), "semigroup at ({t}, {s}, {r})");
        }
    }
    Ok(())
}


/// Nested delta integral of `c` over the `n`-simplex on one period is at
/// most `c(b − a)^n/n!`, with equality on an interval.
pub fn check_simplex(spec: &SystemSpec, c: f64, n: usize) -> Result<(), TestCaseError> {
    let ts = &spec.ts;
    let (a, b) = (ts.t0(), ts.end());
    let v = nested_simplex_constant(c, n, a, b, ts).unwrap();
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    prop_assert!(v >= 0.0);
    prop_assert!(v <= c * (b - a).powi(n as i32) / factorial * (1.0 + 1e-9), "{v}");
    Ok(())
}

/// Discrete scale with `k` points: `𝒜(k)` is the monodromy trace and the
/// next two terms vanish.
pub fn check_discrete_oracle(spec: &SystemSpec) -> Result<(), TestCaseError> {
    let k = spec.ts.scattered_count();
    let table = PhaseTable::solve(spec).unwrap();
    let terms = a_terms(&table, k + 2, SeriesMethod::Auto).unwrap();
    let m = monodromy(spec, DEFAULT_RK_TOL).unwrap();
    let partial: f64 = terms[..=k].iter().sum();
    prop_assert!(rel_close(partial, m.trace(), 1e-10), "{partial} vs {}", m.trace());
    prop_assert!(terms[k + 1].abs() <= 1e-12 && terms[k + 2].abs() <= 1e-12);
    let b = spec.compute_b().unwrap();
    prop_assert!(rel_close(b, m.det(), 1e-10));
    Ok(())
}

pub fn check_enumeration_matches_recursion(spec: &SystemSpec) -> Result<(), TestCaseError> {
    let k = spec.ts.scattered_count();
    let table = PhaseTable::solve(spec).unwrap();
    let e = a_terms(&table, k, SeriesMethod::Enumeration).unwrap();
    let r = a_terms(&table, k, SeriesMethod::Recursion).unwrap();
    for (x, y) in e.iter().zip(&r) {
        prop_assert!(rel_close(*x, *y, 1e-10), "{x} vs {y}");
    }
    Ok(())
}

/// `𝒜(k)` does not depend on the seed `φ(t0)` on discrete scales.
pub fn check_gauge(spec: &SystemSpec, seed: f64) -> Result<(), TestCaseError> {
    let k = spec.ts.scattered_count();
    let one = a_partial(&PhaseTable::solve(spec).unwrap(), k).unwrap();
    let other = a_partial(&PhaseTable::solve_with_seed(spec, seed).unwrap(), k).unwrap();
    prop_assert!(rel_close(one, other, 1e-10), "{one} vs {other}");
    Ok(())
}

/// `|𝒜_oracle − 𝒜(n)| ≤ bound(n) + a_slack` and Liouville's formula.
pub fn check_hybrid_oracle(spec: &SystemSpec, n: usize, a_slack: f64) -> Result<(), TestCaseError> {
    let opts = AnalysisOptions {
        n: Some(n),
        ..AnalysisOptions::default()
    };
    let report = analyze(spec, &opts).unwrap();
    prop_assert!(report.warnings.is_empty(), "{:?}", report.warnings);
    let m = monodromy(spec, DEFAULT_RK_TOL).unwrap();
    let delta = (m.trace() - report.a_partial).abs();
    prop_assert!(
        delta <= report.err_bound.value() + a_slack,
        "|{} - {}| > {}",
        m.trace(),
        report.a_partial,
        report.err_bound.value()
    );
    prop_assert!(rel_close(report.b, m.det(), 1e-8), "{} vs {}", report.b, m.det());
    Ok(())
}

/// `|𝒜_n| ≤ (K1/K2)(K2K3T)^n/n!` for `n = 1..4`, and the tail bound covers `𝒜_4`.
pub fn check_term_bounds(spec: &SystemSpec) -> Result<(), TestCaseError> {
    let table = PhaseTable::solve(spec).unwrap();
    let k = estimate_bounds(&table, 1.0).unwrap();
    let terms = a_terms(&table, 4, SeriesMethod::Auto).unwrap();
    let x = k.k2 * k.k3 * k.period;
    let mut factorial = 1.0;
    for (n, term) in terms.iter().enumerate().skip(1) {
        factorial *= n as f64;
        let allowed = k.k1 / k.k2 * x.powi(n as i32) / factorial;
        prop_assert!(term.abs() <= allowed * (1.0 + 1e-6) + 1e-9, "n = {n}: {term} vs {allowed}");
    }
    prop_assert!(error_bound(&k, 3).value() * (1.0 + 1e-6) + 1e-9 >= terms[4].abs());
    Ok(())
}
