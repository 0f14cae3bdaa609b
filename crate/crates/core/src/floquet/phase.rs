use num_complex::Complex64;

use super::SystemSpec;
use crate::error::{Error, Result};
use crate::timescale::{approx_eq, Piece, Segment, TimeScaleError};
use crate::tscalc::{exp_i_phi, ts_exponential_real};

/// `|φ|` below this is treated as zero.
pub const PHI_VANISH_TOL: f64 = 1e-14;

/// Mismatch between `√q` from the left and the chained `φ` at a
/// dense/scattered junction that triggers a warning.
pub const JUNCTION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy)]
struct Scattered {
    t: f64,
    mu: f64,
    sigma: f64,
    phi: f64,
}

enum Where {
    Scattered(usize),
    Dense,
    End,
}

/// Solution `φ` of `φ(σ(t))φ(t) = q(t)`: a value per scattered point of
/// `[t0, t0+T)`, the value at `t0+T`, and `φ = √q` on dense parts.
#[derive(Debug, Clone)]
pub struct PhaseTable {
    spec: SystemSpec,
    scattered: Vec<Scattered>,
    phi_end: f64,
    warnings: Vec<String>,
}

impl PhaseTable {
    /// Builds `φ` with seed `φ(t0) = 1` on purely discrete scales.
    pub fn solve(spec: &SystemSpec) -> Result<Self> {
        Self::solve_with_seed(spec, 1.0)
    }

    /// As [`PhaseTable::solve`], with a caller-chosen `φ(t0)` on purely
    /// discrete scales (ignored when the scale has dense parts).
    pub fn solve_with_seed(spec: &SystemSpec, seed: f64) -> Result<Self> {
        let ts = &spec.ts;
        let pieces = ts.pieces();
        let mut scattered: Vec<Scattered> = pieces
            .iter()
            .filter_map(|p| match *p {
                Piece::Jump { t, mu } => Some(Scattered {
                    t,
                    mu,
                    sigma: 0.0,
                    phi: f64::NAN,
                }),
                Piece::Dense { .. } => None,
            })
            .collect();
        for s in scattered.iter_mut() {
            s.sigma = ts.sigma(s.t)?;
        }
        let end = ts.end();
        let mut table = PhaseTable {
            spec: spec.clone(),
            scattered,
            phi_end: f64::NAN,
            warnings: Vec::new(),
        };

        if ts.is_discrete() {
            if seed.abs() < PHI_VANISH_TOL {
                return Err(Error::PhiVanishes { t: ts.t0() });
            }
            let mut phi = seed;
            for s in table.scattered.iter_mut() {
                s.phi = phi;
                phi = spec.q_at(s.t)? / phi;
                if phi.abs() < PHI_VANISH_TOL {
                    return Err(Error::PhiVanishes { t: s.sigma });
                }
            }
            table.phi_end = phi;
            return Ok(table);
        }

        // φ(t0+T) = φ(t0). If t0 starts a dense interval that is √q(t0);
        // otherwise back-substitute the leading scattered run from the first
        // dense left endpoint.
        let first_dense = ts
            .segments()
            .iter()
            .find_map(|s| match *s {
                Segment::Interval(a, _) => Some(a),
                Segment::Point(_) => None,
            })
            .expect("non-discrete scale has an interval");
        let mut phi_start = table.sqrt_q(first_dense)?;
        for s in table.scattered.iter().rev().filter(|s| s.t < first_dense) {
            phi_start = spec.q_at(s.t)? / phi_start;
            if phi_start.abs() < PHI_VANISH_TOL {
                return Err(Error::PhiVanishes { t: s.t });
            }
        }
        table.phi_end = phi_start;

        for i in (0..table.scattered.len()).rev() {
            let s = table.scattered[i];
            let next = if approx_eq(s.sigma, end) {
                table.phi_end
            } else if i + 1 < table.scattered.len() && table.scattered[i + 1].t == s.sigma {
                table.scattered[i + 1].phi
            } else {
                table.sqrt_q(s.sigma)?
            };
            let phi = spec.q_at(s.t)? / next;
            if phi.abs() < PHI_VANISH_TOL {
                return Err(Error::PhiVanishes { t: s.t });
            }
            table.scattered[i].phi = phi;
        }

        // Junctions where a dense interval ends at a scattered point (or at
        // t0+T): compare √q from the left with the chained value.
        for seg in ts.segments() {
            if let Segment::Interval(a, b) = *seg {
                let left = b - (1e-9 * b.abs().max(1.0)).min(0.5 * (b - a));
                let from_left = table.sqrt_q(left)?;
                let chained = table.phi(b)?;
                if (from_left - chained).abs() > JUNCTION_TOL {
                    table.warnings.push(format!(
                        "phase function jumps at t = {b}: sqrt(q) from the left is {from_left}, \
                         the scattered chain gives {chained}"
                    ));
                }
            }
        }
        Ok(table)
    }

    pub fn spec(&self) -> &SystemSpec {
        &self.spec
    }

    /// Diagnostics collected while solving (phase junction mismatches).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Right-scattered points of `[t0, t0+T)` with their `φ` values.
    pub fn scattered_values(&self) -> Vec<(f64, f64)> {
        self.scattered.iter().map(|s| (s.t, s.phi)).collect()
    }

    pub fn phi_t0(&self) -> Result<f64> {
        self.phi(self.spec.ts.t0())
    }

    pub fn phi_end(&self) -> f64 {
        self.phi_end
    }

    fn sqrt_q(&self, t: f64) -> Result<f64> {
        let q = self.spec.q_at(t)?;
        if q <= 0.0 {
            return Err(Error::NegativeQOnDense { t, value: q });
        }
        let phi = q.sqrt();
        if phi < PHI_VANISH_TOL {
            return Err(Error::PhiVanishes { t });
        }
        Ok(phi)
    }

    fn locate(&self, t: f64) -> Result<Where> {
        let ts = &self.spec.ts;
        if approx_eq(t, ts.end()) {
            return Ok(Where::End);
        }
        let idx = self.scattered.partition_point(|s| s.t < t && !approx_eq(s.t, t));
        if let Some(s) = self.scattered.get(idx) {
            if approx_eq(s.t, t) {
                return Ok(Where::Scattered(idx));
            }
        }
        if ts.contains(t) {
            Ok(Where::Dense)
        } else {
            Err(TimeScaleError::PointNotInTimeScale(t).into())
        }
    }

    /// `φ(t)`.
    pub fn phi(&self, t: f64) -> Result<f64> {
        match self.locate(t)? {
            Where::End => Ok(self.phi_end),
            Where::Scattered(i) => Ok(self.scattered[i].phi),
            Where::Dense => self.sqrt_q(t),
        }
    }

    /// `φ(σ(t))`.
    pub fn phi_sigma(&self, t: f64) -> Result<f64> {
        match self.locate(t)? {
            Where::Scattered(i) => self.phi(self.scattered[i].sigma),
            Where::Dense => self.sqrt_q(t),
            Where::End => Err(Error::InvalidArgument(
                "φ(σ(t)) is not available at t0+T".into(),
            )),
        }
    }

    /// `φ^Δ(t)`: difference quotient at scattered points, `q′/(2√q)` on dense parts.
    pub fn phi_delta(&self, t: f64) -> Result<f64> {
        match self.locate(t)? {
            Where::Scattered(i) => {
                let s = self.scattered[i];
                Ok((self.phi(s.sigma)? - s.phi) / s.mu)
            }
            Where::Dense => Ok(self.spec.qprime_at(t)? / (2.0 * self.sqrt_q(t)?)),
            Where::End => Err(Error::InvalidArgument(
                "φ^Δ is not available at t0+T".into(),
            )),
        }
    }

    /// `h(t) = −p(t) − φ^Δ(t)/φ(t)`.
    pub fn h(&self, t: f64) -> Result<f64> {
        Ok(-self.spec.p_at(t)? - self.phi_delta(t)? / self.phi(t)?)
    }

    /// `e_{iφ}(t, s)`.
    pub fn e(&self, t: f64, s: f64) -> Result<Complex64> {
        exp_i_phi(|x| self.phi(x), t, s, &self.spec.ts, self.spec.quad_tol)
    }

    /// `cos_φ(t, s)`.
    pub fn cos_phi(&self, t: f64, s: f64) -> Result<f64> {
        Ok(self.e(t, s)?.re)
    }

    /// `sin_φ(t, s)`.
    pub fn sin_phi(&self, t: f64, s: f64) -> Result<f64> {
        Ok(self.e(t, s)?.im)
    }

    /// `e_{μφ²}(t, s)`.
    pub fn e_mu_phi2(&self, t: f64, s: f64) -> Result<f64> {
        let ts = &self.spec.ts;
        ts_exponential_real(
            |x| {
                let mu = ts.mu(x)?;
                if mu == 0.0 {
                    Ok(0.0)
                } else {
                    Ok(mu * self.phi(x)?.powi(2))
                }
            },
            t,
            s,
            ts,
            self.spec.quad_tol,
        )
    }

    /// `P(t, s) = sin_φ(t, σ(s)) / φ(σ(s))`.
    pub fn kernel_p(&self, t: f64, s: f64) -> Result<f64> {
        let sigma = self.spec.ts.sigma(s)?;
        Ok(self.sin_phi(t, sigma)? / self.phi_sigma(s)?)
    }

    /// `Q(t, s) = φ(t) cos_φ(t, σ(s)) / φ(σ(s))`.
    pub fn kernel_q(&self, t: f64, s: f64) -> Result<f64> {
        let sigma = self.spec.ts.sigma(s)?;
        Ok(self.phi(t)? * self.cos_phi(t, sigma)? / self.phi_sigma(s)?)
    }

    /// Fundamental matrix `X(t)` of the unperturbed system, row-major.
    pub fn fundamental_matrix(&self, t: f64) -> Result<[[f64; 2]; 2]> {
        let t0 = self.spec.ts.t0();
        let e = self.e(t, t0)?;
        let phi = self.phi(t)?;
        let phi0 = self.phi_t0()?;
        Ok([[e.re, e.im / phi0], [-phi * e.im, phi * e.re / phi0]])
    }

    /// Closed-form inverse of [`PhaseTable::fundamental_matrix`].
    pub fn fundamental_matrix_inverse(&self, t: f64) -> Result<[[f64; 2]; 2]> {
        let t0 = self.spec.ts.t0();
        let e = self.e(t, t0)?;
        let phi = self.phi(t)?;
        let phi0 = self.phi_t0()?;
        let w = self.e_mu_phi2(t, t0)?;
        Ok([
            [e.re / w, -e.im / (phi * w)],
            [phi0 * e.im / w, phi0 * e.re / (phi * w)],
        ])
    }
}
