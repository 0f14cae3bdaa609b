#![allow(dead_code)]

mod checks;

#[allow(unused_imports)]
pub use checks::*;

use std::f64::consts::PI;

use proptest::prelude::*;
use tsfloquet::{Expr, PeriodicTimeScale, Segment, SystemSpec, ValidatedTimeScale};

pub fn expr(s: &str) -> Expr {
    Expr::parse(s).unwrap()
}

pub fn scale(t0: f64, period: f64, segments: Vec<Segment>) -> ValidatedTimeScale {
    PeriodicTimeScale::new(t0, period, segments).validate().unwrap()
}

pub fn points(xs: &[f64]) -> Vec<Segment> {
    xs.iter().map(|&x| Segment::Point(x)).collect()
}

/// x^ΔΔ + (-17+15(-1)^t)/16 x^Δ + (1-15(-1)^t)/16 x = 0 on ℤ.
pub fn integers_example() -> SystemSpec {
    SystemSpec::new(
        scale(0.0, 2.0, points(&[0.0, 1.0, 2.0])),
        expr("(-17+15*neg1pow(t))/16"),
        expr("(1-15*neg1pow(t))/16"),
    )
}

/// Period-6 system on 2ℤ with sinusoidal coefficients.
pub fn even_integers_example() -> SystemSpec {
    SystemSpec::new(
        scale(0.0, 6.0, points(&[0.0, 2.0, 4.0, 6.0])),
        expr("(sin(pi/3*t)+2)/10"),
        expr("(sin(pi/3*t)+2)/20"),
    )
}

/// [2kπ, (2k+1)π] with p = 1/4 only at the scattered points, q = 1.
pub fn hybrid_example() -> SystemSpec {
    SystemSpec::new(
        scale(0.0, 2.0 * PI, vec![Segment::Interval(0.0, PI), Segment::Point(2.0 * PI)]),
        expr("if(eq(mod(t, 2*pi), pi), 0.25, 0)"),
        expr("1"),
    )
}

/// x'' + sin(2t)/2 x' + x/4 = 0 on ℝ.
pub fn continuous_example() -> SystemSpec {
    SystemSpec::new(
        scale(0.0, PI, vec![Segment::Interval(0.0, PI)]),
        expr("sin(2*t)/2"),
        expr("0.25"),
    )
}

/// x'' + (λ − h cos 2t) x = 0.
pub fn mathieu(lambda: f64, h: f64) -> SystemSpec {
    SystemSpec::new(
        scale(0.0, PI, vec![Segment::Interval(0.0, PI)]),
        expr("0"),
        expr(&format!("{lambda} - {h}*cos(2*t)")),
    )
}

/// (h, λ, third-approximation 𝒜) for the tabulated Mathieu equations.
pub const MATHIEU_TABLE: [(f64, f64, f64); 12] = [
    (1.0, 3.979, 2.000049),
    (1.0, 4.101, 2.000044),
    (1.0, 9.014, -2.000001),
    (1.0, 9.018, -2.000000),
    (2.0, 3.917, 2.000798),
    (2.0, 4.371, 2.000384),
    (2.0, 9.047, -2.000009),
    (2.0, 9.078, -2.000018),
    (3.0, 3.814, 1.998646),
    (3.0, 4.747, 1.998733),
    (3.0, 9.093, -2.000103),
    (3.0, 9.193, -2.000093),
];

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

/// Purely discrete system on the points `0, μ0, μ0+μ1, …` with
/// `p = p0 + p1 sin t`, `q = q0 + q1 cos(1.3t)`.
#[derive(Debug, Clone)]
pub struct DiscreteParams {
    pub mus: Vec<f64>,
    pub p0: f64,
    pub p1: f64,
    pub q0: f64,
    pub q1: f64,
}

impl DiscreteParams {
    /// `None` when the sample is not regressive or `q` vanishes somewhere.
    pub fn build(&self) -> Option<SystemSpec> {
        let mut xs = vec![0.0];
        for mu in &self.mus {
            xs.push(xs[xs.len() - 1] + mu);
        }
        let period = xs[xs.len() - 1];
        let spec = SystemSpec::new(
            scale(0.0, period, points(&xs)),
            expr(&format!("{} + {}*sin(t)", self.p0, self.p1)),
            expr(&format!("{} + {}*cos(1.3*t)", self.q0, self.q1)),
        );
        spec.validate().ok()?;
        Some(spec)
    }
}

pub fn discrete_params(max_points: usize) -> impl Strategy<Value = DiscreteParams> {
    (
        prop::collection::vec(0.3f64..1.5, 1..=max_points),
        -0.8f64..0.8,
        -0.5f64..0.5,
        prop_oneof![0.3f64..2.0, -2.0f64..-0.3],
        -0.25f64..0.25,
    )
        .prop_map(|(mus, p0, p1, q0, q1)| DiscreteParams { mus, p0, p1, q0, q1 })
}

/// `[0, a]` followed by the scattered points `a = x0 < x1 < …` with period
/// `x_last + μ_last`. The scattered values of `q` are chosen so that `φ` is
/// continuous where the dense stretch meets `a` and at `t0+T`.
#[derive(Debug, Clone)]
pub struct HybridParams {
    pub a: f64,
    pub mus: Vec<f64>,
    /// `φ(x1), φ(x2), …`; one shorter than `mus`.
    pub phis: Vec<f64>,
    pub p0: f64,
    pub p1: f64,
    pub c0: f64,
    pub c1: f64,
    pub w: f64,
}

impl HybridParams {
    fn smooth_q(&self, t: f64) -> f64 {
        self.c0 + self.c1 * (self.w * t).sin()
    }

    pub fn build(&self) -> Option<SystemSpec> {
        let mut xs = vec![self.a];
        for mu in &self.mus {
            xs.push(xs[xs.len() - 1] + mu);
        }
        let period = xs.pop().unwrap();
        let mut phi = vec![self.smooth_q(self.a).sqrt()];
        phi.extend(&self.phis);
        phi.push(self.smooth_q(0.0).sqrt());

        let mut q = format!("{} + {}*sin({}*t)", self.c0, self.c1, self.w);
        for (i, x) in xs.iter().enumerate().rev() {
            q = format!("if(eq(t, {x}), {}, {q})", phi[i] * phi[i + 1]);
        }
        let mut segments = vec![Segment::Interval(0.0, self.a)];
        segments.extend(points(&xs[1..]));
        segments.push(Segment::Point(period));
        let spec = SystemSpec::new(
            scale(0.0, period, segments),
            expr(&format!("{} + {}*cos({}*t)", self.p0, self.p1, self.w)),
            expr(&q),
        );
        spec.validate().ok()?;
        Some(spec)
    }
}

pub fn hybrid_params() -> impl Strategy<Value = HybridParams> {
    (1usize..=3, 0.5f64..1.5)
        .prop_flat_map(|(jumps, a)| {
            (
                Just(a),
                prop::collection::vec(0.2f64..0.8, jumps),
                prop::collection::vec(prop_oneof![0.4f64..2.0, -2.0f64..-0.4], jumps - 1),
                -0.5f64..0.5,
                -0.5f64..0.5,
                0.5f64..3.0,
                -0.4f64..0.4,
                0.5f64..4.0,
            )
        })
        .prop_map(|(a, mus, phis, p0, p1, c0, c1, w)| HybridParams {
            a,
            mus,
            phis,
            p0,
            p1,
            c0,
            c1: c1 * c0,
            w,
        })
}
