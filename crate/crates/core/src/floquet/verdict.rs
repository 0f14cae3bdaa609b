use std::fmt;

use crate::interval::Interval;

/// `|ℬ − 1|` up to this counts as `ℬ = 1`.
pub const B_UNIT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Stable,
    ExponentiallyStable,
    Unstable,
    Undetermined,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::ExponentiallyStable => "exponentially stable",
            Verdict::Unstable => "unstable",
            Verdict::Undetermined => "undetermined",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Larger root modulus of `ρ² − aρ + b` for a real `a`; non-decreasing in `|a|`.
fn larger_modulus(a_abs: f64, b: f64) -> f64 {
    let disc = a_abs * a_abs / 4.0 - b;
    if disc <= 0.0 {
        b.sqrt()
    } else {
        a_abs / 2.0 + disc.sqrt()
    }
}

/// Enclosures of the smaller and the larger multiplier modulus for every
/// `𝒜` in `a`.
pub fn multipliers(a: Interval, b: f64) -> [Interval; 2] {
    let (lo_abs, hi_abs) = a.abs_range();
    let big_lo = larger_modulus(lo_abs, b);
    let big_hi = larger_modulus(hi_abs, b);
    let small = |big: f64| if big == 0.0 { 0.0 } else { b.abs() / big };
    [
        Interval::new(small(big_hi), small(big_lo)).widen(4),
        Interval::new(big_lo, big_hi).widen(4),
    ]
}

/// Certified verdict for every `𝒜` in `a`, with a one-line justification.
pub fn verdict(a: Interval, b: f64) -> (Verdict, String) {
    let [small, big] = multipliers(a, b);
    if big.lo > 1.0 {
        return (
            Verdict::Unstable,
            format!("a multiplier modulus is at least {:.6} > 1", big.lo),
        );
    }
    if big.hi < 1.0 && small.hi < 1.0 {
        return (
            Verdict::ExponentiallyStable,
            format!("both multiplier moduli are at most {:.6} < 1", big.hi),
        );
    }
    if (b - 1.0).abs() <= B_UNIT_TOL && a.lo > -2.0 && a.hi < 2.0 {
        return (
            Verdict::Stable,
            format!(
                "B = 1 and A lies in [{:.6}, {:.6}] inside (-2, 2): distinct multipliers on the unit circle",
                a.lo, a.hi
            ),
        );
    }
    (
        Verdict::Undetermined,
        "increase n or handle the critical unit-modulus case manually".to_string(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplier_examples() {
        let [s, b] = multipliers(Interval::point(4.25), 1.0);
        assert!(s.contains(0.25) && b.contains(4.0));
        assert!(s.width() < 1e-14 && b.width() < 1e-14);

        let [s, b] = multipliers(Interval::new(-1.2147, -1.2145), 10.084206);
        assert!((s.mid() - 10.084206f64.sqrt()).abs() < 1e-12);
        assert!((b.mid() - 3.175564).abs() < 1e-6);

        let [s, b] = multipliers(Interval::point(0.0), 1.0);
        assert!(s.contains(1.0) && b.contains(1.0));
    }

    #[test]
    fn verdicts() {
        assert_eq!(verdict(Interval::point(4.25), 1.0).0, Verdict::Unstable);
        assert_eq!(verdict(Interval::point(-0.752), 1.0).0, Verdict::Stable);
        assert_eq!(
            verdict(Interval::around(-0.06545, 0.36), 1.0).0,
            Verdict::Stable
        );
        assert_eq!(
            verdict(Interval::point(0.1), 0.25).0,
            Verdict::ExponentiallyStable
        );
        assert_eq!(
            verdict(Interval::around(2.0, 0.01), 1.0).0,
            Verdict::Undetermined
        );
    }
}
