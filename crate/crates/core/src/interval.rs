//! Closed real intervals for certified enclosures.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    /// Panics if `lo > hi` or either end is NaN.
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "invalid interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Self::new(x, x)
    }

    /// `[center - radius, center + radius]`, rounded outward.
    pub fn around(center: f64, radius: f64) -> Self {
        let r = radius.abs();
        Self::new((center - r).next_down(), (center + r).next_up())
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// Smallest and largest `|x|` over the interval.
    pub fn abs_range(&self) -> (f64, f64) {
        let big = self.lo.abs().max(self.hi.abs());
        let small = if self.contains(0.0) {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        };
        (small, big)
    }

    /// Push both ends outward by `ulps` units in the last place.
    pub fn widen(self, ulps: u32) -> Self {
        let (mut lo, mut hi) = (self.lo, self.hi);
        for _ in 0..ulps {
            lo = lo.next_down();
            hi = hi.next_up();
        }
        Self { lo, hi }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basics() {
        let i = Interval::around(1.0, 0.5);
        assert!(i.contains(0.5) && i.contains(1.5));
        assert_eq!(Interval::new(-1.0, 2.0).abs_range(), (0.0, 2.0));
        assert_eq!(Interval::new(-3.0, -2.0).abs_range(), (2.0, 3.0));
        let w = Interval::point(1.0).widen(2);
        assert!(w.lo < 1.0 && w.hi > 1.0 && w.width() < 1e-15);
    }
}
