//! One period `[t0, t0+T]` of a `T`-periodic time scale.
//!
//! A period is stored as an ordered list of isolated points and closed
//! intervals. Queries outside the stored period are errors; nothing here ever
//! wraps around.

use std::fmt;

use thiserror::Error;

/// Relative membership tolerance, scaled by `max(1, |t|)`.
pub const MEMBERSHIP_RTOL: f64 = 1e-12;

#[inline]
pub fn membership_tol(t: f64) -> f64 {
    MEMBERSHIP_RTOL * t.abs().max(1.0)
}

#[inline]
pub(crate) fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= membership_tol(a.abs().max(b.abs()))
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TimeScaleError {
    #[error("period must be positive and finite, got {0}")]
    NonpositivePeriod(f64),
    #[error("segments overlap or touch near t = {at}")]
    OverlappingSegments { at: f64 },
    #[error("{which} = {t} is not covered by any segment")]
    EndpointNotCovered { which: &'static str, t: f64 },
    #[error("degenerate interval [{a}, {b}]; write a point instead")]
    DegenerateInterval { a: f64, b: f64 },
    #[error("coordinate {t} lies outside the period [{t0}, {end}]")]
    OutOfPeriod { t: f64, t0: f64, end: f64 },
    #[error("non-finite coordinate in time scale")]
    NonFinite,
    #[error("{0} is not a point of the time scale period")]
    PointNotInTimeScale(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Point(f64),
    /// Closed interval `[a, b]` with `a < b`.
    Interval(f64, f64),
}

impl Segment {
    pub fn left(&self) -> f64 {
        match *self {
            Segment::Point(x) => x,
            Segment::Interval(a, _) => a,
        }
    }

    pub fn right(&self) -> f64 {
        match *self {
            Segment::Point(x) => x,
            Segment::Interval(_, b) => b,
        }
    }
}

/// Unvalidated description of one period.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicTimeScale {
    pub t0: f64,
    pub period: f64,
    pub segments: Vec<Segment>,
}

impl PeriodicTimeScale {
    pub fn new(t0: f64, period: f64, segments: Vec<Segment>) -> Self {
        Self {
            t0,
            period,
            segments,
        }
    }

    pub fn validate(self) -> Result<ValidatedTimeScale, TimeScaleError> {
        validate(self)
    }
}

/// A piece of `[t0, t0+T)` as seen by the delta integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Piece {
    /// Right-scattered point `t` with graininess `mu > 0`.
    Jump { t: f64, mu: f64 },
    /// Dense stretch `[a, b)`; the point `b` itself belongs to the next piece.
    Dense { a: f64, b: f64 },
}

/// Validated, canonicalized period. Immutable.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedTimeScale {
    t0: f64,
    period: f64,
    segments: Vec<Segment>,
}

pub fn validate(ts: PeriodicTimeScale) -> Result<ValidatedTimeScale, TimeScaleError> {
    let PeriodicTimeScale {
        t0,
        period,
        mut segments,
    } = ts;
    if !t0.is_finite() {
        return Err(TimeScaleError::NonFinite);
    }
    if !(period.is_finite() && period > 0.0) {
        return Err(TimeScaleError::NonpositivePeriod(period));
    }
    let end = t0 + period;
    for seg in &segments {
        match *seg {
            Segment::Point(x) if !x.is_finite() => return Err(TimeScaleError::NonFinite),
            Segment::Interval(a, b) if !(a.is_finite() && b.is_finite()) => {
                return Err(TimeScaleError::NonFinite)
            }
            Segment::Interval(a, b) if b - a <= membership_tol(a.abs().max(b.abs())) => {
                return Err(TimeScaleError::DegenerateInterval { a, b })
            }
            _ => {}
        }
    }

    // Snap coordinates typed in decimal onto the exact period ends.
    let snap = |x: f64| {
        if approx_eq(x, t0) {
            t0
        } else if approx_eq(x, end) {
            end
        } else {
            x
        }
    };
    for seg in segments.iter_mut() {
        *seg = match *seg {
            Segment::Point(x) => Segment::Point(snap(x)),
            Segment::Interval(a, b) => Segment::Interval(snap(a), snap(b)),
        };
    }
    for seg in &segments {
        for x in [seg.left(), seg.right()] {
            if x < t0 || x > end {
                return Err(TimeScaleError::OutOfPeriod { t: x, t0, end });
            }
        }
    }

    segments.sort_by(|a, b| a.left().total_cmp(&b.left()));
    for pair in segments.windows(2) {
        let (prev, next) = (pair[0], pair[1]);
        if next.left() - prev.right() <= membership_tol(next.left()) {
            return Err(TimeScaleError::OverlappingSegments { at: next.left() });
        }
    }

    match segments.first() {
        Some(s) if s.left() == t0 => {}
        _ => return Err(TimeScaleError::EndpointNotCovered { which: "t0", t: t0 }),
    }
    match segments.last() {
        Some(s) if s.right() == end => {}
        _ => {
            return Err(TimeScaleError::EndpointNotCovered {
                which: "t0+T",
                t: end,
            })
        }
    }

    Ok(ValidatedTimeScale {
        t0,
        period,
        segments,
    })
}

enum Location {
    Point(usize),
    /// Interval index and whether `t` is (numerically) its right endpoint.
    Interval(usize, bool),
}

impl ValidatedTimeScale {
    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// `t0 + T`.
    pub fn end(&self) -> f64 {
        self.t0 + self.period
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// No dense points at all.
    pub fn is_discrete(&self) -> bool {
        self.segments
            .iter()
            .all(|s| matches!(s, Segment::Point(_)))
    }

    /// The whole period is a single interval (the `𝕋 = ℝ` case).
    pub fn is_continuous(&self) -> bool {
        matches!(self.segments.as_slice(), [Segment::Interval(_, _)])
    }

    pub fn contains(&self, t: f64) -> bool {
        self.locate(t).is_some()
    }

    fn locate(&self, t: f64) -> Option<Location> {
        if !t.is_finite() {
            return None;
        }
        let tol = membership_tol(t);
        // First segment whose right end is not left of t.
        let idx = self.segments.partition_point(|s| s.right() < t - tol);
        let seg = self.segments.get(idx)?;
        match *seg {
            Segment::Point(x) => (t - x).abs().le(&tol).then_some(Location::Point(idx)),
            Segment::Interval(a, b) => {
                if t < a - tol {
                    None
                } else {
                    Some(Location::Interval(idx, (t - b).abs() <= tol))
                }
            }
        }
    }

    fn next_start(&self, idx: usize) -> f64 {
        self.segments[idx + 1].left()
    }

    fn mu_at_t0(&self) -> f64 {
        match self.segments[0] {
            Segment::Point(x) => self.next_start(0) - x,
            Segment::Interval(_, _) => 0.0,
        }
    }

    /// Graininess `μ(t)`.
    pub fn mu(&self, t: f64) -> Result<f64, TimeScaleError> {
        let loc = self
            .locate(t)
            .ok_or(TimeScaleError::PointNotInTimeScale(t))?;
        if approx_eq(t, self.end()) {
            return Ok(self.mu_at_t0());
        }
        Ok(match loc {
            Location::Point(i) => self.next_start(i) - self.segments[i].left(),
            Location::Interval(i, true) => self.next_start(i) - self.segments[i].right(),
            Location::Interval(_, false) => 0.0,
        })
    }

    /// Forward jump `σ(t) = t + μ(t)`. Scattered points map exactly onto the
    /// start of the next segment.
    pub fn sigma(&self, t: f64) -> Result<f64, TimeScaleError> {
        let loc = self
            .locate(t)
            .ok_or(TimeScaleError::PointNotInTimeScale(t))?;
        if approx_eq(t, self.end()) {
            return Ok(self.end() + self.mu_at_t0());
        }
        Ok(match loc {
            Location::Point(i) | Location::Interval(i, true) => self.next_start(i),
            Location::Interval(_, false) => t,
        })
    }

    pub fn is_right_scattered(&self, t: f64) -> Result<bool, TimeScaleError> {
        Ok(self.mu(t)? > 0.0)
    }

    /// Right-scattered points `t` with `a ≤ t < b`, ascending.
    pub fn scattered_points_in(&self, a: f64, b: f64) -> Result<Vec<f64>, TimeScaleError> {
        self.check_range(a, b)?;
        Ok(self
            .pieces_between(a, b)?
            .into_iter()
            .filter_map(|p| match p {
                Piece::Jump { t, .. } => Some(t),
                Piece::Dense { .. } => None,
            })
            .collect())
    }

    /// Number of right-scattered points in `[t0, t0+T)`.
    pub fn scattered_count(&self) -> usize {
        self.pieces()
            .iter()
            .filter(|p| matches!(p, Piece::Jump { .. }))
            .count()
    }

    fn check_range(&self, a: f64, b: f64) -> Result<(), TimeScaleError> {
        if !self.contains(a) {
            return Err(TimeScaleError::PointNotInTimeScale(a));
        }
        if !self.contains(b) {
            return Err(TimeScaleError::PointNotInTimeScale(b));
        }
        Ok(())
    }

    /// Decomposition of `[t0, t0+T)` into jumps and dense stretches, in order.
    pub fn pieces(&self) -> Vec<Piece> {
        let end = self.end();
        let n = self.segments.len();
        let mut out = Vec::with_capacity(2 * n);
        for (i, seg) in self.segments.iter().enumerate() {
            match *seg {
                Segment::Point(x) => {
                    if i + 1 < n {
                        out.push(Piece::Jump {
                            t: x,
                            mu: self.next_start(i) - x,
                        });
                    }
                }
                Segment::Interval(a, b) => {
                    out.push(Piece::Dense { a, b });
                    if i + 1 < n && b < end {
                        out.push(Piece::Jump {
                            t: b,
                            mu: self.next_start(i) - b,
                        });
                    }
                }
            }
        }
        out
    }

    /// Pieces of `[a, b)`; dense stretches are clipped, jumps kept when
    /// `a ≤ t < b`. Requires `a ≤ b`, both in the scale.
    pub fn pieces_between(&self, a: f64, b: f64) -> Result<Vec<Piece>, TimeScaleError> {
        self.check_range(a, b)?;
        let mut out = Vec::new();
        if b <= a {
            return Ok(out);
        }
        for piece in self.pieces() {
            match piece {
                Piece::Jump { t, mu } => {
                    if t >= a - membership_tol(t) && t < b - membership_tol(t) {
                        out.push(Piece::Jump { t, mu });
                    }
                }
                Piece::Dense { a: da, b: db } => {
                    let lo = da.max(a);
                    let hi = db.min(b);
                    if hi > lo {
                        out.push(Piece::Dense { a: lo, b: hi });
                    }
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for ValidatedTimeScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .segments
            .iter()
            .map(|s| match *s {
                Segment::Point(x) => format!("{{{x}}}"),
                Segment::Interval(a, b) => format!("[{a}, {b}]"),
            })
            .collect();
        write!(f, "{} (T = {})", parts.join(" ∪ "), self.period)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn integers() -> ValidatedTimeScale {
        PeriodicTimeScale::new(
            0.0,
            2.0,
            vec![Segment::Point(0.0), Segment::Point(1.0), Segment::Point(2.0)],
        )
        .validate()
        .unwrap()
    }

    fn hybrid() -> ValidatedTimeScale {
        PeriodicTimeScale::new(
            0.0,
            2.0 * PI,
            vec![Segment::Interval(0.0, PI), Segment::Point(2.0 * PI)],
        )
        .validate()
        .unwrap()
    }

    #[test]
    fn validates_examples() {
        assert!(integers().is_discrete());
        let h = hybrid();
        assert!(!h.is_discrete() && !h.is_continuous());
        let err = PeriodicTimeScale::new(0.0, 1.0, vec![Segment::Point(0.5)]).validate();
        assert!(matches!(
            err,
            Err(TimeScaleError::EndpointNotCovered { which: "t0", .. })
        ));
    }

    #[test]
    fn rejects_bad_input() {
        let e = PeriodicTimeScale::new(0.0, 0.0, vec![Segment::Point(0.0)]).validate();
        assert!(matches!(e, Err(TimeScaleError::NonpositivePeriod(_))));
        let e = PeriodicTimeScale::new(
            0.0,
            2.0,
            vec![
                Segment::Interval(0.0, 1.0),
                Segment::Point(1.0),
                Segment::Point(2.0),
            ],
        )
        .validate();
        assert!(matches!(e, Err(TimeScaleError::OverlappingSegments { .. })));
        let e = PeriodicTimeScale::new(
            0.0,
            2.0,
            vec![Segment::Interval(0.0, 0.0), Segment::Point(2.0)],
        )
        .validate();
        assert!(matches!(e, Err(TimeScaleError::DegenerateInterval { .. })));
        let e = PeriodicTimeScale::new(0.0, 1.0, vec![Segment::Point(0.0)]).validate();
        assert!(matches!(
            e,
            Err(TimeScaleError::EndpointNotCovered { which: "t0+T", .. })
        ));
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn canonicalizes_order_and_decimal_pi() {
        let ts = PeriodicTimeScale::new(
            0.0,
            2.0 * PI,
            vec![
                Segment::Point(6.283185307179586),
                Segment::Interval(0.0, 3.141592653589793),
            ],
        )
        .validate()
        .unwrap();
        assert_eq!(ts.segments()[0], Segment::Interval(0.0, PI));
        assert_eq!(ts.end(), 2.0 * PI);
    }

    #[test]
    fn graininess_and_jump() {
        let h = hybrid();
        assert_eq!(h.mu(PI).unwrap(), PI);
        assert_eq!(h.mu(1.0).unwrap(), 0.0);
        assert_eq!(h.sigma(PI).unwrap(), 2.0 * PI);
        assert_eq!(h.sigma(1.0).unwrap(), 1.0);
        // μ(t0+T) = μ(t0)
        assert_eq!(h.mu(2.0 * PI).unwrap(), h.mu(0.0).unwrap());

        let z = integers();
        assert_eq!(z.mu(1.0).unwrap(), 1.0);
        assert_eq!(z.sigma(0.0).unwrap(), 1.0);
        assert_eq!(z.mu(2.0).unwrap(), z.mu(0.0).unwrap());
        assert!(matches!(
            z.mu(0.5),
            Err(TimeScaleError::PointNotInTimeScale(_))
        ));
        assert!(h.mu(4.0).is_err());
    }

    #[test]
    fn scattered_points() {
        assert_eq!(integers().scattered_points_in(0.0, 2.0).unwrap(), vec![0.0, 1.0]);
        assert_eq!(hybrid().scattered_points_in(0.0, 2.0 * PI).unwrap(), vec![PI]);
        let cont = PeriodicTimeScale::new(0.0, PI, vec![Segment::Interval(0.0, PI)])
            .validate()
            .unwrap();
        assert!(cont.is_continuous());
        assert!(cont.scattered_points_in(0.0, PI).unwrap().is_empty());
        assert!(cont.scattered_points_in(0.5, 2.0).unwrap().is_empty());
        assert_eq!(integers().scattered_count(), 2);
    }

    #[test]
    fn pieces_cover_period() {
        let h = hybrid();
        assert_eq!(
            h.pieces(),
            vec![Piece::Dense { a: 0.0, b: PI }, Piece::Jump { t: PI, mu: PI }]
        );
        assert_eq!(
            h.pieces_between(1.0, PI).unwrap(),
            vec![Piece::Dense { a: 1.0, b: PI }]
        );
        let total: f64 = h
            .pieces()
            .iter()
            .map(|p| match *p {
                Piece::Jump { mu, .. } => mu,
                Piece::Dense { a, b } => b - a,
            })
            .sum();
        assert!((total - h.period()).abs() < 1e-15);
    }
}
