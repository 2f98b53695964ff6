use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::metric::{MetricSpace, StructureConstants};
use crate::point::Point;

/// A closed interval `[lo, hi]` with Lebesgue measure.
#[derive(Debug, Clone)]
pub struct IntervalSpace {
    pub lo: f64,
    pub hi: f64,
}

impl IntervalSpace {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(invalid("interval needs lo < hi"));
        }
        Ok(IntervalSpace { lo, hi })
    }

    pub fn unit() -> Self {
        IntervalSpace { lo: 0.0, hi: 1.0 }
    }
}

/// Grid on `[u, v]` with spacing `eps`, starting at `u`; the right end is
/// added when the last grid point is more than `eps / 2` short of it.
pub(crate) fn grid(u: f64, v: f64, eps: f64, out: &mut Vec<Point>) {
    if u > v {
        return;
    }
    let mut i = 0u64;
    let mut last = u;
    loop {
        let x = u + eps * i as f64;
        if x > v {
            break;
        }
        out.push(Point::Line(x));
        last = x;
        i += 1;
    }
    if v - last > eps / 2.0 {
        out.push(Point::Line(v));
    }
}

/// Distance from `y` to `{z in carrier : |z - x| > r}` for a single interval.
pub(crate) fn interval_escape(lo: f64, hi: f64, x: f64, r: f64, y: f64) -> f64 {
    let mut best = f64::INFINITY;
    if x - r > lo {
        best = best.min((y - (x - r)).max(0.0));
    }
    if x + r < hi {
        best = best.min(((x + r) - y).max(0.0));
    }
    best
}

impl MetricSpace for IntervalSpace {
    fn name(&self) -> String {
        format!("interval[{},{}]", self.lo, self.hi)
    }

    fn distance(&self, a: &Point, b: &Point) -> f64 {
        match (a, b) {
            (Point::Line(x), Point::Line(y)) => (x - y).abs(),
            _ => f64::NAN,
        }
    }

    fn ball_measure(&self, x: &Point, r: f64) -> f64 {
        let Some(x) = x.line() else { return 0.0 };
        let u = (x - r).max(self.lo);
        let v = (x + r).min(self.hi);
        (v - u).max(0.0)
    }

    fn carrier_net(&self, center: &Point, radius: f64, eps: f64) -> Vec<Point> {
        let mut out = Vec::new();
        if let Some(c) = center.line() {
            grid((c - radius).max(self.lo), (c + radius).min(self.hi), eps, &mut out);
        }
        out
    }

    fn constants(&self) -> StructureConstants {
        StructureConstants::regular(1.0, 1.0, 2.0, self.hi - self.lo, 2.0)
            .expect("interval constants are valid")
    }

    fn anchor(&self) -> (Point, f64) {
        (Point::Line((self.lo + self.hi) / 2.0), (self.hi - self.lo) / 2.0)
    }

    fn escape_distance(&self, x: &Point, r: f64, y: &Point) -> Option<f64> {
        Some(interval_escape(self.lo, self.hi, x.line()?, r, y.line()?))
    }

    fn exact_arithmetic(&self) -> bool {
        true
    }

    fn interval_measure(&self, a: f64, b: f64) -> Option<f64> {
        Some((b.min(self.hi) - a.max(self.lo)).max(0.0))
    }

    fn contains(&self, p: &Point) -> bool {
        matches!(p, Point::Line(x) if *x >= self.lo && *x <= self.hi)
    }
}
