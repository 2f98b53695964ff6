//! Sets whose porosity, covering numbers and neighbourhoods we measure.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Debug;

use crate::math::ceil;
use crate::metric::{MetricSpace, SpaceHandle};
use crate::point::Point;

/// Inner and outer interval families bracketing a neighbourhood.
pub type IntervalBracket = (Vec<(f64, f64)>, Vec<(f64, f64)>);

/// A subset `A` of some space, queried through distance brackets.
pub trait TargetSet: Send + Sync + Debug {
    fn label(&self) -> String;

    /// `(lo, hi)` with `lo <= dist(y, A) <= hi`.
    fn dist_bounds(&self, y: &Point) -> (f64, f64);

    /// Upper bound on `hi - lo` over all queries.
    fn resolution(&self) -> f64;

    /// Internal net of `A`: points of `A` such that `A` lies within the
    /// returned resolution of them. The resolution is at most `eps` when the
    /// set can be refined that far, and never smaller than `resolution()`.
    fn net(&self, eps: f64) -> (Vec<Point>, f64);

    /// Bracket for the measure of the open neighbourhood `A(r)` in `space`.
    fn neighborhood_measure(&self, space: &dyn MetricSpace, r: f64) -> Option<(f64, f64)> {
        let (inner, outer) = self.neighborhood_intervals(r)?;
        let mass = |iv: Vec<(f64, f64)>| -> Option<f64> {
            merge(iv).into_iter().map(|(a, b)| space.interval_measure(a, b)).sum()
        };
        Some((mass(inner)?, mass(outer)?))
    }

    /// For subsets of the real line: interval families `(inner, outer)` with
    /// `inner ⊂ A(r) ⊂ outer` up to endpoints.
    fn neighborhood_intervals(&self, _r: f64) -> Option<IntervalBracket> {
        None
    }
}

/// Sorts and merges overlapping or touching intervals.
pub fn merge(mut iv: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    iv.retain(|(a, b)| a <= b);
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(iv.len());
    for (a, b) in iv {
        match out.last_mut() {
            Some(last) if a <= last.1 => {
                if b > last.1 {
                    last.1 = b;
                }
            }
            _ => out.push((a, b)),
        }
    }
    out
}

pub fn total_length(iv: &[(f64, f64)]) -> f64 {
    iv.iter().map(|(a, b)| b - a).sum()
}

/// Length of the intersection of two merged, sorted interval lists.
pub fn intersect_length(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let (mut i, mut j) = (0, 0);
    let mut total = 0.0;
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if hi > lo {
            total += hi - lo;
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    total
}

/// A single point of a space.
#[derive(Debug, Clone)]
pub struct Singleton {
    pub space: SpaceHandle,
    pub point: Point,
}

impl Singleton {
    pub fn new(space: SpaceHandle, point: Point) -> Self {
        Singleton { space, point }
    }
}

impl TargetSet for Singleton {
    fn label(&self) -> String {
        format!("singleton {:?}", self.point)
    }

    fn dist_bounds(&self, y: &Point) -> (f64, f64) {
        let d = self.space.distance(&self.point, y);
        (d, d)
    }

    fn resolution(&self) -> f64 {
        0.0
    }

    fn net(&self, _eps: f64) -> (Vec<Point>, f64) {
        (alloc::vec![self.point], 0.0)
    }

    fn neighborhood_intervals(&self, r: f64) -> Option<IntervalBracket> {
        let x = self.point.line()?;
        let v = alloc::vec![(x - r, x + r)];
        Some((v.clone(), v))
    }
}

/// A finite union of closed real intervals (degenerate intervals are points).
#[derive(Debug, Clone)]
pub struct IntervalSet {
    pub intervals: Vec<(f64, f64)>,
    pub name: String,
}

impl IntervalSet {
    pub fn new(name: impl Into<String>, intervals: Vec<(f64, f64)>) -> Self {
        IntervalSet { intervals: merge(intervals), name: name.into() }
    }

    pub fn points(name: impl Into<String>, pts: &[f64]) -> Self {
        Self::new(name, pts.iter().map(|&p| (p, p)).collect())
    }

    fn dist(&self, x: f64) -> f64 {
        let iv = &self.intervals;
        let idx = iv.partition_point(|(a, _)| *a <= x);
        let mut best = f64::INFINITY;
        if idx > 0 {
            let (a, b) = iv[idx - 1];
            best = if x <= b { 0.0f64.max(a - x) } else { x - b };
        }
        if idx < iv.len() {
            best = best.min(iv[idx].0 - x);
        }
        best
    }
}

impl TargetSet for IntervalSet {
    fn label(&self) -> String {
        self.name.clone()
    }

    fn dist_bounds(&self, y: &Point) -> (f64, f64) {
        match y.line() {
            Some(x) => {
                let d = self.dist(x);
                (d, d)
            }
            None => (0.0, f64::INFINITY),
        }
    }

    fn resolution(&self) -> f64 {
        0.0
    }

    fn net(&self, eps: f64) -> (Vec<Point>, f64) {
        let mut pts = Vec::new();
        for &(a, b) in &self.intervals {
            let n = if b > a { ceil((b - a) / eps) as usize } else { 0 };
            if n == 0 {
                pts.push(Point::Line(a));
                continue;
            }
            let step = (b - a) / n as f64;
            for i in 0..=n {
                pts.push(Point::Line(if i == n { b } else { a + step * i as f64 }));
            }
        }
        let res = if self.intervals.iter().any(|(a, b)| b > a) { eps / 2.0 } else { 0.0 };
        (pts, res)
    }

    fn neighborhood_intervals(&self, r: f64) -> Option<IntervalBracket> {
        let v: Vec<_> = self.intervals.iter().map(|&(a, b)| (a - r, b + r)).collect();
        Some((v.clone(), v))
    }
}
