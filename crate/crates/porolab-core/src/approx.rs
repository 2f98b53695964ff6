//! Finite internal nets and the greedy packing/covering primitives.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::metric::{MetricSpace, SpaceHandle};
use crate::point::Point;
use crate::target::{IntervalBracket, TargetSet};

/// Finite internal approximation of a set: every point lies in the set and
/// the set lies within `resolution` of the points.
#[derive(Debug, Clone)]
pub struct FiniteApprox {
    pub points: Vec<Point>,
    pub weights: Option<Vec<f64>>,
    pub resolution: f64,
    pub parent: SpaceHandle,
    pub target: String,
    sorted_line: Option<Vec<f64>>,
}

impl FiniteApprox {
    pub fn new(parent: SpaceHandle, target: impl Into<String>, points: Vec<Point>, resolution: f64) -> Self {
        let sorted_line = line_coordinates(&points).map(|mut xs| {
            xs.sort_by(|a, b| a.total_cmp(b));
            xs
        });
        FiniteApprox {
            points,
            weights: None,
            resolution,
            parent,
            target: target.into(),
            sorted_line,
        }
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Self {
        assert_eq!(weights.len(), self.points.len());
        self.weights = Some(weights);
        self
    }

    /// Net of a target set taken at resolution `eps`.
    pub fn of_target(parent: SpaceHandle, set: &dyn TargetSet, eps: f64) -> Self {
        let (pts, res) = set.net(eps);
        FiniteApprox::new(parent, set.label(), pts, res)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> Option<f64> {
        self.weights.as_ref().map(|w| w.iter().sum())
    }

    /// Distance from `y` to the nearest stored point.
    pub fn nearest_distance(&self, y: &Point) -> f64 {
        if let (Some(xs), Some(x)) = (&self.sorted_line, y.line()) {
            if !xs.is_empty() {
                let i = xs.partition_point(|p| *p < x);
                let mut best = f64::INFINITY;
                if i < xs.len() {
                    best = xs[i] - x;
                }
                if i > 0 {
                    best = best.min(x - xs[i - 1]);
                }
                return best;
            }
        }
        self.points
            .iter()
            .map(|p| self.parent.distance(p, y))
            .fold(f64::INFINITY, f64::min)
    }

    /// Number of stored points within closed distance `r` of `y`.
    pub fn count_within(&self, y: &Point, r: f64) -> usize {
        if let (Some(xs), Some(x)) = (&self.sorted_line, y.line()) {
            let lo = xs.partition_point(|p| *p < x - r);
            let hi = xs.partition_point(|p| *p <= x + r);
            return hi - lo;
        }
        self.points.iter().filter(|p| self.parent.distance(p, y) <= r).count()
    }
}

fn line_coordinates(points: &[Point]) -> Option<Vec<f64>> {
    points.iter().map(|p| p.line()).collect()
}

impl TargetSet for FiniteApprox {
    fn label(&self) -> String {
        self.target.clone()
    }

    fn dist_bounds(&self, y: &Point) -> (f64, f64) {
        let d = self.nearest_distance(y);
        ((d - self.resolution).max(0.0), d)
    }

    fn resolution(&self) -> f64 {
        self.resolution
    }

    fn net(&self, _eps: f64) -> (Vec<Point>, f64) {
        (self.points.clone(), self.resolution)
    }

    fn neighborhood_intervals(&self, r: f64) -> Option<IntervalBracket> {
        let xs = self.sorted_line.as_ref()?;
        let inner = xs.iter().map(|&x| (x - r, x + r)).collect();
        let s = r + self.resolution;
        let outer = xs.iter().map(|&x| (x - s, x + s)).collect();
        Some((inner, outer))
    }
}

/// Internal net of `B(center, radius)` at resolution `eps`.
pub fn build_net(space: &SpaceHandle, center: &Point, radius: f64, eps: f64) -> Result<FiniteApprox> {
    if !(eps > 0.0) {
        return Err(invalid("eps must be positive"));
    }
    if !(radius > 0.0) {
        return Err(invalid("radius must be positive"));
    }
    let pts = space.carrier_net(center, radius, eps);
    Ok(FiniteApprox::new(space.clone(), "carrier ball", pts, eps))
}

/// First-fit packing in index order: returns indices of centers pairwise more
/// than `2r` apart such that every point is within `2r` of some center.
pub fn greedy_packing_indices(space: &dyn MetricSpace, points: &[Point], r: f64) -> Vec<usize> {
    let sep = 2.0 * r;
    if let Some(xs) = line_coordinates(points) {
        if xs.windows(2).all(|w| w[0] <= w[1]) {
            let mut out: Vec<usize> = Vec::new();
            let mut last = f64::NEG_INFINITY;
            for (i, &x) in xs.iter().enumerate() {
                if out.is_empty() || x - last > sep {
                    out.push(i);
                    last = x;
                }
            }
            return out;
        }
    }
    let mut out: Vec<usize> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        if out.iter().all(|&j| space.distance(&points[j], p) > sep) {
            out.push(i);
        }
    }
    out
}

pub fn greedy_packing(pts: &FiniteApprox, r: f64) -> Vec<Point> {
    greedy_packing_indices(pts.parent.as_ref(), &pts.points, r)
        .into_iter()
        .map(|i| pts.points[i])
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverBracket {
    pub lower: usize,
    pub upper: usize,
    /// Set when `r` does not exceed the net resolution; `upper` is then unknown.
    pub vacuous: bool,
}

impl CoverBracket {
    pub fn contains(&self, n: usize) -> bool {
        self.lower <= n && (self.vacuous || n <= self.upper)
    }
}

/// Bracket on the minimal number of closed `r`-balls covering the set
/// represented by `pts`.
pub fn covering_bracket(pts: &FiniteApprox, r: f64) -> CoverBracket {
    let space = pts.parent.as_ref();
    let lower = greedy_packing_indices(space, &pts.points, r).len();
    if r <= pts.resolution {
        return CoverBracket { lower, upper: usize::MAX, vacuous: true };
    }
    let upper = greedy_packing_indices(space, &pts.points, (r - pts.resolution) / 2.0).len();
    CoverBracket { lower, upper, vacuous: false }
}

/// Minimal cover of a small point list by balls centred at list points,
/// by exhaustive search. Intended for test oracles on at most 20 points.
pub fn brute_force_internal_cover(space: &dyn MetricSpace, points: &[Point], r: f64) -> usize {
    let n = points.len();
    assert!(n <= 20, "brute force limited to 20 points");
    if n == 0 {
        return 0;
    }
    let masks: Vec<u32> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| space.distance(&points[i], &points[j]) <= r)
                .fold(0u32, |m, j| m | (1 << j))
        })
        .collect();
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    for k in 1..=n {
        if subset_cover(&masks, full, k, 0, 0) {
            return k;
        }
    }
    n
}

fn subset_cover(masks: &[u32], full: u32, k: usize, start: usize, acc: u32) -> bool {
    if acc == full {
        return true;
    }
    if k == 0 {
        return false;
    }
    for i in start..masks.len() {
        if subset_cover(masks, full, k - 1, i + 1, acc | masks[i]) {
            return true;
        }
    }
    false
}
