//! Linear Cantor sets with `N` equal pieces of ratio `lambda`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::checks::extremal_search;
use crate::error::{invalid, Result};
use crate::math::{ln, powi, Rational};
use crate::metric::{MeasureKind, MetricSpace, StructureConstants};
use crate::point::Point;
use crate::spaces::interval::grid;
use crate::target::TargetSet;

/// Where the `N` first-level intervals sit inside `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Placement {
    /// Outer intervals touch 0 and 1, gaps `(1 - N lambda)/(N - 1)`.
    #[default]
    Flush,
    /// Interval `i` is centred in the cell `[i/N, (i+1)/N]`.
    Centered,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CantorSpec {
    pub n: u32,
    pub lambda: Rational,
    pub depth: u32,
    #[cfg_attr(feature = "serde", serde(default))]
    pub placement: Placement,
}

impl CantorSpec {
    pub fn new(n: u32, lambda: Rational, depth: u32) -> Self {
        CantorSpec { n, lambda, depth, placement: Placement::Flush }
    }

    pub fn centered(mut self) -> Self {
        self.placement = Placement::Centered;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(invalid("Cantor set needs N >= 2"));
        }
        if self.lambda.den == 0 || self.lambda.num <= 0 {
            return Err(invalid("lambda must be positive"));
        }
        let nl = self.lambda.ratio() * num_rational::Ratio::from_integer(self.n as i128);
        if nl > num_rational::Ratio::from_integer(1) {
            return Err(invalid(format!("N*lambda = {} exceeds 1", nl)));
        }
        if self.depth < 1 {
            return Err(invalid("depth must be at least 1"));
        }
        Ok(())
    }

    /// Similarity dimension `log N / log(1/lambda)`.
    pub fn dimension(&self) -> f64 {
        ln(self.n as f64) / ln(1.0 / self.lambda.to_f64())
    }
}

/// Shared interval arithmetic for a Cantor construction.
#[derive(Debug, Clone)]
pub struct CantorGeometry {
    pub spec: CantorSpec,
    pub n: usize,
    pub lambda: f64,
    /// Left ends of the first-level intervals in `[0, 1]`.
    pub offsets: Vec<f64>,
    /// Leftmost point of the limit set; the rightmost is `1 - p0`.
    pub p0: f64,
    lens: Vec<f64>,
}

impl CantorGeometry {
    pub fn new(spec: CantorSpec) -> Result<Self> {
        spec.validate()?;
        let n = spec.n as usize;
        let lambda = spec.lambda.to_f64();
        let offsets: Vec<f64> = match spec.placement {
            Placement::Flush => {
                let gap = (1.0 - n as f64 * lambda) / (n - 1) as f64;
                (0..n).map(|i| i as f64 * (lambda + gap)).collect()
            }
            Placement::Centered => {
                let pad = (1.0 / n as f64 - lambda) / 2.0;
                (0..n).map(|i| i as f64 / n as f64 + pad).collect()
            }
        };
        let p0 = offsets[0] / (1.0 - lambda);
        let lens = (0..=64).map(|k| powi(lambda, k)).collect();
        Ok(CantorGeometry { spec, n, lambda, offsets, p0, lens })
    }

    pub fn len(&self, level: u32) -> f64 {
        match self.lens.get(level as usize) {
            Some(&l) => l,
            None => powi(self.lambda, level as i32),
        }
    }

    /// Gap between neighbouring first-level intervals.
    pub fn unit_gap(&self) -> f64 {
        self.offsets[1] - self.offsets[0] - self.lambda
    }

    /// Left ends of all intervals at `level`, in increasing order.
    pub fn starts(&self, level: u32) -> Vec<f64> {
        let mut cur = alloc::vec![0.0f64];
        for k in 0..level {
            let len = self.len(k);
            let mut next = Vec::with_capacity(cur.len() * self.n);
            for &s in &cur {
                for &o in &self.offsets {
                    next.push(s + len * o);
                }
            }
            cur = next;
        }
        cur
    }

    /// Extremes of the limit set inside the interval starting at `s` on `level`.
    pub fn hull(&self, s: f64, level: u32) -> (f64, f64) {
        let len = self.len(level);
        (s + len * self.p0, s + len * (1.0 - self.p0))
    }

    /// Bracket on the distance from `y` to the limit set, resolving the
    /// construction down to `max_level`.
    pub fn dist_bounds(&self, y: f64, max_level: u32) -> (f64, f64) {
        self.dist_in(y, 0.0, 0, max_level)
    }

    fn dist_in(&self, y: f64, s: f64, k: u32, max_level: u32) -> (f64, f64) {
        let (a_lo, a_hi) = self.hull(s, k);
        if y <= a_lo {
            return (a_lo - y, a_lo - y);
        }
        if y >= a_hi {
            return (y - a_hi, y - a_hi);
        }
        if k >= max_level {
            return (0.0, (y - a_lo).min(a_hi - y));
        }
        let len = self.len(k);
        let clen = len * self.lambda;
        let j = self.offsets.partition_point(|o| s + len * o <= y);
        let mut best = (f64::INFINITY, f64::INFINITY);
        let mut take = |b: (f64, f64)| {
            best.0 = best.0.min(b.0);
            best.1 = best.1.min(b.1);
        };
        if j >= 2 {
            let c = s + len * self.offsets[j - 2];
            let d = y - self.hull(c, k + 1).1;
            take((d, d));
        }
        if j >= 1 {
            let c = s + len * self.offsets[j - 1];
            if y <= c + clen {
                take(self.dist_in(y, c, k + 1, max_level));
            } else {
                let d = y - self.hull(c, k + 1).1;
                take((d, d));
            }
        }
        if j < self.n {
            let c = s + len * self.offsets[j];
            let d = self.hull(c, k + 1).0 - y;
            take((d, d));
        }
        best
    }

    /// Natural self-similar measure of the closed interval `[a, b]`.
    pub fn natural_measure(&self, a: f64, b: f64) -> f64 {
        self.measure_in(a, b, 0.0, 0, 1.0)
    }

    fn measure_in(&self, a: f64, b: f64, s: f64, k: u32, mass: f64) -> f64 {
        let (h_lo, h_hi) = self.hull(s, k);
        if h_lo >= a && h_hi <= b {
            return mass;
        }
        if h_hi < a || h_lo > b {
            return 0.0;
        }
        if k >= 60 || h_hi - h_lo < 1e-300 {
            let lo = a.max(h_lo);
            let hi = b.min(h_hi);
            return mass * ((hi - lo) / (h_hi - h_lo)).clamp(0.0, 1.0);
        }
        let len = self.len(k);
        let child_mass = mass / self.n as f64;
        self.offsets
            .iter()
            .map(|o| self.measure_in(a, b, s + len * o, k + 1, child_mass))
            .sum()
    }

    /// Left ends of the level-`level` intervals meeting `[a, b]`, pruning
    /// below `stop_len` (intervals that short are reported at their level).
    #[allow(clippy::too_many_arguments)]
    fn visit_intervals(&self, a: f64, b: f64, s: f64, k: u32, level: u32, stop_len: f64, out: &mut Vec<(f64, u32)>) {
        let len = self.len(k);
        if s + len < a || s > b {
            return;
        }
        if k == level || len < stop_len {
            out.push((s, k));
            return;
        }
        for &o in &self.offsets {
            self.visit_intervals(a, b, s + len * o, k + 1, level, stop_len, out);
        }
    }

    /// `inf { z in carrier(level) : z > p }`
    fn next_above(&self, p: f64, s: f64, k: u32, level: u32) -> Option<f64> {
        let len = self.len(k);
        if p >= s + len {
            return None;
        }
        if k == level {
            return Some(if p < s { s } else { p });
        }
        self.offsets
            .iter()
            .find_map(|o| self.next_above(p, s + len * o, k + 1, level))
    }

    /// `sup { z in carrier(level) : z < p }`
    fn prev_below(&self, p: f64, s: f64, k: u32, level: u32) -> Option<f64> {
        let len = self.len(k);
        if p <= s {
            return None;
        }
        if k == level {
            return Some(if p > s + len { s + len } else { p });
        }
        self.offsets
            .iter()
            .rev()
            .find_map(|o| self.prev_below(p, s + len * o, k + 1, level))
    }
}

/// The limit Cantor set as a subset of the real line.
#[derive(Debug, Clone)]
pub struct CantorSet {
    pub geom: CantorGeometry,
}

impl CantorSet {
    pub fn new(spec: CantorSpec) -> Result<Self> {
        Ok(CantorSet { geom: CantorGeometry::new(spec)? })
    }

    pub fn depth(&self) -> u32 {
        self.geom.spec.depth
    }

    /// Finest level whose interval count stays below `2^22`.
    fn max_enumerable_level(&self) -> u32 {
        let mut k = 0;
        let mut count = 1usize;
        while count * self.geom.n <= 1 << 22 {
            count *= self.geom.n;
            k += 1;
        }
        k
    }
}

impl TargetSet for CantorSet {
    fn label(&self) -> String {
        let s = &self.geom.spec;
        format!("cantor(N={}, lambda={}/{}, {:?})", s.n, s.lambda.num, s.lambda.den, s.placement)
    }

    fn dist_bounds(&self, y: &Point) -> (f64, f64) {
        match y.line() {
            Some(x) => self.geom.dist_bounds(x, self.depth()),
            None => (0.0, f64::INFINITY),
        }
    }

    fn resolution(&self) -> f64 {
        self.geom.len(self.depth())
    }

    fn net(&self, eps: f64) -> (Vec<Point>, f64) {
        let mut d = 0;
        while d < self.depth() && self.geom.len(d) > eps {
            d += 1;
        }
        let d = d.min(self.max_enumerable_level());
        let pts = self
            .geom
            .starts(d)
            .into_iter()
            .map(|s| Point::Line(self.geom.hull(s, d).0))
            .collect();
        (pts, self.geom.len(d))
    }

    fn neighborhood_intervals(&self, r: f64) -> Option<crate::target::IntervalBracket> {
        let g = &self.geom;
        let eff_gap = |j: u32| g.len(j - 1) * (g.unit_gap() + 2.0 * g.lambda * g.p0);
        let kmax = self.max_enumerable_level().min(18);
        let mut k = 0;
        while k < kmax && eff_gap(k + 1) > 2.0 * r {
            k += 1;
        }
        let exact = eff_gap(k + 1) <= 2.0 * r;
        let starts = g.starts(k);
        let outer: Vec<(f64, f64)> = starts
            .iter()
            .map(|&s| {
                let (lo, hi) = g.hull(s, k);
                (lo - r, hi + r)
            })
            .collect();
        if exact {
            return Some((outer.clone(), outer));
        }
        let mut inner = Vec::with_capacity(2 * starts.len());
        for &s in &starts {
            let (lo, hi) = g.hull(s, k);
            inner.push((lo - r, lo + r));
            inner.push((hi - r, hi + r));
        }
        Some((inner, outer))
    }
}

/// The depth-`depth` carrier of a Cantor construction with its natural measure.
#[derive(Debug, Clone)]
pub struct CantorSpace {
    pub geom: CantorGeometry,
    constants: StructureConstants,
}

impl CantorSpace {
    pub fn new(spec: CantorSpec) -> Result<Self> {
        let geom = CantorGeometry::new(spec)?;
        let t = spec.dimension();
        let floor = geom.len(spec.depth);
        let mut space = CantorSpace {
            geom,
            constants: StructureConstants::new(t, 1.0, 1.0, 1.0, 1.0, MeasureKind::Regular, 0.0)?,
        };
        // Extremal balls over the limit-set points of a coarse level and
        // radii spanning every construction level above the carrier depth.
        let mut lvl = 0;
        while lvl < spec.depth.min(6) && space.geom.n.pow(lvl + 1) <= 256 {
            lvl += 1;
        }
        let pts: Vec<Point> = space
            .geom
            .starts(lvl)
            .into_iter()
            .flat_map(|s| {
                let (lo, hi) = space.geom.hull(s, lvl);
                [Point::Line(lo), Point::Line(hi), Point::Line(space.geom.hull(s + space.geom.len(lvl) * space.geom.offsets[1], lvl + 1).0)]
            })
            .collect();
        let mut radii = Vec::new();
        for k in 0..=spec.depth.min(8) {
            for f in [1.0, 1.25, 1.5, 2.0, 3.0, 5.0] {
                let r = space.geom.len(k) * f / 2.0;
                if r >= floor && r < 1.0 {
                    radii.push(r);
                }
            }
        }
        let ext = extremal_search(|p, r| space.ball_measure(p, r), &pts, &radii, t);
        space.constants = StructureConstants::new(
            t,
            ext.a * CONSTANT_MARGIN_LOW,
            ext.b * CONSTANT_MARGIN_HIGH,
            1.0,
            ext.c * CONSTANT_MARGIN_HIGH,
            MeasureKind::Regular,
            floor,
        )?;
        Ok(space)
    }
}

/// Widening applied to constants found by extremal search.
pub const CONSTANT_MARGIN_LOW: f64 = 0.9;
pub const CONSTANT_MARGIN_HIGH: f64 = 1.1;

impl MetricSpace for CantorSpace {
    fn name(&self) -> String {
        let s = &self.geom.spec;
        format!("cantor-space(N={}, lambda={}/{}, depth={}, {:?})", s.n, s.lambda.num, s.lambda.den, s.depth, s.placement)
    }

    fn distance(&self, a: &Point, b: &Point) -> f64 {
        match (a, b) {
            (Point::Line(x), Point::Line(y)) => (x - y).abs(),
            _ => f64::NAN,
        }
    }

    fn ball_measure(&self, x: &Point, r: f64) -> f64 {
        match x.line() {
            Some(x) => self.geom.natural_measure(x - r, x + r),
            None => 0.0,
        }
    }

    fn carrier_net(&self, center: &Point, radius: f64, eps: f64) -> Vec<Point> {
        let Some(c) = center.line() else { return Vec::new() };
        let (a, b) = (c - radius, c + radius);
        let mut ivs = Vec::new();
        self.geom.visit_intervals(a, b, 0.0, 0, self.geom.spec.depth, eps / 4.0, &mut ivs);
        let mut cand = Vec::new();
        for (s, k) in ivs {
            let len = self.geom.len(k);
            if k < self.geom.spec.depth {
                // whole interval shorter than eps/4: one carrier point of it
                let depth = self.geom.spec.depth;
                if let Some(p) = self.geom.next_above(s.max(a), 0.0, 0, depth) {
                    if p <= b.min(s + len) {
                        cand.push(Point::Line(p));
                    }
                }
            } else {
                grid(s.max(a), (s + len).min(b), eps / 2.0, &mut cand);
            }
        }
        let mut out: Vec<Point> = Vec::new();
        let mut last = f64::NEG_INFINITY;
        for p in cand {
            let x = p.line().unwrap();
            if out.is_empty() || x - last > eps / 2.0 {
                out.push(p);
                last = x;
            }
        }
        out
    }

    fn constants(&self) -> StructureConstants {
        self.constants
    }

    fn anchor(&self) -> (Point, f64) {
        (Point::Line(self.geom.p0), 1.0)
    }

    fn escape_distance(&self, x: &Point, r: f64, y: &Point) -> Option<f64> {
        let (x, y) = (x.line()?, y.line()?);
        let d = self.geom.spec.depth;
        let mut best = f64::INFINITY;
        if let Some(z) = self.geom.next_above(x + r, 0.0, 0, d) {
            best = best.min((z - y).max(0.0));
        }
        if let Some(z) = self.geom.prev_below(x - r, 0.0, 0, d) {
            best = best.min((y - z).max(0.0));
        }
        Some(best)
    }

    fn interval_measure(&self, a: f64, b: f64) -> Option<f64> {
        Some(self.geom.natural_measure(a, b))
    }

    fn contains(&self, p: &Point) -> bool {
        let Some(x) = p.line() else { return false };
        let mut ivs = Vec::new();
        self.geom.visit_intervals(x, x, 0.0, 0, self.geom.spec.depth, 0.0, &mut ivs);
        !ivs.is_empty()
    }
}
