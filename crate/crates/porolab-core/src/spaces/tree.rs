//! The binary tree with branches of length `lambda^n` at depth `n`, with its
//! boundary at infinity represented by depth-truncated words.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::checks::{extremal_search, geometric_radii};
use crate::error::{invalid, Result};
use crate::math::{powi, Ratio, Rational};
use crate::metric::{MeasureKind, MetricSpace, StructureConstants};
use crate::point::{Point, TreePoint};
use crate::spaces::cantor::{CONSTANT_MARGIN_HIGH, CONSTANT_MARGIN_LOW};
use crate::target::TargetSet;

/// Deepest supported tree; words are packed into a `u64`.
pub const MAX_TREE_DEPTH: u32 = 40;

/// Branch bookkeeping shared by the space and its boundary set.
#[derive(Debug, Clone)]
pub struct TreeGeometry {
    pub lambda: f64,
    pub lambda_exact: Rational,
    pub depth: u8,
    /// `l_start[n]`: distance from the root to the base of a depth-`n` branch.
    l_start: Vec<f64>,
    /// `l_end[n]`: distance from the root to the tip of a depth-`n` branch.
    l_end: Vec<f64>,
    /// Distance from the root to the boundary.
    pub l_inf: f64,
}

impl TreeGeometry {
    pub fn new(lambda: Rational, depth: u32) -> Result<Self> {
        if lambda.den == 0 || lambda.num <= 0 {
            return Err(invalid("tree lambda must be positive"));
        }
        if lambda.ratio() > Ratio::new(1, 2) {
            return Err(invalid("tree lambda must be at most 1/2 (branch overlap)"));
        }
        if !(1..=MAX_TREE_DEPTH).contains(&depth) {
            return Err(invalid(format!("tree depth must lie in 1..={MAX_TREE_DEPTH}")));
        }
        let l = lambda.to_f64();
        let mut l_start = alloc::vec![0.0; depth as usize + 2];
        let mut l_end = alloc::vec![0.0; depth as usize + 2];
        for n in 1..=depth as usize + 1 {
            l_start[n] = l_end[n - 1];
            l_end[n] = l_start[n] + powi(l, n as i32);
        }
        Ok(TreeGeometry {
            lambda: l,
            lambda_exact: lambda,
            depth: depth as u8,
            l_start,
            l_end,
            l_inf: l / (1.0 - l),
        })
    }

    pub fn branch_len(&self, n: u8) -> f64 {
        powi(self.lambda, n as i32)
    }

    pub fn l_start(&self, n: u8) -> f64 {
        self.l_start[n as usize]
    }

    pub fn l_end(&self, n: u8) -> f64 {
        self.l_end[n as usize]
    }

    /// Distance from the root.
    pub fn level(&self, p: &TreePoint) -> f64 {
        if p.boundary {
            self.l_inf
        } else if p.depth == 0 {
            0.0
        } else {
            self.l_start(p.depth) + p.offset
        }
    }

    pub fn distance(&self, x: &TreePoint, y: &TreePoint) -> f64 {
        if x.boundary && y.boundary && x.word == y.word && x.depth == y.depth {
            return 0.0;
        }
        let (lx, ly) = (self.level(x), self.level(y));
        let m = x.common_prefix(y);
        let meet = if m == 0 { 0.0 } else { self.l_end(m).min(lx).min(ly) };
        (lx - meet) + (ly - meet)
    }

    /// Tip of the branch `(word, n)`, or the root for `n = 0`.
    pub fn tip(&self, word: u64, n: u8) -> TreePoint {
        if n == 0 {
            TreePoint::ROOT
        } else {
            TreePoint::on_branch(word, n, self.branch_len(n))
        }
    }

    /// Level window `[lo, hi]` of branch `(w, n)` inside the closed ball
    /// `B(x, r)`, and whether the ball reaches past the branch tip.
    fn window(&self, x: &TreePoint, lx: f64, r: f64, w: u64, n: u8) -> (f64, f64, bool) {
        let (ls, le) = (self.l_start(n), self.l_end(n));
        let b = TreePoint::on_branch(w, n, 0.0);
        let m = x.common_prefix(&b);
        if m == n {
            let own = !x.boundary && x.depth == n;
            let lo = ls.max(lx - r);
            if own {
                (lo, le.min(lx + r), lx + r > le)
            } else {
                (lo, le, true)
            }
        } else {
            let meet = if m == 0 { 0.0 } else { self.l_end(m).min(lx) };
            let reach = meet + r - (lx - meet);
            (ls, le.min(reach), reach > le)
        }
    }

    /// One-dimensional Hausdorff measure of `B(x, r)`.
    pub fn ball_length(&self, x: &TreePoint, r: f64) -> f64 {
        let lx = self.level(x);
        let mut total = 0.0;
        let mut stack: Vec<(u64, u8)> = alloc::vec![(1, 1), (0, 1)];
        while let Some((w, n)) = stack.pop() {
            let (lo, hi, descend) = self.window(x, lx, r, w, n);
            if hi > lo {
                total += hi - lo;
            }
            if descend && n < self.depth {
                stack.push((w << 1 | 1, n + 1));
                stack.push((w << 1, n + 1));
            }
        }
        total
    }

    /// Boundary points of all depth-`k` words, each extended by first letters.
    pub fn boundary_points(&self, k: u8) -> Vec<TreePoint> {
        let shift = self.depth - k;
        (0..1u64 << k).map(|w| TreePoint::boundary(w << shift, self.depth)).collect()
    }
}

struct NetBuilder<'a> {
    g: &'a TreeGeometry,
    center: TreePoint,
    lc: f64,
    radius: f64,
    eps: f64,
    kept: Vec<TreePoint>,
    kept_l: Vec<f64>,
    /// Per depth on the current DFS path: first kept index of that branch and
    /// its own kept count (`None` while its own points are being added).
    path: Vec<(usize, Option<usize>)>,
}

impl NetBuilder<'_> {
    fn consider(&mut self, p: TreePoint, l: f64, n: u8) {
        let half = self.eps / 2.0;
        let la = l - half;
        let from = if la <= 0.0 {
            0
        } else {
            let top = n.min(self.g.depth);
            if la > self.g.l_end(top) {
                // Inside the gap below a boundary point: nothing else there.
                self.kept.push(p);
                self.kept_l.push(l);
                return;
            }
            let na = (1..=top).find(|&k| la <= self.g.l_end(k)).unwrap_or(top) as usize;
            let (start, count) = self.path[na];
            let count = count.unwrap_or(self.kept.len() - start);
            start + self.kept_l[start..start + count].partition_point(|&v| v < la)
        };
        let g = self.g;
        if self.kept[from..].iter().any(|q| g.distance(&p, q) <= half) {
            return;
        }
        self.kept.push(p);
        self.kept_l.push(l);
    }

    fn visit(&mut self, w: u64, n: u8) {
        let (lo, hi, descend) = self.g.window(&self.center, self.lc, self.radius, w, n);
        let ls = self.g.l_start(n);
        let start = self.kept.len();
        self.path.push((start, None));
        if hi >= lo {
            let h = self.eps / 2.0;
            let mut i = 0u64;
            let mut last = lo;
            loop {
                let l = lo + h * i as f64;
                if l > hi {
                    break;
                }
                if l > ls {
                    self.consider(TreePoint::on_branch(w, n, l - ls), l, n);
                }
                last = l;
                i += 1;
            }
            if hi - last > h / 2.0 && hi > ls {
                self.consider(TreePoint::on_branch(w, n, hi - ls), hi, n);
            }
        }
        let own = self.kept.len() - start;
        self.path[n as usize].1 = Some(own);
        if n < self.g.depth {
            if descend {
                self.visit(w << 1, n + 1);
                self.visit(w << 1 | 1, n + 1);
            }
        } else {
            let b = TreePoint::boundary(w, n);
            if self.g.distance(&self.center, &b) <= self.radius {
                self.consider(b, self.g.l_inf, n + 1);
            }
        }
        self.path.pop();
    }
}

/// The tree carrier with one-dimensional Hausdorff measure.
#[derive(Debug, Clone)]
pub struct TreeSpace {
    pub geom: TreeGeometry,
    constants: StructureConstants,
}

impl TreeSpace {
    pub fn new(lambda: Rational, depth: u32) -> Result<Self> {
        let geom = TreeGeometry::new(lambda, depth)?;
        let kind = if lambda.ratio() == Ratio::new(1, 2) {
            MeasureKind::DoublingOnly
        } else {
            MeasureKind::Regular
        };
        let r_floor = 2.0 * geom.branch_len(geom.depth);
        let r_mu = 2.0 * geom.l_inf;
        let probe_depth = geom.depth.min(5);
        let mut pts: Vec<Point> = alloc::vec![Point::Tree(TreePoint::ROOT)];
        for n in 1..=probe_depth {
            let len = geom.branch_len(n);
            for w in [0u64, (1u64 << n) - 1, 1u64 << (n - 1)] {
                pts.push(Point::Tree(TreePoint::on_branch(w, n, len / 2.0)));
                pts.push(Point::Tree(TreePoint::on_branch(w, n, len)));
            }
        }
        pts.extend(geom.boundary_points(probe_depth.min(3)).into_iter().map(Point::Tree));
        let radii = geometric_radii(r_floor, r_mu * 0.999, 24);
        let ext = extremal_search(|p, r| geom.ball_length(p.tree().unwrap(), r), &pts, &radii, 1.0);
        let constants = StructureConstants::new(
            1.0,
            ext.a * CONSTANT_MARGIN_LOW,
            ext.b * CONSTANT_MARGIN_HIGH,
            r_mu,
            ext.c * CONSTANT_MARGIN_HIGH,
            kind,
            r_floor,
        )?;
        Ok(TreeSpace { geom, constants })
    }
}

impl MetricSpace for TreeSpace {
    fn name(&self) -> String {
        let l = self.geom.lambda_exact;
        format!("tree(lambda={}/{}, depth={})", l.num, l.den, self.geom.depth)
    }

    fn distance(&self, a: &Point, b: &Point) -> f64 {
        match (a, b) {
            (Point::Tree(x), Point::Tree(y)) => self.geom.distance(x, y),
            _ => f64::NAN,
        }
    }

    fn ball_measure(&self, x: &Point, r: f64) -> f64 {
        x.tree().map_or(0.0, |t| self.geom.ball_length(t, r))
    }

    fn carrier_net(&self, center: &Point, radius: f64, eps: f64) -> Vec<Point> {
        let Some(c) = center.tree() else { return Vec::new() };
        let mut b = NetBuilder {
            g: &self.geom,
            center: *c,
            lc: self.geom.level(c),
            radius,
            eps,
            kept: Vec::new(),
            kept_l: Vec::new(),
            path: Vec::with_capacity(self.geom.depth as usize + 2),
        };
        let root_in = b.lc <= radius;
        if root_in {
            b.kept.push(TreePoint::ROOT);
            b.kept_l.push(0.0);
        }
        b.path.push((0, Some(root_in as usize)));
        b.visit(0, 1);
        b.visit(1, 1);
        b.kept.into_iter().map(Point::Tree).collect()
    }

    fn constants(&self) -> StructureConstants {
        self.constants
    }

    fn anchor(&self) -> (Point, f64) {
        (Point::Tree(TreePoint::ROOT), self.geom.l_inf)
    }

    fn exact_arithmetic(&self) -> bool {
        self.geom.lambda_exact.den.is_power_of_two()
    }

    fn contains(&self, p: &Point) -> bool {
        let Some(t) = p.tree() else { return false };
        if t.depth > self.geom.depth || (t.depth < 64 && t.word >> t.depth != 0) {
            return false;
        }
        if t.boundary {
            return t.depth == self.geom.depth;
        }
        if t.depth == 0 {
            return t.offset == 0.0;
        }
        t.offset > 0.0 && t.offset <= self.geom.branch_len(t.depth) * (1.0 + 1e-12)
    }
}

/// The boundary at infinity of a tree.
#[derive(Debug, Clone)]
pub struct TreeBoundary {
    pub geom: TreeGeometry,
}

impl TreeBoundary {
    pub fn new(space: &TreeSpace) -> Self {
        TreeBoundary { geom: space.geom.clone() }
    }

    /// Exact length of `{y : dist(y, boundary) < r}`.
    pub fn neighborhood_length(&self, r: f64) -> f64 {
        let g = &self.geom;
        let cut = g.l_inf - r;
        (1..=g.depth)
            .map(|n| {
                let part = (g.l_end(n) - cut.max(g.l_start(n))).max(0.0);
                part * (1u64 << n) as f64
            })
            .sum()
    }
}

impl TargetSet for TreeBoundary {
    fn label(&self) -> String {
        String::from("tree boundary")
    }

    fn dist_bounds(&self, y: &Point) -> (f64, f64) {
        match y.tree() {
            Some(t) => {
                let d = (self.geom.l_inf - self.geom.level(t)).max(0.0);
                (d, d)
            }
            None => (0.0, f64::INFINITY),
        }
    }

    fn resolution(&self) -> f64 {
        0.0
    }

    fn net(&self, eps: f64) -> (Vec<Point>, f64) {
        let g = &self.geom;
        // Boundary points sharing a depth-k prefix are within 2 lambda^(k+1)/(1-lambda).
        let spread = |k: u8| 2.0 * powi(g.lambda, k as i32 + 1) / (1.0 - g.lambda);
        let mut k = 0u8;
        while k < g.depth && k < 22 && spread(k) > eps {
            k += 1;
        }
        let res = if k == g.depth { 0.0 } else { spread(k) };
        (g.boundary_points(k).into_iter().map(Point::Tree).collect(), res)
    }

    fn neighborhood_measure(&self, space: &dyn MetricSpace, r: f64) -> Option<(f64, f64)> {
        if !space.name().starts_with("tree(") {
            return None;
        }
        let v = self.neighborhood_length(r);
        Some((v, v))
    }
}
