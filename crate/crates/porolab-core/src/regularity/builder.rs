//! Nested-ball construction of a `t`-regular measure inside an `s`-regular space.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{invalid, PoroError, Result};
use crate::math::{floor, powf, Ratio};
use crate::metric::MetricSpace;
use crate::point::Point;

/// Relative slack for the inequality tests that choose `d`.
const PARAM_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BuilderParams {
    pub s: f64,
    pub t: f64,
    pub c1: f64,
    /// Seed ratio, a power of 1/2.
    pub d: f64,
    /// `d = 2^-d_exp`
    pub d_exp: u32,
    /// Children per node.
    pub m: u64,
    /// Scale ratio with `d1^t = 1/m`.
    pub d1: f64,
}

impl BuilderParams {
    /// `d1` as an exact rational when `1/t` is an integer.
    pub fn d1_exact(&self) -> Option<Ratio<u128>> {
        let q = 1.0 / self.t;
        let qi = floor(q + 0.5);
        if (q - qi).abs() > 1e-12 || qi < 1.0 {
            return None;
        }
        let den = (self.m as u128).checked_pow(qi as u32)?;
        Some(Ratio::new(1, den))
    }

    /// Radius of the disjoint balls packed around a level-`k` parent.
    pub fn packing_radius(&self, k: u32, r: f64) -> f64 {
        powf(2.0, 1.0 + 1.0 / self.t) * self.d * powf(self.d1, (k - 1) as f64) * r
    }
}

/// Largest power of 1/2 meeting the three smallness conditions on `d`, and
/// the resulting branching number and scale ratio.
pub fn builder_params(s: f64, t: f64, a_mu: f64, b_mu: f64) -> Result<BuilderParams> {
    if !(t > 0.0 && t < s) {
        return Err(invalid("need 0 < t < s"));
    }
    if !(a_mu > 0.0 && a_mu <= b_mu) {
        return Err(invalid("need 0 < a_mu <= b_mu"));
    }
    let c1 = a_mu * a_mu / (powf(2.0, 2.0 * s + s / t) * b_mu * b_mu);
    let ok = |d: f64| {
        d < 0.1 * powf(2.0, -1.0 / t)
            && powf(d, s - t) <= c1 / 2.0 * (1.0 + PARAM_SLACK)
            && powf(d, t) <= 0.5 * (1.0 + PARAM_SLACK)
    };
    let mut d_exp = 1u32;
    while !ok(powf(0.5, d_exp as f64)) {
        d_exp += 1;
        if d_exp > 1000 {
            return Err(invalid("no admissible seed ratio above 2^-1000"));
        }
    }
    let d = powf(0.5, d_exp as f64);
    let m = floor(powf(d, -t) + 0.5);
    if !(m >= 1.0 && m < 1.8e19) {
        return Err(invalid(format!("branching number {m} is out of range")));
    }
    let m = m as u64;
    let d1 = powf(m as f64, -1.0 / t);
    Ok(BuilderParams { s, t, c1, d, d_exp, m, d1 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TreeNode {
    pub center: Point,
    /// Index of the parent in the previous level; 0 for the root.
    pub parent: u32,
}

/// Atomic measure on the leaves of a nested-ball tree.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularMeasureTree {
    pub params: Option<BuilderParams>,
    pub radius: f64,
    pub t: f64,
    pub k_max: u32,
    /// `levels[0]` holds the root only.
    pub levels: Vec<Vec<TreeNode>>,
    sorted_leaves: Option<Vec<f64>>,
}

impl RegularMeasureTree {
    /// One atom of mass `radius^t` at `center`.
    pub fn atom(center: Point, radius: f64, t: f64) -> Self {
        RegularMeasureTree {
            params: None,
            radius,
            t,
            k_max: 0,
            levels: alloc::vec![alloc::vec![TreeNode { center, parent: 0 }]],
            sorted_leaves: center.line().map(|x| alloc::vec![x]),
        }
    }

    fn with_levels(params: BuilderParams, radius: f64, k_max: u32, levels: Vec<Vec<TreeNode>>) -> Self {
        let leaves = &levels[levels.len() - 1];
        let sorted_leaves = leaves
            .iter()
            .map(|n| n.center.line())
            .collect::<Option<Vec<f64>>>()
            .map(|mut v| {
                v.sort_by(|a, b| a.total_cmp(b));
                v
            });
        RegularMeasureTree { params: Some(params), radius, t: params.t, k_max, levels, sorted_leaves }
    }

    pub fn center(&self) -> Point {
        self.levels[0][0].center
    }

    pub fn branching(&self) -> u64 {
        self.params.map_or(1, |p| p.m)
    }

    pub fn total_mass(&self) -> f64 {
        powf(self.radius, self.t)
    }

    pub fn leaves(&self) -> &[TreeNode] {
        &self.levels[self.levels.len() - 1]
    }

    pub fn leaf_mass(&self) -> f64 {
        self.total_mass() / powf(self.branching() as f64, self.k_max as f64)
    }

    /// Weight `M^-k` of a level-`k` node before the `R^t` scaling.
    pub fn node_weight(&self, k: u32) -> Ratio<u128> {
        Ratio::new(1, (self.branching() as u128).pow(k))
    }

    /// Radius `2 d1^k R` of the level-`k` balls.
    pub fn node_radius(&self, k: u32) -> f64 {
        let d1 = self.params.map_or(1.0, |p| p.d1);
        2.0 * powf(d1, k as f64) * self.radius
    }

    /// Number of leaves in the closed ball `B(x, r)`.
    pub fn leaves_within(&self, space: &dyn MetricSpace, x: &Point, r: f64) -> usize {
        match (&self.sorted_leaves, x.line()) {
            (Some(v), Some(c)) => {
                let lo = v.partition_point(|&p| p < c - r);
                let hi = v.partition_point(|&p| p <= c + r);
                // endpoints may round either way; settle them with the metric
                let mut n = hi.saturating_sub(lo);
                for (i, &p) in v.iter().enumerate().take(hi.min(v.len())).skip(lo) {
                    if (i == lo || i + 1 == hi) && space.distance(x, &Point::Line(p)) > r {
                        n -= 1;
                    }
                }
                n
            }
            _ => self.leaves().iter().filter(|l| space.distance(x, &l.center) <= r).count(),
        }
    }

    pub fn mass_in_ball(&self, space: &dyn MetricSpace, x: &Point, r: f64) -> f64 {
        self.leaves_within(space, x, r) as f64 * self.leaf_mass()
    }

    /// `(a, b)` from the nested-ball argument, valid inside `valid_window`.
    pub fn predicted_bounds(&self) -> Option<(f64, f64)> {
        let p = self.params?;
        let t = self.t;
        let shrink = powf(1.0 - 2.0 * p.d1, t);
        Some((powf(p.d1, 2.0 * t) / shrink, 1.0 / (shrink * powf(p.d1, t))))
    }

    /// Radii `[10 d1^k_max R, (1 - 2 d1) R]` where the atomic leaves stand in
    /// for the limit measure.
    pub fn valid_window(&self) -> (f64, f64) {
        let d1 = self.params.map_or(1.0, |p| p.d1);
        (10.0 * powf(d1, self.k_max as f64) * self.radius, (1.0 - 2.0 * d1) * self.radius)
    }
}

/// Greedy selection of up to `m` points pairwise more than `sep` apart.
fn select_children(space: &dyn MetricSpace, cands: &[Point], sep: f64, m: usize) -> Vec<Point> {
    let mut kept: Vec<Point> = Vec::with_capacity(m);
    let mut sorted: Vec<f64> = Vec::new();
    let line = cands.iter().all(|p| p.line().is_some());
    for p in cands {
        if kept.len() == m {
            break;
        }
        let clear = if line {
            let x = p.line().unwrap();
            let i = sorted.partition_point(|&v| v < x);
            let left = i.checked_sub(1).map(|j| sorted[j]);
            let right = sorted.get(i).copied();
            left.is_none_or(|v| space.distance(p, &Point::Line(v)) > sep)
                && right.is_none_or(|v| space.distance(p, &Point::Line(v)) > sep)
        } else {
            kept.iter().all(|q| space.distance(p, q) > sep)
        };
        if clear {
            if line {
                let x = p.line().unwrap();
                let i = sorted.partition_point(|&v| v < x);
                sorted.insert(i, x);
            }
            kept.push(*p);
        }
    }
    kept
}

/// Largest supported leaf count.
pub const MAX_LEAVES: u128 = 1 << 24;

/// Builds the nested-ball tree centred at `z` with outer radius `2R` down to
/// level `k_max`.
pub fn build_regular_measure(
    space: &dyn MetricSpace,
    z: &Point,
    radius: f64,
    t: f64,
    k_max: u32,
) -> Result<RegularMeasureTree> {
    let c = space.constants();
    if !c.is_regular() {
        return Err(PoroError::Unsupported(format!("{} is not declared regular", space.name())));
    }
    if !(radius > 0.0 && radius < c.r_mu) {
        return Err(invalid("need 0 < R < r_mu"));
    }
    let params = builder_params(c.s, t, c.a_mu, c.b_mu)?;
    let leaves = (params.m as u128).checked_pow(k_max).unwrap_or(u128::MAX);
    if leaves > MAX_LEAVES {
        return Err(invalid(format!("{leaves} leaves exceed the supported {MAX_LEAVES}")));
    }
    let leaf_scale = powf(params.d1, k_max as f64) * radius;
    if leaf_scale <= c.r_floor {
        return Err(invalid("leaf scale is below the carrier resolution"));
    }
    let mut levels = alloc::vec![alloc::vec![TreeNode { center: *z, parent: 0 }]];
    for k in 1..=k_max {
        let rho = params.packing_radius(k, radius);
        let reach = powf(params.d1, (k - 1) as f64) * radius;
        let prev = &levels[k as usize - 1];
        let mut next = Vec::with_capacity(prev.len() * params.m as usize);
        for (i, node) in prev.iter().enumerate() {
            let mut cands = alloc::vec![node.center];
            cands.extend(space.carrier_net(&node.center, reach, rho));
            let kids = select_children(space, &cands, 2.0 * rho, params.m as usize);
            if kids.len() < params.m as usize {
                return Err(PoroError::ConstructionFailure(format!(
                    "level {k} node {i}: found {} of {} children",
                    kids.len(),
                    params.m
                )));
            }
            next.extend(kids.into_iter().map(|center| TreeNode { center, parent: i as u32 }));
        }
        levels.push(next);
    }
    Ok(RegularMeasureTree::with_levels(params, radius, k_max, levels))
}

/// Extreme ratios of a ball-measure function over a sample and scales.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegularityReport {
    pub a_emp: f64,
    pub b_emp: f64,
    pub evaluated: usize,
    /// Sample points rejected as off the support.
    pub skipped: usize,
    pub predicted: Option<(f64, f64)>,
    pub tolerance: f64,
    pub pass: bool,
}

/// `a_emp = min mass/r^t`, `b_emp = max mass/r^t` over `sample x scales`.
///
/// Points where `on_support` is false are skipped. With `predicted` the check
/// also demands `[a_emp, b_emp]` inside the prediction widened by `tolerance`.
pub fn verify_regularity<F, S>(
    mass: F,
    on_support: S,
    sample: &[Point],
    t: f64,
    scales: &[f64],
    predicted: Option<(f64, f64)>,
    tolerance: f64,
) -> RegularityReport
where
    F: Fn(&Point, f64) -> f64,
    S: Fn(&Point) -> bool,
{
    let mut a = f64::INFINITY;
    let mut b: f64 = 0.0;
    let mut evaluated = 0;
    let mut skipped = 0;
    for x in sample {
        if !on_support(x) {
            skipped += 1;
            continue;
        }
        for &r in scales {
            let q = mass(x, r) / powf(r, t);
            a = a.min(q);
            b = b.max(q);
            evaluated += 1;
        }
    }
    let mut pass = evaluated > 0 && a > 0.0 && b.is_finite();
    if let Some((pa, pb)) = predicted {
        pass &= a >= pa * (1.0 - tolerance) && b <= pb * (1.0 + tolerance);
    }
    RegularityReport { a_emp: a, b_emp: b, evaluated, skipped, predicted, tolerance, pass }
}
