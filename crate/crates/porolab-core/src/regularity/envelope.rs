//! Regular supersets of uniformly porous sets, built by planting regular
//! measures in the holes of the set at every scale.

use alloc::format;
use alloc::vec::Vec;

use super::builder::{build_regular_measure, builder_params, RegularMeasureTree, MAX_LEAVES};
use crate::approx::greedy_packing_indices;
use crate::dimension::{regular_bound, DeltaValue};
use crate::error::{invalid, PoroError, Result};
use crate::math::powi;
use crate::metric::MetricSpace;
use crate::point::Point;
use crate::porosity::porosity_at_scale;
use crate::porosity::regular_annulus_ratio;
use crate::target::TargetSet;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeOptions {
    /// Accept `t <= s - delta`, which the construction does not cover.
    pub allow_t_override: bool,
    pub c_b: Option<f64>,
    /// Largest leaf count for a hole tree; larger trees are replaced by an atom.
    pub hole_tree_cap: u128,
    /// Probe resolution of the hole search relative to the scale.
    pub probe_frac: f64,
}

impl Default for EnvelopeOptions {
    fn default() -> Self {
        EnvelopeOptions { allow_t_override: false, c_b: None, hole_tree_cap: 1 << 12, probe_frac: 5e-3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HoleBall {
    pub level: u32,
    pub index: usize,
    /// Packing centre in the set.
    pub anchor: Point,
    pub center: Point,
    /// Radius of the hole ball; the planted measure lives on twice this ball.
    pub radius: f64,
    /// Lower bound for the distance from `center` to the set.
    pub clearance: f64,
    pub tree: RegularMeasureTree,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeSet {
    pub base: alloc::string::String,
    pub rho_prime: f64,
    pub gamma: f64,
    pub n0: u32,
    pub t: f64,
    pub j_max: u32,
    pub delta: DeltaValue,
    /// The requested `t` was not above `s - delta`.
    pub t_overridden: bool,
    /// `levels[j - 1]` holds the hole balls of level `j`.
    pub levels: Vec<Vec<HoleBall>>,
    atoms: Vec<(Point, f64)>,
    sorted: Option<Vec<(f64, f64)>>,
}

impl EnvelopeSet {
    /// `gamma^(n0 + j)`
    pub fn scale(&self, j: u32) -> f64 {
        powi(self.gamma, (self.n0 + j) as i32)
    }

    /// `[gamma^(n0 + j_max), gamma^(n0 + 1)]`
    pub fn scale_window(&self) -> (f64, f64) {
        (self.scale(self.j_max), self.scale(1))
    }

    pub fn holes(&self) -> impl Iterator<Item = &HoleBall> {
        self.levels.iter().flatten()
    }

    /// Leaves of every planted measure with their masses.
    pub fn atoms(&self) -> &[(Point, f64)] {
        &self.atoms
    }

    pub fn mass_in_ball(&self, space: &dyn MetricSpace, x: &Point, r: f64) -> f64 {
        match (&self.sorted, x.line()) {
            (Some(v), Some(c)) => {
                let lo = v.partition_point(|p| p.0 < c - r);
                let hi = v.partition_point(|p| p.0 <= c + r);
                v[lo..hi].iter().map(|p| p.1).sum()
            }
            _ => self.atoms.iter().filter(|(p, _)| space.distance(x, p) <= r).map(|(_, m)| m).sum(),
        }
    }

    /// Checks that twice each hole ball misses the set and that hole balls of
    /// one level are pairwise disjoint. Returns the offending pair or ball.
    pub fn verify_disjointness(&self, space: &dyn MetricSpace, set: &dyn TargetSet) -> Result<()> {
        for h in self.holes() {
            if !(set.dist_bounds(&h.center).0 > 2.0 * h.radius) {
                return Err(PoroError::CertificateViolation(format!(
                    "hole ({}, {}) meets the set",
                    h.level, h.index
                )));
            }
        }
        for level in &self.levels {
            let mut order: Vec<&HoleBall> = level.iter().collect();
            if order.iter().all(|h| h.center.line().is_some()) {
                order.sort_by(|a, b| a.center.order_key().partial_cmp(&b.center.order_key()).unwrap());
                for w in order.windows(2) {
                    if !(space.distance(&w[0].center, &w[1].center) > w[0].radius + w[1].radius) {
                        return Err(PoroError::CertificateViolation(format!(
                            "holes ({}, {}) and ({}, {}) overlap",
                            w[0].level, w[0].index, w[1].level, w[1].index
                        )));
                    }
                }
            } else {
                for (i, a) in order.iter().enumerate() {
                    for b in &order[i + 1..] {
                        if !(space.distance(&a.center, &b.center) > a.radius + b.radius) {
                            return Err(PoroError::CertificateViolation(format!(
                                "holes ({}, {}) and ({}, {}) overlap",
                                a.level, a.index, b.level, b.index
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Smallest `dist(2B, A) / radius` over all hole balls.
    pub fn min_separation_ratio(&self, set: &dyn TargetSet) -> f64 {
        self.holes()
            .map(|h| (set.dist_bounds(&h.center).0 - 2.0 * h.radius) / h.radius)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Plants a `t`-regular measure in a hole of every packing ball of `set` at
/// scales `gamma^(n0 + j)`, `j = 1..=j_max`, with `gamma = rho_prime / 5`.
pub fn regular_envelope(
    space: &dyn MetricSpace,
    set: &dyn TargetSet,
    rho_prime: f64,
    r_p: f64,
    t: f64,
    j_max: u32,
    opts: &EnvelopeOptions,
) -> Result<EnvelopeSet> {
    let c = space.constants();
    if !c.is_regular() {
        return Err(PoroError::Unsupported(format!("{} is not declared regular", space.name())));
    }
    if !(rho_prime > 0.0 && rho_prime <= 0.5) {
        return Err(invalid("rho' must lie in (0, 1/2]"));
    }
    if !(r_p > 0.0) || j_max == 0 {
        return Err(invalid("need r_p > 0 and j_max >= 1"));
    }
    if !(t > 0.0 && t < c.s) {
        return Err(invalid("need 0 < t < s"));
    }
    let delta = {
        let b = regular_bound(&c, rho_prime, r_p, opts.c_b)?;
        DeltaValue { delta: b.delta, c_b: opts.c_b.unwrap_or(1.0), symbolic: b.symbolic_cb }
    };
    let t_overridden = t <= c.s - delta.delta;
    if t_overridden && !opts.allow_t_override {
        return Err(invalid(format!("t = {t} is not above s - delta = {}", c.s - delta.delta)));
    }
    let gamma = rho_prime / 5.0;
    let (_, d) = regular_annulus_ratio(&c);
    let bound = 0.5 / (d * d) * r_p.min(c.r_mu);
    let mut n0 = 0u32;
    while powi(gamma, n0 as i32) >= bound {
        n0 += 1;
    }
    let params = builder_params(c.s, t, c.a_mu, c.b_mu)?;

    let mut levels = Vec::with_capacity(j_max as usize);
    for j in 1..=j_max {
        let r = powi(gamma, (n0 + j) as i32);
        let hole_r = gamma * r;
        let (mut pts, _) = set.net(opts.probe_frac * r);
        pts.sort_by(|a, b| a.order_key().partial_cmp(&b.order_key()).unwrap());
        let centers = greedy_packing_indices(space, &pts, r);
        let mut level = Vec::with_capacity(centers.len());
        for (i, &ci) in centers.iter().enumerate() {
            let x = pts[ci];
            let iv = porosity_at_scale(space, set, &x, r, opts.probe_frac * r)?;
            let z = iv.witness.ok_or_else(|| no_hole(j, i, r))?;
            let clearance = set.dist_bounds(&z).0;
            let room = r - space.distance(&x, &z);
            if !(iv.lo >= rho_prime && clearance >= 5.0 * hole_r && room >= 5.0 * hole_r) {
                return Err(no_hole(j, i, r));
            }
            let tree = hole_tree(space, &z, hole_r, t, params.m, params.d1, opts.hole_tree_cap)?;
            level.push(HoleBall { level: j, index: i, anchor: x, center: z, radius: hole_r, clearance, tree });
        }
        levels.push(level);
    }

    let atoms: Vec<(Point, f64)> = levels
        .iter()
        .flatten()
        .flat_map(|h: &HoleBall| {
            let m = h.tree.leaf_mass();
            h.tree.leaves().iter().map(move |l| (l.center, m))
        })
        .collect();
    let sorted = atoms
        .iter()
        .map(|(p, m)| p.line().map(|x| (x, *m)))
        .collect::<Option<Vec<_>>>()
        .map(|mut v| {
            v.sort_by(|a, b| a.0.total_cmp(&b.0));
            v
        });
    Ok(EnvelopeSet {
        base: set.label(),
        rho_prime,
        gamma,
        n0,
        t,
        j_max,
        delta,
        t_overridden,
        levels,
        atoms,
        sorted,
    })
}

fn no_hole(j: u32, i: usize, r: f64) -> PoroError {
    PoroError::CertificateViolation(format!("no hole of the promised size in packing ball ({j}, {i}) of radius {r:e}"))
}

/// Deepest affordable tree of total mass `radius^t` on `B(z, 2 radius)`.
fn hole_tree(
    space: &dyn MetricSpace,
    z: &Point,
    radius: f64,
    t: f64,
    m: u64,
    d1: f64,
    cap: u128,
) -> Result<RegularMeasureTree> {
    let floor = space.constants().r_floor;
    let mut depth = 0u32;
    while (m as u128).checked_pow(depth + 1).is_some_and(|n| n <= cap.min(MAX_LEAVES))
        && powi(d1, (depth + 1) as i32) * radius > floor
    {
        depth += 1;
    }
    if depth == 0 {
        return Ok(RegularMeasureTree::atom(*z, radius, t));
    }
    build_regular_measure(space, z, radius, t, depth)
}
