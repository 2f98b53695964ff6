//! Sanity checkers for declared doubling and regularity constants.

use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::math::{ln, powf};
use crate::metric::MetricSpace;
use crate::point::Point;

/// Extreme ratios found by exhaustive evaluation over sample balls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremes {
    /// `min mu(B(x,r)) / r^s`
    pub a: f64,
    /// `max mu(B(x,r)) / r^s`
    pub b: f64,
    /// `max mu(B(x,2r)) / mu(B(x,r))`
    pub c: f64,
}

pub fn extremal_search<F>(ball: F, points: &[Point], radii: &[f64], s: f64) -> Extremes
where
    F: Fn(&Point, f64) -> f64,
{
    let mut a = f64::INFINITY;
    let mut b: f64 = 0.0;
    let mut c: f64 = 1.0;
    for p in points {
        for &r in radii {
            let m = ball(p, r);
            let q = m / powf(r, s);
            a = a.min(q);
            b = b.max(q);
            if m > 0.0 {
                c = c.max(ball(p, 2.0 * r) / m);
            }
        }
    }
    Extremes { a, b, c }
}

/// Geometric list of `count` radii from `r_max` down to `r_min`.
pub fn geometric_radii(r_min: f64, r_max: f64, count: usize) -> Vec<f64> {
    if count <= 1 {
        return alloc::vec![r_max];
    }
    let q = powf(r_min / r_max, 1.0 / (count - 1) as f64);
    (0..count).map(|i| r_max * powf(q, i as f64)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoublingRow {
    pub x: Point,
    pub r: f64,
    /// `mu(B(x, alpha r)) / mu(B(x, r))`
    pub ratio: f64,
    pub ht1_bound: f64,
    pub ht1_ok: bool,
    pub ht2_bound: Option<f64>,
    pub ht2_ok: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SkipReason {
    /// `r` or `alpha r` reaches the validity radius.
    AboveValidityRadius,
    /// `r` lies below the resolution floor of a truncated carrier.
    BelowResolution,
    EmptyBall,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoublingReport {
    pub alpha: f64,
    pub rows: Vec<DoublingRow>,
    pub skipped: Vec<(Point, f64, SkipReason)>,
}

impl DoublingReport {
    pub fn violations(&self) -> Vec<&DoublingRow> {
        self.rows
            .iter()
            .filter(|r| !r.ht1_ok || r.ht2_ok == Some(false))
            .collect()
    }

    pub fn passed(&self) -> bool {
        self.violations().is_empty()
    }
}

/// Checks `mu(B(x, alpha r)) <= c^(log alpha / log 2 + 1) mu(B(x, r))` and, for
/// regular measures, `mu(B(x, alpha r)) <= (b/a) alpha^s mu(B(x, r))`.
pub fn check_doubling(space: &dyn MetricSpace, sample: &[(Point, f64)], alpha: f64) -> Result<DoublingReport> {
    if !(alpha >= 1.0) {
        return Err(invalid("alpha must be at least 1"));
    }
    let k = space.constants();
    let ht1_bound = powf(k.c_mu, ln(alpha) / ln(2.0) + 1.0);
    let ht2_bound = k.is_regular().then(|| (k.b_mu / k.a_mu) * powf(alpha, k.s));
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (x, r) in sample {
        let (x, r) = (*x, *r);
        if r >= k.r_mu || alpha * r >= k.r_mu {
            skipped.push((x, r, SkipReason::AboveValidityRadius));
            continue;
        }
        if r < k.r_floor {
            skipped.push((x, r, SkipReason::BelowResolution));
            continue;
        }
        let small = space.ball_measure(&x, r);
        if small <= 0.0 {
            skipped.push((x, r, SkipReason::EmptyBall));
            continue;
        }
        let big = space.ball_measure(&x, alpha * r);
        let ratio = big / small;
        rows.push(DoublingRow {
            x,
            r,
            ratio,
            ht1_bound,
            ht1_ok: ratio <= ht1_bound * (1.0 + 1e-12),
            ht2_bound,
            ht2_ok: ht2_bound.map(|b| ratio <= b * (1.0 + 1e-12)),
        });
    }
    Ok(DoublingReport { alpha, rows, skipped })
}
