//! The comb: vertical unit segments over `{0} ∪ {2^-j : 0 <= j <= J}` in the plane.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::checks::{extremal_search, geometric_radii};
use crate::error::{invalid, Result};
use crate::math::{powi, sqrt};
use crate::metric::{MeasureKind, MetricSpace, StructureConstants};
use crate::point::Point;
use crate::spaces::cantor::{CONSTANT_MARGIN_HIGH, CONSTANT_MARGIN_LOW};
use crate::target::TargetSet;

#[derive(Debug, Clone)]
pub struct CombSpace {
    pub teeth: u32,
    /// Column abscissae in increasing order, starting with the spine at 0.
    pub columns: Vec<f64>,
    constants: StructureConstants,
}

/// Half-height of the slice of the closed disk `B(center, r)` on column `c`.
fn half_width(center: (f64, f64), r: f64, c: f64) -> Option<f64> {
    let dx = c - center.0;
    if dx.abs() > r {
        None
    } else {
        Some(sqrt((r * r - dx * dx).max(0.0)))
    }
}

fn dist_to_segment(y: f64, a: f64, b: f64) -> f64 {
    if y < a {
        a - y
    } else if y > b {
        y - b
    } else {
        0.0
    }
}

impl CombSpace {
    pub fn new(teeth: u32) -> Result<Self> {
        if teeth > 60 {
            return Err(invalid("comb supports at most 60 teeth"));
        }
        let mut columns = alloc::vec![0.0];
        columns.extend((0..=teeth).rev().map(|j| powi(0.5, j as i32)));
        let mut space = CombSpace {
            teeth,
            columns,
            constants: StructureConstants::new(1.0, 1.0, 1.0, 1.0, 1.0, MeasureKind::Regular, 0.0)?,
        };
        let floor = powi(0.5, teeth as i32);
        let mut pts = Vec::new();
        for &c in &space.columns {
            for y in [0.0, 0.25, 0.5] {
                pts.push(Point::Plane(c, y));
            }
        }
        let radii = geometric_radii(floor, 0.999, 24);
        let ext = extremal_search(|p, r| space.ball_measure(p, r), &pts, &radii, 1.0);
        space.constants = StructureConstants::new(
            1.0,
            ext.a * CONSTANT_MARGIN_LOW,
            ext.b * CONSTANT_MARGIN_HIGH,
            1.0,
            ext.c * CONSTANT_MARGIN_HIGH,
            MeasureKind::DoublingOnly,
            floor,
        )?;
        Ok(space)
    }

    /// Spacing of the finest teeth, reported next to estimates on this space.
    pub fn truncation_scale(&self) -> f64 {
        self.columns[1]
    }

    /// Columns meeting `[lo, hi]` as an index range.
    fn column_range(&self, lo: f64, hi: f64) -> core::ops::Range<usize> {
        let a = self.columns.partition_point(|&c| c < lo);
        let b = self.columns.partition_point(|&c| c <= hi);
        a..b
    }
}

impl MetricSpace for CombSpace {
    fn name(&self) -> String {
        format!("comb(J={})", self.teeth)
    }

    fn distance(&self, a: &Point, b: &Point) -> f64 {
        match (a, b) {
            (Point::Plane(x1, y1), Point::Plane(x2, y2)) => {
                let (dx, dy) = (x1 - x2, y1 - y2);
                sqrt(dx * dx + dy * dy)
            }
            _ => f64::NAN,
        }
    }

    fn ball_measure(&self, x: &Point, r: f64) -> f64 {
        let Point::Plane(cx, cy) = *x else { return 0.0 };
        self.columns[self.column_range(cx - r, cx + r)]
            .iter()
            .filter_map(|&c| half_width((cx, cy), r, c))
            .map(|w| ((cy + w).min(1.0) - (cy - w).max(0.0)).max(0.0))
            .sum()
    }

    fn carrier_net(&self, center: &Point, radius: f64, eps: f64) -> Vec<Point> {
        let Point::Plane(cx, cy) = *center else { return Vec::new() };
        let h = eps / 2.0;
        // kept[i]: kept heights on column i, increasing
        let mut kept: Vec<Vec<f64>> = alloc::vec![Vec::new(); self.columns.len()];
        let range = self.column_range(cx - radius, cx + radius);
        for i in range.clone() {
            let c = self.columns[i];
            let Some(w) = half_width((cx, cy), radius, c) else { continue };
            let (u, v) = ((cy - w).max(0.0), (cy + w).min(1.0));
            if u > v {
                continue;
            }
            let mut cand = Vec::new();
            let mut k = 0u64;
            let mut last = u;
            loop {
                let y = u + h * k as f64;
                if y > v {
                    break;
                }
                cand.push(y);
                last = y;
                k += 1;
            }
            if v - last > h / 2.0 {
                cand.push(v);
            }
            let near = self.column_range(c - h, c);
            for y in cand {
                let clash = near.clone().any(|j| {
                    let dx = c - self.columns[j];
                    let col = &kept[j];
                    let from = col.partition_point(|&q| q < y - h);
                    col[from..]
                        .iter()
                        .take_while(|&&q| q <= y + h)
                        .any(|&q| dx * dx + (q - y) * (q - y) <= h * h)
                });
                if !clash {
                    kept[i].push(y);
                }
            }
        }
        range
            .flat_map(|i| {
                let c = self.columns[i];
                core::mem::take(&mut kept[i]).into_iter().map(move |y| Point::Plane(c, y))
            })
            .collect()
    }

    fn constants(&self) -> StructureConstants {
        self.constants
    }

    fn anchor(&self) -> (Point, f64) {
        (Point::Plane(0.5, 0.5), 0.7072)
    }

    fn escape_distance(&self, x: &Point, r: f64, y: &Point) -> Option<f64> {
        let (Point::Plane(cx, cy), Point::Plane(yx, yy)) = (*x, *y) else { return None };
        let mut best = f64::INFINITY;
        for &c in &self.columns {
            let mut parts: [Option<(f64, f64)>; 2] = [None, None];
            match half_width((cx, cy), r, c) {
                None => parts[0] = Some((0.0, 1.0)),
                Some(w) => {
                    if cy - w > 0.0 {
                        parts[0] = Some((0.0, (cy - w).min(1.0)));
                    }
                    if cy + w < 1.0 {
                        parts[1] = Some(((cy + w).max(0.0), 1.0));
                    }
                }
            }
            for (a, b) in parts.into_iter().flatten() {
                let dx = c - yx;
                let dy = dist_to_segment(yy, a, b);
                best = best.min(sqrt(dx * dx + dy * dy));
            }
        }
        Some(best)
    }

    fn contains(&self, p: &Point) -> bool {
        match *p {
            Point::Plane(x, y) => (0.0..=1.0).contains(&y) && self.columns.binary_search_by(|c| c.total_cmp(&x)).is_ok(),
            _ => false,
        }
    }
}

/// The spine `{0} × [0, 1]` of the comb.
#[derive(Debug, Clone, Default)]
pub struct CombSpine;

impl TargetSet for CombSpine {
    fn label(&self) -> String {
        String::from("comb spine")
    }

    fn dist_bounds(&self, y: &Point) -> (f64, f64) {
        match *y {
            Point::Plane(x, h) => {
                let dy = dist_to_segment(h, 0.0, 1.0);
                let d = sqrt(x * x + dy * dy);
                (d, d)
            }
            _ => (0.0, f64::INFINITY),
        }
    }

    fn resolution(&self) -> f64 {
        0.0
    }

    fn net(&self, eps: f64) -> (Vec<Point>, f64) {
        let mut pts = Vec::new();
        crate::spaces::interval::grid(0.0, 1.0, eps, &mut pts);
        let pts = pts.into_iter().map(|p| Point::Plane(0.0, p.line().unwrap())).collect();
        (pts, eps / 2.0)
    }
}
