//! `K` copies of `[0, 1]` at mutual distance 1.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::metric::{MetricSpace, StructureConstants};
use crate::point::Point;
use crate::spaces::interval::{grid, interval_escape};

#[derive(Debug, Clone)]
pub struct SegmentStack {
    pub rows: u32,
}

impl SegmentStack {
    pub fn new(rows: u32) -> Result<Self> {
        if rows == 0 {
            return Err(invalid("segment stack needs at least one row"));
        }
        Ok(SegmentStack { rows })
    }

    fn row_net(&self, row: u32, u: f64, v: f64, eps: f64, out: &mut Vec<Point>) {
        let mut pts = Vec::new();
        grid(u, v, eps, &mut pts);
        out.extend(pts.into_iter().map(|p| Point::Row { x: p.line().unwrap(), row }));
    }
}

impl MetricSpace for SegmentStack {
    fn name(&self) -> String {
        format!("segment-stack(K={})", self.rows)
    }

    fn distance(&self, a: &Point, b: &Point) -> f64 {
        match (*a, *b) {
            (Point::Row { x: x1, row: r1 }, Point::Row { x: x2, row: r2 }) => {
                if r1 == r2 {
                    (x1 - x2).abs()
                } else {
                    1.0
                }
            }
            _ => f64::NAN,
        }
    }

    fn ball_measure(&self, x: &Point, r: f64) -> f64 {
        let Point::Row { x, .. } = *x else { return 0.0 };
        if r >= 1.0 {
            self.rows as f64
        } else {
            ((x + r).min(1.0) - (x - r).max(0.0)).max(0.0)
        }
    }

    fn carrier_net(&self, center: &Point, radius: f64, eps: f64) -> Vec<Point> {
        let Point::Row { x, row } = *center else { return Vec::new() };
        let mut out = Vec::new();
        if radius >= 1.0 {
            for k in 1..=self.rows {
                self.row_net(k, 0.0, 1.0, eps, &mut out);
            }
        } else {
            self.row_net(row, (x - radius).max(0.0), (x + radius).min(1.0), eps, &mut out);
        }
        out
    }

    fn constants(&self) -> StructureConstants {
        StructureConstants::regular(1.0, 1.0, 2.0, 1.0, 2.0).expect("segment stack constants are valid")
    }

    fn anchor(&self) -> (Point, f64) {
        (Point::Row { x: 0.5, row: 1 }, 1.0)
    }

    fn escape_distance(&self, x: &Point, r: f64, y: &Point) -> Option<f64> {
        let (Point::Row { x: cx, row }, Point::Row { x: yx, row: yr }) = (*x, *y) else { return None };
        if r >= 1.0 {
            return Some(f64::INFINITY);
        }
        let mut best = if self.rows > 1 { 1.0 } else { f64::INFINITY };
        if yr == row {
            best = best.min(interval_escape(0.0, 1.0, cx, r, yx));
        }
        Some(best)
    }

    fn exact_arithmetic(&self) -> bool {
        true
    }

    fn contains(&self, p: &Point) -> bool {
        matches!(*p, Point::Row { x, row } if (0.0..=1.0).contains(&x) && row >= 1 && row <= self.rows)
    }
}
