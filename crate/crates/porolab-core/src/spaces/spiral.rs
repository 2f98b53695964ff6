//! Rays of length `q` at angles `2πq`, `q = i/m` rational, with the path metric
//! through the origin.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::checks::{extremal_search, geometric_radii};
use crate::error::{invalid, Result};
use crate::metric::{MeasureKind, MetricSpace, StructureConstants};
use crate::point::Point;
use crate::spaces::cantor::{CONSTANT_MARGIN_HIGH, CONSTANT_MARGIN_LOW};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpiralSpec {
    pub max_denominator: u32,
}

#[derive(Debug, Clone)]
pub struct SpiralSpace {
    pub spec: SpiralSpec,
    /// Reduced `(num, den)` of every ray, by increasing length.
    pub rays: Vec<(u32, u32)>,
    constants: StructureConstants,
}

pub const ORIGIN: Point = Point::Ray { num: 0, den: 1, radius: 0.0 };

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Ray identity and distance from the origin; the origin has no ray.
fn polar(p: &Point) -> Option<(Option<(u32, u32)>, f64)> {
    match *p {
        Point::Ray { num, den, radius } => {
            if radius == 0.0 {
                Some((None, 0.0))
            } else {
                let g = gcd(num, den).max(1);
                Some((Some((num / g, den / g)), radius))
            }
        }
        _ => None,
    }
}

impl SpiralSpace {
    pub fn new(spec: SpiralSpec) -> Result<Self> {
        if spec.max_denominator < 2 {
            return Err(invalid("spiral needs max_denominator >= 2"));
        }
        if spec.max_denominator > 2000 {
            return Err(invalid("spiral max_denominator above 2000 is not supported"));
        }
        let mut rays = Vec::new();
        for m in 2..=spec.max_denominator {
            for i in 1..m {
                if gcd(i, m) == 1 {
                    rays.push((i, m));
                }
            }
        }
        rays.sort_by(|a, b| (a.0 as u64 * b.1 as u64).cmp(&(b.0 as u64 * a.1 as u64)));
        let mut space = SpiralSpace {
            spec,
            rays,
            constants: StructureConstants::new(1.0, 1.0, 1.0, 1.0, 1.0, MeasureKind::DoublingOnly, 0.0)?,
        };
        let floor = 1.0 / spec.max_denominator as f64;
        let mut pts = alloc::vec![ORIGIN];
        for &(n, d) in space.rays.iter().rev().take(4) {
            let q = n as f64 / d as f64;
            pts.push(Point::Ray { num: n, den: d, radius: q });
            pts.push(Point::Ray { num: n, den: d, radius: q / 2.0 });
        }
        let radii = geometric_radii(floor, 0.999, 16);
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

    fn length(ray: (u32, u32)) -> f64 {
        ray.0 as f64 / ray.1 as f64
    }

    /// Radii on `ray` inside the closed ball `B(x, r)`.
    fn window(&self, x: (Option<(u32, u32)>, f64), r: f64, ray: (u32, u32)) -> Option<(f64, f64)> {
        let q = Self::length(ray);
        let (lo, hi) = if x.0 == Some(ray) {
            ((x.1 - r).max(0.0), (x.1 + r).min(q))
        } else {
            (0.0, (r - x.1).min(q))
        };
        (lo <= hi).then_some((lo, hi))
    }
}

impl MetricSpace for SpiralSpace {
    fn name(&self) -> String {
        format!("spiral(m<={})", self.spec.max_denominator)
    }

    fn distance(&self, a: &Point, b: &Point) -> f64 {
        match (polar(a), polar(b)) {
            (Some((ra, la)), Some((rb, lb))) => {
                if ra.is_some() && ra == rb {
                    (la - lb).abs()
                } else {
                    la + lb
                }
            }
            _ => f64::NAN,
        }
    }

    fn ball_measure(&self, x: &Point, r: f64) -> f64 {
        let Some(px) = polar(x) else { return 0.0 };
        self.rays
            .iter()
            .filter_map(|&ray| self.window(px, r, ray))
            .map(|(lo, hi)| hi - lo)
            .sum()
    }

    fn carrier_net(&self, center: &Point, radius: f64, eps: f64) -> Vec<Point> {
        let Some(px) = polar(center) else { return Vec::new() };
        let mut out = Vec::new();
        let origin_in = px.1 <= radius;
        if origin_in {
            out.push(ORIGIN);
        }
        let step = 0.75 * eps;
        for &ray in &self.rays {
            let Some((lo, hi)) = self.window(px, radius, ray) else { continue };
            let lo = if origin_in { lo.max(step) } else { lo };
            if lo > hi {
                continue;
            }
            let mut k = 0u64;
            let mut last = lo;
            loop {
                let l = lo + step * k as f64;
                if l > hi {
                    break;
                }
                out.push(Point::Ray { num: ray.0, den: ray.1, radius: l });
                last = l;
                k += 1;
            }
            if hi - last > eps / 2.0 {
                out.push(Point::Ray { num: ray.0, den: ray.1, radius: hi });
            }
        }
        out
    }

    fn constants(&self) -> StructureConstants {
        self.constants
    }

    fn anchor(&self) -> (Point, f64) {
        (ORIGIN, 1.0)
    }

    fn escape_distance(&self, x: &Point, r: f64, y: &Point) -> Option<f64> {
        let (px, py) = (polar(x)?, polar(y)?);
        let mut best = f64::INFINITY;
        for &ray in &self.rays {
            let q = Self::length(ray);
            // radii on this ray strictly farther than r from x, as closed hulls
            let mut parts: [Option<(f64, f64)>; 2] = [None, None];
            if px.0 == Some(ray) {
                if px.1 - r > 0.0 {
                    parts[0] = Some((0.0, px.1 - r));
                }
                if px.1 + r < q {
                    parts[1] = Some((px.1 + r, q));
                }
            } else if r - px.1 < q {
                parts[0] = Some(((r - px.1).max(0.0), q));
            }
            for (a, b) in parts.into_iter().flatten() {
                let d = if py.0 == Some(ray) {
                    if py.1 < a {
                        a - py.1
                    } else if py.1 > b {
                        py.1 - b
                    } else {
                        0.0
                    }
                } else {
                    py.1 + a
                };
                best = best.min(d);
            }
        }
        Some(best)
    }

    fn contains(&self, p: &Point) -> bool {
        match polar(p) {
            Some((None, _)) => true,
            Some((Some((n, d)), l)) => {
                d <= self.spec.max_denominator && n < d && l >= 0.0 && l <= n as f64 / d as f64
            }
            None => false,
        }
    }
}
