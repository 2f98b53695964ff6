//! Snowflake transforms `d -> d^eps` of a space and of sets inside it.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::math::{ceil, powf, powi};
use crate::metric::{MetricSpace, SpaceHandle, StructureConstants};
use crate::point::Point;
use crate::target::TargetSet;

#[derive(Debug, Clone)]
pub struct SnowflakeSpace {
    pub base: SpaceHandle,
    pub exponent: f64,
    constants: StructureConstants,
}

fn check_exponent(e: f64) -> Result<()> {
    if e > 0.0 && e < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("snowflake exponent {e} is outside (0, 1)")))
    }
}

impl SnowflakeSpace {
    pub fn new(base: SpaceHandle, exponent: f64) -> Result<Self> {
        check_exponent(exponent)?;
        let b = base.constants();
        let constants = StructureConstants::new(
            b.s / exponent,
            b.a_mu,
            b.b_mu,
            powf(b.r_mu, exponent),
            powi(b.c_mu, ceil(1.0 / exponent) as i32),
            b.kind,
            powf(b.r_floor, exponent),
        )?;
        Ok(SnowflakeSpace { base, exponent, constants })
    }

    /// Radius in the base metric that corresponds to `r` here.
    pub fn base_radius(&self, r: f64) -> f64 {
        powf(r, 1.0 / self.exponent)
    }
}

impl MetricSpace for SnowflakeSpace {
    fn name(&self) -> String {
        format!("snowflake({}, eps={})", self.base.name(), self.exponent)
    }

    fn distance(&self, a: &Point, b: &Point) -> f64 {
        powf(self.base.distance(a, b), self.exponent)
    }

    fn ball_measure(&self, x: &Point, r: f64) -> f64 {
        self.base.ball_measure(x, self.base_radius(r))
    }

    fn carrier_net(&self, center: &Point, radius: f64, eps: f64) -> Vec<Point> {
        self.base.carrier_net(center, self.base_radius(radius), self.base_radius(eps))
    }

    fn constants(&self) -> StructureConstants {
        self.constants
    }

    fn anchor(&self) -> (Point, f64) {
        let (c, r) = self.base.anchor();
        (c, powf(r, self.exponent))
    }

    fn escape_distance(&self, x: &Point, r: f64, y: &Point) -> Option<f64> {
        let d = self.base.escape_distance(x, self.base_radius(r), y)?;
        Some(if d.is_infinite() { d } else { powf(d, self.exponent) })
    }

    fn contains(&self, p: &Point) -> bool {
        self.base.contains(p)
    }
}

/// A set of the base space viewed in the snowflaked metric.
#[derive(Debug, Clone)]
pub struct SnowflakeTarget {
    pub inner: Arc<dyn TargetSet>,
    pub base: SpaceHandle,
    pub exponent: f64,
}

impl SnowflakeTarget {
    pub fn new(inner: Arc<dyn TargetSet>, base: SpaceHandle, exponent: f64) -> Result<Self> {
        check_exponent(exponent)?;
        Ok(SnowflakeTarget { inner, base, exponent })
    }
}

impl TargetSet for SnowflakeTarget {
    fn label(&self) -> String {
        format!("{} (eps={})", self.inner.label(), self.exponent)
    }

    fn dist_bounds(&self, y: &Point) -> (f64, f64) {
        let (lo, hi) = self.inner.dist_bounds(y);
        (powf(lo, self.exponent), powf(hi, self.exponent))
    }

    fn resolution(&self) -> f64 {
        powf(self.inner.resolution(), self.exponent)
    }

    fn net(&self, eps: f64) -> (Vec<Point>, f64) {
        let (pts, res) = self.inner.net(powf(eps, 1.0 / self.exponent));
        (pts, powf(res, self.exponent))
    }

    fn neighborhood_measure(&self, _space: &dyn MetricSpace, r: f64) -> Option<(f64, f64)> {
        self.inner.neighborhood_measure(&*self.base, powf(r, 1.0 / self.exponent))
    }
}
