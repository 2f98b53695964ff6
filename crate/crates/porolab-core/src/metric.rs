//! The metric measure space abstraction.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt::Debug;

use crate::error::{invalid, Result};
use crate::point::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum MeasureKind {
    Regular,
    DoublingOnly,
}

/// Declared regularity and doubling data of a measure.
///
/// `r_floor` is the smallest radius at which the declared bounds are meant to
/// hold on a truncated carrier; it is 0 for exact carriers.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StructureConstants {
    pub s: f64,
    pub a_mu: f64,
    pub b_mu: f64,
    pub r_mu: f64,
    pub c_mu: f64,
    pub kind: MeasureKind,
    pub r_floor: f64,
}

impl StructureConstants {
    pub fn regular(s: f64, a_mu: f64, b_mu: f64, r_mu: f64, c_mu: f64) -> Result<Self> {
        Self::new(s, a_mu, b_mu, r_mu, c_mu, MeasureKind::Regular, 0.0)
    }

    pub fn new(
        s: f64,
        a_mu: f64,
        b_mu: f64,
        r_mu: f64,
        c_mu: f64,
        kind: MeasureKind,
        r_floor: f64,
    ) -> Result<Self> {
        let c = StructureConstants { s, a_mu, b_mu, r_mu, c_mu, kind, r_floor };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s > 0.0) {
            return Err(invalid("s must be positive"));
        }
        if !(self.a_mu > 0.0 && self.a_mu <= self.b_mu) {
            return Err(invalid("need 0 < a_mu <= b_mu"));
        }
        if !(self.r_mu > 0.0) {
            return Err(invalid("r_mu must be positive"));
        }
        if !(self.c_mu >= 1.0) {
            return Err(invalid("c_mu must be at least 1"));
        }
        if !(self.r_floor >= 0.0 && self.r_floor < self.r_mu) {
            return Err(invalid("r_floor must lie in [0, r_mu)"));
        }
        Ok(())
    }

    pub fn is_regular(&self) -> bool {
        self.kind == MeasureKind::Regular
    }
}

/// A metric space with a measure, an internal net generator and declared constants.
///
/// Balls are closed: `B(x, r) = {y : d(x, y) <= r}`.
pub trait MetricSpace: Send + Sync + Debug {
    fn name(&self) -> String;

    fn distance(&self, a: &Point, b: &Point) -> f64;

    /// Measure of the closed ball `B(x, r)`.
    fn ball_measure(&self, x: &Point, r: f64) -> f64;

    /// Carrier points of `B(center, radius)` such that every carrier point of
    /// the ball is within `eps` of one of them and any two are more than
    /// `eps / 2` apart.
    fn carrier_net(&self, center: &Point, radius: f64, eps: f64) -> Vec<Point>;

    fn constants(&self) -> StructureConstants;

    /// A point of the carrier and a radius whose ball is the whole carrier.
    fn anchor(&self) -> (Point, f64);

    /// `inf { d(y, z) : d(x, z) > r }` over carrier points `z`, or `None` when
    /// the space cannot evaluate it. `f64::INFINITY` means no such `z` exists.
    fn escape_distance(&self, _x: &Point, _r: f64, _y: &Point) -> Option<f64> {
        None
    }

    /// Whether distances between construction points are computed without rounding.
    fn exact_arithmetic(&self) -> bool {
        false
    }

    /// Measure of the real interval `[a, b]`, for carriers inside the line.
    fn interval_measure(&self, _a: f64, _b: f64) -> Option<f64> {
        None
    }

    fn contains(&self, p: &Point) -> bool;
}

pub type SpaceHandle = Arc<dyn MetricSpace>;

/// Whole-carrier net at resolution `eps`.
pub fn carrier_sample(space: &dyn MetricSpace, eps: f64) -> Vec<Point> {
    let (c, r) = space.anchor();
    space.carrier_net(&c, r, eps)
}
