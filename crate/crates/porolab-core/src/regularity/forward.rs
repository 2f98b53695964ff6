//! Porosity implied by a `t`-regular measure living inside an `s`-regular space.

use crate::error::{invalid, Result};
use crate::math::{ln, powf, snapped_floor};
use crate::metric::StructureConstants;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ForwardBound {
    /// Threshold that the hole-level index must exceed.
    pub k: f64,
    /// Smallest admissible integer level, `floor(k) + 1`.
    pub level: u32,
    /// `2^-(level + 3)`, a lower bound for star porosity at `2r`.
    pub rho_bound: f64,
    /// Radii below which the bound applies.
    pub r_window: f64,
}

impl ForwardBound {
    /// Level for plain porosity, which is at least half the star porosity.
    pub fn por_rho(&self) -> f64 {
        self.rho_bound / 2.0
    }
}

/// `k = log(b_mu b_nu / (a_mu a_nu) 2^(3t)) / ((s - t) log 2)`.
pub fn porosity_from_regularity(
    ambient: &StructureConstants,
    t: f64,
    a_nu: f64,
    b_nu: f64,
    r_nu: f64,
) -> Result<ForwardBound> {
    let s = ambient.s;
    if !(t > 0.0 && t < s) {
        return Err(invalid("need 0 < t < s"));
    }
    if !(a_nu > 0.0 && a_nu <= b_nu) {
        return Err(invalid("need 0 < a_nu <= b_nu"));
    }
    if !(r_nu > 0.0) {
        return Err(invalid("r_nu must be positive"));
    }
    let ratio = ambient.b_mu * b_nu / (ambient.a_mu * a_nu) * powf(2.0, 3.0 * t);
    let k = ln(ratio) / ((s - t) * ln(2.0));
    let level = (snapped_floor(k).max(0.0) + 1.0) as u32;
    Ok(ForwardBound {
        k,
        level,
        rho_bound: powf(2.0, -(level as f64) - 3.0),
        r_window: 0.5 * ambient.r_mu.min(r_nu),
    })
}
