//! Least-squares slope fitting with a Student-t confidence interval.

use crate::error::{invalid, Result};
use crate::math::{sqrt, t975};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; 0 for exactly collinear data.
    pub slope_se: f64,
    /// Half-width of the 95% interval for the slope.
    pub half_width: f64,
    pub n: usize,
}

impl LinearFit {
    pub fn interval(&self) -> (f64, f64) {
        (self.slope - self.half_width, self.slope + self.half_width)
    }
}

/// Ordinary least squares of `ys` against `xs`.
pub fn ols(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    let n = xs.len();
    if n != ys.len() {
        return Err(invalid("x and y lengths differ"));
    }
    if n < 2 {
        return Err(invalid("need at least two points to fit a slope"));
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if !(sxx > 0.0) {
        return Err(invalid("all x values coincide"));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let (slope_se, half_width) = if n > 2 {
        let rss: f64 = xs.iter().zip(ys).map(|(x, y)| {
            let e = y - intercept - slope * x;
            e * e
        }).sum();
        let se = sqrt(rss / (n - 2) as f64 / sxx);
        (se, t975(n - 2) * se)
    } else {
        (0.0, 0.0)
    };
    Ok(LinearFit { slope, intercept, slope_se, half_width, n })
}
