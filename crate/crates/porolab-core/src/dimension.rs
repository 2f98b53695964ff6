//! Neighbourhood measures, contents, Minkowski slopes and decay bounds.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::approx::{covering_bracket, FiniteApprox};
use crate::error::{invalid, PoroError, Result};
use crate::math::{ln, log2, powf};
use crate::metric::{MetricSpace, SpaceHandle, StructureConstants};
use crate::point::Point;
use crate::porosity::{regular_annulus_ratio, uniform_to_mean, MeanCase, MeanPorosityParams, UniformCertificate};
use crate::stats::{ols, LinearFit};
use crate::target::TargetSet;

/// Bracket `(lo, hi)` on `mu({y : dist(y, A) < r})`.
pub fn neighborhood_measure(space: &dyn MetricSpace, set: &dyn TargetSet, r: f64) -> Result<(f64, f64)> {
    if !(r > 0.0) {
        return Err(invalid("neighbourhood radius must be positive"));
    }
    set.neighborhood_measure(space, r).ok_or_else(|| {
        PoroError::Unsupported(format!("no neighbourhood measure for {} in {}", set.label(), space.name()))
    })
}

/// Bracket on `mu(A(r)) / r^(s - lambda)`.
pub fn content_mu(space: &dyn MetricSpace, set: &dyn TargetSet, r: f64, lambda: f64) -> Result<(f64, f64)> {
    let c = space.constants();
    if !c.is_regular() {
        return Err(PoroError::Unsupported(format!("{} is not declared regular", space.name())));
    }
    if !(r < c.r_mu / 2.0) {
        return Err(invalid("content needs r < r_mu / 2"));
    }
    let (lo, hi) = neighborhood_measure(space, set, r)?;
    let scale = powf(r, c.s - lambda);
    Ok((lo / scale, hi / scale))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SandwichReport {
    pub r: f64,
    pub lambda: f64,
    pub count_lower: usize,
    pub count_upper: usize,
    /// `count * r^lambda` for both counts.
    pub content_lower: f64,
    pub content_upper: f64,
    pub mu_content_lo: f64,
    pub mu_content_hi: f64,
    /// `2^-s b^-1` times the lower measure content.
    pub bound_lo: f64,
    /// `2^s a^-1` times the upper measure content.
    pub bound_hi: f64,
    /// The covering bracket meets `[bound_lo, bound_hi]`.
    pub holds: bool,
    /// The covering bracket lies inside `[bound_lo, bound_hi]`.
    pub certified: bool,
}

/// Compares covering content with measure content at one scale.
///
/// The covering counts come from a net of the set at `net_frac * r`.
pub fn content_sandwich_check(
    space: &SpaceHandle,
    set: &dyn TargetSet,
    r: f64,
    lambda: f64,
    net_frac: f64,
) -> Result<SandwichReport> {
    if !(net_frac > 0.0 && net_frac < 1.0) {
        return Err(invalid("net fraction must lie in (0, 1)"));
    }
    let c = space.constants();
    let (mu_lo, mu_hi) = content_mu(space.as_ref(), set, r, lambda)?;
    let net = FiniteApprox::of_target(space.clone(), set, net_frac * r);
    let bracket = covering_bracket(&net, r);
    if bracket.vacuous {
        return Err(invalid("scale is below the resolution of the set"));
    }
    let rl = powf(r, lambda);
    let content_lower = bracket.lower as f64 * rl;
    let content_upper = bracket.upper as f64 * rl;
    let bound_lo = powf(2.0, -c.s) / c.b_mu * mu_lo;
    let bound_hi = powf(2.0, c.s) / c.a_mu * mu_hi;
    let slack = 1e-12 * bound_hi.abs().max(1.0);
    Ok(SandwichReport {
        r,
        lambda,
        count_lower: bracket.lower,
        count_upper: bracket.upper,
        content_lower,
        content_upper,
        mu_content_lo: mu_lo,
        mu_content_hi: mu_hi,
        bound_lo,
        bound_hi,
        holds: content_lower <= bound_hi + slack && content_upper + slack >= bound_lo,
        certified: content_lower + slack >= bound_lo && content_upper <= bound_hi + slack,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoverRow {
    pub r: f64,
    pub pack_lower: usize,
    pub cover_upper: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoverCurve {
    /// Sorted by decreasing `r`.
    pub rows: Vec<CoverRow>,
    pub fit_lower: LinearFit,
    pub fit_upper: LinearFit,
    /// Union of both slope confidence intervals.
    pub slope_lo: f64,
    pub slope_hi: f64,
    /// `(r_min, r_max)` of the rows used in the fits.
    pub fit_window: (f64, f64),
    pub net_size: usize,
    pub net_resolution: f64,
}

impl CoverCurve {
    pub fn contains(&self, v: f64) -> bool {
        self.slope_lo <= v && v <= self.slope_hi
    }

    pub fn half_width(&self) -> f64 {
        (self.slope_hi - self.slope_lo) / 2.0
    }
}

/// Covering counts over `scales` and their log-log slopes.
///
/// The largest and smallest scales are left out of the fits.
pub fn minkowski_dim_estimate(space: &SpaceHandle, set: &dyn TargetSet, scales: &[f64]) -> Result<CoverCurve> {
    if scales.len() < 5 {
        return Err(invalid("need at least five scales"));
    }
    if scales.iter().any(|&r| !(r > 0.0)) {
        return Err(invalid("scales must be positive"));
    }
    let mut scales = scales.to_vec();
    scales.sort_by(|a, b| b.total_cmp(a));
    let r_min = scales[scales.len() - 1];
    let net = FiniteApprox::of_target(space.clone(), set, r_min / 4.0);
    let mut rows = Vec::with_capacity(scales.len());
    for &r in &scales {
        let b = covering_bracket(&net, r);
        if b.vacuous {
            return Err(invalid(format!("scale {r} is below the set resolution {}", net.resolution)));
        }
        rows.push(CoverRow { r, pack_lower: b.lower, cover_upper: b.upper });
    }
    let inner = &rows[1..rows.len() - 1];
    let xs: Vec<f64> = inner.iter().map(|row| ln(1.0 / row.r)).collect();
    let yl: Vec<f64> = inner.iter().map(|row| ln(row.pack_lower.max(1) as f64)).collect();
    let yu: Vec<f64> = inner.iter().map(|row| ln(row.cover_upper.max(1) as f64)).collect();
    let fit_lower = ols(&xs, &yl)?;
    let fit_upper = ols(&xs, &yu)?;
    let (a, b) = (fit_lower.interval(), fit_upper.interval());
    Ok(CoverCurve {
        fit_window: (inner[inner.len() - 1].r, inner[0].r),
        rows,
        fit_lower,
        fit_upper,
        slope_lo: a.0.min(b.0),
        slope_hi: a.1.max(b.1),
        net_size: net.len(),
        net_resolution: net.resolution,
    })
}

/// `delta` from the mean-porosity decay estimate, with `C_B` either supplied
/// or set to 1 and flagged symbolic.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DeltaValue {
    pub delta: f64,
    pub c_b: f64,
    pub symbolic: bool,
}

/// `delta = log 2 / (18 C_B 75^t) * (log D)^(t-1) * D^(-3t) * p * rho^t`.
pub fn delta_calculator(rho: f64, p: f64, d: f64, t: f64, c_b: Option<f64>) -> Result<DeltaValue> {
    if !(rho > 0.0 && p > 0.0 && t > 0.0) {
        return Err(invalid("rho, p and t must be positive"));
    }
    if !(d > 1.0) {
        return Err(invalid("D must exceed 1"));
    }
    let (cb, symbolic) = match c_b {
        Some(v) if v > 0.0 => (v, false),
        Some(_) => return Err(invalid("C_B must be positive")),
        None => (1.0, true),
    };
    let delta = ln(2.0) / (18.0 * cb * powf(75.0, t)) * powf(ln(d), t - 1.0) * powf(d, -3.0 * t) * p * powf(rho, t);
    Ok(DeltaValue { delta, c_b: cb, symbolic })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DecayForm {
    /// `mu((A ∩ B)(r)) <= C c_mu^(-log rho / log 2) mu(B) (r / r0)^delta`, doubling measures.
    Doubling,
    /// `mu((A ∩ B)(r)) <= C mu(B) (r / r0)^delta`, regular measures.
    Regular,
    /// `mu(A(r)) <= C D^(k0 delta) mu(A(2 D^-k0)) r^delta` for mean porous `A`.
    MeanPorous,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecayBound {
    pub delta: f64,
    /// Multiplicative constant of the chosen form (already including any
    /// porosity-dependent factor).
    pub c: f64,
    /// Largest admissible reference radius (`r0` forms) or the scale below
    /// which the mean porous form applies.
    pub r0: f64,
    pub form: DecayForm,
    pub symbolic_cb: bool,
    pub mean: MeanPorosityParams,
}

/// Absolute constant of the decay bounds at arbitrary (not only dyadic) radii.
pub const DECAY_CONSTANT: f64 = 22.0;

/// Mean porous form for a mean porous set with exponent `t`.
pub fn mean_porous_bound(mean: &MeanPorosityParams, t: f64, c_b: Option<f64>) -> Result<DecayBound> {
    mean.validate()?;
    let dv = delta_calculator(mean.rho, mean.p, mean.d, t, c_b)?;
    Ok(DecayBound {
        delta: dv.delta,
        c: DECAY_CONSTANT,
        r0: powf(mean.d, -((mean.n0 + mean.k0) as f64)),
        form: DecayForm::MeanPorous,
        symbolic_cb: dv.symbolic,
        mean: *mean,
    })
}

/// Regular form for a uniformly `rho`-porous set below `r_p`.
pub fn regular_bound(c: &StructureConstants, rho: f64, r_p: f64, c_b: Option<f64>) -> Result<DecayBound> {
    if !c.is_regular() {
        return Err(PoroError::Unsupported(String::from("regular decay bound needs a regular measure")));
    }
    let mean = uniform_to_mean(rho, 2.0, c, MeanCase::Regular, r_p)?;
    let dv = delta_calculator(mean.rho, mean.p, mean.d, c.s, c_b)?;
    let (_, d) = regular_annulus_ratio(c);
    let d1 = 0.5 / (d * d);
    Ok(DecayBound {
        delta: dv.delta,
        c: DECAY_CONSTANT * (c.b_mu / c.a_mu) * powf(1.0 + 4.0 * d * d * d, c.s),
        r0: d1 * r_p.min(c.r_mu),
        form: DecayForm::Regular,
        symbolic_cb: dv.symbolic,
        mean,
    })
}

/// Doubling form with `t = log2 c_mu` and annulus ratio 2.
pub fn doubling_bound(c: &StructureConstants, rho: f64, r_p: f64, c_b: Option<f64>) -> Result<DecayBound> {
    let t = log2(c.c_mu);
    if !(t > 0.0) {
        return Err(invalid("doubling constant must exceed 1"));
    }
    let mean = uniform_to_mean(rho, 2.0, c, MeanCase::Doubling, r_p)?;
    let dv = delta_calculator(rho, mean.p, 2.0, t, c_b)?;
    // 25/rho-fold enlargement absorbed by doubling, times the decay constant.
    let prefactor = DECAY_CONSTANT * powf(c.c_mu, log2(50.0)) * powf(c.c_mu, -ln(rho) / ln(2.0));
    Ok(DecayBound {
        delta: dv.delta,
        c: prefactor,
        r0: rho / 12.0 * r_p.min(c.r_mu),
        form: DecayForm::Doubling,
        symbolic_cb: dv.symbolic,
        mean,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecayRow {
    pub r: f64,
    pub mass_lo: f64,
    pub mass_hi: f64,
    /// `mass_hi / (mu(B(x0, r0)) (r / r0)^delta)`
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub rows: Vec<DecayRow>,
    pub ball_mass: f64,
    pub max_ratio: f64,
    pub pass: bool,
    /// Slope of `log mu(A(r))` against `log r`.
    pub empirical_exponent: Option<LinearFit>,
}

/// Evaluates `bound` on `set`, which must lie in `B(x0, r0)`.
pub fn decay_bound_check(
    space: &SpaceHandle,
    set: &dyn TargetSet,
    x0: &Point,
    r0: f64,
    bound: &DecayBound,
    scales: &[f64],
) -> Result<DecayReport> {
    if scales.iter().any(|&r| !(r > 0.0 && r < r0)) {
        return Err(invalid("scales must lie in (0, r0)"));
    }
    let (probe, res) = set.net(r0 / 64.0);
    if probe.iter().any(|p| space.distance(x0, p) > r0 + res) {
        return Err(invalid("set is not contained in B(x0, r0)"));
    }
    let ball_mass = space.ball_measure(x0, r0);
    let mut rows = Vec::with_capacity(scales.len());
    for &r in scales {
        let (lo, hi) = neighborhood_measure(space.as_ref(), set, r)?;
        let ratio = hi / (ball_mass * powf(r / r0, bound.delta));
        rows.push(DecayRow { r, mass_lo: lo, mass_hi: hi, ratio });
    }
    let max_ratio = rows.iter().map(|row| row.ratio).fold(0.0, f64::max);
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|row| row.mass_lo > 0.0)
        .map(|row| (ln(row.r), ln(0.5 * (row.mass_lo + row.mass_hi))))
        .collect();
    let empirical_exponent = if pts.len() >= 2 {
        let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        ols(&xs, &ys).ok()
    } else {
        None
    };
    Ok(DecayReport { rows, ball_mass, max_ratio, pass: max_ratio <= bound.c, empirical_exponent })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DropVerdict {
    Consistent,
    Inconsistent,
    /// The ambient measure is only doubling; no drop is predicted.
    Inapplicable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DropReport {
    pub slope_lo: f64,
    pub slope_hi: f64,
    pub s: f64,
    pub delta: f64,
    pub symbolic: bool,
    pub verdict: DropVerdict,
    pub note: String,
}

/// Compares a fitted slope with the predicted drop `s - delta`.
pub fn dimension_drop_report(
    space: &dyn MetricSpace,
    certificate: Option<&UniformCertificate>,
    curve: &CoverCurve,
    bound: &DecayBound,
) -> Result<DropReport> {
    let cert = certificate.ok_or_else(|| PoroError::CertificateMissing(String::from("no porosity certificate")))?;
    if !cert.pass {
        return Err(PoroError::CertificateMissing(format!("certificate at rho = {} did not pass", cert.rho)));
    }
    let c = space.constants();
    let (verdict, note) = if !c.is_regular() {
        (DropVerdict::Inapplicable, String::from("doubling-only ambient measure: no dimension drop is predicted"))
    } else if bound.symbolic_cb {
        (DropVerdict::Consistent, String::from("delta depends on an unset C_B; consistency is qualitative"))
    } else if curve.slope_hi <= c.s - bound.delta {
        (DropVerdict::Consistent, String::new())
    } else {
        (DropVerdict::Inconsistent, String::from("fitted slope exceeds s - delta"))
    };
    Ok(DropReport {
        slope_lo: curve.slope_lo,
        slope_hi: curve.slope_hi,
        s: c.s,
        delta: bound.delta,
        symbolic: bound.symbolic_cb,
        verdict,
        note,
    })
}
