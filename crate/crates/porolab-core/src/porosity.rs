//! Bracketed estimators for porosity at a point and scale, porosity
//! profiles, uniform certificates and mean porosity.

use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::math::{ceil, ln, powf, powi, snapped_floor};
use crate::metric::{MetricSpace, StructureConstants};
use crate::point::Point;
use crate::target::TargetSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Variant {
    Por,
    PorStar,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Por => "por",
            Variant::PorStar => "por_star",
        }
    }
}

/// `lo <= porosity <= hi` at one point and scale.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PorosityInterval {
    pub lo: f64,
    pub hi: f64,
    pub r: f64,
    /// Probe resolution plus the resolution of the set.
    pub resolution: f64,
    pub variant: Variant,
    /// No probe point was available; the interval is `[0, 1]`.
    pub degenerate: bool,
    /// Best hole centre found.
    pub witness: Option<Point>,
}

fn check_scale(r: f64, probe_res: f64) -> Result<()> {
    if !(r > 0.0) {
        return Err(invalid("scale must be positive"));
    }
    if !(probe_res > 0.0 && probe_res < r) {
        return Err(invalid("probe resolution must lie in (0, r)"));
    }
    Ok(())
}

fn estimate(
    space: &dyn MetricSpace,
    set: &dyn TargetSet,
    x: &Point,
    r: f64,
    probe_res: f64,
    variant: Variant,
) -> Result<PorosityInterval> {
    check_scale(r, probe_res)?;
    let probes = space.carrier_net(x, r, probe_res);
    let resolution = probe_res + set.resolution();
    if probes.is_empty() {
        return Ok(PorosityInterval { lo: 0.0, hi: 1.0, r, resolution, variant, degenerate: true, witness: None });
    }
    // Without an exact escape distance, r - d(x, y) still bounds it from below.
    let mut exact_escape = true;
    let mut best = f64::NEG_INFINITY;
    let mut witness = None;
    for y in &probes {
        let d = space.distance(x, y);
        let room = match variant {
            Variant::Por => r - d,
            Variant::PorStar => match space.escape_distance(x, r, y) {
                Some(e) => e,
                None => {
                    exact_escape = false;
                    r - d
                }
            },
        };
        let f = set.dist_bounds(y).0.min(room);
        if f > best {
            best = f;
            witness = Some(*y);
        }
    }
    let lo = (best / r).clamp(0.0, 1.0);
    let cap = match variant {
        Variant::Por => 0.5,
        Variant::PorStar => 1.0,
    };
    let hi = if variant == Variant::PorStar && !exact_escape {
        1.0
    } else {
        (lo + resolution / r).min(cap).max(lo)
    };
    Ok(PorosityInterval { lo, hi, r, resolution, variant, degenerate: false, witness })
}

/// Porosity of `set` at `x` and scale `r`, probing the carrier at `probe_res`.
pub fn porosity_at_scale(
    space: &dyn MetricSpace,
    set: &dyn TargetSet,
    x: &Point,
    r: f64,
    probe_res: f64,
) -> Result<PorosityInterval> {
    estimate(space, set, x, r, probe_res, Variant::Por)
}

/// Star porosity: holes must fit inside `B(x, r)`.
pub fn star_porosity_at_scale(
    space: &dyn MetricSpace,
    set: &dyn TargetSet,
    x: &Point,
    r: f64,
    probe_res: f64,
) -> Result<PorosityInterval> {
    estimate(space, set, x, r, probe_res, Variant::PorStar)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PorosityProfile {
    pub intervals: Vec<PorosityInterval>,
    /// Minimum `lo` over the smallest third of the scales; a lower-bound
    /// estimate of the liminf, not a certified value.
    pub liminf_lo: f64,
    /// `(smallest, largest)` scale used for `liminf_lo`.
    pub window: (f64, f64),
}

/// Porosity at each of the decreasing `scales`, probing at `probe_frac * r`.
pub fn porosity_profile(
    space: &dyn MetricSpace,
    set: &dyn TargetSet,
    x: &Point,
    scales: &[f64],
    probe_frac: f64,
    variant: Variant,
) -> Result<PorosityProfile> {
    if scales.is_empty() {
        return Err(invalid("empty scale list"));
    }
    if scales.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(invalid("scales must be strictly decreasing"));
    }
    let r_mu = space.constants().r_mu;
    if scales[0] >= r_mu {
        return Err(invalid("scales must stay below the validity radius r_mu"));
    }
    let intervals = scales
        .iter()
        .map(|&r| estimate(space, set, x, r, probe_frac * r, variant))
        .collect::<Result<Vec<_>>>()?;
    let tail = ceil(scales.len() as f64 / 3.0) as usize;
    let from = scales.len() - tail;
    let liminf_lo = intervals[from..].iter().map(|i| i.lo).fold(f64::INFINITY, f64::min);
    Ok(PorosityProfile { intervals, liminf_lo, window: (scales[scales.len() - 1], scales[from]) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub x: Point,
    pub interval: PorosityInterval,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniformCertificate {
    pub pass: bool,
    pub rho: f64,
    pub evaluated: usize,
    /// Smallest `lo` seen, a sample infimum.
    pub min_lo: f64,
    pub max_hi: f64,
    pub violations: Vec<Witness>,
}

/// Checks `por(A, x, r) >= rho` on every sampled point and scale below `r_p`.
pub fn uniform_porosity_certificate(
    space: &dyn MetricSpace,
    set: &dyn TargetSet,
    rho: f64,
    r_p: f64,
    sample: &[Point],
    scales: &[f64],
    probe_frac: f64,
) -> Result<UniformCertificate> {
    if scales.iter().any(|&r| r >= r_p) {
        return Err(invalid("every scale must lie below r_p"));
    }
    let mut cert = UniformCertificate {
        pass: true,
        rho,
        evaluated: 0,
        min_lo: f64::INFINITY,
        max_hi: 0.0,
        violations: Vec::new(),
    };
    for x in sample {
        for &r in scales {
            let iv = porosity_at_scale(space, set, x, r, probe_frac * r)?;
            cert.evaluated += 1;
            cert.min_lo = cert.min_lo.min(iv.lo);
            cert.max_hi = cert.max_hi.max(iv.hi);
            if iv.lo < rho {
                cert.pass = false;
                cert.violations.push(Witness { x: *x, interval: iv });
            }
        }
    }
    Ok(cert)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MeanPorosityParams {
    pub rho: f64,
    pub d: f64,
    pub p: f64,
    pub n0: u32,
    pub k0: u32,
}

impl MeanPorosityParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(invalid("mean porosity rho must lie in (0, 1]"));
        }
        if !(self.d > 1.0) {
            return Err(invalid("annulus ratio D must exceed 1"));
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(invalid("density p must lie in (0, 1]"));
        }
        if self.n0 < 1 {
            return Err(invalid("n0 must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanPorosityReport {
    /// `psi[i]` belongs to `k = k0 + 1 + i`.
    pub psi: Vec<u8>,
    /// Annuli without any probe point.
    pub empty: Vec<bool>,
    /// `s[i]` is the partial sum over the first `i + 1` annuli.
    pub s: Vec<u32>,
    pub pass: bool,
}

impl MeanPorosityReport {
    pub fn threshold(&self, params: &MeanPorosityParams, n: usize) -> f64 {
        params.p * n as f64
    }
}

/// Annulus indicators `psi_k` at `x` for `k = k0 + 1 ..= k0 + n_max`.
pub fn mean_porosity_check(
    space: &dyn MetricSpace,
    set: &dyn TargetSet,
    x: &Point,
    params: &MeanPorosityParams,
    n_max: u32,
    probe_frac: f64,
) -> Result<MeanPorosityReport> {
    params.validate()?;
    if n_max < params.n0 {
        return Err(invalid("n_max must be at least n0"));
    }
    if !(probe_frac > 0.0 && probe_frac < 1.0) {
        return Err(invalid("probe fraction must lie in (0, 1)"));
    }
    let mut psi = Vec::with_capacity(n_max as usize);
    let mut empty = Vec::with_capacity(n_max as usize);
    for k in params.k0 + 1..=params.k0 + n_max {
        let outer = powi(params.d, -(k as i32) + 1);
        let inner = powi(params.d, -(k as i32));
        let probes = space.carrier_net(x, outer, probe_frac * inner);
        let mut any = false;
        let mut hit = false;
        for y in &probes {
            let d = space.distance(x, y);
            if d > inner && d <= outer {
                any = true;
                if set.dist_bounds(y).0 >= params.rho * d {
                    hit = true;
                    break;
                }
            }
        }
        psi.push(hit as u8);
        empty.push(!any);
    }
    let mut s = Vec::with_capacity(psi.len());
    let mut acc = 0u32;
    for &v in &psi {
        acc += v as u32;
        s.push(acc);
    }
    let pass = (params.n0..=n_max).all(|n| s[n as usize - 1] as f64 >= params.p * n as f64);
    Ok(MeanPorosityReport { psi, empty, s, pass })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeanCase {
    Doubling,
    Regular,
}

/// `l = (a/b)^(1/s) / 2` and `D = 2 / ((1 - l) l^2)` for regular measures.
pub fn regular_annulus_ratio(c: &StructureConstants) -> (f64, f64) {
    let l = 0.5 * powf(c.a_mu / c.b_mu, 1.0 / c.s);
    (l, 2.0 / ((1.0 - l) * l * l))
}

/// Mean-porosity parameters implied by uniform `rho`-porosity below `r_p`.
///
/// In the regular case `d` is ignored and `k0` also respects `r_mu`.
pub fn uniform_to_mean(
    rho: f64,
    d: f64,
    constants: &StructureConstants,
    case: MeanCase,
    r_p: f64,
) -> Result<MeanPorosityParams> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(invalid("rho must lie in (0, 1)"));
    }
    if !(r_p > 0.0) {
        return Err(invalid("r_p must be positive"));
    }
    let smallest_k0 = |d: f64, bound: f64| -> u32 {
        let mut k = 0u32;
        while powi(d, -(k as i32)) >= bound {
            k += 1;
        }
        k
    };
    let params = match case {
        MeanCase::Doubling => {
            if !(d > 1.0) {
                return Err(invalid("annulus ratio D must exceed 1"));
            }
            let f = snapped_floor(ln(rho) / ln(d));
            MeanPorosityParams { rho, d, p: -0.5 / f, n0: (-f) as u32, k0: smallest_k0(d, r_p) }
        }
        MeanCase::Regular => {
            let (l, d) = regular_annulus_ratio(constants);
            let bound = r_p.min(constants.r_mu);
            MeanPorosityParams { rho: l * l * rho / 3.0, d, p: 1.0, n0: 1, k0: smallest_k0(d, bound) }
        }
    };
    params.validate()?;
    Ok(params)
}
