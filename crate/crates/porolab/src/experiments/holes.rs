use std::sync::Arc;

use porolab_core::math::Rational;
use porolab_core::porosity::{
    mean_porosity_check, porosity_at_scale, star_porosity_at_scale, uniform_porosity_certificate, uniform_to_mean,
    MeanCase,
};
use porolab_core::spaces::{CantorSet, CantorSpec, IntervalSpace, SnowflakeSpace, SpiralSpace, SpiralSpec, ORIGIN};
use porolab_core::target::Singleton;
use porolab_core::{Point, SpaceHandle};

use super::{cantor_from, set_sample, tol, unit};
use crate::config::{ExperimentConfig, ScaleSpec};
use crate::error::LabResult;
use crate::report::Report;
use crate::sampling::Sampler;

/// Tolerances: `abs` (0.02).
pub fn snowflake_por(cfg: &ExperimentConfig) -> LabResult<Report> {
    let base: SpaceHandle = Arc::new(IntervalSpace::new(-1.0, 1.0)?);
    let scales = cfg.scales_or(ScaleSpec::geometric(0.1, 0.5, 3));
    let abs = tol(cfg, "abs", 0.02);
    let mut rep = Report::new(
        "snowflake-por",
        super::find("snowflake-por").unwrap().claim,
        cfg,
        vec!["eps", "r", "lo", "hi", "predicted", "abs_gap"],
    );
    for eps in [0.5, 0.25] {
        let sf: SpaceHandle = Arc::new(SnowflakeSpace::new(base.clone(), eps)?);
        let set = Singleton::new(sf.clone(), Point::Line(0.0));
        let predicted = 0.5f64.powf(eps);
        // the probe is fixed in the base metric, where nets are cheap
        let frac = cfg.resolution_or(1e-4).powf(eps);
        for &r in &scales {
            let iv = star_porosity_at_scale(sf.as_ref(), &set, &Point::Line(0.0), r, r * frac)?;
            let gap = (iv.lo - predicted).abs();
            rep.row(
                vec![eps.into(), r.into(), iv.lo.into(), iv.hi.into(), predicted.into(), gap.into()],
                gap <= abs && iv.hi + 1e-12 >= predicted,
            );
        }
    }
    Ok(rep)
}

/// Tolerances: `top` (0.9), smallest estimate required at the largest ray count.
pub fn spiral_por(cfg: &ExperimentConfig) -> LabResult<Report> {
    let r = cfg.scales.as_ref().map_or(0.5, |s| s.r_max);
    let mut rep = Report::new(
        "spiral-por",
        super::find("spiral-por").unwrap().claim,
        cfg,
        vec!["max_denominator", "r", "lo", "hi"],
    );
    let mut los = Vec::new();
    for m in [3u32, 6, 12, 24, 48] {
        let sp: SpaceHandle = Arc::new(SpiralSpace::new(SpiralSpec { max_denominator: m })?);
        let set = Singleton::new(sp.clone(), ORIGIN);
        let iv = star_porosity_at_scale(sp.as_ref(), &set, &ORIGIN, r, r * cfg.resolution_or(1.0 / 400.0))?;
        rep.row(vec![m.into(), r.into(), iv.lo.into(), iv.hi.into()], true);
        los.push(iv.lo);
    }
    rep.check("nondecreasing", los.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    rep.check("approaches_one", los[los.len() - 1] >= tol(cfg, "top", 0.9));
    Ok(rep)
}

/// Smallest porosity estimate of a centred Cantor set over one period of
/// scales at the first few levels, from the left end of every sampled piece.
fn cantor_set_porosity(set: &CantorSet, levels: u32, per_level: usize, probe: f64, sampler: &mut Sampler, k: usize) -> LabResult<(f64, f64)> {
    let space = IntervalSpace::unit();
    let lam = set.geom.lambda;
    let mut lo = f64::INFINITY;
    let mut hi = f64::INFINITY;
    for level in 0..levels {
        let pts = set_sample(set, set.geom.len(level + 1), k, sampler);
        for x in &pts {
            for i in 0..per_level {
                // r runs over (lam^(level+1), lam^level]
                let r = set.geom.len(level) * lam.powf(i as f64 / per_level as f64);
                let iv = porosity_at_scale(&space, set, x, r, probe * r)?;
                if iv.lo < lo {
                    lo = iv.lo;
                    hi = iv.hi;
                }
            }
        }
    }
    Ok((lo, hi))
}

/// Tolerances: `relative` (0.2).
pub fn cantor_asymptotics(cfg: &ExperimentConfig) -> LabResult<Report> {
    let t = 0.5;
    let rel = tol(cfg, "relative", 0.2);
    let mut sampler = Sampler::new(cfg.seed);
    let mut rep = Report::new(
        "cantor-por-asymptotics",
        super::find("cantor-por-asymptotics").unwrap().claim,
        cfg,
        vec!["n", "lambda", "predicted", "half_gap", "measured_lo", "measured_hi", "relative_gap"],
    );
    let mut measured = Vec::new();
    for n in [4u32, 8, 16] {
        let den = (n as u64).pow(2);
        let set = CantorSet::new(CantorSpec::new(n, Rational::new(1, den), 6).centered())?;
        let predicted = (1.0 - (n as f64).powf(1.0 - 1.0 / t)) / n as f64;
        let (lo, hi) = cantor_set_porosity(&set, 2, 12, cfg.resolution_or(2e-3), &mut sampler, cfg.sample_or(24))?;
        let gap = (lo - predicted).abs() / predicted;
        // a hole fits in a gap only with half the gap as radius
        let half_gap = 0.5 * set.geom.unit_gap();
        rep.row(
            vec![n.into(), (1.0 / den as f64).into(), predicted.into(), half_gap.into(), lo.into(), hi.into(), gap.into()],
            gap <= rel,
        );
        measured.push(lo);
    }
    rep.check("decreasing_in_n", measured.windows(2).all(|w| w[1] < w[0]));
    rep.note("largest holes have half the gap as radius, so measured values sit near half_gap");
    Ok(rep)
}

/// Tolerances: `rho` (0.12), the certified uniform porosity level.
pub fn mean_poro(cfg: &ExperimentConfig) -> LabResult<Report> {
    let set = cantor_from(cfg, CantorSpec::new(2, Rational::new(1, 3), 14))?;
    let space = unit();
    let rho = tol(cfg, "rho", 0.12);
    let mut sampler = Sampler::new(cfg.seed);
    let sample = set_sample(&set, 1e-3, cfg.sample_or(40), &mut sampler);
    let scales = cfg.scales_or(ScaleSpec::geometric(0.5 * 0.55f64.powi(11), 0.5 * 0.55, 11));
    let cert = uniform_porosity_certificate(space.as_ref(), &set, rho, 0.5, &sample, &scales, 1e-3)?;
    let c = space.constants();
    let dbl = uniform_to_mean(rho, 2.0, &c, MeanCase::Doubling, 0.5)?;
    let reg = uniform_to_mean(rho, 0.0, &c, MeanCase::Regular, 0.5)?;

    let mut rep = Report::new(
        "mean-poro",
        super::find("mean-poro").unwrap().claim,
        cfg,
        vec!["x_id", "k", "psi", "S", "threshold_pn"],
    );
    let mut failed_points = 0;
    for (i, x) in sample.iter().enumerate() {
        let m = mean_porosity_check(space.as_ref(), &set, x, &dbl, 10, 0.01)?;
        failed_points += usize::from(!m.pass);
        for (j, &psi) in m.psi.iter().enumerate() {
            let n = j + 1;
            let threshold = m.threshold(&dbl, n);
            let ok = n < dbl.n0 as usize || m.s[j] as f64 >= threshold;
            rep.row(vec![i.into(), (dbl.k0 as usize + n).into(), (psi as usize).into(), (m.s[j] as usize).into(), threshold.into()], ok);
        }
    }
    rep.check("uniform_certificate", cert.pass);
    rep.set("certificate_min_lo", cert.min_lo);
    rep.set("rho", rho);
    for (name, m) in [("doubling", dbl), ("regular", reg)] {
        rep.set(
            &format!("{name}_params"),
            serde_json::json!({ "rho": m.rho, "d": m.d, "p": m.p, "n0": m.n0, "k0": m.k0 }),
        );
    }
    rep.set("failed_points", failed_points);
    super::record_sample(&mut rep, &sample);
    Ok(rep)
}

