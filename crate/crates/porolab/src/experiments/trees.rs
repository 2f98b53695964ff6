use std::sync::Arc;

use porolab_core::dimension::minkowski_dim_estimate;
use porolab_core::math::Rational;
use porolab_core::porosity::porosity_at_scale;
use porolab_core::{MeasureKind, MetricSpace, SpaceHandle};

use super::{boundary_of, boundary_sample, ratio_text, tol, tree_from};
use crate::config::{ExperimentConfig, ScaleSpec};
use crate::error::LabResult;
use crate::report::{Cell, Report};
use crate::sampling::Sampler;

const CURVE_COLUMNS: [&str; 6] = ["r", "pack_lower", "cover_upper", "log_inv_r", "log_pack", "log_cover"];

fn curve_rows(report: &mut Report, curve: &porolab_core::dimension::CoverCurve) {
    for row in &curve.rows {
        report.row(
            vec![
                row.r.into(),
                row.pack_lower.into(),
                row.cover_upper.into(),
                (1.0 / row.r).ln().into(),
                (row.pack_lower.max(1) as f64).ln().into(),
                (row.cover_upper.max(1) as f64).ln().into(),
            ],
            true,
        );
    }
}

/// Tolerances: `slope_half_width` (0.05).
pub fn tree_dim(cfg: &ExperimentConfig) -> LabResult<Report> {
    let tree = tree_from(cfg, Rational::new(1, 2), 12)?;
    let boundary = boundary_of(&tree);
    let expected = 2f64.ln() / (1.0 / tree.geom.lambda).ln();
    let scales = cfg.fit_scales_or(ScaleSpec::geometric(0.5f64.powi(10), 0.5f64.powi(3), 8))?;
    let handle: SpaceHandle = Arc::new(tree.clone());
    let curve = minkowski_dim_estimate(&handle, &boundary, &scales)?;

    let mut rep = Report::new("tree-dim", super::find("tree-dim").unwrap().claim, cfg, CURVE_COLUMNS.to_vec());
    curve_rows(&mut rep, &curve);
    let half = 0.5 * (curve.slope_hi - curve.slope_lo);
    rep.set("space", tree.name());
    rep.set("expected", expected);
    rep.set("slope_lo", curve.slope_lo);
    rep.set("slope_hi", curve.slope_hi);
    rep.set("ci", half);
    rep.set("slope_pack", curve.fit_lower.slope);
    rep.set("slope_cover", curve.fit_upper.slope);
    rep.set("fit_window", vec![curve.fit_window.0, curve.fit_window.1]);
    rep.set("net_size", curve.net_size);
    rep.check("interval_contains_expected", curve.slope_lo <= expected && expected <= curve.slope_hi);
    rep.check("half_width", half <= tol(cfg, "slope_half_width", 0.05));
    Ok(rep)
}

/// Tolerances: `por_lo` (0.45), `por_hi_slack` (0.01), `probe_frac` (1/256).
pub fn tree_por(cfg: &ExperimentConfig) -> LabResult<Report> {
    let tree = tree_from(cfg, Rational::new(1, 2), 14)?;
    let boundary = boundary_of(&tree);
    let mut sampler = Sampler::new(cfg.seed);
    let sample = boundary_sample(&tree, cfg.sample_or(50), &mut sampler);
    let scales = cfg.scales_or(ScaleSpec::geometric(0.5f64.powi(10), 0.25, 9));
    let probe = cfg.resolution_or(tol(cfg, "probe_frac", 1.0 / 256.0));
    let (need_lo, slack) = (tol(cfg, "por_lo", 0.45), tol(cfg, "por_hi_slack", 0.01));

    let mut rep = Report::new(
        "tree-por",
        super::find("tree-por").unwrap().claim,
        cfg,
        vec!["x_id", "r", "lo", "hi", "variant", "resolution"],
    );
    let (mut min_lo, mut max_hi) = (f64::INFINITY, 0.0f64);
    for (i, x) in sample.iter().enumerate() {
        for &r in &scales {
            let iv = porosity_at_scale(&tree, &boundary, x, r, probe * r)?;
            min_lo = min_lo.min(iv.lo);
            max_hi = max_hi.max(iv.hi);
            let ok = iv.lo >= need_lo && iv.hi <= 0.5 + slack;
            rep.row(
                vec![i.into(), r.into(), iv.lo.into(), iv.hi.into(), iv.variant.as_str().into(), iv.resolution.into()],
                ok,
            );
        }
    }
    rep.set("space", tree.name());
    rep.set("min_lo", min_lo);
    rep.set("max_hi", max_hi);
    rep.set("samples", sample.len());
    super::record_sample(&mut rep, &sample);
    Ok(rep)
}

/// Tolerances: `por_lo` (0.45), `probe_frac` (1/128).
pub fn lambda_sweep(cfg: &ExperimentConfig) -> LabResult<Report> {
    let lambdas = [Rational::new(1, 3), Rational::new(2, 5), Rational::new(9, 20), Rational::new(1, 2)];
    let need_lo = tol(cfg, "por_lo", 0.45);
    let probe = cfg.resolution_or(tol(cfg, "probe_frac", 1.0 / 128.0));
    let mut sampler = Sampler::new(cfg.seed);
    let mut rep = Report::new(
        "tree-lambda-sweep",
        super::find("tree-lambda-sweep").unwrap().claim,
        cfg,
        vec!["lambda", "kind", "expected_dim", "slope", "slope_lo", "slope_hi", "por_min_lo"],
    );
    let mut slopes = Vec::new();
    for lam in lambdas {
        let tree = tree_from(&ExperimentConfig::default(), lam, 12)?;
        let boundary = boundary_of(&tree);
        let l = tree.geom.lambda;
        // scales span the same number of tree levels for every lambda
        let scales: Vec<f64> = (2..=9).map(|k| l.powi(k)).collect();
        let handle: SpaceHandle = Arc::new(tree.clone());
        let curve = minkowski_dim_estimate(&handle, &boundary, &scales)?;
        let slope = 0.5 * (curve.fit_lower.slope + curve.fit_upper.slope);
        let sample = boundary_sample(&tree, cfg.sample_or(20), &mut sampler);
        let mut por = f64::INFINITY;
        for x in &sample {
            for &r in &scales[..scales.len() - 1] {
                por = por.min(porosity_at_scale(&tree, &boundary, x, r, probe * r)?.lo);
            }
        }
        let kind = match tree.constants().kind {
            MeasureKind::Regular => "regular",
            MeasureKind::DoublingOnly => "doubling-only",
        };
        rep.row(
            vec![
                Cell::Text(ratio_text(lam)),
                kind.into(),
                (2f64.ln() / (1.0 / l).ln()).into(),
                slope.into(),
                curve.slope_lo.into(),
                curve.slope_hi.into(),
                por.into(),
            ],
            por >= need_lo,
        );
        slopes.push(slope);
    }
    let increasing = slopes.windows(2).all(|w| w[1] > w[0]);
    rep.check("slope_increases_with_lambda", increasing);
    rep.check("slope_reaches_one", (slopes[slopes.len() - 1] - 1.0).abs() <= 0.05);
    rep.note("at lambda = 1/2 the ambient measure is only doubling, so porosity no longer forces a dimension drop");
    Ok(rep)
}
