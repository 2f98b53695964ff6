use porolab_core::math::Rational;
use porolab_core::porosity::uniform_porosity_certificate;
use porolab_core::regularity::{
    build_regular_measure, porosity_from_regularity, regular_envelope, verify_regularity, EnvelopeOptions,
    RegularMeasureTree,
};
use porolab_core::spaces::{CantorSpec, IntervalSpace};
use porolab_core::target::IntervalSet;
use porolab_core::{MetricSpace, Point};

use super::{cantor_from, set_sample, tol};
use crate::config::ExperimentConfig;
use crate::error::{LabError, LabResult};
use crate::report::Report;
use crate::sampling::Sampler;
use crate::treefile;

pub(crate) struct Built {
    pub space: IntervalSpace,
    pub tree: RegularMeasureTree,
}

/// Tree on `[0, 1]` centred at 1/2 with `R = 1/4`.
fn build(cfg: &ExperimentConfig) -> LabResult<Built> {
    let space = match &cfg.space {
        None => IntervalSpace::unit(),
        Some(porolab_core::spaces::SpaceSpec::Interval { lo, hi }) => IntervalSpace::new(*lo, *hi)?,
        Some(other) => return Err(LabError::Config(format!("the builder runs on an interval, got {other:?}"))),
    };
    let (c, r) = space.anchor();
    let t = tol(cfg, "t", 0.5);
    let k_max = tol(cfg, "k_max", 2.0) as u32;
    let tree = build_regular_measure(&space, &c, r / 2.0, t, k_max)?;
    Ok(Built { space, tree })
}

/// Extreme mass ratios over seeded `(leaf, radius)` pairs in the valid window.
struct Sampled {
    a: f64,
    b: f64,
    pairs: Vec<(usize, f64, f64)>,
}

fn sample_ratios(b: &Built, n: usize, sampler: &mut Sampler) -> Sampled {
    let leaves: Vec<Point> = b.tree.leaves().iter().map(|l| l.center).collect();
    let (lo, hi) = b.tree.valid_window();
    let mut out = Sampled { a: f64::INFINITY, b: 0.0, pairs: Vec::with_capacity(n) };
    for _ in 0..n {
        let i = sampler.below(leaves.len() as u64) as usize;
        let r = sampler.log_uniform(lo, hi);
        let rep = verify_regularity(
            |x, r| b.tree.mass_in_ball(&b.space, x, r),
            |_| true,
            &leaves[i..=i],
            b.tree.t,
            &[r],
            None,
            0.0,
        );
        out.a = out.a.min(rep.a_emp);
        out.b = out.b.max(rep.b_emp);
        out.pairs.push((i, r, rep.a_emp));
    }
    out
}

/// Tolerances: `t` (0.5), `k_max` (2), `leaf_truncation` (0.1).
pub fn build_regular(cfg: &ExperimentConfig) -> LabResult<Report> {
    let b = build(cfg)?;
    let tree = &b.tree;
    let m = tree.branching();
    let (pa, pb) = tree.predicted_bounds().expect("built trees carry parameters");
    let slack = tol(cfg, "leaf_truncation", 0.1);
    let mut sampler = Sampler::new(cfg.seed);
    let s = sample_ratios(&b, cfg.sample_or(1000), &mut sampler);

    let mut rep = Report::new(
        "build-regular",
        super::find("build-regular").unwrap().claim,
        cfg,
        vec!["pair_id", "leaf_id", "r", "ratio", "within_prediction"],
    );
    for (j, &(i, r, q)) in s.pairs.iter().enumerate() {
        let ok = q >= pa * (1.0 - slack) && q <= pb * (1.0 + slack);
        rep.row(vec![j.into(), i.into(), r.into(), q.into(), ok.into()], ok);
    }

    // exact bookkeeping: every parent has M children and M child weights make the parent weight
    let mut levels = Vec::new();
    let mut conserved = true;
    for k in 1..=tree.k_max {
        let nodes = &tree.levels[k as usize];
        let mut counts = vec![0u64; tree.levels[k as usize - 1].len()];
        for n in nodes {
            counts[n.parent as usize] += 1;
        }
        let weights_ok = tree.node_weight(k) * num_rational::Ratio::from_integer(m as u128) == tree.node_weight(k - 1);
        let ok = weights_ok && counts.iter().all(|&c| c == m);
        conserved &= ok;
        levels.push(serde_json::json!({
            "level": k,
            "nodes": nodes.len(),
            "weight": format!("{}", tree.node_weight(k)),
            "radius": tree.node_radius(k),
            "conserved": ok,
        }));
    }
    let leaf_count = tree.leaves().len();
    let total = tree.node_weight(tree.k_max) * num_rational::Ratio::from_integer(leaf_count as u128);
    let outer = tree.leaves_within(&b.space, &tree.center(), 2.0 * tree.radius);
    rep.check("mass_conserved", conserved);
    rep.check("outer_ball_exact", total == num_rational::Ratio::from_integer(1) && outer == leaf_count);
    rep.check("leaf_count", leaf_count as u128 == (m as u128).pow(tree.k_max));
    let p = tree.params.expect("parameters");
    rep.set("t", tree.t);
    rep.set("radius", tree.radius);
    rep.set("m", m);
    rep.set("d1", p.d1);
    rep.set("c1", p.c1);
    rep.set("d", p.d);
    rep.set("leaves", leaf_count);
    rep.set("outer_ball_mass", tree.total_mass());
    rep.set("predicted_a", pa);
    rep.set("predicted_b", pb);
    rep.set("a_emp", s.a);
    rep.set("b_emp", s.b);
    rep.set("valid_window", vec![tree.valid_window().0, tree.valid_window().1]);
    rep.set("levels", levels);
    let doc = treefile::tree_json(tree);
    let mut text = serde_json::to_string(&doc).expect("tree json");
    text.push('\n');
    rep.attachments.push(("build-regular.tree.json".into(), text));
    Ok(rep)
}

/// Tolerances: `t` (0.5), `k_max` (2), `points` (500).
pub fn regular_to_porous(cfg: &ExperimentConfig) -> LabResult<Report> {
    let b = build(cfg)?;
    let tree = &b.tree;
    let mut sampler = Sampler::new(cfg.seed);
    let s = sample_ratios(&b, 1000, &mut sampler);
    let fb = porosity_from_regularity(&b.space.constants(), tree.t, s.a, s.b, tree.valid_window().1)?;
    let leaves: Vec<f64> = tree.leaves().iter().filter_map(|l| l.center.line()).collect();
    let set = IntervalSet::points("leaves", &leaves);
    let (lo, hi) = tree.valid_window();
    let top = hi.min(fb.r_window);
    let scales: Vec<f64> = porolab_core::checks::geometric_radii(2.0 * lo, top, 6);
    let pts: Vec<Point> = leaves.iter().map(|&x| Point::Line(x)).collect();
    let sample = sampler.choose(&pts, cfg.sample_or(tol(cfg, "points", 500.0) as usize));

    let mut rep = Report::new(
        "regular-to-porous",
        super::find("regular-to-porous").unwrap().claim,
        cfg,
        vec!["x_id", "x", "min_lo", "certified"],
    );
    let mut min_lo = f64::INFINITY;
    for (i, x) in sample.iter().enumerate() {
        let cert = uniform_porosity_certificate(&b.space, &set, fb.rho_bound, top * 1.01, &[*x], &scales, 0.01)?;
        min_lo = min_lo.min(cert.min_lo);
        rep.row(vec![i.into(), x.line().unwrap_or(f64::NAN).into(), cert.min_lo.into(), cert.pass.into()], cert.pass);
    }
    rep.set("a_emp", s.a);
    rep.set("b_emp", s.b);
    rep.set("k", fb.k);
    rep.set("level", fb.level);
    rep.set("rho", fb.rho_bound);
    rep.set("r_window", fb.r_window);
    rep.set("scales", scales);
    rep.set("min_lo", min_lo);
    Ok(rep)
}

/// Tolerances: `t` (0.8), `j_max` (3), `r_p` (0.25).
pub fn envelope(cfg: &ExperimentConfig) -> LabResult<Report> {
    let set = cantor_from(cfg, CantorSpec::new(4, Rational::new(1, 16), 9).centered())?;
    let space = IntervalSpace::unit();
    let t = tol(cfg, "t", 0.8);
    let j_max = tol(cfg, "j_max", 3.0) as u32;
    let r_p = tol(cfg, "r_p", 0.25);
    let factor = cfg.overrides.rho_prime_factor.unwrap_or(0.9);
    let mut sampler = Sampler::new(cfg.seed);
    let sample = set_sample(&set, 1e-4, cfg.sample_or(40), &mut sampler);
    let scales = porolab_core::checks::geometric_radii(r_p * 1e-3, r_p, 16);
    let measured = uniform_porosity_certificate(&space, &set, 0.0, r_p * 1.01, &sample, &scales, 1e-3)?.min_lo;
    let rho_prime = factor * measured;
    let opts = EnvelopeOptions { allow_t_override: true, c_b: cfg.overrides.c_b, ..EnvelopeOptions::default() };
    let env = regular_envelope(&space, &set, rho_prime, r_p, t, j_max, &opts)?;
    let disjoint = env.verify_disjointness(&space, &set);

    let atoms: Vec<Point> = env.atoms().iter().map(|(p, _)| *p).collect();
    let (w_lo, w_hi) = env.scale_window();
    let window = porolab_core::checks::geometric_radii(w_lo, w_hi, 6);
    let reg = verify_regularity(|x, r| env.mass_in_ball(&space, x, r), |_| true, &atoms, t, &window, None, 0.0);

    let mut rep = Report::new(
        "envelope",
        super::find("envelope").unwrap().claim,
        cfg,
        vec!["level", "index", "anchor", "center", "radius", "clearance", "kind", "leaves"],
    );
    for h in env.holes() {
        let kind = if h.tree.params.is_some() { "tree" } else { "atom" };
        rep.row(
            vec![
                h.level.into(),
                h.index.into(),
                h.anchor.line().unwrap_or(f64::NAN).into(),
                h.center.line().unwrap_or(f64::NAN).into(),
                h.radius.into(),
                h.clearance.into(),
                kind.into(),
                h.tree.leaves().len().into(),
            ],
            h.clearance >= h.radius,
        );
    }
    rep.check("holes_disjoint_from_set", disjoint.is_ok());
    rep.check("regularity_finite", reg.pass && reg.b_emp.is_finite() && reg.a_emp > 0.0);
    rep.set("measured_porosity", measured);
    rep.set("rho_prime", rho_prime);
    rep.set("gamma", env.gamma);
    rep.set("n0", env.n0);
    rep.set("t", t);
    rep.set("t_overridden", env.t_overridden);
    rep.set("delta", env.delta.delta);
    rep.set("scale_window", vec![w_lo, w_hi]);
    rep.set("a_emp", reg.a_emp);
    rep.set("b_emp", reg.b_emp);
    rep.set("b_over_a", reg.b_emp / reg.a_emp);
    rep.set("min_separation_ratio", env.min_separation_ratio(&set));
    rep.set("level_sizes", env.levels.iter().map(|l| l.len()).collect::<Vec<_>>());
    if env.t_overridden {
        rep.note("t lies below s - delta; the construction was run with the override");
    }
    if let Err(e) = disjoint {
        rep.note(e.to_string());
    }
    Ok(rep)
}
