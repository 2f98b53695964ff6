use std::sync::Arc;

use porolab_core::math::Rational;
use porolab_core::metric::{MetricSpace, SpaceHandle};
use porolab_core::point::Point;
use porolab_core::porosity::*;
use porolab_core::spaces::*;
use porolab_core::target::{IntervalSet, Singleton, TargetSet};
use porolab_core::StructureConstants;

fn sym() -> IntervalSpace {
    IntervalSpace::new(-1.0, 1.0).unwrap()
}

fn origin_in_sym() -> Singleton {
    let h: SpaceHandle = Arc::new(sym());
    Singleton::new(h, Point::Line(0.0))
}

fn middle_thirds(depth: u32) -> CantorSet {
    CantorSet::new(CantorSpec::new(2, Rational::new(1, 3), depth)).unwrap()
}

#[test]
fn singleton_porosity_is_one_half() {
    let (space, set) = (sym(), origin_in_sym());
    for r in [1.0, 0.5, 0.1, 1e-3] {
        let iv = porosity_at_scale(&space, &set, &Point::Line(0.0), r, r / 100.0).unwrap();
        assert!(iv.lo >= 0.49 && iv.hi <= 0.5, "{iv:?}");
        assert!(!iv.degenerate);
    }
}

#[test]
fn whole_carrier_has_no_holes() {
    let space = IntervalSpace::unit();
    let set = IntervalSet::new("unit", vec![(0.0, 1.0)]);
    for x in [0.0, 0.3, 1.0] {
        let iv = porosity_at_scale(&space, &set, &Point::Line(x), 0.2, 0.002).unwrap();
        assert_eq!(iv.lo, 0.0);
    }
}

/// Continuous optimum of `min(dist(y, A), r - |x - y|) / r` over the gaps of
/// `A` inside `[0, 1]`, by dense search with step `h`; returns
/// `(value, h / r)` where the true optimum lies in `[value, value + h / r]`.
fn gap_optimum(gaps: &[(f64, f64)], x: f64, r: f64) -> (f64, f64) {
    let h = r * 1e-5;
    let mut best: f64 = 0.0;
    for &(a, b) in gaps {
        let (lo, hi) = (a.max(x - r), b.min(x + r));
        if hi <= lo {
            continue;
        }
        let n = ((hi - lo) / h).ceil() as usize;
        for i in 0..=n {
            let y = lo + (hi - lo) * i as f64 / n as f64;
            let f = (y - a).min(b - y).min(r - (x - y).abs());
            best = best.max(f);
        }
    }
    (best / r, h / r)
}

fn cantor_gaps(set: &CantorSet, level: u32) -> Vec<(f64, f64)> {
    let g = &set.geom;
    let mut ends: Vec<(f64, f64)> = g.starts(level).into_iter().map(|s| g.hull(s, level)).collect();
    ends.sort_by(|a, b| a.0.total_cmp(&b.0));
    ends.windows(2).map(|w| (w[0].1, w[1].0)).collect()
}

#[test]
fn middle_thirds_at_origin_unit_scale() {
    let space = IntervalSpace::unit();
    let set = middle_thirds(10);
    let iv = porosity_at_scale(&space, &set, &Point::Line(0.0), 1.0, 1e-3).unwrap();
    assert!(iv.lo >= 0.16, "{iv:?}");
    let (opt, step) = gap_optimum(&cantor_gaps(&set, 8), 0.0, 1.0);
    assert!(opt >= 1.0 / 6.0 - 1e-9);
    assert!(iv.lo <= opt + step + 1e-12);
}

#[test]
fn estimates_never_exceed_the_gap_optimum() {
    let space = IntervalSpace::unit();
    let set = middle_thirds(9);
    let gaps = cantor_gaps(&set, 9);
    let (net, _) = set.net(1e-3);
    for x in net.iter().step_by(41) {
        let x0 = x.line().unwrap();
        for r in [0.3, 0.07, 0.01] {
            let (opt, step) = gap_optimum(&gaps, x0, r);
            let iv = porosity_at_scale(&space, &set, x, r, r / 200.0).unwrap();
            // the set resolution enters through dist_bounds().0 only
            assert!(iv.lo <= opt + step + 1e-12, "x={x0} r={r}: {} > {opt}", iv.lo);
            assert!(iv.hi + 1e-12 >= opt.min(0.5) - 2.0 * step, "x={x0} r={r}: hi {} < {opt}", iv.hi);
        }
    }
}

#[test]
fn halving_the_probe_resolution_never_lowers_the_estimate() {
    let space = IntervalSpace::unit();
    let set = middle_thirds(9);
    let (net, _) = set.net(1e-2);
    for x in net.iter().step_by(7) {
        for r in [0.4, 0.05] {
            let mut last = 0.0;
            for k in 3..10 {
                let iv = porosity_at_scale(&space, &set, x, r, r * 0.5f64.powi(k)).unwrap();
                assert!(iv.lo >= last - 1e-15);
                last = iv.lo;
            }
        }
    }
}

#[test]
fn singleton_star_porosity_below_the_full_scale() {
    let (space, set) = (sym(), origin_in_sym());
    for r in [0.5, 0.1] {
        let iv = star_porosity_at_scale(&space, &set, &Point::Line(0.0), r, r / 200.0).unwrap();
        assert!(iv.hi <= 0.51 && iv.lo >= 0.49, "{iv:?}");
    }
    // at r = 1 the ball is the whole space and the hole can reach the end
    let iv = star_porosity_at_scale(&space, &set, &Point::Line(0.0), 1.0, 0.005).unwrap();
    assert!(iv.lo >= 0.99);
}

#[test]
fn snowflaked_singleton_star_porosity() {
    let base: SpaceHandle = Arc::new(sym());
    // probes are fixed in the base metric so the net stays small
    for (eps, want, frac) in [(0.5, 0.5f64.sqrt(), 0.01), (0.25, 0.5f64.powf(0.25), 0.1)] {
        let sf: SpaceHandle = Arc::new(SnowflakeSpace::new(base.clone(), eps).unwrap());
        let set = Singleton::new(sf.clone(), Point::Line(0.0));
        for r in [0.5, 0.2] {
            let iv = star_porosity_at_scale(sf.as_ref(), &set, &Point::Line(0.0), r, r * frac).unwrap();
            assert!((iv.lo - want).abs() <= 0.02 && iv.hi + 1e-12 >= want, "eps={eps} r={r}: {iv:?}");
        }
    }
}

#[test]
fn snowflake_maps_base_holes_to_holes() {
    let base: SpaceHandle = Arc::new(IntervalSpace::unit());
    let eps = 0.5;
    let sf = SnowflakeSpace::new(base.clone(), eps).unwrap();
    let set: Arc<dyn TargetSet> = Arc::new(middle_thirds(10));
    let sf_set = SnowflakeTarget::new(set.clone(), base.clone(), eps).unwrap();
    let x = Point::Line(0.0);
    for r in [0.3, 0.05] {
        let b = star_porosity_at_scale(base.as_ref(), set.as_ref(), &x, r, r / 400.0).unwrap();
        let y = b.witness.unwrap();
        // hole B(y, b.lo r) in the base is the hole B(y, (b.lo r)^eps) after the transform
        let rs = sf.distance(&x, &Point::Line(r));
        let hole = (b.lo * r).powf(eps);
        assert!(sf_set.dist_bounds(&y).0 + 1e-12 >= hole);
        assert!(sf.escape_distance(&x, rs, &y).unwrap() + 1e-12 >= hole);
        let s = star_porosity_at_scale(&sf, &sf_set, &x, rs, rs / 400.0).unwrap();
        let pred = hole / rs;
        assert!(s.lo + 0.02 >= pred && s.lo <= pred.max(b.hi.powf(eps)) + 0.02, "r={r}: {} vs {pred}", s.lo);
    }
}

#[test]
fn spiral_origin_star_porosity_grows_with_the_denominator() {
    let mut vals = Vec::new();
    for m in [3, 6, 12, 24, 48] {
        let sp: SpaceHandle = Arc::new(SpiralSpace::new(SpiralSpec { max_denominator: m }).unwrap());
        let set = Singleton::new(sp.clone(), ORIGIN);
        let iv = star_porosity_at_scale(sp.as_ref(), &set, &ORIGIN, 0.5, 0.5 / 400.0).unwrap();
        vals.push(iv.lo);
    }
    assert!(vals.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{vals:?}");
    assert!(vals[vals.len() - 1] > 0.9, "{vals:?}");
}

#[test]
fn por_star_sandwich_on_interval_sets() {
    let space = IntervalSpace::unit();
    let sets: Vec<Box<dyn TargetSet>> = vec![
        Box::new(middle_thirds(9)),
        Box::new(IntervalSet::points("pair", &[0.2, 0.7])),
        Box::new(IntervalSet::new("chunks", vec![(0.1, 0.2), (0.5, 0.55), (0.9, 1.0)])),
    ];
    for set in &sets {
        let (net, _) = set.net(0.01);
        for x in net.iter().step_by(5) {
            for r in [0.2, 0.05] {
                let p = porosity_at_scale(&space, set.as_ref(), x, r, r / 200.0).unwrap();
                let s = star_porosity_at_scale(&space, set.as_ref(), x, r, r / 200.0).unwrap();
                let p2 = porosity_at_scale(&space, set.as_ref(), x, 2.0 * r, r / 100.0).unwrap();
                assert!(p.lo <= s.hi + 1e-12, "{}: {p:?} {s:?}", set.label());
                assert!(s.lo <= 2.0 * p2.hi + 1e-12, "{}: {s:?} {p2:?}", set.label());
                assert!(p.hi <= 0.5);
            }
        }
    }
}

#[test]
fn profiles() {
    let (space, set) = (sym(), origin_in_sym());
    let scales: Vec<f64> = (1..12).map(|k| 0.5f64.powi(k)).collect();
    let prof = porosity_profile(&space, &set, &Point::Line(0.0), &scales, 0.01, Variant::Por).unwrap();
    assert!(prof.intervals.iter().all(|iv| iv.lo >= 0.49));
    assert!(prof.liminf_lo >= 0.49);
    assert_eq!(prof.window.0, scales[scales.len() - 1]);

    let space = IntervalSpace::unit();
    let set = middle_thirds(12);
    let scales: Vec<f64> = (1..9).map(|k| 3f64.powi(-k)).collect();
    let prof = porosity_profile(&space, &set, &Point::Line(0.0), &scales, 1e-3, Variant::Por).unwrap();
    assert!(prof.liminf_lo >= 0.16, "{prof:?}");

    let comb = CombSpace::new(12).unwrap();
    let scales: Vec<f64> = (1..9).map(|k| 0.5f64.powi(k)).collect();
    for y in [0.3, 0.5] {
        let prof = porosity_profile(&comb, &CombSpine, &Point::Plane(0.0, y), &scales, 0.01, Variant::Por).unwrap();
        assert!(prof.liminf_lo >= 1.0 / 3.0 - 0.02, "{prof:?}");
    }
    assert!(porosity_profile(&comb, &CombSpine, &Point::Plane(0.0, 0.5), &[0.1, 0.2], 0.01, Variant::Por).is_err());
}

#[test]
fn uniform_certificates() {
    let tree = TreeSpace::new(Rational::new(1, 2), 12).unwrap();
    let boundary = TreeBoundary::new(&tree);
    let (pts, _) = boundary.net(0.01);
    let sample: Vec<Point> = pts.into_iter().step_by(11).collect();
    let scales: Vec<f64> = (2..9).map(|k| 0.5f64.powi(k)).collect();
    let cert = uniform_porosity_certificate(&tree, &boundary, 0.45, 0.5, &sample, &scales, 1.0 / 256.0).unwrap();
    assert!(cert.pass, "{cert:?}");

    let space = IntervalSpace::unit();
    let full = IntervalSet::new("unit", vec![(0.0, 1.0)]);
    let cert = uniform_porosity_certificate(&space, &full, 0.01, 0.5, &[Point::Line(0.4)], &[0.1], 0.01).unwrap();
    assert!(!cert.pass);
    assert_eq!(cert.violations[0].x, Point::Line(0.4));

    let c = CantorSet::new(CantorSpec::new(4, Rational::new(1, 16), 7).centered()).unwrap();
    let (pts, _) = c.net(1e-4);
    let sample: Vec<Point> = pts.into_iter().step_by(13).collect();
    let scales: Vec<f64> = (2..14).map(|k| 0.25 * 0.6f64.powi(k)).collect();
    let cert = uniform_porosity_certificate(&space, &c, 0.15, 0.3, &sample, &scales, 1e-3).unwrap();
    assert!(cert.pass, "min_lo {}", cert.min_lo);
}

#[test]
fn uniform_to_mean_examples() {
    let c = StructureConstants::regular(1.0, 1.0, 1.0, 1.0, 2.0).unwrap();
    let m = uniform_to_mean(0.25, 2.0, &c, MeanCase::Doubling, 0.5).unwrap();
    assert_eq!((m.p, m.n0), (0.25, 2));
    let m = uniform_to_mean(0.5f64.powi(5), 2.0, &c, MeanCase::Doubling, 0.5).unwrap();
    assert_eq!((m.p, m.n0), (0.1, 5));
    let m = uniform_to_mean(0.3, 0.0, &c, MeanCase::Regular, 0.5).unwrap();
    assert_eq!(m.d, 16.0);
    assert!((m.rho - 0.3 / 12.0).abs() < 1e-15);
    assert_eq!((m.p, m.n0), (1.0, 1));
    // k0: first k with 16^-k below min(r_p, r_mu)
    assert_eq!(m.k0, 1);
    assert!(uniform_to_mean(1.0, 2.0, &c, MeanCase::Doubling, 0.5).is_err());
}

#[test]
fn mean_porosity_examples() {
    let (space, set) = (sym(), origin_in_sym());
    let params = MeanPorosityParams { rho: 0.25, d: 2.0, p: 1.0, n0: 1, k0: 1 };
    let rep = mean_porosity_check(&space, &set, &Point::Line(0.0), &params, 10, 0.05).unwrap();
    assert!(rep.psi.iter().all(|&v| v == 1));
    assert_eq!(rep.s[9], 10);
    assert!(rep.pass);

    let space = IntervalSpace::unit();
    let full = IntervalSet::new("unit", vec![(0.0, 1.0)]);
    let params = MeanPorosityParams { rho: 0.1, d: 2.0, p: 0.1, n0: 1, k0: 1 };
    let rep = mean_porosity_check(&space, &full, &Point::Line(0.5), &params, 8, 0.05).unwrap();
    assert!(rep.psi.iter().all(|&v| v == 0));
    assert!(!rep.pass);

    let set = middle_thirds(14);
    let c = space.constants();
    let params = uniform_to_mean(1.0 / 6.0, 2.0, &c, MeanCase::Doubling, 1.0).unwrap();
    let (pts, _) = set.net(1e-3);
    for x in pts.iter().step_by(17) {
        let rep = mean_porosity_check(&space, &set, x, &params, 10, 0.01).unwrap();
        assert!(rep.pass, "{x:?}: {:?}", rep.psi);
    }
}

#[test]
fn uniform_porosity_implies_mean_porosity() {
    let space = IntervalSpace::unit();
    let set = middle_thirds(14);
    let (pts, _) = set.net(1e-3);
    let sample: Vec<Point> = pts.into_iter().step_by(23).collect();
    let scales: Vec<f64> = (1..12).map(|k| 0.5 * 0.55f64.powi(k)).collect();
    let cert = uniform_porosity_certificate(&space, &set, 0.12, 0.5, &sample, &scales, 1e-3).unwrap();
    assert!(cert.pass, "{}", cert.min_lo);
    for rho in [0.05, 0.1, 0.11] {
        let params = uniform_to_mean(rho, 2.0, &space.constants(), MeanCase::Doubling, 0.5).unwrap();
        for x in &sample {
            let rep = mean_porosity_check(&space, &set, x, &params, 10, 0.01).unwrap();
            assert!(rep.pass, "rho={rho} x={x:?}");
        }
    }
}

#[test]
fn empty_annuli_are_flagged() {
    let space = SegmentStack::new(2).unwrap();
    let set = Singleton::new(Arc::new(SegmentStack::new(2).unwrap()), Point::Row { x: 0.0, row: 1 });
    // annuli beyond distance 1 hold nothing but the other rows, which sit at exactly 1
    let params = MeanPorosityParams { rho: 0.1, d: 2.0, p: 0.5, n0: 1, k0: 0 };
    let rep = mean_porosity_check(&space, &set, &Point::Row { x: 0.0, row: 1 }, &params, 3, 0.1).unwrap();
    assert_eq!(rep.empty.len(), 3);
    let _ = space.name();
}
