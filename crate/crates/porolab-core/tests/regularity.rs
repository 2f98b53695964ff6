use porolab_core::math::{Ratio, Rational};
use porolab_core::metric::MetricSpace;
use porolab_core::point::Point;
use porolab_core::regularity::*;
use porolab_core::spaces::{CantorSet, CantorSpec, IntervalSpace};
use porolab_core::target::{Singleton, TargetSet};
use porolab_core::StructureConstants;
use std::sync::Arc;

#[test]
fn builder_params_examples() {
    let p = builder_params(1.0, 0.5, 1.0, 2.0).unwrap();
    assert_eq!(p.c1, 1.0 / 64.0);
    assert_eq!(p.d, 2f64.powi(-14));
    assert_eq!(p.m, 128);
    assert_eq!(p.d1, 2f64.powi(-14));

    let p = builder_params(1.0, 0.5, 1.0, 1.0).unwrap();
    assert_eq!(p.c1, 1.0 / 16.0);
    assert_eq!(p.d, 2f64.powi(-10));
    assert_eq!(p.m, 32);
    assert_eq!(p.d1, 2f64.powi(-10));
}

#[test]
fn d1_is_exact_for_reciprocal_integer_exponents() {
    for (t, m) in [(0.5, 128u128), (1.0 / 3.0, 0), (0.25, 0)] {
        let p = builder_params(1.0, t, 1.0, 2.0).unwrap();
        let d1 = p.d1_exact().expect("1/t is an integer");
        let q = (1.0 / t).round() as usize;
        // d1^t = 1/M  <=>  d1 = M^-q
        assert_eq!(d1, Ratio::new(1, (p.m as u128).pow(q as u32)));
        if m != 0 {
            assert_eq!(p.m as u128, m);
        }
    }
}

fn param_invariants(p: &BuilderParams) {
    let (s, t, d) = (p.s, p.t, p.d);
    assert!(d < 0.1 * 2f64.powf(-1.0 / t));
    assert!(d.powf(s - t) <= p.c1 / 2.0 * (1.0 + 1e-12));
    assert!(d.powf(t) <= 0.5 * (1.0 + 1e-12));
    let m = p.m as f64;
    assert!(d.powf(-t) - 0.5 <= m && m < d.powf(-t) + 0.5);
    assert!((p.d1.powf(t) * m - 1.0).abs() < 1e-12);
    // the doubled seed no longer qualifies, so d is the largest power of 1/2
    let d2 = 2.0 * d;
    assert!(
        !(d2 < 0.1 * 2f64.powf(-1.0 / t) && d2.powf(s - t) <= p.c1 / 2.0 && d2.powf(t) <= 0.5),
        "{p:?}"
    );
}

#[test]
fn builder_params_invariants_over_a_grid() {
    for s in [0.5, 1.0, 2.0] {
        for frac in [0.1, 0.3, 0.5, 0.7] {
            for (a, b) in [(1.0, 1.0), (1.0, 2.0), (0.5, 3.0)] {
                let p = builder_params(s, frac * s, a, b).unwrap();
                param_invariants(&p);
            }
        }
    }
    assert!(builder_params(1.0, 1.0, 1.0, 1.0).is_err());
    assert!(builder_params(1.0, 0.5, 2.0, 1.0).is_err());
}

fn unit() -> IntervalSpace {
    IntervalSpace::unit()
}

#[test]
fn tree_on_the_unit_interval_has_exact_mass_and_structure() {
    let space = unit();
    let z = Point::Line(0.5);
    let r = 0.25;
    let tree = build_regular_measure(&space, &z, r, 0.5, 2).unwrap();
    let m = tree.branching() as usize;
    assert_eq!(m, 128);
    assert_eq!(tree.levels[1].len(), m);
    assert_eq!(tree.levels[2].len(), m * m);
    // total mass on B(z, 2R)
    assert_eq!(tree.mass_in_ball(&space, &z, 2.0 * r), 0.5);
    assert_eq!(tree.total_mass(), r.sqrt());

    let d1 = tree.params.unwrap().d1;
    for k in 1..tree.levels.len() {
        let level = &tree.levels[k];
        let parents = &tree.levels[k - 1];
        // first child is the parent centre
        for (i, p) in parents.iter().enumerate() {
            let kids: Vec<_> = level.iter().filter(|n| n.parent as usize == i).collect();
            assert_eq!(kids.len(), m);
            assert_eq!(kids[0].center, p.center);
            let reach = d1.powi(k as i32 - 1) * r;
            assert!(kids.iter().all(|c| space.distance(&c.center, &p.center) <= reach));
        }
        // exact weights: M children of weight M^-k sum to the parent weight
        let w = tree.node_weight(k as u32) * Ratio::from_integer(m as u128);
        assert_eq!(w, tree.node_weight(k as u32 - 1));
        // disjoint packing balls of radius 2^(1+1/t) d d1^(k-1) R
        let rho = tree.params.unwrap().packing_radius(k as u32, r);
        let mut xs: Vec<f64> = level.iter().map(|n| n.center.line().unwrap()).collect();
        xs.sort_by(f64::total_cmp);
        assert!(xs.windows(2).all(|w| w[1] - w[0] > 2.0 * rho));
    }
    let total: Ratio<u128> = (0..tree.levels[2].len()).map(|_| tree.node_weight(2)).sum();
    assert_eq!(total, Ratio::from_integer(1));
}

#[test]
fn level_one_subtrees_carry_equal_mass() {
    let space = unit();
    let tree = build_regular_measure(&space, &Point::Line(0.5), 0.25, 0.5, 2).unwrap();
    let m = tree.branching() as f64;
    let leaf = tree.leaf_mass();
    for i in 0..tree.levels[1].len() {
        let n = tree.levels[2].iter().filter(|l| l.parent as usize == i).count();
        assert_eq!(n as f64 * leaf, tree.total_mass() / m);
    }
}

/// Leaf-sum oracle: brute-force count over all leaves.
fn leaf_sum(tree: &RegularMeasureTree, x: f64, r: f64) -> f64 {
    let n = tree.leaves().iter().filter(|l| (l.center.line().unwrap() - x).abs() <= r).count();
    n as f64 * tree.leaf_mass()
}

#[test]
fn predicted_bounds_hold_in_the_valid_window() {
    let space = unit();
    let tree = build_regular_measure(&space, &Point::Line(0.5), 0.25, 0.5, 2).unwrap();
    let (lo, hi) = tree.valid_window();
    let scales: Vec<f64> = (0..12).map(|i| lo * (hi / lo).powf(i as f64 / 11.0)).collect();
    let sample: Vec<Point> = tree.leaves().iter().step_by(97).map(|l| l.center).collect();
    for x in &sample {
        for &r in &scales {
            assert_eq!(tree.mass_in_ball(&space, x, r), leaf_sum(&tree, x.line().unwrap(), r));
        }
    }
    let rep = verify_regularity(
        |x, r| tree.mass_in_ball(&space, x, r),
        |_| true,
        &sample,
        0.5,
        &scales,
        tree.predicted_bounds(),
        0.1,
    );
    assert!(rep.pass, "{rep:?}");
    assert!(rep.a_emp > 0.0 && rep.b_emp.is_finite());
}

#[test]
fn regularity_of_the_middle_thirds_measure() {
    let spec = CantorSpec::new(2, Rational::new(1, 3), 12);
    let set = CantorSet::new(spec).unwrap();
    let geom = porolab_core::spaces::CantorGeometry::new(spec).unwrap();
    let t = 2f64.ln() / 3f64.ln();
    let (pts, _) = set.net(1e-3);
    let sample: Vec<Point> = pts.iter().step_by(31).copied().collect();
    let scales: Vec<f64> = (2..9).map(|k| 3f64.powi(-k)).collect();
    let rep = verify_regularity(
        |x, r| {
            let c = x.line().unwrap();
            geom.natural_measure(c - r, c + r)
        },
        |x| set.dist_bounds(x).0 == 0.0,
        &sample,
        t,
        &scales,
        None,
        0.0,
    );
    assert!(rep.pass);
    // self-similar masses give ratios in [2^-1, 2]
    assert!(rep.a_emp >= 0.5 - 1e-9 && rep.b_emp <= 2.0 + 1e-9, "{rep:?}");
    assert_eq!(rep.skipped, 0);
}

#[test]
fn off_support_points_are_skipped() {
    let rep = verify_regularity(|_, r| r, |x| x.line().unwrap() < 0.5, &[Point::Line(0.1), Point::Line(0.9)], 1.0, &[0.1], None, 0.0);
    assert_eq!(rep.skipped, 1);
    assert_eq!(rep.evaluated, 1);
}

#[test]
fn unreachable_seed_ratio_is_rejected() {
    let space = unit();
    let err = build_regular_measure(&space, &Point::Line(0.5), 0.25, 0.999, 1).unwrap_err();
    assert!(matches!(err, porolab_core::PoroError::InvalidArgument(_)));
}

/// Grid of spacing 1/100 that claims to be 1-regular.
#[derive(Debug)]
struct SparseGrid;

impl MetricSpace for SparseGrid {
    fn name(&self) -> String {
        "sparse".into()
    }
    fn distance(&self, a: &Point, b: &Point) -> f64 {
        (a.line().unwrap() - b.line().unwrap()).abs()
    }
    fn ball_measure(&self, _x: &Point, r: f64) -> f64 {
        2.0 * r
    }
    fn carrier_net(&self, c: &Point, r: f64, _eps: f64) -> Vec<Point> {
        let c = c.line().unwrap();
        (0..=100).map(|i| i as f64 / 100.0).filter(|x| (x - c).abs() <= r).map(Point::Line).collect()
    }
    fn constants(&self) -> StructureConstants {
        StructureConstants::regular(1.0, 1.0, 1.0, 1.0, 2.0).unwrap()
    }
    fn anchor(&self) -> (Point, f64) {
        (Point::Line(0.5), 0.5)
    }
    fn contains(&self, p: &Point) -> bool {
        p.line().is_some()
    }
}

#[test]
fn construction_failure_names_the_node() {
    let err = build_regular_measure(&SparseGrid, &Point::Line(0.5), 0.1, 0.5, 1).unwrap_err();
    match err {
        porolab_core::PoroError::ConstructionFailure(m) => assert!(m.contains("level 1 node 0"), "{m}"),
        e => panic!("{e}"),
    }
}

#[test]
fn forward_bound_example() {
    let amb = StructureConstants::regular(1.0, 1.0, 2.0, 1.0, 2.0).unwrap();
    let f = porosity_from_regularity(&amb, 0.5, 0.25, 4.0, 1.0).unwrap();
    assert!((f.k - 13.0).abs() < 1e-9);
    assert_eq!(f.rho_bound, 2f64.powi(-17));
    assert_eq!(f.r_window, 0.5);
    assert!(porosity_from_regularity(&amb, 1.0, 0.25, 4.0, 1.0).is_err());
}

#[test]
fn forward_bound_degrades_as_t_approaches_s() {
    let amb = StructureConstants::regular(1.0, 1.0, 1.0, 1.0, 2.0).unwrap();
    let mut last = f64::INFINITY;
    for t in [0.5, 0.9, 0.99, 0.999] {
        let f = porosity_from_regularity(&amb, t, 1.0, 1.0, 1.0).unwrap();
        assert!(f.rho_bound <= last);
        last = f.rho_bound;
    }
    assert!(last < 1e-300 || last < 2f64.powi(-1000));
}

#[test]
fn middle_thirds_passes_the_forward_certificate() {
    let space = unit();
    let amb = space.constants();
    let spec = CantorSpec::new(2, Rational::new(1, 3), 12);
    let set = CantorSet::new(spec).unwrap();
    let t = 2f64.ln() / 3f64.ln();
    // ratios of the natural measure lie in [1/2, 2]
    let f = porosity_from_regularity(&amb, t, 0.5, 2.0, 1.0).unwrap();
    let (pts, _) = set.net(1e-3);
    let sample: Vec<Point> = pts.iter().step_by(61).copied().collect();
    let scales = [0.2, 0.05, 0.01];
    let cert = porolab_core::porosity::uniform_porosity_certificate(&space, &set, f.por_rho(), f.r_window, &sample, &scales, 0.01).unwrap();
    assert!(cert.pass);
    assert!(cert.min_lo > 100.0 * f.por_rho());
}

#[test]
fn envelope_of_a_singleton() {
    let space = unit();
    let handle: porolab_core::SpaceHandle = Arc::new(unit());
    let set = Singleton::new(handle, Point::Line(0.0));
    let opts = EnvelopeOptions { allow_t_override: true, ..Default::default() };
    let env = regular_envelope(&space, &set, 0.25, 0.5, 0.5, 3, &opts).unwrap();
    assert_eq!(env.gamma, 0.05);
    for level in &env.levels {
        assert_eq!(level.len(), 1);
        assert_eq!(level[0].anchor, Point::Line(0.0));
        assert!(level[0].center.line().unwrap() > 0.0);
    }
    env.verify_disjointness(&space, &set).unwrap();
    assert!(env.min_separation_ratio(&set) >= 3.0 - 1e-9);
}

#[test]
fn envelope_rejects_overstated_porosity() {
    let space = unit();
    let set = porolab_core::target::IntervalSet::new("half", vec![(0.0, 0.5)]);
    let opts = EnvelopeOptions { allow_t_override: true, ..Default::default() };
    let err = regular_envelope(&space, &set, 0.4, 0.5, 0.5, 2, &opts).unwrap_err();
    assert!(matches!(err, porolab_core::PoroError::CertificateViolation(_)), "{err}");
}

#[test]
fn envelope_requires_an_override_below_s_minus_delta() {
    let space = unit();
    let handle: porolab_core::SpaceHandle = Arc::new(unit());
    let set = Singleton::new(handle, Point::Line(0.0));
    let err = regular_envelope(&space, &set, 0.25, 0.5, 0.5, 1, &EnvelopeOptions::default()).unwrap_err();
    assert!(matches!(err, porolab_core::PoroError::InvalidArgument(_)));
}
