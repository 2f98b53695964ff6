use std::sync::Arc;

use porolab_core::approx::{covering_bracket, greedy_packing, FiniteApprox};
use porolab_core::dimension::*;
use porolab_core::math::Rational;
use porolab_core::metric::{MetricSpace, SpaceHandle};
use porolab_core::point::Point;
use porolab_core::porosity::{uniform_porosity_certificate, UniformCertificate};
use porolab_core::spaces::*;
use porolab_core::target::{IntervalSet, Singleton, TargetSet};
use porolab_core::PoroError;

fn unit() -> SpaceHandle {
    Arc::new(IntervalSpace::unit())
}

fn middle_thirds(depth: u32) -> CantorSet {
    CantorSet::new(CantorSpec::new(2, Rational::new(1, 3), depth)).unwrap()
}

fn quarter_cantor(depth: u32) -> CantorSet {
    CantorSet::new(CantorSpec::new(4, Rational::new(1, 16), depth).centered()).unwrap()
}

fn level_hulls(set: &CantorSet, level: u32) -> Vec<(f64, f64)> {
    let g = &set.geom;
    let mut v: Vec<(f64, f64)> = g.starts(level).into_iter().map(|s| g.hull(s, level)).collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    v
}

/// `|{y in [0,1] : dist(y, U) < r}|` for a sorted union `U` starting at 0 and
/// ending at 1, from the gaps alone.
fn gap_formula(hulls: &[(f64, f64)], r: f64) -> f64 {
    let first = hulls[0].0;
    let last = hulls[hulls.len() - 1].1;
    let full = (last + r).min(1.0) - (first - r).max(0.0);
    let lost: f64 = hulls.windows(2).map(|w| (w[1].0 - w[0].1 - 2.0 * r).max(0.0)).sum();
    full - lost
}

#[test]
fn two_point_neighbourhood() {
    let set = IntervalSet::points("ends", &[0.0, 1.0]);
    let (lo, hi) = neighborhood_measure(unit().as_ref(), &set, 0.1).unwrap();
    assert!((lo - 0.2).abs() < 1e-12 && (hi - 0.2).abs() < 1e-12);
    assert!(neighborhood_measure(unit().as_ref(), &set, 0.0).is_err());
}

#[test]
fn cantor_neighbourhood_matches_gap_sum_and_grid() {
    let set = middle_thirds(8);
    let r = 3f64.powi(-4) / 2.0;
    let (lo, hi) = neighborhood_measure(unit().as_ref(), &set, r).unwrap();
    let exact = gap_formula(&level_hulls(&set, 8), r);
    assert!((lo - exact).abs() < 1e-9 && (hi - exact).abs() < 1e-9, "{lo} {hi} {exact}");

    // midpoint rule on a 1e-6 grid; each of the 2^8 boundary pairs costs at most one cell
    let hulls = level_hulls(&set, 8);
    let h = 1e-6;
    let n = (1.0 / h) as usize;
    let mut j = 0;
    let mut count = 0usize;
    for i in 0..n {
        let y = (i as f64 + 0.5) * h;
        while j + 1 < hulls.len() && hulls[j].1 + r <= y {
            j += 1;
        }
        let near = |k: usize| {
            let (a, b) = hulls[k];
            if y < a { a - y } else if y > b { y - b } else { 0.0 }
        };
        let d = near(j).min(if j + 1 < hulls.len() { near(j + 1) } else { f64::INFINITY });
        if d < r {
            count += 1;
        }
    }
    let grid = count as f64 * h;
    assert!((grid - exact).abs() <= 2.0 * hulls.len() as f64 * h, "{grid} {exact}");
}

#[test]
fn neighbourhood_is_monotone_in_r() {
    let sets: Vec<Box<dyn TargetSet>> = vec![
        Box::new(middle_thirds(10)),
        Box::new(quarter_cantor(6)),
        Box::new(IntervalSet::points("three", &[0.1, 0.5, 0.55])),
    ];
    for set in &sets {
        let mut last = 0.0;
        for k in (1..40).rev() {
            let r = 0.7f64.powi(k);
            let (lo, hi) = neighborhood_measure(unit().as_ref(), set.as_ref(), r).unwrap();
            assert!(lo <= hi + 1e-15);
            assert!(hi + 1e-12 >= last, "{}", set.label());
            last = lo;
        }
    }
}

/// Branch-by-branch length within `r` of the boundary.
fn tree_boundary_oracle(lambda: f64, depth: u32, r: f64) -> f64 {
    let l_inf = lambda / (1.0 - lambda);
    let mut total = 0.0;
    let mut base = 0.0f64;
    for n in 1..=depth {
        let len = lambda.powi(n as i32);
        for _ in 0..(1u64 << n) {
            // points of this branch at distance < r from the boundary
            let cut = l_inf - r;
            let lo = base.max(cut);
            total += (base + len - lo).max(0.0);
        }
        base += len;
    }
    total
}

#[test]
fn tree_boundary_neighbourhood() {
    for (num, den) in [(1, 2), (2, 5)] {
        let tree = TreeSpace::new(Rational::new(num, den), 10).unwrap();
        let lambda = num as f64 / den as f64;
        let b = TreeBoundary::new(&tree);
        for n in 1..9 {
            let r = lambda.powi(n) * 1.3;
            let (lo, hi) = neighborhood_measure(&tree, &b, r).unwrap();
            let want = tree_boundary_oracle(lambda, 10, r);
            assert!((lo - want).abs() < 1e-9 * want.max(1.0) && lo == hi, "{lo} {want}");
        }
    }
    // for lambda 1/2 the boundary sits at distance 2^-n from every depth-n tip,
    // so r = 2^-n swallows every deeper branch whole
    let tree = TreeSpace::new(Rational::new(1, 2), 10).unwrap();
    let b = TreeBoundary::new(&tree);
    let (v, _) = neighborhood_measure(&tree, &b, 0.5f64.powi(3)).unwrap();
    let deeper: f64 = (4..=10).map(|k| (1u64 << k) as f64 * 0.5f64.powi(k)).sum();
    assert!((v - deeper).abs() < 1e-12);
}

#[test]
fn content_examples() {
    let full = IntervalSet::new("unit", vec![(0.0, 1.0)]);
    let big: SpaceHandle = Arc::new(IntervalSpace::new(-1.0, 2.0).unwrap());
    for r in [0.1, 0.01] {
        let (lo, hi) = content_mu(big.as_ref(), &full, r, 1.0).unwrap();
        assert!((lo - (1.0 + 2.0 * r)).abs() < 1e-12 && lo == hi);
    }
    let sym = IntervalSpace::new(-1.0, 1.0).unwrap();
    let origin = IntervalSet::points("origin", &[0.0]);
    for r in [0.5, 0.1, 1e-3] {
        let (lo, _) = content_mu(&sym, &origin, r, 0.0).unwrap();
        assert!((lo - 2.0).abs() < 1e-12);
    }
    let set = middle_thirds(12);
    let t = 2f64.ln() / 3f64.ln();
    let vals: Vec<f64> = (2..8).map(|m| content_mu(unit().as_ref(), &set, 3f64.powi(-m) / 2.0, t).unwrap().0).collect();
    for m in 2..8 {
        let r = 3f64.powi(-m) / 2.0;
        let exact = gap_formula(&level_hulls(&set, 12), r) / r.powf(1.0 - t);
        assert!((vals[m as usize - 2] - exact).abs() < 1e-9);
    }
    // bounded above and below uniformly in m
    let (mn, mx) = vals.iter().fold((f64::MAX, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    assert!(mn > 2.0 && mx < 3.0 && mx / mn < 1.25, "{vals:?}");

    let tree = TreeSpace::new(Rational::new(1, 2), 8).unwrap();
    let err = content_mu(&tree, &TreeBoundary::new(&tree), 0.1, 1.0).unwrap_err();
    assert!(matches!(err, PoroError::Unsupported(_)));
}

#[test]
fn sandwich_examples() {
    let full = IntervalSet::new("unit", vec![(0.0, 1.0)]);
    let rep = content_sandwich_check(&unit(), &full, 0.1, 1.0, 0.01).unwrap();
    assert!(rep.holds && rep.certified, "{rep:?}");
    // five intervals of length 0.2 are needed and suffice
    assert!(rep.count_lower <= 5 && 5 <= rep.count_upper && rep.count_upper <= 12, "{rep:?}");

    let set = middle_thirds(10);
    let t = 2f64.ln() / 3f64.ln();
    let rep = content_sandwich_check(&unit(), &set, 3f64.powi(-5), t, 0.05).unwrap();
    assert!(rep.holds, "{rep:?}");

    let ends = IntervalSet::points("ends", &[0.0, 1.0]);
    let rep = content_sandwich_check(&unit(), &ends, 0.1, 0.0, 0.1).unwrap();
    assert!(rep.count_lower <= 2 && 2 <= rep.count_upper);
    assert!(rep.holds && rep.certified);
}

#[test]
fn sandwich_sweep() {
    let t3 = 2f64.ln() / 3f64.ln();
    let cases: Vec<(Box<dyn TargetSet>, f64)> = vec![
        (Box::new(middle_thirds(12)), t3),
        (Box::new(quarter_cantor(7)), 0.5),
        (Box::new(IntervalSet::new("unit", vec![(0.0, 1.0)])), 1.0),
        (Box::new(IntervalSet::points("pts", &[0.05, 0.3, 0.31, 0.9])), 0.0),
    ];
    for (set, t) in &cases {
        for lambda in [0.0, *t, 1.0] {
            for k in 2..12 {
                let r = 0.5f64.powi(k);
                let rep = content_sandwich_check(&unit(), set.as_ref(), r, lambda, 0.05).unwrap();
                assert!(rep.holds, "{} lambda={lambda} r={r}: {rep:?}", set.label());
            }
        }
    }
}

#[test]
fn minkowski_estimates() {
    let set = middle_thirds(10);
    let scales: Vec<f64> = (2..=8).map(|m| 3f64.powi(-m)).collect();
    let curve = minkowski_dim_estimate(&unit(), &set, &scales).unwrap();
    let want = 2f64.ln() / 3f64.ln();
    assert!(curve.slope_lo <= want + 0.03 && curve.slope_hi >= want - 0.03);
    assert!(curve.fit_lower.slope.max(curve.fit_upper.slope) <= want + 0.03);
    assert!(curve.fit_lower.slope.min(curve.fit_upper.slope) >= want - 0.03, "{curve:?}");
    // counts against N(3^-m) = 2^m
    for row in &curve.rows {
        let m = (-row.r.ln() / 3f64.ln()).round() as i32;
        let n = 2f64.powi(m) as usize;
        assert!(row.pack_lower <= n + 1 && n <= row.cover_upper * 2, "{row:?}");
    }

    let scales: Vec<f64> = (3..=10).map(|k| 0.5f64.powi(k)).collect();
    for (lam, depth, want) in [(Rational::new(1, 2), 12, 1.0), (Rational::new(2, 5), 12, 2f64.ln() / 2.5f64.ln())] {
        let tree = TreeSpace::new(lam, depth).unwrap();
        let b = TreeBoundary::new(&tree);
        let h: SpaceHandle = Arc::new(tree);
        let scales: Vec<f64> = if want == 1.0 { scales.clone() } else { (3..=9).map(|k| 0.4f64.powi(k)).collect() };
        let curve = minkowski_dim_estimate(&h, &b, &scales).unwrap();
        let mid = 0.5 * (curve.fit_lower.slope + curve.fit_upper.slope);
        assert!((mid - want).abs() <= 0.05, "lambda {lam:?}: {mid} vs {want}");
    }
    assert!(minkowski_dim_estimate(&unit(), &set, &scales[..4]).is_err());
}

#[test]
fn enlarging_the_set_does_not_lower_the_slope() {
    let scales: Vec<f64> = (2..=8).map(|m| 3f64.powi(-m)).collect();
    let small = minkowski_dim_estimate(&unit(), &middle_thirds(10), &scales).unwrap();
    let big_set = IntervalSet::new("unit", vec![(0.0, 1.0)]);
    let big = minkowski_dim_estimate(&unit(), &big_set, &scales).unwrap();
    assert!(big.slope_hi + 0.05 >= small.slope_hi);
    assert!((big.fit_upper.slope - 1.0).abs() < 0.05);
}

#[test]
fn delta_examples() {
    let base = 2f64.ln() / (18.0 * 75.0);
    let rho = 0.2;
    let d = delta_calculator(rho, 1.0, 16.0, 1.0, None).unwrap();
    assert!(d.symbolic && d.c_b == 1.0);
    assert!((d.delta - base * 16f64.powi(-3) * rho).abs() < 1e-20);
    let d = delta_calculator(rho, 1.0, 16.0, 1.0, Some(3.0)).unwrap();
    assert!(!d.symbolic && (d.delta - base / 3.0 * 16f64.powi(-3) * rho).abs() < 1e-20);

    let equal = porolab_core::StructureConstants::regular(1.0, 1.0, 1.0, 2.0, 2.0).unwrap();
    let reg = regular_bound(&equal, rho, 1.0, None).unwrap();
    assert_eq!((reg.mean.d, reg.mean.p), (16.0, 1.0));
    assert!((reg.delta - base * 16f64.powi(-3) * rho / 12.0).abs() < 1e-20);

    let dbl = porolab_core::StructureConstants::new(1.0, 1.0, 1.0, 1.0, 2.0, porolab_core::metric::MeasureKind::DoublingOnly, 0.0).unwrap();
    let b = doubling_bound(&dbl, 0.25, 1.0, None).unwrap();
    assert_eq!(b.mean.p, 0.25);
    assert!((b.delta - base * 2f64.powi(-3) * 0.25 * 0.25).abs() < 1e-20);

    assert!(delta_calculator(0.1, 1.0, 1.0, 1.0, None).is_err());
    assert!(delta_calculator(0.1, 0.0, 2.0, 1.0, None).is_err());
}

#[test]
fn decay_examples() {
    let sym: SpaceHandle = Arc::new(IntervalSpace::new(-1.0, 1.0).unwrap());
    let origin = Singleton::new(sym.clone(), Point::Line(0.0));
    let scales: Vec<f64> = (1..12).map(|k| 0.5f64.powi(k)).collect();
    let mean = regular_bound(&sym.constants(), 0.4, 1.0, None).unwrap().mean;
    let handmade = DecayBound { delta: 1.0, c: 1.0 + 1e-9, r0: 1.0, form: DecayForm::Regular, symbolic_cb: false, mean };
    let rep = decay_bound_check(&sym, &origin, &Point::Line(0.0), 1.0, &handmade, &scales).unwrap();
    assert!(rep.pass, "{rep:?}");
    assert!((rep.empirical_exponent.unwrap().slope - 1.0).abs() < 1e-9);

    let set = quarter_cantor(10);
    let scales: Vec<f64> = (2..9).map(|k| 4f64.powi(-k)).collect();
    let bound = regular_bound(&sym.constants(), 3.0 / 16.0, 0.5, Some(1.0)).unwrap();
    let rep = decay_bound_check(&unit(), &set, &Point::Line(0.5), 0.5, &bound, &scales).unwrap();
    assert!(rep.pass);
    assert!((rep.empirical_exponent.unwrap().slope - 0.5).abs() < 0.05, "{rep:?}");

    let full = IntervalSet::new("unit", vec![(0.0, 1.0)]);
    let scales: Vec<f64> = (2..14).map(|k| 0.5f64.powi(k)).collect();
    let rep = decay_bound_check(&unit(), &full, &Point::Line(0.5), 0.5, &bound, &scales).unwrap();
    assert!(rep.empirical_exponent.unwrap().slope.abs() < 0.01);
    for delta in [0.1, 0.5] {
        let tight = DecayBound { delta, c: 1.5, ..bound };
        let rep = decay_bound_check(&unit(), &full, &Point::Line(0.5), 0.5, &tight, &scales).unwrap();
        assert!(!rep.pass, "delta {delta}");
    }
    assert!(decay_bound_check(&unit(), &full, &Point::Line(0.5), 0.5, &bound, &[0.6]).is_err());
    assert!(decay_bound_check(&unit(), &full, &Point::Line(0.9), 0.2, &bound, &[0.1]).is_err());
}

fn certify(space: &dyn MetricSpace, set: &dyn TargetSet, rho: f64, scales: &[f64]) -> UniformCertificate {
    let (pts, _) = set.net(1e-3);
    let sample: Vec<Point> = pts.into_iter().step_by(7).collect();
    uniform_porosity_certificate(space, set, rho, scales[0] * 1.01, &sample, scales, 1e-3).unwrap()
}

#[test]
fn drop_reports() {
    let set = quarter_cantor(8);
    let scales: Vec<f64> = (1..12).map(|k| 0.25 * 0.6f64.powi(k)).collect();
    let cert = certify(unit().as_ref(), &set, 0.15, &scales);
    assert!(cert.pass);
    let cscales: Vec<f64> = (1..=7).map(|k| 4f64.powi(-k)).collect();
    let curve = minkowski_dim_estimate(&unit(), &set, &cscales).unwrap();
    let bound = regular_bound(&unit().constants(), 0.15, 0.25, Some(1.0)).unwrap();
    let rep = dimension_drop_report(unit().as_ref(), Some(&cert), &curve, &bound).unwrap();
    assert_eq!(rep.verdict, DropVerdict::Consistent);
    assert!(rep.slope_hi < 1.0 - rep.delta && (curve.fit_upper.slope - 0.5).abs() < 0.05);
    let symbolic = regular_bound(&unit().constants(), 0.15, 0.25, None).unwrap();
    let rep = dimension_drop_report(unit().as_ref(), Some(&cert), &curve, &symbolic).unwrap();
    assert!(rep.symbolic && rep.verdict == DropVerdict::Consistent);

    let tree = TreeSpace::new(Rational::new(1, 2), 12).unwrap();
    let b = TreeBoundary::new(&tree);
    let tscales: Vec<f64> = (2..9).map(|k| 0.5f64.powi(k)).collect();
    let cert = certify(&tree, &b, 0.45, &tscales);
    assert!(cert.pass);
    let h: SpaceHandle = Arc::new(tree.clone());
    let curve = minkowski_dim_estimate(&h, &b, &(3..=10).map(|k| 0.5f64.powi(k)).collect::<Vec<_>>()).unwrap();
    let dbl = doubling_bound(&tree.constants(), 0.45, 0.25, None).unwrap();
    let rep = dimension_drop_report(&tree, Some(&cert), &curve, &dbl).unwrap();
    assert_eq!(rep.verdict, DropVerdict::Inapplicable);
    assert!(rep.note.contains("doubling-only"));

    let sym: SpaceHandle = Arc::new(IntervalSpace::new(-1.0, 1.0).unwrap());
    let origin = Singleton::new(sym.clone(), Point::Line(0.0));
    let oscales: Vec<f64> = (1..8).map(|k| 0.5f64.powi(k)).collect();
    let cert = certify(sym.as_ref(), &origin, 0.45, &oscales);
    let curve = minkowski_dim_estimate(&sym, &origin, &oscales).unwrap();
    assert_eq!(curve.slope_hi, 0.0);
    let bound = regular_bound(&sym.constants(), 0.45, 0.5, Some(1.0)).unwrap();
    let rep = dimension_drop_report(sym.as_ref(), Some(&cert), &curve, &bound).unwrap();
    assert_eq!(rep.verdict, DropVerdict::Consistent);

    let err = dimension_drop_report(sym.as_ref(), None, &curve, &bound).unwrap_err();
    assert!(matches!(err, PoroError::CertificateMissing(_)));
    let full = IntervalSet::new("unit", vec![(0.0, 1.0)]);
    let failed = certify(unit().as_ref(), &full, 0.1, &oscales);
    assert!(matches!(
        dimension_drop_report(unit().as_ref(), Some(&failed), &curve, &bound),
        Err(PoroError::CertificateMissing(_))
    ));
}

#[test]
fn greedy_packing_example() {
    let pts: Vec<Point> = (0..=10).map(|k| Point::Line(k as f64 / 10.0)).collect();
    let fa = FiniteApprox::new(unit(), "grid", pts, 0.0);
    let got: Vec<f64> = greedy_packing(&fa, 0.15).iter().map(|p| p.line().unwrap()).collect();
    assert_eq!(got, vec![0.0, 0.4, 0.8]);
}

/// Minimal number of closed `r`-intervals covering points of the line:
/// sweep from the left, each interval starting at the first uncovered point.
fn line_cover(mut xs: Vec<f64>, r: f64) -> usize {
    xs.sort_by(|a, b| a.total_cmp(b));
    let mut n = 0;
    let mut reach = f64::NEG_INFINITY;
    for x in xs {
        if x > reach {
            n += 1;
            reach = x + 2.0 * r;
        }
    }
    n
}

#[test]
fn cover_bracket_contains_the_minimal_cover() {
    let mut state = 0x9e37_79b9_7f4a_7c15u64;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for trial in 0..300 {
        let n = 2 + trial % 19;
        let xs: Vec<f64> = (0..n).map(|_| next()).collect();
        let r = 0.01 + 0.2 * next();
        let fa = FiniteApprox::new(unit(), "random", xs.iter().map(|&x| Point::Line(x)).collect(), 0.0);
        let b = covering_bracket(&fa, r);
        let opt = line_cover(xs.clone(), r);
        assert!(b.contains(opt), "{xs:?} r={r}: {b:?} vs {opt}");
        for lambda in [0.0, 0.5, 1.0] {
            let w = r.powf(lambda);
            assert!(b.lower as f64 * w <= opt as f64 * w && opt as f64 * w <= b.upper as f64 * w);
        }
        let brute = porolab_core::approx::brute_force_internal_cover(&IntervalSpace::unit(), &fa.points, r);
        assert!(brute >= opt && b.lower <= brute);
    }
}

#[test]
fn porous_sets_lose_measure() {
    let set = middle_thirds(14);
    let mut last = f64::INFINITY;
    for k in 1..13 {
        let (_, hi) = neighborhood_measure(unit().as_ref(), &set, 3f64.powi(-k)).unwrap();
        assert!(hi < last);
        last = hi;
    }
    assert!(last < 0.05);
}
