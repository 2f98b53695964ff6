//! JSON form of a regular measure tree with exact rational coordinates.
//!
//! Every finite `f64` is a dyadic rational, so centres and radii are written
//! as exact `num/den` pairs of decimal strings; weights are already rational.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::Zero;
use porolab_core::regularity::RegularMeasureTree;
use porolab_core::Point;
use serde_json::{json, Value};

pub const TREE_SCHEMA: &str = "porolab.regular-tree/1";

pub fn exact(x: f64) -> Value {
    match BigRational::from_float(x) {
        Some(q) => rational(&q),
        None => json!({ "float": x.to_string() }),
    }
}

fn rational(q: &BigRational) -> Value {
    json!({ "num": q.numer().to_string(), "den": q.denom().to_string() })
}

/// Reads back a `{num, den}` pair.
pub fn parse_exact(v: &Value) -> Option<BigRational> {
    let num: BigInt = v.get("num")?.as_str()?.parse().ok()?;
    let den: BigInt = v.get("den")?.as_str()?.parse().ok()?;
    (!den.is_zero()).then(|| BigRational::new(num, den))
}

pub fn point(p: &Point) -> Value {
    match *p {
        Point::Line(x) => json!({ "kind": "line", "x": exact(x) }),
        Point::Plane(x, y) => json!({ "kind": "plane", "x": exact(x), "y": exact(y) }),
        Point::Tree(t) => json!({
            "kind": "tree",
            "word": t.word,
            "depth": t.depth,
            "offset": exact(t.offset),
            "boundary": t.boundary,
        }),
        Point::Ray { num, den, radius } => json!({ "kind": "ray", "num": num, "den": den, "radius": exact(radius) }),
        Point::Row { x, row } => json!({ "kind": "row", "x": exact(x), "row": row }),
    }
}

fn big(r: Ratio<u128>) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// Radius `2 d1^k R` as an exact rational when `d1` is rational, else the
/// exact value of the rounded float.
fn node_radius(tree: &RegularMeasureTree, k: u32) -> Value {
    let d1 = tree.params.and_then(|p| p.d1_exact());
    match (d1, BigRational::from_float(tree.radius)) {
        (Some(d1), Some(r)) => {
            let mut q = BigRational::from_integer(BigInt::from(2)) * r;
            let d1 = big(d1);
            for _ in 0..k {
                q *= d1.clone();
            }
            rational(&q)
        }
        _ if tree.params.is_none() => exact(2.0 * tree.radius),
        _ => exact(tree.node_radius(k)),
    }
}

pub fn tree_json(tree: &RegularMeasureTree) -> Value {
    let levels: Vec<Value> = tree
        .levels
        .iter()
        .enumerate()
        .map(|(k, nodes)| {
            let k = k as u32;
            json!({
                "level": k,
                "radius": node_radius(tree, k),
                "weight": rational(&big(tree.node_weight(k))),
                "nodes": nodes.iter().map(|n| json!({ "center": point(&n.center), "parent": n.parent })).collect::<Vec<_>>(),
            })
        })
        .collect();
    let params = tree.params.map(|p| {
        json!({
            "s": exact(p.s),
            "t": exact(p.t),
            "c1": exact(p.c1),
            "d": exact(p.d),
            "d_exp": p.d_exp,
            "m": p.m,
            "d1": p.d1_exact().map_or_else(|| exact(p.d1), |q| rational(&big(q))),
        })
    });
    json!({
        "schema": TREE_SCHEMA,
        "t": exact(tree.t),
        "radius": exact(tree.radius),
        "k_max": tree.k_max,
        "branching": tree.branching(),
        "weights_scale": "node weights multiply radius^t",
        "params": params,
        "levels": levels,
    })
}

/// Sum of the exact leaf weights in a tree document; 1 for a sound tree.
pub fn leaf_weight_sum(doc: &Value) -> Option<BigRational> {
    let last = doc.get("levels")?.as_array()?.last()?;
    let w = parse_exact(last.get("weight")?)?;
    let n = last.get("nodes")?.as_array()?.len();
    Some(w * BigRational::from_integer(BigInt::from(n)))
}
