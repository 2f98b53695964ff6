//! Named experiments. Each one tests a single property and produces a report
//! whose verdict decides the exit status.

use std::sync::Arc;

use porolab_core::math::Rational;
use porolab_core::spaces::{CantorSet, CantorSpec, IntervalSpace, SpaceSpec, TreeBoundary, TreeSpace};
use porolab_core::{Point, SpaceHandle, TargetSet};

use crate::config::ExperimentConfig;
use crate::error::{LabError, LabResult};
use crate::report::Report;

mod holes;
mod regular;
mod sizes;
mod trees;

pub struct Experiment {
    pub name: &'static str,
    pub claim: &'static str,
    pub run: fn(&ExperimentConfig) -> LabResult<Report>,
}

pub const REGISTRY: &[Experiment] = &[
    Experiment {
        name: "tree-dim",
        claim: "the boundary of the binary tree with halving branches has Minkowski dimension 1",
        run: trees::tree_dim,
    },
    Experiment {
        name: "tree-por",
        claim: "the boundary of the binary tree with halving branches has porosity 1/2 at every point and scale",
        run: trees::tree_por,
    },
    Experiment {
        name: "tree-lambda-sweep",
        claim: "tree boundaries stay porous while their dimension climbs to 1 as the branch ratio tends to 1/2",
        run: trees::lambda_sweep,
    },
    Experiment {
        name: "snowflake-por",
        claim: "a point of a snowflaked line has star porosity (1/2)^eps",
        run: holes::snowflake_por,
    },
    Experiment {
        name: "spiral-por",
        claim: "the centre of the rational spiral has star porosity tending to 1 as rays are added",
        run: holes::spiral_por,
    },
    Experiment {
        name: "cantor-por-asymptotics",
        claim: "a Cantor set with N pieces of ratio N^(-1/t) has porosity close to (1 - N^(1 - 1/t)) / N",
        run: holes::cantor_asymptotics,
    },
    Experiment {
        name: "content-sandwich",
        claim: "covering content and measure content agree up to 2^s b^-1 and 2^s a^-1",
        run: sizes::content_sandwich,
    },
    Experiment {
        name: "doubling-check",
        claim: "ball masses grow at most by the doubling constant per doubling of the radius",
        run: sizes::doubling_check,
    },
    Experiment {
        name: "porous-null",
        claim: "neighbourhoods of a porous set lose measure polynomially, so the set is null",
        run: sizes::porous_null,
    },
    Experiment {
        name: "decay",
        claim: "neighbourhood masses of a uniformly porous set obey the power decay bound",
        run: sizes::decay,
    },
    Experiment {
        name: "dim-drop",
        claim: "uniformly porous sets in regular spaces have dimension strictly below s",
        run: sizes::dim_drop,
    },
    Experiment {
        name: "mean-poro",
        claim: "uniform porosity implies mean porosity with the converted parameters",
        run: holes::mean_poro,
    },
    Experiment {
        name: "build-regular",
        claim: "the nested-ball construction yields a t-regular measure with exact masses",
        run: regular::build_regular,
    },
    Experiment {
        name: "regular-to-porous",
        claim: "the support of a t-regular measure in an s-regular space is porous with the derived level",
        run: regular::regular_to_porous,
    },
    Experiment {
        name: "envelope",
        claim: "a uniformly porous set sits inside a regular set built from its holes",
        run: regular::envelope,
    },
];

pub fn find(name: &str) -> Option<&'static Experiment> {
    REGISTRY.iter().find(|e| e.name == name)
}

pub fn run_experiment(name: &str, cfg: &ExperimentConfig) -> LabResult<Report> {
    let exp = find(name).ok_or_else(|| LabError::UnknownExperiment(name.to_string()))?;
    if let Some(other) = &cfg.experiment {
        if other != name {
            return Err(LabError::Config(format!("config is for `{other}`, not `{name}`")));
        }
    }
    cfg.validate()?;
    (exp.run)(cfg)
}

pub(crate) fn unit() -> SpaceHandle {
    Arc::new(IntervalSpace::unit())
}

/// Tree parameters from the config, if it names a tree.
pub(crate) fn tree_from(cfg: &ExperimentConfig, lambda: Rational, depth: u32) -> LabResult<TreeSpace> {
    let (lambda, depth) = match &cfg.space {
        None => (lambda, depth),
        Some(SpaceSpec::Tree { lambda, depth }) => (*lambda, *depth),
        Some(other) => return Err(LabError::Config(format!("expected a tree space, got {other:?}"))),
    };
    Ok(TreeSpace::new(lambda, depth)?)
}

/// A Cantor set inside `[0, 1]`, from the config if it names one.
pub(crate) fn cantor_from(cfg: &ExperimentConfig, default: CantorSpec) -> LabResult<CantorSet> {
    let spec = match &cfg.space {
        None => default,
        Some(SpaceSpec::Cantor(spec)) => *spec,
        Some(other) => return Err(LabError::Config(format!("expected a Cantor space, got {other:?}"))),
    };
    Ok(CantorSet::new(spec)?)
}

/// Tree boundary points with seeded branch words.
pub(crate) fn boundary_sample(tree: &TreeSpace, k: usize, sampler: &mut crate::sampling::Sampler) -> Vec<Point> {
    let depth = tree.geom.depth;
    (0..k)
        .map(|_| Point::Tree(porolab_core::TreePoint::boundary(sampler.below(1u64 << depth), depth)))
        .collect()
}

/// Net points of `set` at resolution `eps`, thinned to `k` by the sampler.
pub(crate) fn set_sample(set: &dyn TargetSet, eps: f64, k: usize, sampler: &mut crate::sampling::Sampler) -> Vec<Point> {
    let (pts, _) = set.net(eps);
    sampler.choose(&pts, k)
}

/// Records the sampled points so `x_id` columns can be resolved.
pub(crate) fn record_sample(rep: &mut Report, sample: &[Point]) {
    rep.set("sample_points", sample.iter().map(crate::treefile::point).collect::<Vec<_>>());
}

pub(crate) fn boundary_of(tree: &TreeSpace) -> TreeBoundary {
    TreeBoundary::new(tree)
}

pub(crate) fn ratio_text(q: Rational) -> String {
    format!("{}/{}", q.num, q.den)
}

pub(crate) fn tol(cfg: &ExperimentConfig, key: &str, default: f64) -> f64 {
    cfg.tolerance_or(key, default)
}
