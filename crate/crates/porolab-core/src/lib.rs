//! Porosity, Minkowski dimension and regular measures on metric measure spaces.
//!
//! Everything here is pure computation over `alloc`; file formats, the CLI and
//! seeded sampling live in the `porolab` crate.
#![no_std]
// Negated comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::manual_range_contains)]

extern crate alloc;

pub mod approx;
pub mod checks;
pub mod dimension;
pub mod error;
pub mod math;
pub mod metric;
pub mod point;
pub mod porosity;
pub mod regularity;
pub mod spaces;
pub mod stats;
pub mod target;

pub use approx::{build_net, covering_bracket, greedy_packing, CoverBracket, FiniteApprox};
pub use error::{PoroError, Result};
pub use metric::{MeasureKind, MetricSpace, SpaceHandle, StructureConstants};
pub use point::{Point, TreePoint};
pub use target::TargetSet;
