//! Declarative descriptions of every space, used by configs and reports.

use alloc::boxed::Box;
use alloc::sync::Arc;

use crate::error::Result;
use crate::math::Rational;
use crate::metric::SpaceHandle;
use crate::spaces::{CantorSpace, CantorSpec, CombSpace, IntervalSpace, SegmentStack, SnowflakeSpace, SpiralSpace, SpiralSpec, TreeSpace};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum SpaceSpec {
    Interval { lo: f64, hi: f64 },
    Cantor(CantorSpec),
    Tree { lambda: Rational, depth: u32 },
    Snowflake { base: Box<SpaceSpec>, exponent: f64 },
    Comb { teeth: u32 },
    Spiral(SpiralSpec),
    SegmentStack { rows: u32 },
}

impl SpaceSpec {
    pub fn build(&self) -> Result<SpaceHandle> {
        Ok(match self {
            SpaceSpec::Interval { lo, hi } => Arc::new(IntervalSpace::new(*lo, *hi)?),
            SpaceSpec::Cantor(spec) => Arc::new(CantorSpace::new(*spec)?),
            SpaceSpec::Tree { lambda, depth } => Arc::new(TreeSpace::new(*lambda, *depth)?),
            SpaceSpec::Snowflake { base, exponent } => Arc::new(SnowflakeSpace::new(base.build()?, *exponent)?),
            SpaceSpec::Comb { teeth } => Arc::new(CombSpace::new(*teeth)?),
            SpaceSpec::Spiral(spec) => Arc::new(SpiralSpace::new(*spec)?),
            SpaceSpec::SegmentStack { rows } => Arc::new(SegmentStack::new(*rows)?),
        })
    }
}
