//! Concrete spaces and the sets studied inside them.

pub mod cantor;
pub mod comb;
pub mod interval;
pub mod snowflake;
pub mod spec;
pub mod spiral;
pub mod stack;
pub mod tree;

pub use cantor::{CantorGeometry, CantorSet, CantorSpace, CantorSpec, Placement};
pub use comb::{CombSpace, CombSpine};
pub use interval::IntervalSpace;
pub use snowflake::{SnowflakeSpace, SnowflakeTarget};
pub use spec::SpaceSpec;
pub use spiral::{SpiralSpace, SpiralSpec, ORIGIN};
pub use stack::SegmentStack;
pub use tree::{TreeBoundary, TreeGeometry, TreeSpace};
