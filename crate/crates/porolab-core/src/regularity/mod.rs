//! `t`-regular measures inside regular spaces: construction, verification,
//! the porosity they force, and regular supersets of porous sets.

mod builder;
mod envelope;
mod forward;

pub use builder::{
    build_regular_measure, builder_params, verify_regularity, BuilderParams, RegularMeasureTree, RegularityReport,
    TreeNode, MAX_LEAVES,
};
pub use envelope::{regular_envelope, EnvelopeOptions, EnvelopeSet, HoleBall};
pub use forward::{porosity_from_regularity, ForwardBound};
