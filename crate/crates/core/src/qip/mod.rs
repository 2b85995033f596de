//! Multi-message transformation.

pub mod protocol;
pub mod system;
pub mod toys;
pub mod transform;

pub use protocol::{
    honest_protocol_prover, perfect_completeness_protocol, perfect_completeness_soundness_bound,
    protocol_reflection_spec, QIPProtocolProver, SoundnessBoundReport,
};
pub use system::{composite_unitary, CompositeSystem, QIPProverSpec, QIPSystemSpec};
pub use transform::{
    error_rescale, make_rewindable, rescaled_bounds, rewindable_spec, RewindableSystem,
};
