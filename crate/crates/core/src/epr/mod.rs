//! EPR-assisted QMA protocol.

pub mod definetti;
pub mod ensemble;
pub mod protocol;
pub mod symmetric;

pub use definetti::{
    bloch_grid, bloch_pair_state, definetti_bound, definetti_distance_estimate, DefinettiEstimate,
    PairFamily, DEFAULT_RESOLUTION,
};
pub use ensemble::{
    cj_mixture_rounding, claim_lower_bound_check, ClaimCheck, RoundingCheck, WElement, WEnsemble,
};
pub use protocol::{
    parallel_repeat, run_protocol, run_protocol_mc, space_restriction_test, EPRProverStrategy,
    McTally, ProtocolConfig,
};
pub use symmetric::{permute_pairs, symmetrize, IIDMixture, SymmetrizeMode};
