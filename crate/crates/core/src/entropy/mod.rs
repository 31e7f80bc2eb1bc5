//! Finite-dimensional quantum numerics: states, broadcast channels, von
//! Neumann entropies, multipartite conditional mutual information and
//! squashed-entanglement bounds. All entropies are in bits.

pub mod channel;
pub mod channel_esq;
pub mod labeling;
pub mod measures;
pub mod private;
pub mod state;
pub mod tensor;

pub use channel::{apply_channel, apply_channel_pure, apply_isometric_pure, ChannelKind, ChannelSpec};
pub use channel_esq::{canonical_signature, channel_esq, ChannelSearch, ChannelWeight, WeightProvenance};
pub use labeling::{Subsystem, SystemLabeling};
pub use measures::{
    multipartite_cmi, purify, squashed_ent_estimate, squashed_ent_upper, von_neumann_entropy, Purification, SquashEstimate, SquashSearch,
    SquashingChannel,
};
pub use private::{measure_key, private_state, KeyDistribution, Twisting};
pub use state::{ghz_state, ghz_state_labeled, DensityMatrix, PureState, QuantumState, StateDump};
