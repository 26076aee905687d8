//! Hidden-measurement sphere machine and its ε-parameterized family.
//!
//! A particle sits at a point `v` of the unit sphere. An experiment along an
//! axis `u` drops it onto an elastic stretched between `u` and `-u`; the
//! elastic breaks uniformly on the band `[(d-ε)u, (d+ε)u]` and the particle
//! is pulled to whichever end point it stays attached to. `ε = 1` reproduces
//! spin-½ transition probabilities, `ε = 0` is a classical predetermined
//! experiment, and intermediate values give structures that are neither.
//!
//! The crate is `no_std` (with `alloc`). Everything that touches files,
//! terminals or threads lives in the companion `qmachine` crate.

#![no_std]

extern crate alloc;

mod math;

pub mod conditional;
pub mod embeddability;
pub mod error;
pub mod machine;
pub mod measures;
pub mod quadrature;
pub mod sphere;
pub mod spin;
pub mod survey;

pub use error::{Error, Result};
pub use machine::{EpsilonExperiment, Outcome, OutcomeDistribution, TrialResult};
pub use measures::{MixedState, OutcomeSet, Region};
pub use sphere::{SectorCap, UnitVector};

/// Deterministic random stream used by every sampler in the crate.
pub type Stream = rand_chacha::ChaCha8Rng;

/// Builds the stream for `seed`; `stream_id` selects an independent sub-stream.
pub fn stream_from_seed(seed: u64, stream_id: u64) -> Stream {
    use rand::SeedableRng;
    let mut rng = Stream::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}
