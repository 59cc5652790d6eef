//! Simulation of N indistinguishable particles in a label-free,
//! first-quantized formalism, built around the ancilla-mode W-state
//! generation scheme.
//!
//! States are products of one-particle (mode ⊗ pseudospin) superpositions;
//! all amplitudes reduce to permanents (bosons) or determinants (fermions)
//! of Gram matrices of one-particle overlaps, so bosonic and fermionic
//! exchange statistics are handled by the same machinery. On top of the
//! algebra sit the protocol builders (ancilla scheme, common-ancilla
//! variant, extraction scheme, W-state target), occupancy postselection,
//! mode merging, tensor-factor extraction, partial trace, and a seeded
//! projective sampler.
//!
//! ```
//! use wstate_core::{
//!     build_network_state, build_w_state, fidelity, measurement_mode,
//!     postselect_single_occupancy, OccupancyPattern, SchemeVariant, Statistics,
//! };
//!
//! // the N = 2 extraction scheme: expand, postselect one particle per
//! // measurement mode, and land on the W state with probability 1/2
//! let network = build_network_state(2, SchemeVariant::Extraction, Statistics::Boson)?;
//! let pattern = OccupancyPattern::single((1..=2).map(measurement_mode));
//! let (p, w) = postselect_single_occupancy(&network.expand(), &pattern)?;
//! assert!((p - 0.5).abs() < 1e-12);
//! assert!((fidelity(&w, &build_w_state(2, Statistics::Boson))? - 1.0).abs() < 1e-12);
//! # Ok::<(), wstate_core::Error>(())
//! ```

pub mod algebra;
pub mod error;
pub mod kernel;
pub mod measure;
pub mod schemes;

pub use algebra::{
    canonicalize, inner, one_particle_overlap, product_overlap, self_overlap, Amplitude,
    BasisState, CanonicalState, ModeLabel, OneParticleKet, ProductKet, Spin, Statistics,
    PRUNE_EPS,
};
pub use error::{Error, Result};
pub use kernel::{GramMatrix, NAIVE_KERNEL_CUTOFF};
pub use measure::{
    factor_out_mode, fidelity, merge_modes, occupancy_distribution, postselect_single_occupancy,
    reduce, sample, tensor_with, OccupancyPattern, OutcomeDistribution, ReducedDensity,
    SampleCounts, SAMPLE_GENERATOR,
};
pub use schemes::{
    build_initial, build_network_state, build_target, build_w_state, closed_form_prob,
    common_mode, expected_probability_kind, intermediate_mode, measurement_mode, source_mode,
    ProbabilityKind, ProbabilityRow, ProbabilityTable, SchemeVariant,
};
