//! Geometric phases of a squeezed, displaced oscillator under cyclic
//! parameter loops; the coherent-state revivals they shift; and the
//! three-gap statistics of near revivals seen through the circle rotation
//! map.
//!
//! Pipeline: [`phase_geometry`] turns parameter loops into the areas
//! `(𝒜, ℬ)`, [`coherent`] turns `ℬ` into return probabilities,
//! [`rotation`] reduces cycle-to-cycle evolution to a rotation by
//! `Δ = (ωT + ℬ)/2π`, and [`gaps`] gives the exact return-time
//! distribution of that rotation. [`harness`] wires the stages to files
//! and the command line.

pub mod coherent;
pub mod error;
pub mod frac;
pub mod gaps;
pub mod harness;
pub mod phase_geometry;
pub mod rotation;

pub use coherent::{
    correlation_closed, correlation_fock, fock_coefficients, near_revival_bound,
    phase_factorization_check, revival_times, static_correlation, CoherentConfig,
};
pub use error::{CoherentError, GapError, GeometryError, RotationError};
pub use gaps::{
    empirical_gaps, empirical_gaps_rational, first_return_indices, first_return_indices_cf,
    gap_distribution, mean_recurrence, two_gap_epsilon, verify_identity, GapDistribution,
    RecurrenceRecord,
};
pub use phase_geometry::{
    areas_from_phases, berry_phase, euclidean_area, hyperbolic_area, loop_from_spec,
    weyl_phase_chi, LoopDescriptor, ParametricLoop, PhaseData,
};
pub use rotation::{
    classify, iterate, rotation_params, window_hits, RotationClass, RotationParams,
};
