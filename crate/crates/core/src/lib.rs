//! Bipartite quantum states in two equivalent pictures.
//!
//! A state of a combined system `V ⊗ W` is held either as a coefficient
//! matrix over a product Hermite basis ([`TensorState`]) or as a function on
//! the configuration space of the first factor whose values are vectors of
//! the second factor ([`FiberState`]). The two are related by an isometric
//! isomorphism (see [`isomorphism`]). One-factor observables, Schmidt
//! analysis, projective measurement and a pointer-class coarse graining of
//! the second factor are built on top.
//!
//! Units are natural (ħ = m = ω = 1) so the Hermite functions are exactly the
//! harmonic-oscillator eigenbasis.

pub mod error;
pub mod hermite;
pub mod io;
pub mod isomorphism;
pub mod measurement;
pub mod observables;
pub mod pointer;
pub mod separability;
pub mod state;

pub use error::{Error, Result};
pub use hermite::{eval_hermite_function, BasisDescriptor, HermiteBasis};
pub use isomorphism::{component_function, from_fiber, to_fiber};
pub use measurement::{
    measure_first, measure_second, sample_measurement, spectral_decompose, Eigenspace, Histogram,
    MeasurementOutcome,
};
pub use observables::{
    evolve_free, expectation_lifted, expectation_lifted_first, reduced_gram, Factor, Observable,
};
pub use pointer::{
    coarse_grain_state, coarse_grain_vector, indistinguishability_report, macro_expectation,
    surrogate_decomposable, Branches, ClassicalFiberState, ClassicalMeasure,
    IndistinguishabilityReport, MacroObservable, PointerPartition,
};
pub use separability::{
    is_decomposable, schmidt_decompose, schmidt_rank, value_span_rank, SchmidtDecomposition,
};
pub use state::{FactorVector, FiberState, TensorState};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Equality tolerance for norms, inner products and round trips.
pub const EQ_TOL: f64 = 1e-10;

/// Default relative cutoff for numerical ranks.
pub const RANK_TOL: f64 = 1e-8;
