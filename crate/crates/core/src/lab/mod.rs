//! Randomized joint-concavity trials for Lieb-type matrix maps.
//!
//! Each trial draws endpoints `X`, `Y` and `τ ∈ [0, 1]`, evaluates a symmetric
//! form `φ` on the map outputs, and records the deficit
//! `φ(F(τX + (1−τ)Y)) − τφ(F(X)) − (1−τ)φ(F(Y))`, which is nonnegative for
//! jointly concave `φ ∘ F`.

mod maps;
mod random;
mod suite;
mod trials;

pub use maps::{
    classic_lieb_value, explog_map, lieb_map, ConcavityMap, Endpoint, ExpLogParams, LiebMapParams,
    MapKind, MapOutput,
};
pub use random::{random_complex, random_hermitian, random_posdef, random_psd};
pub use suite::{
    equivalence_probe, run_suite, EquivalenceSummary, Exemplar, FormSpec, KFamily,
    NegativeControlConfig, PsdClosure, ReportMeta, SuiteConfig, SuiteReport, SuiteSummary,
    DEFAULT_SEED, DEFAULT_TRIALS, EXPLOG_FLOOR, MAX_SUITE_DIM, PSD_CLOSURE_TOLERANCE, S_CHOICES,
    ZERO_EXPONENT_PROBABILITY,
};
pub use trials::{
    midpoint_concavity_trial, negative_control_trial, NegativeControlReport, NegativeExemplar,
    TrialInputs, TrialReport, DEFICIT_TOLERANCE, NEGATIVE_CONTROL_THRESHOLD,
};
