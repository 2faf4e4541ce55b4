//! Random fixed points of contractive random operators.
//!
//! A random operator is a pure function `T(ω, x)` of a seed-derived outcome
//! `ω` and a point `x ∈ ℝⁿ`. This crate certifies five-term contractive
//! conditions on sampled pairs, runs Picard iteration with error bounds
//! derived from the certificate, aggregates per-ω solves into a Monte Carlo
//! picture of the random fixed point, and applies all of it to stochastic
//! Hammerstein integral equations.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the `*64`
//! and `*32` aliases below fix the scalar.

pub mod contraction;
pub mod error;
pub mod export;
pub mod hammerstein;
pub mod linalg;
pub mod lp;
pub mod picard;
pub mod quadrature;
pub mod randomfp;
pub mod scalar;
pub mod space;

pub use contraction::{
    check_condition, classify, fit_hr_coefficients, fit_kind, validate_coefficients,
    Classification, ClassifyOptions, Coefficients, ConditionKind, ContractionCertificate,
    GregusAnnotation, GregusBound, GregusParams, HRCoefficients, ZamfirescuParams,
};
pub use error::{Error, Result};
pub use hammerstein::{
    check_feasibility, discretize_operator, operator_norm, solve_hammerstein, FeasibilityReport,
    HammersteinOptions, HammersteinProblem, HammersteinSolution,
};
pub use picard::{
    hr_contraction_ratio, picard_solve, PicardConfig, PicardError, PicardReport, PicardStatus,
};
pub use quadrature::{QuadratureGrid, QuadratureRule};
pub use randomfp::{
    solve_random_fixed_point, uniqueness_probe, RandomCoefficientSpec, RandomSolveSummary,
    UniquenessReport,
};
pub use scalar::Real;
pub use space::{
    apply, norm, sample_omega, FnOperator, NormKind, OmegaSample, ProbabilitySpace, RandomOperator,
    Vector,
};

pub type Vector64 = Vector<f64>;
pub type Vector32 = Vector<f32>;
pub type NormKind64 = NormKind<f64>;
pub type NormKind32 = NormKind<f32>;
pub type HRCoefficients64 = HRCoefficients<f64>;
pub type HRCoefficients32 = HRCoefficients<f32>;
pub type Certificate64 = ContractionCertificate<f64>;
pub type Certificate32 = ContractionCertificate<f32>;
pub type PicardConfig64 = PicardConfig<f64>;
pub type PicardConfig32 = PicardConfig<f32>;
pub type PicardReport64 = PicardReport<f64>;
pub type PicardReport32 = PicardReport<f32>;
pub type RandomSolveSummary64 = RandomSolveSummary<f64>;
pub type RandomSolveSummary32 = RandomSolveSummary<f32>;
pub type QuadratureGrid64 = QuadratureGrid<f64>;
pub type QuadratureGrid32 = QuadratureGrid<f32>;
pub type HammersteinProblem64 = HammersteinProblem<f64>;
pub type HammersteinProblem32 = HammersteinProblem<f32>;
pub type FeasibilityReport64 = FeasibilityReport<f64>;
pub type FeasibilityReport32 = FeasibilityReport<f32>;
