//! Exact computation of derivation Lie algebras of finite-dimensional
//! evolution algebras.
//!
//! An evolution algebra on a natural basis e₁,…,eₙ multiplies basis vectors
//! by eᵢ·eⱼ = 0 for i ≠ j and eᵢ·eᵢ = Σⱼ aᵢⱼ eⱼ; the n×n structure matrix
//! A = (aᵢⱼ) determines everything. This crate computes, over the Gaussian
//! rationals ℚ(i):
//!
//! - the space of derivations (linear maps d with d(xy) = d(x)y + x d(y))
//!   as the exact nullspace of an n²-unknown linear system ([`solver`]),
//! - a canonical-form classification of structure matrices of rank n−1 up
//!   to basis permutation ([`classify`]),
//! - closed-form derivation generators attached to each canonical form,
//!   possibly involving one square root adjoined to ℚ(i), verified
//!   independently against the solver ([`emit`]),
//! - seeded random instances of each canonical pattern ([`gen`]), and
//! - a floating-point cross-check of the exact computation ([`float`]).
//!
//! All core arithmetic is exact; see [`scalar`] for the number types and
//! their text grammar, and [`io`] for the JSON file format and reports
//! used by the `evoder` command-line tool.

pub mod algebra;
pub mod classify;
pub mod emit;
pub mod error;
pub mod float;
pub mod gen;
pub mod io;
pub mod matrix;
pub mod scalar;
pub mod solver;

pub use algebra::{BVector, EvolutionAlgebra};
pub use classify::{classify, CaseParams, ClassificationResult, Tag, DEFAULT_MAX_N};
pub use emit::{
    emit_closed_forms, rationalize_family, verify_closed_forms, ClosedFormFamily, VerifyReport,
};
pub use error::{EvoderError, Result};
pub use float::{float_check, FloatCheck, RESIDUAL_TOLERANCE};
pub use gen::{gen_instance, GenCase, GENERATOR_ID};
pub use io::{
    algebra_to_file, analyze_algebra, analyze_file, parse_matrix_file, run_batch, Analysis,
    BatchOutput, BatchSummary, FamilyJson, GenOutput, MatrixFile, Report,
};
pub use matrix::Matrix;
pub use scalar::{GaussianRational, QuadExtScalar, Rational, Scalar};
pub use solver::{assemble, derivations, DerivationSpace, LeibnizSystem};
