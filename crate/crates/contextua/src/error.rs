//! Error types shared across the crate.

use thiserror::Error;

/// Violations detected while validating or marginalizing a POVM.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PovmError {
    #[error("POVM has no effects")]
    Empty,
    #[error("malformed outcome labels: {0}")]
    MalformedLabels(String),
    #[error("completeness violated: sum of identity coefficients is {sum_a}, |sum of sigma coefficients| is {sum_b_norm}")]
    Completeness { sum_a: f64, sum_b_norm: f64 },
    #[error("effect {index} is not positive semidefinite (min eigenvalue {min_eigenvalue})")]
    NotPsd { index: usize, min_eigenvalue: f64 },
}

/// Errors from constructing states and observables.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BlochError {
    #[error("Bloch vector norm {norm} exceeds 1")]
    InvalidState { norm: f64 },
    #[error("observable sharpness {norm} exceeds 1")]
    InvalidSharpness { norm: f64 },
    #[error("zero vector where a direction is required")]
    ZeroVector,
}

/// Errors from joint-measurability checks and joint-POVM constructions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum JmError {
    #[error("observable {index} has sharpness {norm} > 1")]
    InvalidSharpness { index: usize, norm: f64 },
    #[error("pair is not jointly measurable (criterion value {h})")]
    NotJointlyMeasurable { h: f64 },
    #[error("joint effect ({mu},{nu}) is not positive semidefinite (deficit {deficit})")]
    NotPositive { mu: i8, nu: i8, deficit: f64 },
    #[error("state direction is not orthogonal to both observables (dots {dot_i}, {dot_j})")]
    StateNotOrthogonal { dot_i: f64, dot_j: f64 },
    #[error("state direction is the zero vector")]
    ZeroState,
    #[error("triple is not triplewise jointly measurable (margin {margin})")]
    NotTriplewiseMeasurable { margin: f64 },
    #[error("vectors are not coplanar (unit triple product {triple_product})")]
    NotCoplanar { triple_product: f64 },
    #[error("third observable is not orthogonal to the first two (dots {dot13}, {dot23})")]
    NotOrthogonal { dot13: f64, dot23: f64 },
    #[error("need at least 3 points for a Fermat-Torricelli vector, got {count}")]
    TooFewPoints { count: usize },
}

/// Errors from the hidden-variable model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error(
        "context value C for pair ({j},{k}) violates positivity: 1{sign}C = {value} < {required}"
    )]
    InvalidContextValue {
        j: usize,
        k: usize,
        sign: char,
        value: f64,
        required: f64,
    },
    #[error("pairwise contexts are incompatible (no triplewise response function exists)")]
    Incompatible,
    #[error("predetermined value {value} is not +1 or -1")]
    InvalidOutcome { value: f64 },
    #[error("ensemble weights sum to {sum}, expected 1")]
    InvalidWeights { sum: f64 },
}

/// Errors from the quantum bound analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LswError {
    #[error("radicand {radicand} negative at x = {x}, eta = {eta}; valid x in [-1,0]: {valid}")]
    Domain {
        x: f64,
        eta: f64,
        radicand: f64,
        valid: String,
    },
}
