use thiserror::Error;

/// Error type shared across the crate.
///
/// Constructors validate their inputs and return `Err`; pure operations on
/// already-validated values never fail and panic only on internal bugs.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Input bytes are not well-formed JSON.
    #[error("parse error: {0}")]
    Parse(String),

    /// JSON is well-formed but does not match the problem schema.
    #[error("schema error: {0}")]
    Schema(String),

    /// A declared object violates a structural invariant (shapes, determinants,
    /// unresolved names, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// Generator data does not extend to a group action; the offending
    /// pair of elements is named.
    #[error("relation violation: generators do not define a group action: {0}")]
    RelationViolation(String),

    /// An element list is not a subgroup of the ambient group.
    #[error("invalid subgroup: {0}")]
    InvalidSubgroup(String),

    /// Unknown named construction kind.
    #[error("unknown construction: {0}")]
    UnknownConstruction(String),

    /// A torus-only operation was applied to a module with torsion characters.
    #[error("not a torus: {0}")]
    NotATorus(String),

    /// Brute-force oracle refused an input above its size bound.
    #[error("size guard: |group| * rank = {size} exceeds bound {bound}")]
    SizeGuard { size: usize, bound: usize },

    /// Shapes or endpoints of maps do not line up for composition.
    #[error("composition mismatch: {0}")]
    CompositionMismatch(String),

    /// Two independent computations of the same group disagree. This always
    /// signals an implementation bug, never invalid input.
    #[error("cross-check failure in {check}: {left} != {right}")]
    CrossCheckFailure {
        check: String,
        left: String,
        right: String,
    },

    /// A sequence that is exact by theorem failed an exactness test.
    /// Always an implementation bug.
    #[error("exactness failure: {0}")]
    ExactnessFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
