//! Error types shared across the crate.

use crate::fock::ModeId;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong when building or evolving states.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An occupation vector does not match the registry size.
    #[error("occupation length {found} does not match registry size {expected}")]
    LengthMismatch { expected: usize, found: usize },

    /// Two values built over different mode registries were combined.
    #[error("mode registries differ between operands")]
    RegistryMismatch,

    /// A registry was built with the same (spatial, polarization) pair twice.
    #[error("duplicate mode {0} in registry")]
    DuplicateMode(ModeId),

    /// A mode referenced by an operation is not in the registry.
    #[error("mode {0} is not in the registry")]
    UnknownMode(ModeId),

    /// A matrix that must be unitary is not, within tolerance.
    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NonUnitary { deviation: f64 },

    /// A state was laid out over modes an operation cannot work with.
    #[error("unsupported mode layout: {0}")]
    Layout(String),

    /// A scalar parameter fell outside its allowed interval.
    #[error("{name} = {value} outside [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    /// The gate diagonal handed to a fidelity computation was identically zero.
    #[error("gate diagonal is identically zero")]
    ZeroDiagonal,

    /// A root-finding routine found no admissible solution.
    #[error("no root found in the search domain: {0}")]
    NoRoot(String),

    /// A serialized value could not be decoded.
    #[error("malformed serialized value: {0}")]
    Decode(String),
}
