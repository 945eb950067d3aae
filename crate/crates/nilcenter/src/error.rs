//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("variable lists differ: [{0}] vs [{1}]")]
    VariableMismatch(String, String),
    #[error("truncation orders differ: ({0},{1}) vs ({2},{3})")]
    TruncationMismatch(u32, u32, u32, u32),
    #[error("series is singular: {0}")]
    SingularSeries(String),
    #[error("substitution has identically zero denominator for `{0}`")]
    SingularSubstitution(String),
    #[error("substitution bindings are cyclic: {0}")]
    CyclicSubstitution(String),
    #[error("system is not nilpotent at the origin: {0}")]
    NotNilpotent(String),
    #[error("perturbation monomial degree {0} unsupported (only x^2, x^3)")]
    UnsupportedMonomial(u32),
    #[error("scaling produced a negative eps power in `{0}`")]
    InconsistentWeights(String),
    #[error("system is not in the scaled normal form: {0}")]
    NotInNormalForm(String),
    #[error("truncation too small to determine requested order ({0},{1})")]
    InsufficientOrder(u32, u32),
    #[error("ladder entry V_{j}{k} is not linear in `{param}`; factored form: {factored}")]
    ManualBranchRequired {
        j: u32,
        k: u32,
        param: String,
        factored: String,
    },
    #[error("ladder entry V_{0}{1} expected zero, got {2}")]
    LadderEntryNonzero(u32, u32, String),
    #[error("origin is not an isolated singular point")]
    NonIsolated,
    #[error("inequality on symbolic coefficient `{0}` cannot be decided")]
    UndecidableAtSymbol(String),
    #[error("no recognized center certificate form: {0}")]
    UnsupportedCertificate(String),
    #[error("integrator step underflow at t={0} (stiffness)")]
    Stiffness(f64),
    #[error("event bracketing failed: {0}")]
    Event(String),
    #[error("orbit escaped the chart (|state| > {0})")]
    Escape(f64),
    #[error("root isolation needs more precision: {0}")]
    PrecisionEscalation(String),
    #[error("jacobian selection is not square: {0} rows vs {1} params")]
    ShapeError(usize, usize),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, Error>;
