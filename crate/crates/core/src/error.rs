use thiserror::Error;

/// Errors raised by the simulator.
///
/// Scalar payloads are stored as `f64` regardless of the working precision
/// so that diagnostics print uniformly.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside its domain {domain}")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("Fock index {n} exceeds cutoff {cutoff}")]
    FockIndexOutOfRange { n: usize, cutoff: usize },

    #[error("cutoff {cutoff} discards probability mass {tail:e} (limit {limit:e})")]
    TruncationLoss { cutoff: usize, tail: f64, limit: f64 },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("output cutoff {available} cannot hold total photon number {required}")]
    InsufficientCutoff { required: usize, available: usize },

    #[error("|t|^2 + |r|^2 = {sum} differs from 1")]
    NonUnitaryBeamsplitter { sum: f64 },

    #[error("branch ensemble is empty")]
    EmptyEnsemble,

    #[error("heralding event has zero probability")]
    ImpossibleEvent,

    #[error("objective returned a non-finite value at x = {x}")]
    NonFiniteObjective { x: f64 },

    #[error("invalid search interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
