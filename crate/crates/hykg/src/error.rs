use thiserror::Error;

/// Errors raised by the solver and audit layers.
///
/// Conditions that are expected while scanning energies (a missing branch, an
/// imaginary radicand) are not errors; they travel as flags or gap markers so
/// that root finders can step over them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate Hylleraas parameters: {0}")]
    DegenerateParams(String),

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("potential is singular at r = {r}")]
    SingularPotential { r: f64 },

    #[error("no real k solves the perfect-square condition")]
    NoRealK,

    #[error("perfect-square condition is vacuous: Q_k has degree < 1 for every k")]
    DegenerateSigma,

    #[error("no k yields a perfect square within tolerance")]
    ImperfectSquare,

    #[error("no branch has a negative tau derivative")]
    NoValidBranch,

    #[error("sigma has complex roots")]
    ComplexRoots,

    #[error("negative radicand in {0}")]
    NegativeUnderSqrt(&'static str),

    #[error("wavefunction not representable: {0}")]
    NotRepresentable(String),

    #[error("a = c makes the wavefunction exponents singular")]
    DegenerateAC,

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("tail not converged: |R| at the outer edge is {ratio:e} of max|R|")]
    TailNotConverged { ratio: f64 },

    #[error("no root found: {0}")]
    NoRoot(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
