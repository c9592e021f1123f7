use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid measure profile: {0}")]
    InvalidProfile(String),

    #[error("weight is singular at x = {x}")]
    SingularPoint { x: f64 },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("unknown function spec: {0}")]
    UnknownSpec(String),

    #[error("grid functions live on different domains")]
    DomainMismatch,

    #[error("dense materialization refused for n = {n} (limit {limit})")]
    TooLarge { n: usize, limit: usize },

    #[error("invalid backend: {0}")]
    InvalidBackend(String),

    #[error("{backend} backend requires a periodic domain")]
    BackendDomainMismatch { backend: &'static str },

    #[error("order {alpha} outside the supported range {range}")]
    OrderOutOfRange { alpha: f64, range: &'static str },

    #[error("measure weight is not positive at x = {x} (v = {v})")]
    NegativeWeight { x: f64, v: f64 },

    #[error("singular quadrature did not converge: {0}")]
    QuadratureFailure(String),

    #[error("explicit multiscale orders {terms:?} do not match the profile hierarchy {profile:?}")]
    InconsistentHierarchy { terms: Vec<f64>, profile: Vec<f64> },

    #[error("oscillatory profile rejected for implicit operators")]
    OscillatoryProfileRejected,

    #[error("operator requires a measure profile: {0}")]
    ProfileRequired(&'static str),

    #[error("operator is not diagonal on plane waves: {0}")]
    NotDiagonalizable(String),

    #[error("resonant mode: |mu(k) - m^2| = {gap:e} at k = {k}")]
    ResonantMode { k: f64, gap: f64 },

    #[error("singular Jacobian at Newton iteration {iteration}")]
    SingularJacobian { iteration: usize },

    #[error("no variational solve path for implicit operators")]
    NoSolvePath,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
