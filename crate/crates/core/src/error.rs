use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("the origin of C² has no polar or hyperspherical coordinates")]
    ZeroVector,
    #[error("invalid coordinates: {0}")]
    InvalidCoordinates(String),
    #[error("third moment does not converge: {0}")]
    DivergentMoment(String),
    #[error("profile has zero third moment and cannot be normalized")]
    ZeroMass,
    #[error("amplitudes a and b are both zero")]
    BothZero,
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("invalid set: {0}")]
    InvalidSet(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
