use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension profile: {0}")]
    InvalidProfile(String),
    #[error("party {index} out of range for a {parties}-party system")]
    PartyOutOfRange { index: usize, parties: usize },
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPositive(f64),
    #[error("trace {0} differs from 1")]
    BadTrace(f64),
    #[error("{0}")]
    Domain(String),
    #[error("unsupported case: {0}")]
    Unsupported(String),
    #[error("no ensemble element with Schmidt number {0} found within the search budget")]
    SearchExhausted(usize),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}
