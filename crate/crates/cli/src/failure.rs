use dacd::error::Error;

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("internal fault: {0}")]
    Internal(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Internal(_) => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_)
            | Error::Config(_)
            | Error::Shape(_)
            | Error::Analysis(_)
            | Error::DomainTooSmall { .. }
            | Error::Json(_)
            | Error::Csv(_) => Failure::Validation(e.to_string()),
            Error::Stability { .. } | Error::Generation(_) | Error::Io(_) => Failure::Internal(e.to_string()),
        }
    }
}
