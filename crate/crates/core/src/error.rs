use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("bad body: {0}")]
    BadBody(String),
    #[error("point lies outside the body")]
    OutsideBody,
    #[error("solver did not converge: {0}")]
    NoConvergence(String),
    #[error("unsupported dimension {0}, the mesh solver is 2-D only")]
    UnsupportedDimension(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
