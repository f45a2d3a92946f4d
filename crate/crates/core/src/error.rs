use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A sampled function returned a non-finite value.
    #[error("non-finite sample at node {node}: {what}")]
    Evaluation { node: f64, what: String },

    /// Adaptive refinement gave up; the best estimate is attached.
    #[error("accuracy not reached: estimate {estimate} with error {est_abs_error}")]
    Accuracy { estimate: f64, est_abs_error: f64 },

    /// A caller violated a documented precondition.
    #[error("contract violated: {0}")]
    Contract(String),

    /// The request exceeds what the implementation supports.
    #[error("unsupported: {0}")]
    Capability(String),

    /// A Wronskian fell below its floor; the transformed quantity has a pole there.
    #[error("Wronskian {wronskian:e} below floor {floor:e} at y = {at}")]
    Singularity { at: f64, wronskian: f64, floor: f64 },

    /// A transformation chain failed its residual validation.
    #[error("construction failed: {0}")]
    Construction(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_finite(node: f64, value: f64, what: &str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Evaluation {
            node,
            what: what.to_string(),
        })
    }
}
