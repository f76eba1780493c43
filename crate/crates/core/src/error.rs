use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// Full-kinematics formulas divide by the Minkowski invariant and are
    /// singular on the light cone.
    #[error("light cone: |q_M^2| = {qm2:e} is below the guard")]
    LightConeSingular { qm2: f64 },

    /// The adaptive integrator ran out of panels. Carries the best estimate.
    #[error("quadrature did not converge: value {value:e}, error estimate {err_est:e} after {panels} panels")]
    NonConvergence {
        value: f64,
        err_est: f64,
        panels: usize,
    },

    #[error("no sign change on [{lo:e}, {hi:e}]")]
    RootNotBracketed { lo: f64, hi: f64 },

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
