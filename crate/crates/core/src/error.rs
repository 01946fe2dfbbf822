use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("density {value} outside [0, {rho_max}]")]
    DensityOutOfRange { value: f64, rho_max: f64 },

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("junction problem: {0}")]
    Junction(String),

    #[error("coefficients undefined: no flux reaches the junction")]
    UndefinedCoefficients,

    #[error("invalid network: {}", .0.join("; "))]
    InvalidNetwork(Vec<String>),

    #[error("time step {dt} exceeds the stable step {stable}")]
    CflViolation { dt: f64, stable: f64 },

    #[error("state invariant violated: {0}")]
    InvariantBreach(String),

    #[error("empty input: {0}")]
    Empty(&'static str),
}

pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::InvalidParameter {
        name,
        value,
        reason,
    }
}
