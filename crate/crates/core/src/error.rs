use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("quantum numbers (n={n}, l={l}, m={m}) violate 0 <= l < n, |m| <= l")]
    QuantumNumbers { n: i64, l: i64, m: i64 },

    #[error("amplitude of n={n} at r={r} is outside the representable range")]
    Range { n: u32, r: f64 },

    #[error("packet not representable: {0}")]
    Packet(String),

    #[error("grid rejected: {0}")]
    Grid(String),

    #[error("kernel width {width} exceeds the grid extent {extent}")]
    KernelTooWide { width: f64, extent: f64 },

    #[error("time step {dt} exceeds the guard {limit}")]
    StepGuard { dt: f64, limit: f64 },

    #[error("{0}")]
    Representation(String),

    #[error("singular quadrature: {0}")]
    SingularQuadrature(String),

    #[error("boundary density {density:.3e} exceeds tolerance at t={t}")]
    BoundaryLeak { density: f64, t: f64 },

    #[error("relaxation did not converge after {steps} steps (last energy change {delta:.3e})")]
    NoConvergence { steps: usize, delta: f64 },

    #[error("no spreading detected before t={horizon}")]
    NoSpreading { horizon: f64 },

    #[error("scenario mismatch: {0}")]
    Mismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { field, reason: reason.into() }
}
