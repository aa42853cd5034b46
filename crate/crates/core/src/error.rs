use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("L out of range: chain needs at least 2 sites, got {0}")]
    InvalidL(usize),
    #[error("q out of range: impurity site {q} not in [1, {l}]")]
    InvalidQ { q: usize, l: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("QR iteration did not converge for eigenvalue index {index}")]
    NoConvergence { index: usize },
    #[error("root finder converged on {converged} of {expected} roots")]
    RootCountMismatch { converged: usize, expected: usize },
    #[error("relative eigen-equation residual {residual:e} exceeds {threshold:e}")]
    LargeResidual { residual: f64, threshold: f64 },
    #[error("gap function has no interior minimum on [{lo}, {hi}]")]
    NoMinimum { lo: f64, hi: f64 },
    #[error("no bound state separates from the band")]
    NoBoundState,
    #[error("EP structure not classifiable: {0}")]
    Unclassifiable(String),

    #[error("log-linear fit too poor: r^2 = {r_squared:.6}")]
    PoorFit { r_squared: f64 },
    #[error("fit window too small: {left} sites left of q, {right} right (need 4 each)")]
    WindowTooSmall { left: usize, right: usize },
    #[error("absorption maximum at scan boundary (index {index})")]
    MaxAtBoundary { index: usize },

    #[error("wavepacket overlap {overlap:e} with edges/impurity exceeds {threshold:e}")]
    OverlapViolation { overlap: f64, threshold: f64 },
    #[error("no valid observation window: {0}")]
    NoValidWindow(String),
    #[error("time step underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for errors caused by bad inputs rather than numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidL(_)
                | Error::InvalidQ { .. }
                | Error::DimensionMismatch { .. }
                | Error::InvalidParameter(_)
                | Error::OverlapViolation { .. }
                | Error::NoValidWindow(_)
                | Error::WindowTooSmall { .. }
        )
    }
}
