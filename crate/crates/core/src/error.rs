use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("no 50/50 beamsplitter possible for detuning ratio {epsilon} (needs |Δ|/Ω < 1)")]
    NoBeamsplitter { epsilon: f64 },

    #[error("{what} is undefined on resonance (Δ = 0)")]
    UndefinedOnResonance { what: &'static str },

    #[error("least-squares problem is rank deficient")]
    RankDeficient,

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("time step {dt:e} exceeds the stability/accuracy limit {limit:e}")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("non-finite field encountered at t = {time:e} s (step {step})")]
    NonFinite { time: f64, step: usize },

    #[error("field has zero norm")]
    ZeroNorm,

    #[error("shadow inversion failed at pixel ({row}, {col}) with residual {residual:e}")]
    InversionFailed { row: usize, col: usize, residual: f64 },

    #[error("no feasible configuration in the search space")]
    EmptySearch,

    #[error("atom number {n} too large for the dense Dicke oracle (max {max})")]
    TooManyAtoms { n: usize, max: usize },

    #[error("dimension mismatch: {what}")]
    DimensionMismatch { what: &'static str },

    #[error("not enough data: need at least {needed}, got {got}")]
    NotEnoughData { needed: usize, got: usize },
}

/// Reject anything that is not a finite, strictly positive number.
pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and > 0",
        })
    }
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and >= 0",
        })
    }
}

pub(crate) fn unit_interval(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must lie in [0, 1]",
        })
    }
}
