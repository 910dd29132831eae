use thiserror::Error;

/// Errors raised while building models, designing filters, or analysing them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid order {order} for {block} block (must be >= 1)")]
    InvalidOrder { block: &'static str, order: usize },

    #[error("invalid maneuver rate {omega} rad/s (must be > {min:e} for ts = {ts})")]
    InvalidRate { omega: f64, ts: f64, min: f64 },

    #[error("invalid sampling period {0} s (must be finite and > 0)")]
    InvalidSamplingPeriod(f64),

    #[error("maneuver order k_man = {0} not supported (at most one oscillator pair)")]
    TooManyManeuverPairs(usize),

    #[error("empty model: total state dimension is zero")]
    EmptyModel,

    #[error("observer pole radius {0} is not in [0, 1)")]
    UnstableRequest(f64),

    #[error("derivative order {d} must be less than target order {k_tgt}")]
    DerivativeTooHigh { d: u32, k_tgt: usize },

    #[error("process is unobservable from the predictor row ({spec})")]
    UnobservableSystem { spec: String },

    #[error("observer output row is unobservable ({spec})")]
    UnobservableOutput { spec: String },

    #[error("matrix is numerically singular (pivot ratio {ratio:e})")]
    Singular { ratio: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("frequency response evaluated on a pole at omega = {0}")]
    EvaluationOnPole(f64),

    #[error("impulse response did not converge within {0} samples")]
    NoConvergence(usize),

    #[error("metric requires derivative order 0, got {0}")]
    UnsupportedDerivative(u32),

    #[error("fixed point of the recursion is singular")]
    SingularFixedPoint,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
