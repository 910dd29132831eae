//! Frequency-domain and impulse-response performance metrics.

pub mod metrics;
pub mod response;

pub use metrics::{
    analyze, flatness_residuals, flatness_residuals_for_spec, mesg, orbital_errors, sigma_metrics,
    to_db, wng, wng_frequency_domain, AnalysisOptions, DesignContext, FlatnessOrders,
    FlatnessResidual, MetricsReport,
};
pub use response::{
    desired_derivative, desired_response, freq_response, impulse_response, response_derivative,
    response_extrema, response_table, wrap_pi, ResponseSample,
};
