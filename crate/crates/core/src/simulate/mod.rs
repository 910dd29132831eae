//! Scenario generation, filter execution and Monte-Carlo error statistics.

pub mod filter;
pub mod kf;
pub mod monte_carlo;
pub mod scenario;

pub use filter::{
    init_step_state, init_step_tf, run_ss_observer, run_tf_filter, InitPolicy, ObserverRun, TfState,
};
pub use kf::{run_variable_kf, KfInit, KfRun};
pub use monte_carlo::{mc_evaluate, FrameRecord, NamedFilter, SimResult, TerminalErrors};
pub use scenario::{
    gen_scenario, noise_stream, EventSchedule, ScenarioConfig, ScenarioData, TruthPath,
};
