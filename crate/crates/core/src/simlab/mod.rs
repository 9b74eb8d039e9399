//! Simulation laboratory: reference mechanisms, replicated recovery
//! scenarios and agreement metrics.

mod dgm;
mod metrics;
mod scenario;

pub use dgm::{reference_dgm, reference_dgms, simulate, DgmKind, DgmSpec, SetarRegimeSpec};
pub use metrics::{adjusted_rand_index, exact_grouping};
pub use scenario::{
    run_replicate, run_scenario, summarize, CurveStats, ScenarioConfig, ScenarioResult,
    ScenarioSummary,
};
