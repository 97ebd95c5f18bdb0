//! Closed-loop scenario simulation: scripted actors, a simple ego
//! controller driven by the monitor over fused perception, and Monte Carlo
//! batches with deterministic per-run random streams.

mod controller;
mod kinematics;
mod montecarlo;
mod run;
mod scenario;

use thiserror::Error;

use crate::perception::FusionError;
use crate::relevance::RelevanceError;

pub use controller::{Decision, EgoCommand, EgoController};
pub use kinematics::{integrate, lane_of, script_accel, step};
pub use montecarlo::{independence_experiment, run_batch, IndependenceReport, MonteCarloReport};
pub use run::{
    evaluate_streams, in_collision, run_scenario, CollisionEvent, EgoAccel, Evaluation, LabelCounts, RunOutput,
    RunStatistics, Stream, StreamVerdicts, TruthRecord,
};
pub use scenario::{
    library_scenario, parse_scenario, ActorSpec, Behavior, ChannelsSpec, EgoSpec, OcclusionSpec, ScenarioSpec,
    ValidScenario, LIBRARY,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("{stream} trace has {frames} frames but the truth trace has {truth}")]
    TraceLength { stream: &'static str, frames: usize, truth: usize },
    #[error(transparent)]
    Fusion(#[from] FusionError),
    #[error(transparent)]
    Relevance(#[from] RelevanceError),
    #[error("worker pool: {0}")]
    Pool(String),
}
