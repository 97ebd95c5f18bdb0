//! Runtime monitor for responsibility-sensitive safety, together with a
//! dual-channel sensing simulator, a classifier that separates
//! safety-relevant sensing failures from harmless ones, and the reliability
//! arithmetic for redundant independent sensing.
//!
//! Module map:
//!
//! - [`world`]: parameters, actors, frames, response envelopes
//! - [`kernel`]: safe distances, danger threshold, proper response, the
//!   right-of-way / occlusion / evasive rules, monitor and compliance check
//! - [`perception`]: fault-injected sensing channels and safety-union fusion
//! - [`relevance`]: per-discrepancy relevance verdicts and episode summaries
//! - [`reliability`]: MTBF, redundancy composition, fleet rate, validation burden
//! - [`harness`]: scenarios, closed-loop simulation, Monte Carlo batches
//! - [`io`]: scenario files, trace and report formats, command-line surface

// `!(x > 0.0)` is used on purpose so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod harness;
pub mod io;
pub mod kernel;
pub mod perception;
pub mod relevance;
pub mod reliability;
pub mod world;

pub use world::{
    ActorId, ActorKind, ActorState, LaneId, ResponseEnvelope, RssParameters, ValidatedParameters, WorldFrame,
};
