//! The five driving rules as pure functions, plus the incremental monitor
//! and compliance checker built on them.

mod assess;
mod compliance;
mod distance;
mod monitor;
mod response;
mod rules;

use thiserror::Error;

use crate::world::LaneId;

pub use assess::{assess_pair, Relation, SituationAssessment};
pub use compliance::{check_accel, compliance_check, ComplianceReport, ComplianceVerdict};
pub use distance::{safe_lateral_distance, safe_longitudinal_distance, stopping_distance};
pub use monitor::{ActorConstraint, FrameConstraints, SafetyMonitor, YieldDemand, CLASS_FALLBACK_S, TRACK_COAST_S};
pub use response::{danger_threshold, proper_response, DangerCause, PairResponse, PairSample, PairTracker, STATIONARY_EPS};
pub use rules::{
    evasive_maneuver_check, occlusion_speed_limit, right_of_way_decision, speed_for_stopping_distance, Maneuver, RightOfWay, RightOfWayQuery,
};


#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("velocities must be non-negative (v_rear = {v_rear}, v_front = {v_front})")]
    NegativeVelocity { v_rear: f64, v_front: f64 },
    #[error("history is empty")]
    EmptyHistory,
    #[error("lane {0} is not part of the road")]
    UnknownLane(LaneId),
    #[error("lane {to} is not adjacent to the ego lane {from}")]
    NotAdjacent { from: LaneId, to: LaneId },
    #[error("trace has {frames} frames but {accels} acceleration samples")]
    LengthMismatch { frames: usize, accels: usize },
}
