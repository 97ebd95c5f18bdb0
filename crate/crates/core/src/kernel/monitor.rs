//! Frame-by-frame safety monitor aggregating every rule into one set of
//! constraints on the ego.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::assess::{assess_pair, SituationAssessment};
use super::response::{DangerCause, PairSample, PairTracker, STATIONARY_EPS};
use super::rules::{occlusion_speed_limit, right_of_way_decision, RightOfWay, RightOfWayQuery};
use crate::world::{
    lane_center, ActorId, ActorKind, ActorState, EnvelopeState, LateralAction, ResponseEnvelope, ValidatedParameters,
    WorldFrame, LANE_WIDTH_M,
};

/// Pair histories older than this are forgotten when an actor is not seen.
pub const TRACK_COAST_S: f64 = 1.0;
/// An actor whose class changed within this horizon is assessed with the
/// worst-case motion model.
pub const CLASS_FALLBACK_S: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActorConstraint {
    pub actor_id: ActorId,
    /// Class the actor was assessed as after the misclassification fallback.
    pub assessed_kind: ActorKind,
    pub assessment: SituationAssessment,
    /// Dangerous once comfort margins are added.
    pub comfort_dangerous: bool,
    pub envelope: ResponseEnvelope,
    pub cause: Option<DangerCause>,
    pub owes_brake: bool,
    pub owes_lateral: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YieldDemand {
    pub actor_id: ActorId,
    /// Ego front bumper must stay behind this longitudinal position.
    pub stop_before_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameConstraints {
    pub t: f64,
    pub envelope: ResponseEnvelope,
    pub actors: Vec<ActorConstraint>,
    pub yields: Vec<YieldDemand>,
    pub occlusion_cap: Option<f64>,
    /// No perception at all; maximal caution applies.
    pub blind: bool,
}

impl FrameConstraints {
    pub fn owes_brake(&self) -> bool {
        self.blind || self.actors.iter().any(|a| a.owes_brake)
    }

    pub fn owes_lateral(&self) -> bool {
        self.blind || self.actors.iter().any(|a| a.owes_lateral)
    }

    pub fn comfort_dangerous(&self) -> bool {
        self.actors.iter().any(|a| a.comfort_dangerous)
    }

    pub fn yield_stop(&self) -> Option<f64> {
        self.yields.iter().map(|y| y.stop_before_s).reduce(f64::min)
    }

    pub fn actor(&self, id: ActorId) -> Option<&ActorConstraint> {
        self.actors.iter().find(|a| a.actor_id == id)
    }
}

#[derive(Debug, Clone)]
struct Track {
    tracker: PairTracker,
    last_t: f64,
    kind: ActorKind,
    kind_changed_t: Option<f64>,
}

/// Incremental monitor for one perceived (or ground-truth) world stream.
#[derive(Debug, Clone)]
pub struct SafetyMonitor {
    params: ValidatedParameters,
    tracks: BTreeMap<ActorId, Track>,
}

impl SafetyMonitor {
    pub fn new(params: ValidatedParameters) -> Self {
        Self { params, tracks: BTreeMap::new() }
    }

    pub fn params(&self) -> &ValidatedParameters {
        &self.params
    }

    pub fn update(&mut self, frame: &WorldFrame) -> FrameConstraints {
        let p = self.params;
        let ego = frame.ego();
        let t = frame.t;
        let mut envelope = ResponseEnvelope::unconstrained(&p);
        let mut actors = Vec::with_capacity(frame.actors.len().saturating_sub(1));

        for other in frame.others() {
            let track = self.tracks.entry(other.actor_id).or_insert_with(|| Track {
                tracker: PairTracker::new(),
                last_t: t,
                kind: other.kind,
                kind_changed_t: None,
            });
            if track.kind != other.kind {
                track.kind = other.kind;
                track.kind_changed_t = Some(t);
            }
            track.last_t = t;
            let recently_changed = track.kind_changed_t.is_some_and(|c| t - c <= CLASS_FALLBACK_S);
            let assessed_kind = if recently_changed { ActorKind::Unknown } else { other.kind };

            let assessed = if assessed_kind == other.kind {
                assess_pair(ego, other, &p, false)
            } else {
                let mut o = other.clone();
                o.kind = assessed_kind;
                assess_pair(ego, &o, &p, false)
            };
            let comfort_dangerous = if assessed.dangerous {
                true
            } else {
                let mut o = other.clone();
                o.kind = assessed_kind;
                assess_pair(ego, &o, &p, true).dangerous
            };
            let resp = track.tracker.update(PairSample { t, ego_v_long: ego.v_long, assessment: assessed }, &p);
            envelope = envelope.intersect(&resp.envelope);
            actors.push(ActorConstraint {
                actor_id: other.actor_id,
                assessed_kind,
                assessment: assessed,
                comfort_dangerous,
                envelope: resp.envelope,
                cause: resp.cause,
                owes_brake: resp.owes_brake,
                owes_lateral: resp.owes_lateral,
            });
        }
        self.tracks.retain(|_, tr| t - tr.last_t <= TRACK_COAST_S);

        FrameConstraints {
            t,
            envelope,
            actors,
            yields: yield_demands(frame, &p),
            occlusion_cap: occlusion_cap(frame, &p),
            blind: false,
        }
    }

    /// Constraints for a frame in which nothing could be perceived: brake as
    /// hard as the model allows and stop any lateral motion.
    pub fn blind(&self, frame: &WorldFrame) -> FrameConstraints {
        let p = self.params;
        let ego = frame.ego();
        let stationary = ego.v_long <= STATIONARY_EPS;
        let envelope = ResponseEnvelope {
            state: EnvelopeState::DangerousBoth,
            max_allowed_accel_long: if stationary { 0.0 } else { -p.brake_max_long },
            min_required_brake_long: if stationary { 0.0 } else { p.brake_max_long },
            lateral_action: LateralAction::ReachZeroLateralVelocity,
            since_t: Some(frame.t),
        };
        FrameConstraints {
            t: frame.t,
            envelope,
            actors: Vec::new(),
            yields: Vec::new(),
            occlusion_cap: occlusion_cap(frame, &p),
            blind: true,
        }
    }
}

fn occlusion_cap(frame: &WorldFrame, p: &ValidatedParameters) -> Option<f64> {
    frame
        .occlusions
        .iter()
        .map(|r| occlusion_speed_limit(r, p))
        .reduce(f64::min)
}

fn road_band(frame: &WorldFrame, ego: &ActorState) -> (f64, f64) {
    let half = 0.5 * LANE_WIDTH_M;
    let centers = frame.lanes.iter().map(|&l| lane_center(l));
    let lo = centers.clone().fold(lane_center(ego.lane_id), f64::min);
    let hi = centers.fold(lane_center(ego.lane_id), f64::max);
    (lo - half, hi + half)
}

/// Crossing traffic the ego must yield to even though it holds the right of
/// way.
fn yield_demands(frame: &WorldFrame, p: &ValidatedParameters) -> Vec<YieldDemand> {
    if frame.crossings.is_empty() {
        return Vec::new();
    }
    let ego = frame.ego();
    let (road_left, road_right) = road_band(frame, ego);
    let mut out = Vec::new();
    for c in &frame.crossings {
        if ego.s >= c.s_near {
            continue;
        }
        for other in frame.others() {
            let in_corridor = other.s > c.s_near && other.rear() < c.s_far;
            if !in_corridor || other.v_lat == 0.0 {
                continue;
            }
            let dist = if other.v_lat > 0.0 {
                if other.left_edge() >= road_right {
                    continue;
                }
                c.stop_line_left - other.right_edge()
            } else {
                if other.right_edge() <= road_left {
                    continue;
                }
                other.left_edge() - c.stop_line_right
            };
            let q = RightOfWayQuery {
                ego_dist_to_conflict: c.s_near - ego.s,
                ego_v: ego.v_long,
                other_dist_to_stopline: dist.max(0.0),
                other_v: other.v_lat.abs(),
            };
            if right_of_way_decision(&q, p) == RightOfWay::Yield {
                out.push(YieldDemand { actor_id: other.actor_id, stop_before_s: c.s_near });
            }
        }
    }
    out
}
