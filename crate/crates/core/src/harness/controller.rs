//! Deliberately simple ego controller: track a target speed, keep a comfort
//! gap, and clip everything into the constraints the monitor derives from
//! the fused perception.

use serde::{Deserialize, Serialize};

use crate::kernel::{evasive_maneuver_check, speed_for_stopping_distance, FrameConstraints, Maneuver};
use crate::world::{lane_center, ActorKind, ActorState, LaneId, LateralAction, ValidatedParameters, WorldFrame};

/// Speed-tracking gain (1/s).
const SPEED_GAIN: f64 = 1.0;
/// Lateral clearance beyond the bodies that still counts as in path (m).
const PATH_MARGIN_M: f64 = 0.3;
/// Distance kept before a yield line or an owed-brake target (m).
const STOP_BUFFER_M: f64 = 1.0;
const LANE_GAIN: f64 = 0.8;
const LANE_SPEED_MAX: f64 = 1.5;
const LANE_SETTLED_M: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Cruise,
    Follow,
    OcclusionCaution,
    Yield,
    ProperResponse,
    Evasive,
    Blind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EgoCommand {
    pub a_long: f64,
    pub a_lat: f64,
    pub decision: Decision,
}

#[derive(Debug, Clone)]
pub struct EgoController {
    p: ValidatedParameters,
    target_speed: f64,
    target_lane: LaneId,
    evading: bool,
    /// Braking was chosen for the current obligation; kept until it clears
    /// so the manoeuvre does not flip mid-response.
    braking: bool,
}

/// Assumed speed of something ahead for planning: only vehicles are trusted
/// to keep moving.
fn planning_speed(other: &ActorState, kind: ActorKind) -> f64 {
    if kind == ActorKind::Vehicle {
        other.v_long
    } else {
        0.0
    }
}

impl EgoController {
    pub fn new(p: ValidatedParameters, target_speed: f64, lane: LaneId) -> Self {
        Self { p, target_speed, target_lane: lane, evading: false, braking: false }
    }

    pub fn target_lane(&self) -> LaneId {
        self.target_lane
    }

    fn in_path(&self, ego: &ActorState, other: &ActorState) -> bool {
        let reach = 0.5 * (ego.width + other.width) + PATH_MARGIN_M;
        let target = lane_center(self.target_lane);
        (other.l - ego.l).abs() < reach || (other.l - target).abs() < reach
    }

    /// Longitudinal acceleration keeping the comfort gap to everything ahead
    /// in the path.
    fn follow_accel(&self, frame: &WorldFrame, c: &FrameConstraints) -> Option<f64> {
        let p = &self.p;
        let ego = frame.ego();
        frame
            .others()
            .filter(|o| o.rear() > ego.s && self.in_path(ego, o))
            .map(|o| {
                let kind = c.actor(o.actor_id).map_or(o.kind, |a| a.assessed_kind);
                let vf = planning_speed(o, kind);
                let gap = o.rear() - ego.s - p.comfort_margin_long;
                let allowed = speed_for_stopping_distance(gap + vf * vf / (2.0 * p.brake_max_long), p);
                SPEED_GAIN * (allowed - ego.v_long)
            })
            .reduce(f64::min)
    }

    fn braking_for(&self, ego: &ActorState, other: &ActorState, kind: ActorKind) -> f64 {
        let p = &self.p;
        let vf = planning_speed(other, kind);
        let room = other.rear() - ego.s + vf * vf / (2.0 * p.brake_max_long) - STOP_BUFFER_M;
        let needed = if room > 0.1 { ego.v_long * ego.v_long / (2.0 * room) } else { p.brake_max_long };
        needed.max(p.brake_min_long).min(p.brake_max_long)
    }

    pub fn command(&mut self, frame: &WorldFrame, c: &FrameConstraints, dt: f64) -> EgoCommand {
        let p = self.p;
        let ego = frame.ego().clone();
        let v = ego.v_long;
        let mut decision = Decision::Cruise;
        let mut a = (SPEED_GAIN * (self.target_speed - v)).clamp(-p.brake_min_long, p.accel_max_long);

        if let Some(af) = self.follow_accel(frame, c) {
            if af < a {
                a = af;
                decision = Decision::Follow;
            }
        }

        if let Some(s_near) = frame.occlusions.iter().map(|o| o.s_near).reduce(f64::min) {
            let cap_next = speed_for_stopping_distance(s_near - v * dt, &p);
            let a_cap = (cap_next - v) / dt;
            if a_cap < a {
                a = a_cap;
                decision = Decision::OcclusionCaution;
            }
        }

        if let Some(stop) = c.yield_stop() {
            let room = stop - STOP_BUFFER_M - ego.s;
            let needed = if v <= 0.0 {
                0.0
            } else if room > 0.0 {
                v * v / (2.0 * room)
            } else {
                p.brake_max_long
            };
            if -needed < a {
                a = -needed.min(p.brake_max_long);
                decision = Decision::Yield;
            }
        }

        if !c.owes_brake() {
            self.braking = false;
        }
        if c.blind {
            decision = Decision::Blind;
        } else if c.owes_brake() {
            let owing: Vec<_> = c
                .actors
                .iter()
                .filter(|x| x.owes_brake)
                .filter_map(|x| frame.actor(x.actor_id).map(|o| (o, x.assessed_kind)))
                .collect();
            let obstacles_only = owing
                .iter()
                .all(|(o, k)| matches!(k, ActorKind::StaticObject | ActorKind::Unknown) && o.rear() > ego.s);
            if obstacles_only && !self.evading && !self.braking {
                for lane in [LaneId(ego.lane_id.0 - 1), LaneId(ego.lane_id.0 + 1)] {
                    if frame.lanes.contains(&lane) && evasive_maneuver_check(frame, lane, &p) == Ok(Maneuver::Permitted) {
                        self.target_lane = lane;
                        self.evading = true;
                        break;
                    }
                }
            }
            if self.evading {
                a = a.min(0.0);
                decision = Decision::Evasive;
            } else {
                self.braking = true;
                let brake = owing.iter().map(|(o, k)| self.braking_for(&ego, o, *k)).fold(p.brake_min_long, f64::max);
                if v > 0.0 {
                    a = a.min(-brake);
                } else {
                    a = a.min(0.0);
                }
                decision = Decision::ProperResponse;
            }
        }

        let env = &c.envelope;
        a = a.max(-p.brake_max_long).min(env.max_allowed_accel_long);
        if env.min_required_brake_long > 0.0 {
            a = a.min(-env.min_required_brake_long);
        }

        let a_lat = if env.lateral_action == LateralAction::ReachZeroLateralVelocity {
            if ego.v_lat == 0.0 {
                0.0
            } else {
                -ego.v_lat.signum() * p.brake_min_lat.min(ego.v_lat.abs() / dt)
            }
        } else {
            let err = lane_center(self.target_lane) - ego.l;
            if self.evading && err.abs() < LANE_SETTLED_M && ego.v_lat.abs() < 0.1 {
                self.evading = false;
            }
            let desired = err.signum()
                * (LANE_GAIN * err.abs()).min(LANE_SPEED_MAX).min((2.0 * p.accel_max_lat * err.abs()).sqrt());
            ((desired - ego.v_lat) / dt).clamp(-p.accel_max_lat, p.accel_max_lat)
        };

        EgoCommand { a_long: a, a_lat, decision }
    }
}
