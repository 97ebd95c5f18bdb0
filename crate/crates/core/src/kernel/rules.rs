//! Right of way, occlusion caution and evasive manoeuvres.

use serde::{Deserialize, Serialize};

use super::assess::assess_pair;
use super::KernelError;
use crate::world::{lane_center, LaneId, OcclusionRegion, ValidatedParameters, WorldFrame, LANE_WIDTH_M};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RightOfWay {
    Proceed,
    Yield,
}

/// Geometry of a right-of-way conflict where the ego formally holds the
/// right of way.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RightOfWayQuery {
    pub ego_dist_to_conflict: f64,
    pub ego_v: f64,
    pub other_dist_to_stopline: f64,
    pub other_v: f64,
}

/// Yield when the other agent can no longer stop at its stop line even with
/// the hardest foreseeable braking.
pub fn right_of_way_decision(q: &RightOfWayQuery, p: &ValidatedParameters) -> RightOfWay {
    if q.other_v <= 0.0 {
        return RightOfWay::Proceed;
    }
    if q.other_dist_to_stopline <= 0.0 {
        return RightOfWay::Yield;
    }
    let needed = q.other_v * q.other_v / (2.0 * q.other_dist_to_stopline);
    if needed > p.brake_max_long {
        RightOfWay::Yield
    } else {
        RightOfWay::Proceed
    }
}

/// Highest speed from which the ego, after a full response time of
/// acceleration, can still brake to a stop before the near edge of the
/// occlusion.
pub fn occlusion_speed_limit(region: &OcclusionRegion, p: &ValidatedParameters) -> f64 {
    speed_for_stopping_distance(region.s_near, p)
}

/// Inverse of [`stopping_distance`](super::stopping_distance): the highest
/// speed whose stopping distance is at most `s`.
pub fn speed_for_stopping_distance(s: f64, p: &ValidatedParameters) -> f64 {
    let rho = p.response_time_s;
    let b = p.brake_min_long;
    let a = p.accel_max_long;
    // Solve u^2/(2b) + u*rho - a*rho^2/2 - s = 0 for u = v + a*rho.
    let disc = b * b * rho * rho + 2.0 * b * s + b * a * rho * rho;
    let u = -b * rho + disc.max(0.0).sqrt();
    (u - a * rho).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Maneuver {
    Permitted,
    Forbidden,
}

/// Whether the ego may move into `target_lane` without creating a dangerous
/// situation with any actor occupying that lane.
pub fn evasive_maneuver_check(
    frame: &WorldFrame,
    target_lane: LaneId,
    p: &ValidatedParameters,
) -> Result<Maneuver, KernelError> {
    if !frame.lanes.contains(&target_lane) {
        return Err(KernelError::UnknownLane(target_lane));
    }
    let ego = frame.ego();
    if (target_lane.0 - ego.lane_id.0).abs() != 1 {
        return Err(KernelError::NotAdjacent { from: ego.lane_id, to: target_lane });
    }
    let mut moved = ego.clone();
    moved.l = lane_center(target_lane);
    moved.lane_id = target_lane;
    moved.v_lat = 0.0;
    let band = 0.5 * LANE_WIDTH_M;
    for other in frame.others() {
        let in_lane = (other.l - moved.l).abs() < band + 0.5 * other.width;
        if in_lane && assess_pair(&moved, other, p, false).dangerous {
            return Ok(Maneuver::Forbidden);
        }
    }
    Ok(Maneuver::Permitted)
}
