use serde::{Deserialize, Serialize};

use super::distance::{longitudinal_unchecked, safe_lateral_distance};
use crate::world::{ActorKind, ActorState, ValidatedParameters};

/// Where the other actor sits relative to the ego along the lane axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    OtherAhead,
    OtherBehind,
    Overlapping,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SituationAssessment {
    pub long_distance_actual: f64,
    pub long_distance_required: f64,
    pub lat_distance_actual: f64,
    pub lat_distance_required: f64,
    pub long_safe: bool,
    pub lat_safe: bool,
    pub dangerous: bool,
    /// Bodies overlap on both axes.
    pub collision: bool,
    pub relation: Relation,
}

/// How the other actor's possible motion is bounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MotionModel {
    Vehicle,
    Pedestrian,
    Static,
}

fn models_for(kind: ActorKind) -> &'static [MotionModel] {
    match kind {
        ActorKind::Vehicle => &[MotionModel::Vehicle],
        ActorKind::Pedestrian => &[MotionModel::Pedestrian],
        ActorKind::StaticObject => &[MotionModel::Static],
        // unknown class: worst of the two mobile models
        ActorKind::Unknown => &[MotionModel::Vehicle, MotionModel::Pedestrian],
    }
}

fn required_longitudinal(ego: &ActorState, other: &ActorState, relation: Relation, model: MotionModel, p: &ValidatedParameters) -> f64 {
    let other_v = if model == MotionModel::Static { 0.0 } else { other.v_long };
    match relation {
        Relation::OtherAhead => match model {
            // a pedestrian can stop instantly
            MotionModel::Pedestrian => longitudinal_unchecked(ego.v_long, 0.0, p),
            _ => longitudinal_unchecked(ego.v_long, other_v, p),
        },
        Relation::OtherBehind | Relation::Overlapping => longitudinal_unchecked(other_v, ego.v_long, p),
    }
}

fn required_lateral(ego: &ActorState, other: &ActorState, model: MotionModel, p: &ValidatedParameters) -> f64 {
    let ego_is_left = ego.l <= other.l;
    let mut other_v = match model {
        MotionModel::Static => 0.0,
        _ => other.v_lat,
    };
    if model == MotionModel::Pedestrian {
        // worst case: walking straight at the ego at full speed
        let toward = if ego_is_left { -1.0 } else { 1.0 };
        if other_v * toward < p.pedestrian_max_speed {
            other_v = toward * p.pedestrian_max_speed;
        }
    }
    if ego_is_left {
        safe_lateral_distance(ego.v_lat, other_v, p)
    } else {
        safe_lateral_distance(other_v, ego.v_lat, p)
    }
}

/// Longitudinal and lateral safety of `other` with respect to `ego`. When
/// `apply_comfort` is set the comfort margins are added to both required
/// distances.
pub fn assess_pair(ego: &ActorState, other: &ActorState, p: &ValidatedParameters, apply_comfort: bool) -> SituationAssessment {
    let (relation, long_gap) = if other.rear() >= ego.s {
        (Relation::OtherAhead, other.rear() - ego.s)
    } else if ego.rear() >= other.s {
        (Relation::OtherBehind, ego.rear() - other.s)
    } else {
        let overlap = (ego.s.min(other.s) - ego.rear().max(other.rear())).max(0.0);
        (Relation::Overlapping, -overlap)
    };
    let lat_gap = if ego.l <= other.l {
        other.left_edge() - ego.right_edge()
    } else {
        ego.left_edge() - other.right_edge()
    };

    let models = models_for(other.kind);
    let mut long_req = models
        .iter()
        .map(|&m| required_longitudinal(ego, other, relation, m, p))
        .fold(0.0, f64::max);
    let mut lat_req = models
        .iter()
        .map(|&m| required_lateral(ego, other, m, p))
        .fold(0.0, f64::max);
    if apply_comfort {
        long_req += p.comfort_margin_long;
        lat_req += p.comfort_margin_lat;
    }

    let long_safe = relation != Relation::Overlapping && long_gap >= long_req;
    let lat_safe = lat_gap >= lat_req;
    SituationAssessment {
        long_distance_actual: long_gap.max(0.0),
        long_distance_required: long_req,
        lat_distance_actual: lat_gap.max(0.0),
        lat_distance_required: lat_req,
        long_safe,
        lat_safe,
        dangerous: !long_safe && !lat_safe,
        collision: long_gap < 0.0 && lat_gap < 0.0,
        relation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::{lane_center, ActorId, LaneId, RssParameters};

    pub(crate) fn car(id: u32, s: f64, lane: i32, v: f64) -> ActorState {
        ActorState {
            actor_id: ActorId(id),
            kind: ActorKind::Vehicle,
            s,
            l: lane_center(LaneId(lane)),
            v_long: v,
            v_lat: 0.0,
            length: 4.5,
            width: 1.8,
            lane_id: LaneId(lane),
        }
    }

    fn p() -> ValidatedParameters {
        RssParameters { response_time_s: 0.5, accel_max_long: 3.5, brake_min_long: 4.0, brake_max_long: 8.0, ..Default::default() }
            .validate()
            .unwrap()
    }

    #[test]
    fn boundary_at_required_distance() {
        let ego = car(0, 0.0, 0, 20.0);
        let lead = car(1, 69.6 + 4.5, 0, 0.0);
        let a = assess_pair(&ego, &lead, &p(), false);
        assert!(a.long_safe);
        assert!(!a.dangerous);
        assert!((a.long_distance_required - 69.5703).abs() < 1e-4);

        let lead = car(1, 69.5 + 4.5, 0, 0.0);
        let a = assess_pair(&ego, &lead, &p(), false);
        assert!(!a.long_safe && !a.lat_safe && a.dangerous);
    }

    #[test]
    fn comfort_margin_tightens() {
        let ego = car(0, 0.0, 0, 20.0);
        let lead = car(1, 69.8 + 4.5, 0, 0.0);
        assert!(assess_pair(&ego, &lead, &p(), false).long_safe);
        assert!(!assess_pair(&ego, &lead, &p(), true).long_safe);
    }

    #[test]
    fn adjacent_lane_diverging_is_not_dangerous() {
        let mut ego = car(0, 0.0, 0, 20.0);
        let mut other = car(1, 2.0, 0, 20.0);
        ego.l = 0.0;
        other.l = 4.8; // 3.0 m edge to edge
        ego.v_lat = -1.0;
        other.v_lat = 1.0;
        let a = assess_pair(&ego, &other, &p(), false);
        assert!((a.lat_distance_actual - 3.0).abs() < 1e-12);
        assert!((a.lat_distance_required - 0.1).abs() < 1e-12);
        assert!(a.lat_safe);
        assert!(!a.long_safe);
        assert!(!a.dangerous);
    }

    #[test]
    fn overlapping_bodies_flag_collision() {
        let ego = car(0, 10.0, 0, 5.0);
        let other = car(1, 12.0, 0, 5.0);
        let a = assess_pair(&ego, &other, &p(), false);
        assert!(a.collision && a.dangerous);
        assert_eq!(a.long_distance_actual, 0.0);
        assert_eq!(a.lat_distance_actual, 0.0);
    }

    #[test]
    fn unknown_kind_is_at_least_as_strict() {
        let ego = car(0, 0.0, 0, 15.0);
        let mut other = car(1, 40.0, 1, 10.0);
        let vehicle = assess_pair(&ego, &other, &p(), false);
        other.kind = ActorKind::Pedestrian;
        let ped = assess_pair(&ego, &other, &p(), false);
        other.kind = ActorKind::Unknown;
        let unknown = assess_pair(&ego, &other, &p(), false);
        assert!(unknown.long_distance_required >= vehicle.long_distance_required.max(ped.long_distance_required));
        assert!(unknown.lat_distance_required >= vehicle.lat_distance_required.max(ped.lat_distance_required));
    }

    #[test]
    fn behind_uses_other_as_rear() {
        let ego = car(0, 50.0, 0, 10.0);
        let follower = car(1, 20.0, 0, 20.0);
        let a = assess_pair(&ego, &follower, &p(), false);
        assert_eq!(a.relation, Relation::OtherBehind);
        let expected = longitudinal_unchecked(20.0, 10.0, &p());
        assert_eq!(a.long_distance_required, expected);
        assert!((a.long_distance_actual - 25.5).abs() < 1e-12);
    }
}
