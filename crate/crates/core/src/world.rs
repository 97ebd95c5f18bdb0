//! Domain types shared by every other module: behavioural parameters, actor
//! kinematics, world frames and the response envelope.
//!
//! Geometry is a lane model: every actor has a longitudinal coordinate `s`
//! (front bumper, along the lane axis) and a continuous lateral coordinate
//! `l` (centerline, positive to the right). Lane `k` is centred at
//! `l = k * LANE_WIDTH_M`. All units are SI.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Width of every lane in the lane model.
pub const LANE_WIDTH_M: f64 = 3.5;

/// Lateral position of a lane's centerline.
pub fn lane_center(lane: LaneId) -> f64 {
    f64::from(lane.0) * LANE_WIDTH_M
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActorId(pub u32);

impl fmt::Display for ActorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LaneId(pub i32);

impl fmt::Display for LaneId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActorKind {
    Vehicle,
    Pedestrian,
    StaticObject,
    Unknown,
}

/// Worst-case behavioural assumptions about other road users plus the
/// ego's own response characteristics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RssParameters {
    pub response_time_s: f64,
    pub accel_max_long: f64,
    /// Braking the rear vehicle is guaranteed to apply once it responds.
    pub brake_min_long: f64,
    /// Hardest braking the front vehicle is assumed capable of.
    pub brake_max_long: f64,
    pub accel_max_lat: f64,
    pub brake_min_lat: f64,
    pub lateral_margin_mu: f64,
    pub pedestrian_max_speed: f64,
    pub comfort_margin_long: f64,
    pub comfort_margin_lat: f64,
}

impl Default for RssParameters {
    fn default() -> Self {
        Self {
            response_time_s: 0.5,
            accel_max_long: 3.5,
            brake_min_long: 4.0,
            brake_max_long: 8.0,
            accel_max_lat: 1.0,
            brake_min_lat: 2.0,
            lateral_margin_mu: 0.1,
            pedestrian_max_speed: 2.0,
            comfort_margin_long: 0.5,
            comfort_margin_lat: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParameterError {
    #[error("{field} must be strictly positive and finite (got {value})")]
    NotPositive { field: &'static str, value: f64 },
    #[error("{field} must be non-negative and finite (got {value})")]
    Negative { field: &'static str, value: f64 },
    #[error("brake_min_long ({brake_min_long}) must not exceed brake_max_long ({brake_max_long})")]
    BrakeOrdering { brake_min_long: f64, brake_max_long: f64 },
    #[error("response_time_s ({0}) exceeds the 10 s sanity bound")]
    ResponseTimeTooLarge(f64),
}

/// Parameters that passed [`RssParameters::validate`]. Every kernel
/// operation takes this type, never the raw struct. The defaults are valid, so `Default` needs no validation step.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
#[serde(transparent)]
pub struct ValidatedParameters(RssParameters);

impl ValidatedParameters {
    pub fn get(&self) -> &RssParameters {
        &self.0
    }

    pub fn into_inner(self) -> RssParameters {
        self.0
    }
}

impl std::ops::Deref for ValidatedParameters {
    type Target = RssParameters;

    fn deref(&self) -> &RssParameters {
        &self.0
    }
}

impl RssParameters {
    pub fn validate(self) -> Result<ValidatedParameters, ParameterError> {
        let positive = [
            ("response_time_s", self.response_time_s),
            ("accel_max_long", self.accel_max_long),
            ("brake_min_long", self.brake_min_long),
            ("brake_max_long", self.brake_max_long),
            ("accel_max_lat", self.accel_max_lat),
            ("brake_min_lat", self.brake_min_lat),
            ("lateral_margin_mu", self.lateral_margin_mu),
            ("pedestrian_max_speed", self.pedestrian_max_speed),
        ];
        for (field, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(ParameterError::NotPositive { field, value });
            }
        }
        for (field, value) in [
            ("comfort_margin_long", self.comfort_margin_long),
            ("comfort_margin_lat", self.comfort_margin_lat),
        ] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(ParameterError::Negative { field, value });
            }
        }
        if self.brake_min_long > self.brake_max_long {
            return Err(ParameterError::BrakeOrdering {
                brake_min_long: self.brake_min_long,
                brake_max_long: self.brake_max_long,
            });
        }
        if self.response_time_s > 10.0 {
            return Err(ParameterError::ResponseTimeTooLarge(self.response_time_s));
        }
        Ok(ValidatedParameters(self))
    }
}

impl<'de> Deserialize<'de> for ValidatedParameters {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        RssParameters::deserialize(d)?
            .validate()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActorState {
    pub actor_id: ActorId,
    pub kind: ActorKind,
    /// Front bumper position along the lane axis.
    pub s: f64,
    /// Centerline lateral position, positive rightward.
    pub l: f64,
    pub v_long: f64,
    pub v_lat: f64,
    pub length: f64,
    pub width: f64,
    pub lane_id: LaneId,
}

impl ActorState {
    pub fn rear(&self) -> f64 {
        self.s - self.length
    }

    pub fn left_edge(&self) -> f64 {
        self.l - 0.5 * self.width
    }

    pub fn right_edge(&self) -> f64 {
        self.l + 0.5 * self.width
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HiddenAgent {
    Pedestrian,
    Vehicle,
}

/// Region of limited visibility ahead of the ego, measured relative to the
/// ego's front bumper in the frame it belongs to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcclusionRegion {
    pub s_near: f64,
    pub lateral_offset: f64,
    pub hides: HiddenAgent,
}

/// Crossing corridor over the ego's road where the ego holds right of way.
/// `s_near..s_far` is the absolute extent along the ego lane axis; crossing
/// traffic approaching from the left must stop with its front at
/// `stop_line_left`, traffic from the right at `stop_line_right`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub s_near: f64,
    pub s_far: f64,
    pub stop_line_left: f64,
    pub stop_line_right: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldFrame {
    pub t: f64,
    pub ego_id: ActorId,
    pub actors: Vec<ActorState>,
    #[serde(default)]
    pub occlusions: Vec<OcclusionRegion>,
    /// Lanes of the road, in no particular order.
    #[serde(default)]
    pub lanes: Vec<LaneId>,
    #[serde(default)]
    pub crossings: Vec<Crossing>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrameError {
    #[error("ego {0} appears {1} times in the frame (expected exactly once)")]
    EgoCount(ActorId, usize),
    #[error("actor id {0} is not unique")]
    DuplicateActor(ActorId),
    #[error("actor {id}: {what}")]
    InvalidActor { id: ActorId, what: &'static str },
    #[error("occlusion region {0}: s_near must be > 0 and lateral_offset >= 0")]
    InvalidOcclusion(usize),
}

impl WorldFrame {
    pub fn validate(&self) -> Result<(), FrameError> {
        let egos = self.actors.iter().filter(|a| a.actor_id == self.ego_id).count();
        if egos != 1 {
            return Err(FrameError::EgoCount(self.ego_id, egos));
        }
        let mut seen = HashSet::with_capacity(self.actors.len());
        for a in &self.actors {
            if !seen.insert(a.actor_id) {
                return Err(FrameError::DuplicateActor(a.actor_id));
            }
            if !(a.length > 0.0 && a.width > 0.0) {
                return Err(FrameError::InvalidActor { id: a.actor_id, what: "length and width must be > 0" });
            }
            if !(a.v_long >= 0.0) {
                return Err(FrameError::InvalidActor { id: a.actor_id, what: "v_long must be >= 0" });
            }
        }
        for (i, o) in self.occlusions.iter().enumerate() {
            if !(o.s_near > 0.0 && o.lateral_offset >= 0.0) {
                return Err(FrameError::InvalidOcclusion(i));
            }
        }
        Ok(())
    }

    /// Panics if the ego is missing; frames are validated on construction
    /// everywhere they enter the library.
    pub fn ego(&self) -> &ActorState {
        self.actors
            .iter()
            .find(|a| a.actor_id == self.ego_id)
            .expect("frame without ego")
    }

    pub fn actor(&self, id: ActorId) -> Option<&ActorState> {
        self.actors.iter().find(|a| a.actor_id == id)
    }

    pub fn others(&self) -> impl Iterator<Item = &ActorState> {
        let ego = self.ego_id;
        self.actors.iter().filter(move |a| a.actor_id != ego)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeState {
    Safe,
    DangerousLongitudinal,
    DangerousLateral,
    DangerousBoth,
}

impl EnvelopeState {
    pub fn is_dangerous(self) -> bool {
        self != EnvelopeState::Safe
    }

    /// Union of two states.
    pub fn merge(self, other: EnvelopeState) -> EnvelopeState {
        use EnvelopeState::*;
        match (self, other) {
            (Safe, x) | (x, Safe) => x,
            (a, b) if a == b => a,
            _ => DangerousBoth,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LateralAction {
    None,
    ReachZeroLateralVelocity,
}

/// Acceleration constraints the proper response places on the ego.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponseEnvelope {
    pub state: EnvelopeState,
    /// Upper bound on longitudinal acceleration; negative means braking is
    /// demanded.
    pub max_allowed_accel_long: f64,
    pub min_required_brake_long: f64,
    pub lateral_action: LateralAction,
    /// Danger threshold time, absent when safe.
    pub since_t: Option<f64>,
}

impl ResponseEnvelope {
    pub fn unconstrained(p: &ValidatedParameters) -> Self {
        Self {
            state: EnvelopeState::Safe,
            max_allowed_accel_long: p.accel_max_long,
            min_required_brake_long: 0.0,
            lateral_action: LateralAction::None,
            since_t: None,
        }
    }

    /// Tightest envelope satisfying both inputs.
    pub fn intersect(&self, other: &ResponseEnvelope) -> ResponseEnvelope {
        let since_t = match (self.since_t, other.since_t) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let lateral_action = if self.lateral_action == LateralAction::ReachZeroLateralVelocity
            || other.lateral_action == LateralAction::ReachZeroLateralVelocity
        {
            LateralAction::ReachZeroLateralVelocity
        } else {
            LateralAction::None
        };
        ResponseEnvelope {
            state: self.state.merge(other.state),
            max_allowed_accel_long: self.max_allowed_accel_long.min(other.max_allowed_accel_long),
            min_required_brake_long: self.min_required_brake_long.max(other.min_required_brake_long),
            lateral_action,
            since_t,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let p = RssParameters { response_time_s: 0.5, accel_max_long: 3.5, brake_min_long: 4.0, brake_max_long: 8.0, ..Default::default() };
        assert!(p.validate().is_ok());
    }

    #[test]
    fn brake_ordering_names_both_fields() {
        let p = RssParameters { brake_min_long: 9.0, brake_max_long: 8.0, ..Default::default() };
        let err = p.validate().unwrap_err().to_string();
        assert!(err.contains("brake_min_long") && err.contains("brake_max_long"), "{err}");
    }

    #[test]
    fn zero_response_time_rejected() {
        let p = RssParameters { response_time_s: 0.0, ..Default::default() };
        assert_eq!(
            p.validate().unwrap_err(),
            ParameterError::NotPositive { field: "response_time_s", value: 0.0 }
        );
    }

    #[test]
    fn comfort_margins_may_be_zero() {
        let p = RssParameters { comfort_margin_long: 0.0, comfort_margin_lat: 0.0, ..Default::default() };
        assert!(p.validate().is_ok());
        let p = RssParameters { comfort_margin_lat: -0.1, ..Default::default() };
        assert!(matches!(p.validate(), Err(ParameterError::Negative { field: "comfort_margin_lat", .. })));
    }

    #[test]
    fn unit_confusion_rejected() {
        let p = RssParameters { response_time_s: 500.0, ..Default::default() };
        assert_eq!(p.validate().unwrap_err(), ParameterError::ResponseTimeTooLarge(500.0));
    }

    fn actor(id: u32) -> ActorState {
        ActorState {
            actor_id: ActorId(id),
            kind: ActorKind::Vehicle,
            s: 0.0,
            l: 0.0,
            v_long: 1.0,
            v_lat: 0.0,
            length: 4.5,
            width: 1.8,
            lane_id: LaneId(0),
        }
    }

    #[test]
    fn frame_requires_single_ego_and_unique_ids() {
        let mut f = WorldFrame { t: 0.0, ego_id: ActorId(0), actors: vec![actor(1)], occlusions: vec![], lanes: vec![], crossings: vec![] };
        assert_eq!(f.validate(), Err(FrameError::EgoCount(ActorId(0), 0)));
        f.actors.push(actor(0));
        assert!(f.validate().is_ok());
        f.actors.push(actor(1));
        assert_eq!(f.validate(), Err(FrameError::DuplicateActor(ActorId(1))));
    }

    #[test]
    fn envelope_intersection_is_tightest() {
        let p = ValidatedParameters::default();
        let a = ResponseEnvelope::unconstrained(&p);
        let b = ResponseEnvelope {
            state: EnvelopeState::DangerousLongitudinal,
            max_allowed_accel_long: -4.0,
            min_required_brake_long: 4.0,
            lateral_action: LateralAction::None,
            since_t: Some(1.0),
        };
        let c = a.intersect(&b);
        assert_eq!(c, b);
        assert_eq!(EnvelopeState::DangerousLateral.merge(EnvelopeState::DangerousLongitudinal), EnvelopeState::DangerousBoth);
    }

    use proptest::prelude::*;

    const FIELDS: usize = 10;

    fn set(p: &mut RssParameters, i: usize, v: f64) {
        let slot = match i {
            0 => &mut p.response_time_s,
            1 => &mut p.accel_max_long,
            2 => &mut p.brake_min_long,
            3 => &mut p.brake_max_long,
            4 => &mut p.accel_max_lat,
            5 => &mut p.brake_min_lat,
            6 => &mut p.lateral_margin_mu,
            7 => &mut p.pedestrian_max_speed,
            8 => &mut p.comfort_margin_long,
            _ => &mut p.comfort_margin_lat,
        };
        *slot = v;
    }

    /// Independent statement of the accepted region.
    fn accepted(p: &RssParameters) -> bool {
        let pos = [
            p.response_time_s,
            p.accel_max_long,
            p.brake_min_long,
            p.brake_max_long,
            p.accel_max_lat,
            p.brake_min_lat,
            p.lateral_margin_mu,
            p.pedestrian_max_speed,
        ];
        pos.iter().all(|v| v.is_finite() && *v > 0.0)
            && [p.comfort_margin_long, p.comfort_margin_lat].iter().all(|v| v.is_finite() && *v >= 0.0)
            && p.brake_min_long <= p.brake_max_long
            && p.response_time_s <= 10.0
    }

    fn edge_value() -> impl Strategy<Value = f64> {
        prop_oneof![
            Just(0.0),
            Just(-0.0),
            Just(f64::MIN_POSITIVE),
            Just(-f64::MIN_POSITIVE),
            Just(10.0),
            Just(10.0 + 1e-9),
            Just(f64::NAN),
            Just(f64::INFINITY),
            Just(f64::NEG_INFINITY),
            -20.0..20.0f64,
        ]
    }

    fn kind() -> impl Strategy<Value = ActorKind> {
        prop_oneof![
            Just(ActorKind::Vehicle),
            Just(ActorKind::Pedestrian),
            Just(ActorKind::StaticObject),
            Just(ActorKind::Unknown)
        ]
    }

    fn any_actor(id: u32) -> impl Strategy<Value = ActorState> {
        (kind(), -1e4..1e4f64, -50.0..50.0f64, 0.0..60.0f64, -5.0..5.0f64, 0.1..20.0f64, 0.1..4.0f64, -3i32..4)
            .prop_map(move |(kind, s, l, v_long, v_lat, length, width, lane)| ActorState {
                actor_id: ActorId(id),
                kind,
                s,
                l,
                v_long,
                v_lat,
                length,
                width,
                lane_id: LaneId(lane),
            })
    }

    proptest! {
        /// Perturbing up to three fields with values on and around each
        /// bound is accepted exactly when the stated region contains it.
        #[test]
        fn validation_matches_accepted_region(
            edits in prop::collection::vec((0..FIELDS, edge_value()), 1..4),
        ) {
            let mut p = RssParameters::default();
            for &(i, v) in &edits {
                set(&mut p, i, v);
            }
            prop_assert_eq!(p.validate().is_ok(), accepted(&p), "{:?}", p);
        }

        #[test]
        fn valid_region_is_accepted(
            rho in 1e-3..10.0f64, a in 1e-3..20.0f64, bmin in 1e-3..20.0f64, extra in 0.0..20.0f64,
            alat in 1e-3..5.0f64, blat in 1e-3..5.0f64, mu in 1e-3..1.0f64, ped in 1e-3..5.0f64,
            cl in 0.0..2.0f64, ct in 0.0..2.0f64,
        ) {
            let p = RssParameters {
                response_time_s: rho,
                accel_max_long: a,
                brake_min_long: bmin,
                brake_max_long: bmin + extra,
                accel_max_lat: alat,
                brake_min_lat: blat,
                lateral_margin_mu: mu,
                pedestrian_max_speed: ped,
                comfort_margin_long: cl,
                comfort_margin_lat: ct,
            };
            prop_assert!(p.validate().is_ok());
        }

        #[test]
        fn frame_round_trips_through_json(
            t in 0.0..1e5f64,
            actors in (any_actor(0), any_actor(1), any_actor(2)),
            s_near in 0.1..100.0f64,
            offset in 0.0..10.0f64,
        ) {
            let f = WorldFrame {
                t,
                ego_id: ActorId(0),
                actors: vec![actors.0, actors.1, actors.2],
                occlusions: vec![OcclusionRegion { s_near, lateral_offset: offset, hides: HiddenAgent::Vehicle }],
                lanes: vec![LaneId(-1), LaneId(0), LaneId(1)],
                crossings: vec![Crossing { s_near, s_far: s_near + 4.0, stop_line_left: -5.0, stop_line_right: 5.0 }],
            };
            let text = serde_json::to_string(&f).unwrap();
            let back: WorldFrame = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back, f);
        }
    }
}
