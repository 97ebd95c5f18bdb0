//! Scenario description: road, ego, scripted actors, map features, sensing
//! faults and run configuration.

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::perception::{FaultModel, FusionConfig};
use crate::relevance::RelevanceConfig;
use crate::world::{lane_center, ActorId, ActorKind, ActorState, HiddenAgent, LaneId, RssParameters, ValidatedParameters};

/// Behaviour script of a non-ego actor.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Behavior {
    #[default]
    ConstantSpeed,
    /// Brake at `decel` from time `t` until stopped.
    BrakeAt { t: f64, decel: f64 },
    /// From time `t`, move laterally into `target_lane` at up to
    /// `lateral_rate`, changing lateral speed at most at `lateral_accel`.
    CutIn {
        t: f64,
        lateral_rate: f64,
        target_lane: LaneId,
        #[serde(default = "default_lateral_accel")]
        lateral_accel: f64,
    },
    /// Crosses the road at constant signed lateral `speed`, ignoring its
    /// stop line.
    RedLightRunner { speed: f64 },
    /// Absent before `t`; then appears at its initial position moving at
    /// signed lateral `speed`.
    EmergeFromOcclusion { t: f64, speed: f64 },
}

fn default_lateral_accel() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActorSpec {
    pub id: u32,
    #[serde(default = "default_kind")]
    pub kind: ActorKind,
    pub s: f64,
    #[serde(default)]
    pub lane: LaneId,
    /// Lateral position; defaults to the lane center.
    #[serde(default)]
    pub l: Option<f64>,
    #[serde(default)]
    pub v_long: f64,
    #[serde(default)]
    pub v_lat: f64,
    #[serde(default)]
    pub length: Option<f64>,
    #[serde(default)]
    pub width: Option<f64>,
    #[serde(default)]
    pub behavior: Behavior,
}

fn default_kind() -> ActorKind {
    ActorKind::Vehicle
}

fn default_size(kind: ActorKind) -> (f64, f64) {
    match kind {
        ActorKind::Vehicle | ActorKind::Unknown => (4.5, 1.8),
        ActorKind::Pedestrian => (0.5, 0.5),
        ActorKind::StaticObject => (1.0, 1.0),
    }
}

impl ActorSpec {
    pub fn initial_state(&self) -> ActorState {
        let (length, width) = default_size(self.kind);
        let l = self.l.unwrap_or_else(|| lane_center(self.lane));
        ActorState {
            actor_id: ActorId(self.id),
            kind: self.kind,
            s: self.s,
            l,
            v_long: self.v_long,
            v_lat: match self.behavior {
                Behavior::RedLightRunner { speed } | Behavior::EmergeFromOcclusion { speed, .. } => speed,
                _ => self.v_lat,
            },
            length: self.length.unwrap_or(length),
            width: self.width.unwrap_or(width),
            lane_id: self.lane,
        }
    }

    /// Time from which the actor exists in the world.
    pub fn appears_at(&self) -> f64 {
        match self.behavior {
            Behavior::EmergeFromOcclusion { t, .. } => t,
            _ => f64::NEG_INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EgoSpec {
    pub id: u32,
    pub s: f64,
    pub lane: LaneId,
    pub v_long: f64,
    pub target_speed: f64,
    pub length: f64,
    pub width: f64,
}

impl Default for EgoSpec {
    fn default() -> Self {
        Self { id: 0, s: 0.0, lane: LaneId(0), v_long: 20.0, target_speed: 20.0, length: 4.5, width: 1.8 }
    }
}

impl EgoSpec {
    pub fn initial_state(&self) -> ActorState {
        ActorState {
            actor_id: ActorId(self.id),
            kind: ActorKind::Vehicle,
            s: self.s,
            l: lane_center(self.lane),
            v_long: self.v_long,
            v_lat: 0.0,
            length: self.length,
            width: self.width,
            lane_id: self.lane,
        }
    }
}

/// Occluding object fixed in the world. Hidden agents may emerge at the
/// absolute longitudinal position `s_edge`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OcclusionSpec {
    pub s_edge: f64,
    #[serde(default)]
    pub lateral_offset: f64,
    #[serde(default = "default_hidden")]
    pub hides: HiddenAgent,
    /// The view clears at this time.
    #[serde(default)]
    pub until_t: Option<f64>,
}

fn default_hidden() -> HiddenAgent {
    HiddenAgent::Pedestrian
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelsSpec {
    pub a: FaultModel,
    pub b: FaultModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    pub description: String,
    pub duration_s: f64,
    pub dt_s: f64,
    pub master_seed: u64,
    pub runs: u64,
    /// Scripted actors may break the behavioural assumptions on purpose.
    pub assumption_violation: bool,
    /// Upper bound on scripted braking.
    pub physical_max_decel: f64,
    /// Frames within which failures of both channels count as coincident;
    /// defaults to one response time.
    pub coincidence_window_frames: Option<usize>,
    pub rss: RssParameters,
    pub lanes: Vec<LaneId>,
    pub ego: EgoSpec,
    pub actors: Vec<ActorSpec>,
    pub occlusions: Vec<OcclusionSpec>,
    pub crossings: Vec<crate::world::Crossing>,
    pub channels: ChannelsSpec,
    pub fusion: FusionConfig,
    pub relevance: RelevanceConfig,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        Self {
            name: "unnamed".into(),
            description: String::new(),
            duration_s: 10.0,
            dt_s: 0.1,
            master_seed: 0,
            runs: 1,
            assumption_violation: false,
            physical_max_decel: 10.0,
            coincidence_window_frames: None,
            rss: RssParameters::default(),
            lanes: vec![LaneId(0)],
            ego: EgoSpec::default(),
            actors: Vec::new(),
            occlusions: Vec::new(),
            crossings: Vec::new(),
            channels: ChannelsSpec::default(),
            fusion: FusionConfig::default(),
            relevance: RelevanceConfig::default(),
        }
    }
}

/// A scenario that passed validation.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidScenario {
    spec: ScenarioSpec,
    params: ValidatedParameters,
}

impl ValidScenario {
    pub fn spec(&self) -> &ScenarioSpec {
        &self.spec
    }

    pub fn params(&self) -> ValidatedParameters {
        self.params
    }

    pub fn frames(&self) -> usize {
        (self.spec.duration_s / self.spec.dt_s).round() as usize + 1
    }

    pub fn coincidence_window(&self) -> usize {
        self.spec
            .coincidence_window_frames
            .unwrap_or_else(|| (self.params.response_time_s / self.spec.dt_s - 1e-9).ceil().max(1.0) as usize)
    }

    pub fn into_spec(self) -> ScenarioSpec {
        self.spec
    }
}

impl ScenarioSpec {
    pub fn validate(self) -> Result<ValidScenario, HarnessError> {
        let invalid = |msg: String| Err(HarnessError::InvalidScenario(msg));
        if !(self.dt_s > 0.0 && self.dt_s <= 1.0) {
            return invalid(format!("dt_s must lie in (0, 1] (got {})", self.dt_s));
        }
        if !(self.duration_s > 0.0 && self.duration_s.is_finite()) {
            return invalid(format!("duration_s must be > 0 (got {})", self.duration_s));
        }
        if self.runs == 0 {
            return invalid("runs must be >= 1".into());
        }
        if self.coincidence_window_frames == Some(0) {
            return invalid("coincidence_window_frames must be >= 1".into());
        }
        if !(self.physical_max_decel > 0.0) {
            return invalid(format!("physical_max_decel must be > 0 (got {})", self.physical_max_decel));
        }
        let params = self.rss.validate().map_err(|e| HarnessError::InvalidScenario(format!("rss: {e}")))?;
        if self.lanes.is_empty() {
            return invalid("at least one lane is required".into());
        }
        if !self.lanes.contains(&self.ego.lane) {
            return invalid(format!("ego lane {} is not in lanes", self.ego.lane));
        }
        if !(self.ego.v_long >= 0.0 && self.ego.target_speed >= 0.0) {
            return invalid("ego speeds must be >= 0".into());
        }
        if !(self.ego.length > 0.0 && self.ego.width > 0.0) {
            return invalid("ego length and width must be > 0".into());
        }
        let mut ids = vec![self.ego.id];
        for a in &self.actors {
            if ids.contains(&a.id) {
                return invalid(format!("actor id {} is not unique", a.id));
            }
            if a.id >= crate::perception::GHOST_ID_BASE {
                return invalid(format!("actor id {} is in the reserved ghost range", a.id));
            }
            ids.push(a.id);
            if !(a.v_long >= 0.0) {
                return invalid(format!("actor {}: v_long must be >= 0", a.id));
            }
            if a.length.is_some_and(|x| !(x > 0.0)) || a.width.is_some_and(|x| !(x > 0.0)) {
                return invalid(format!("actor {}: length and width must be > 0", a.id));
            }
            match a.behavior {
                Behavior::BrakeAt { decel, .. } if !(decel >= 0.0 && decel <= self.physical_max_decel) => {
                    return invalid(format!(
                        "actor {}: decel {decel} outside [0, physical_max_decel = {}]",
                        a.id, self.physical_max_decel
                    ));
                }
                Behavior::BrakeAt { decel, .. } if decel > params.brake_max_long && !self.assumption_violation => {
                    return invalid(format!(
                        "actor {}: decel {decel} exceeds brake_max_long; set assumption_violation = true",
                        a.id
                    ));
                }
                Behavior::CutIn { lateral_rate, lateral_accel, .. } if !(lateral_rate > 0.0 && lateral_accel > 0.0) => {
                    return invalid(format!("actor {}: cut-in rates must be > 0", a.id));
                }
                _ => {}
            }
        }
        for (i, o) in self.occlusions.iter().enumerate() {
            if !(o.lateral_offset >= 0.0) {
                return invalid(format!("occlusion {i}: lateral_offset must be >= 0"));
            }
        }
        for (i, c) in self.crossings.iter().enumerate() {
            if !(c.s_near < c.s_far && c.stop_line_left < c.stop_line_right) {
                return invalid(format!("crossing {i}: need s_near < s_far and stop_line_left < stop_line_right"));
            }
        }
        for (name, fm) in [("channels.a", &self.channels.a), ("channels.b", &self.channels.b)] {
            fm.validate().map_err(|e| HarnessError::InvalidScenario(format!("{name}: {e}")))?;
        }
        if !(self.fusion.gate_m >= 0.0) {
            return invalid("fusion.gate_m must be >= 0".into());
        }
        Ok(ValidScenario { spec: self, params })
    }
}

/// Scenario files shipped with the library, by name.
pub const LIBRARY: &[(&str, &str)] = &[
    ("car_following", include_str!("../../scenarios/car_following.toml")),
    ("lead_blind", include_str!("../../scenarios/lead_blind.toml")),
    ("cut_in", include_str!("../../scenarios/cut_in.toml")),
    ("red_light_runner", include_str!("../../scenarios/red_light_runner.toml")),
    ("occlusion", include_str!("../../scenarios/occlusion.toml")),
    ("debris_free_lane", include_str!("../../scenarios/debris_free_lane.toml")),
    ("debris_blocked_lane", include_str!("../../scenarios/debris_blocked_lane.toml")),
    ("surrounded_ego", include_str!("../../scenarios/surrounded_ego.toml")),
    ("offroad_object_missed", include_str!("../../scenarios/offroad_object_missed.toml")),
    ("lead_missed_inside_dmin", include_str!("../../scenarios/lead_missed_inside_dmin.toml")),
    ("ghost_in_lane", include_str!("../../scenarios/ghost_in_lane.toml")),
    ("flicker_59_of_60", include_str!("../../scenarios/flicker_59_of_60.toml")),
    ("mixed_faults", include_str!("../../scenarios/mixed_faults.toml")),
];

pub fn parse_scenario(text: &str) -> Result<ScenarioSpec, HarnessError> {
    toml::from_str(text).map_err(|e| HarnessError::InvalidScenario(e.message().to_string()))
}

/// A shipped scenario by name.
pub fn library_scenario(name: &str) -> Option<ScenarioSpec> {
    LIBRARY
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| parse_scenario(text).expect("shipped scenarios parse"))
}
