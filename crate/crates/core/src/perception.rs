//! Two independent sensing channels with injectable faults, and the
//! safety-union fusion the ego controller acts on.
//!
//! Each [`SensingChannel`] owns its own random stream, so two channels never
//! share randomness. Streams are derived from `(master seed, run index,
//! stream tag)` through [`stream_rng`], which keeps Monte Carlo runs
//! reproducible regardless of how they are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric, Normal, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::world::{lane_center, ActorId, ActorKind, ActorState, Crossing, LaneId, OcclusionRegion, WorldFrame, LANE_WIDTH_M};

/// Ids at or above this value are reserved for injected ghost actors.
pub const GHOST_ID_BASE: u32 = 0x8000_0000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelId {
    CameraOnly,
    RadarLidar,
}

impl ChannelId {
    fn tag(self) -> u64 {
        match self {
            ChannelId::CameraOnly => 0,
            ChannelId::RadarLidar => 1,
        }
    }
}

/// Random stream for `(master_seed, run_index, tag)`. Distinct triples give
/// disjoint ChaCha streams.
pub fn stream_rng(master_seed: u64, run_index: u64, tag: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream((run_index << 8) | (tag & 0xff));
    rng
}

pub fn channel_rng(master_seed: u64, run_index: u64, channel: ChannelId) -> ChaCha8Rng {
    stream_rng(master_seed, run_index, channel.tag())
}

/// Spatial box in which ghosts appear, relative to the ego: `s` is the gap
/// from the ego front bumper to the ghost's rear, `l` the lateral offset of
/// the ghost centerline from the ego centerline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GhostRegion {
    pub s_min: f64,
    pub s_max: f64,
    pub l_min: f64,
    pub l_max: f64,
}

impl Default for GhostRegion {
    fn default() -> Self {
        Self { s_min: 5.0, s_max: 80.0, l_min: -0.5 * LANE_WIDTH_M, l_max: 0.5 * LANE_WIDTH_M }
    }
}

/// Miss pattern aimed at one actor, on top of the channel-wide rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetedMiss {
    pub actor_id: ActorId,
    #[serde(default)]
    pub from_t: f64,
    #[serde(default)]
    pub until_t: Option<f64>,
    #[serde(default = "one")]
    pub probability: f64,
    /// Deterministic pattern: miss every n-th observation of the channel
    /// (overrides `probability`).
    #[serde(default)]
    pub every_nth_frame: Option<u64>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FaultModel {
    pub p_false_negative: f64,
    /// Expected number of ghost actors per frame.
    pub p_false_positive: f64,
    pub pos_noise_sigma: f64,
    pub vel_noise_sigma: f64,
    pub p_misclassify: f64,
    pub p_dropout_start: f64,
    pub dropout_mean_frames: f64,
    pub ghost_region: GhostRegion,
    pub targeted_misses: Vec<TargetedMiss>,
}

impl Default for FaultModel {
    fn default() -> Self {
        Self {
            p_false_negative: 0.0,
            p_false_positive: 0.0,
            pos_noise_sigma: 0.0,
            vel_noise_sigma: 0.0,
            p_misclassify: 0.0,
            p_dropout_start: 0.0,
            dropout_mean_frames: 1.0,
            ghost_region: GhostRegion::default(),
            targeted_misses: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FaultModelError {
    #[error("{field} must lie in [0, 1] (got {value})")]
    Probability { field: &'static str, value: f64 },
    #[error("{field} must be non-negative and finite (got {value})")]
    Negative { field: &'static str, value: f64 },
    #[error("dropout_mean_frames must be > 0 (got {0})")]
    DropoutMean(f64),
    #[error("ghost region bounds are inverted")]
    GhostRegion,
}

impl FaultModel {
    pub fn validate(&self) -> Result<(), FaultModelError> {
        for (field, value) in [
            ("p_false_negative", self.p_false_negative),
            ("p_misclassify", self.p_misclassify),
            ("p_dropout_start", self.p_dropout_start),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(FaultModelError::Probability { field, value });
            }
        }
        for (field, value) in [
            ("p_false_positive", self.p_false_positive),
            ("pos_noise_sigma", self.pos_noise_sigma),
            ("vel_noise_sigma", self.vel_noise_sigma),
        ] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(FaultModelError::Negative { field, value });
            }
        }
        if !(self.dropout_mean_frames > 0.0 && self.dropout_mean_frames.is_finite()) {
            return Err(FaultModelError::DropoutMean(self.dropout_mean_frames));
        }
        let g = &self.ghost_region;
        if !(g.s_min <= g.s_max && g.l_min <= g.l_max) {
            return Err(FaultModelError::GhostRegion);
        }
        for m in &self.targeted_misses {
            if !(0.0..=1.0).contains(&m.probability) {
                return Err(FaultModelError::Probability { field: "targeted_misses.probability", value: m.probability });
            }
        }
        Ok(())
    }

    pub fn is_fault_free(&self) -> bool {
        self.p_false_negative == 0.0
            && self.p_false_positive == 0.0
            && self.pos_noise_sigma == 0.0
            && self.vel_noise_sigma == 0.0
            && self.p_misclassify == 0.0
            && self.p_dropout_start == 0.0
            && self.targeted_misses.is_empty()
    }
}

/// Map-level context every channel passes through unchanged.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MapContext {
    pub lanes: Vec<LaneId>,
    pub occlusions: Vec<OcclusionRegion>,
    pub crossings: Vec<Crossing>,
}

impl MapContext {
    pub fn of(frame: &WorldFrame) -> Self {
        Self { lanes: frame.lanes.clone(), occlusions: frame.occlusions.clone(), crossings: frame.crossings.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelObservation {
    pub channel_id: ChannelId,
    pub t: f64,
    pub available: bool,
    /// Ego state from proprioception; never subject to sensing faults.
    pub ego: ActorState,
    /// Perceived actors including the ego. Empty when unavailable.
    pub perceived: Vec<ActorState>,
    /// Ground-truth bookkeeping only: which perceived ids are ghosts.
    #[serde(default)]
    pub ghost_ids: Vec<ActorId>,
    #[serde(default)]
    pub map: MapContext,
}

impl ChannelObservation {
    /// The world as this channel alone sees it.
    pub fn to_world_frame(&self) -> WorldFrame {
        let actors = if self.available { self.perceived.clone() } else { vec![self.ego.clone()] };
        WorldFrame {
            t: self.t,
            ego_id: self.ego.actor_id,
            actors,
            occlusions: self.map.occlusions.clone(),
            lanes: self.map.lanes.clone(),
            crossings: self.map.crossings.clone(),
        }
    }
}

/// One sensing channel: fault model, private random stream and the dropout
/// state carried between frames.
#[derive(Debug, Clone)]
pub struct SensingChannel {
    id: ChannelId,
    faults: FaultModel,
    rng: ChaCha8Rng,
    dropout_left: u64,
    frames_seen: u64,
    ghosts_made: u32,
}

const ALL_KINDS: [ActorKind; 4] = [ActorKind::Vehicle, ActorKind::Pedestrian, ActorKind::StaticObject, ActorKind::Unknown];

impl SensingChannel {
    pub fn new(id: ChannelId, faults: FaultModel, rng: ChaCha8Rng) -> Self {
        Self { id, faults, rng, dropout_left: 0, frames_seen: 0, ghosts_made: 0 }
    }

    pub fn id(&self) -> ChannelId {
        self.id
    }

    pub fn faults(&self) -> &FaultModel {
        &self.faults
    }

    fn next_ghost_id(&mut self) -> ActorId {
        let n = self.ghosts_made;
        self.ghosts_made = self.ghosts_made.wrapping_add(1) & 0x3fff_ffff;
        ActorId(GHOST_ID_BASE | ((self.id.tag() as u32) << 30) | n)
    }

    fn in_dropout(&mut self) -> bool {
        if self.dropout_left > 0 {
            self.dropout_left -= 1;
            return true;
        }
        let fm = &self.faults;
        if fm.p_dropout_start > 0.0 && self.rng.random::<f64>() < fm.p_dropout_start {
            let q = (1.0 / fm.dropout_mean_frames).min(1.0);
            let extra = if q >= 1.0 {
                0
            } else {
                Geometric::new(q).expect("q in (0,1)").sample(&mut self.rng)
            };
            self.dropout_left = extra;
            return true;
        }
        false
    }

    /// Miss probability for actor `id`; `Err` marks a certain, patterned miss.
    /// `frame_no` counts observations from 1.
    fn miss_probability(&self, id: ActorId, t: f64, frame_no: u64) -> Result<f64, ()> {
        let mut keep = 1.0 - self.faults.p_false_negative;
        for m in self.faults.targeted_misses.iter().filter(|m| m.actor_id == id) {
            let active = t >= m.from_t - 1e-9 && m.until_t.is_none_or(|u| t <= u + 1e-9);
            if !active {
                continue;
            }
            match m.every_nth_frame {
                Some(n) if n > 0 => {
                    if frame_no.is_multiple_of(n) {
                        return Err(());
                    }
                }
                _ => keep *= 1.0 - m.probability,
            }
        }
        Ok(1.0 - keep)
    }

    /// Observe one ground-truth frame: dropout, then per-actor misses, then
    /// noise and misclassification, then ghost injection.
    pub fn observe(&mut self, frame: &WorldFrame) -> ChannelObservation {
        let ego = frame.ego().clone();
        let map = MapContext::of(frame);
        let dropped = self.in_dropout();
        self.frames_seen += 1;
        let frame_no = self.frames_seen;
        if dropped {
            return ChannelObservation {
                channel_id: self.id,
                t: frame.t,
                available: false,
                ego,
                perceived: Vec::new(),
                ghost_ids: Vec::new(),
                map,
            };
        }

        let fm = self.faults.clone();
        let pos_noise = (fm.pos_noise_sigma > 0.0).then(|| Normal::new(0.0, fm.pos_noise_sigma).expect("sigma >= 0"));
        let vel_noise = (fm.vel_noise_sigma > 0.0).then(|| Normal::new(0.0, fm.vel_noise_sigma).expect("sigma >= 0"));

        let mut perceived = Vec::with_capacity(frame.actors.len());
        perceived.push(ego.clone());
        for other in frame.others() {
            let missed = match self.miss_probability(other.actor_id, frame.t, frame_no) {
                Err(()) => true,
                Ok(p) => p > 0.0 && self.rng.random::<f64>() < p,
            };
            if missed {
                continue;
            }
            let mut a = other.clone();
            if let Some(n) = &pos_noise {
                a.s += n.sample(&mut self.rng);
                a.l += n.sample(&mut self.rng);
            }
            if let Some(n) = &vel_noise {
                a.v_long = (a.v_long + n.sample(&mut self.rng)).max(0.0);
                a.v_lat += n.sample(&mut self.rng);
            }
            if fm.p_misclassify > 0.0 && self.rng.random::<f64>() < fm.p_misclassify {
                let choices: Vec<ActorKind> = ALL_KINDS.iter().copied().filter(|&k| k != a.kind).collect();
                a.kind = choices[self.rng.random_range(0..choices.len())];
            }
            perceived.push(a);
        }

        let mut ghost_ids = Vec::new();
        if fm.p_false_positive > 0.0 {
            let count = Poisson::new(fm.p_false_positive).expect("rate > 0").sample(&mut self.rng) as usize;
            let g = &fm.ghost_region;
            for _ in 0..count {
                let gap = g.s_min + (g.s_max - g.s_min) * self.rng.random::<f64>();
                let off = g.l_min + (g.l_max - g.l_min) * self.rng.random::<f64>();
                let id = self.next_ghost_id();
                let length = 4.5;
                let l = ego.l + off;
                perceived.push(ActorState {
                    actor_id: id,
                    kind: ActorKind::Vehicle,
                    s: ego.s + gap + length,
                    l,
                    v_long: 0.0,
                    v_lat: 0.0,
                    length,
                    width: 1.8,
                    lane_id: LaneId((l / LANE_WIDTH_M).round() as i32),
                });
                ghost_ids.push(id);
            }
        }

        ChannelObservation { channel_id: self.id, t: frame.t, available: true, ego, perceived, ghost_ids, map }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FusionPolicy {
    SafetyUnion,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FusionConfig {
    pub policy: FusionPolicy,
    /// Maximum centerline distance at which two detections are merged.
    pub gate_m: f64,
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self { policy: FusionPolicy::SafetyUnion, gate_m: 2.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvailabilityReport {
    pub a_available: bool,
    pub b_available: bool,
    /// Neither channel produced anything: a system-level sensing failure.
    pub blind: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusedPerception {
    pub frame: WorldFrame,
    pub availability: AvailabilityReport,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FusionError {
    #[error("observations are from different times ({0} vs {1})")]
    TimestampMismatch(f64, f64),
}

fn merge(a: &ActorState, b: &ActorState) -> ActorState {
    let keep = if a.actor_id <= b.actor_id { a } else { b };
    let l = 0.5 * (a.l + b.l);
    ActorState {
        actor_id: keep.actor_id,
        kind: if a.kind == b.kind { a.kind } else { ActorKind::Unknown },
        s: 0.5 * (a.s + b.s),
        l,
        v_long: 0.5 * (a.v_long + b.v_long),
        v_lat: 0.5 * (a.v_lat + b.v_lat),
        length: 0.5 * (a.length + b.length),
        width: 0.5 * (a.width + b.width),
        lane_id: keep.lane_id,
    }
}

/// Fuse two channel observations. Detections within the gate are matched
/// greedily by increasing distance and averaged; everything else is kept.
pub fn fuse(a: &ChannelObservation, b: &ChannelObservation, cfg: &FusionConfig) -> Result<FusedPerception, FusionError> {
    if a.t != b.t {
        return Err(FusionError::TimestampMismatch(a.t, b.t));
    }
    let availability = AvailabilityReport {
        a_available: a.available,
        b_available: b.available,
        blind: !a.available && !b.available,
    };
    let frame = match (a.available, b.available) {
        (false, false) | (true, false) => a.to_world_frame(),
        (false, true) => b.to_world_frame(),
        (true, true) => {
            let ego_id = a.ego.actor_id;
            let xs: Vec<&ActorState> = a.perceived.iter().filter(|x| x.actor_id != ego_id).collect();
            let ys: Vec<&ActorState> = b.perceived.iter().filter(|y| y.actor_id != ego_id).collect();
            let mut candidates = Vec::new();
            for (i, x) in xs.iter().enumerate() {
                for (j, y) in ys.iter().enumerate() {
                    let d = (x.s - y.s).hypot(x.l - y.l);
                    if d <= cfg.gate_m {
                        candidates.push((d, i, j));
                    }
                }
            }
            candidates.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)).then(p.2.cmp(&q.2)));
            let mut match_x = vec![None; xs.len()];
            let mut used_y = vec![false; ys.len()];
            for (_, i, j) in candidates {
                if match_x[i].is_none() && !used_y[j] {
                    match_x[i] = Some(j);
                    used_y[j] = true;
                }
            }
            let mut actors = Vec::with_capacity(1 + xs.len() + ys.len());
            actors.push(a.ego.clone());
            for (i, x) in xs.iter().enumerate() {
                actors.push(match match_x[i] {
                    Some(j) => merge(x, ys[j]),
                    None => (*x).clone(),
                });
            }
            actors.extend(ys.iter().zip(&used_y).filter(|(_, &u)| !u).map(|(y, _)| (*y).clone()));
            dedup_ids(&mut actors);
            let mut f = a.to_world_frame();
            f.actors = actors;
            f
        }
    };
    Ok(FusedPerception { frame, availability })
}

/// Two unmatched detections of the same id (both channels saw the actor but
/// outside the gate) collapse into one averaged detection.
fn dedup_ids(actors: &mut Vec<ActorState>) {
    let mut i = 0;
    while i < actors.len() {
        if let Some(j) = (i + 1..actors.len()).find(|&j| actors[j].actor_id == actors[i].actor_id) {
            let other = actors.remove(j);
            actors[i] = merge(&actors[i], &other);
        } else {
            i += 1;
        }
    }
}

/// Lane whose band contains the lateral position, if any of `lanes`.
pub fn lane_at(l: f64, lanes: &[LaneId]) -> Option<LaneId> {
    lanes.iter().copied().find(|&lane| (l - lane_center(lane)).abs() <= 0.5 * LANE_WIDTH_M)
}
