//! One closed-loop run: truth stepping, dual-channel sensing, fusion, the
//! ego controller, then relevance and compliance evaluation of every
//! perception stream against truth.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::controller::{Decision, EgoController};
use super::kinematics::{script_accel, integrate};
use super::scenario::{ActorSpec, ValidScenario};
use super::HarnessError;
use crate::kernel::{check_accel, SafetyMonitor};
use crate::perception::{channel_rng, fuse, ChannelId, ChannelObservation, FusedPerception, SensingChannel};
use crate::relevance::{
    episode_summary, system_failure_frames, EpisodeReport, PerceivedFrame, PerceivedMonitor, RelevanceClassifier,
    RelevanceConfig, RelevanceLabel, RelevanceVerdict,
};
use crate::world::{
    ActorId, ActorState, OcclusionRegion, ResponseEnvelope, ValidatedParameters, WorldFrame,
};

const APPEAR_EPS: f64 = 1e-9;

/// Named trace streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stream {
    Truth,
    ChannelA,
    ChannelB,
    Fused,
    Verdicts,
}

impl Stream {
    pub fn as_str(self) -> &'static str {
        match self {
            Stream::Truth => "truth",
            Stream::ChannelA => "channel_a",
            Stream::ChannelB => "channel_b",
            Stream::Fused => "fused",
            Stream::Verdicts => "verdicts",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EgoAccel {
    pub long: f64,
    pub lat: f64,
}

/// Ground-truth frame with the acceleration the ego applied from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthRecord {
    pub frame: WorldFrame,
    #[serde(default)]
    pub ego_accel: EgoAccel,
    /// Controller decision; absent in traces recorded elsewhere.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decision: Option<Decision>,
}

/// Compliance and relevance of one perception stream at one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamVerdicts {
    pub stream: Stream,
    pub t: f64,
    /// Applied ego acceleration lies inside this stream's envelope.
    pub compliant: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub violation: Option<String>,
    pub envelope: ResponseEnvelope,
    pub verdicts: Vec<RelevanceVerdict>,
}

/// Result of evaluating perception streams against a truth trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    /// Per stream, one record per frame.
    pub streams: Vec<Vec<StreamVerdicts>>,
    pub truth_dangerous: Vec<bool>,
    pub truth_compliant: Vec<bool>,
}

fn hold_time(truth: &[TruthRecord], i: usize) -> f64 {
    if i + 1 < truth.len() {
        truth[i + 1].frame.t - truth[i].frame.t
    } else if i > 0 {
        truth[i].frame.t - truth[i - 1].frame.t
    } else {
        0.0
    }
}

/// Relevance and compliance of each perception stream against truth. The
/// simulator and offline replay both go through this function.
pub fn evaluate_streams(
    truth: &[TruthRecord],
    streams: &[(Stream, &[PerceivedFrame])],
    p: &ValidatedParameters,
    cfg: &RelevanceConfig,
) -> Result<Evaluation, HarnessError> {
    for (stream, frames) in streams {
        if frames.len() != truth.len() {
            return Err(HarnessError::TraceLength { stream: stream.as_str(), frames: frames.len(), truth: truth.len() });
        }
    }
    let mut truth_m = SafetyMonitor::new(*p);
    let mut classifiers: Vec<_> = streams.iter().map(|_| RelevanceClassifier::new(*p, *cfg)).collect();
    let mut out: Vec<Vec<StreamVerdicts>> = streams.iter().map(|_| Vec::with_capacity(truth.len())).collect();
    let mut truth_dangerous = Vec::with_capacity(truth.len());
    let mut truth_compliant = Vec::with_capacity(truth.len());
    for (i, rec) in truth.iter().enumerate() {
        let truth_c = truth_m.update(&rec.frame);
        let dt = hold_time(truth, i);
        let ego = rec.frame.ego();
        let (al, at) = (rec.ego_accel.long, rec.ego_accel.lat);
        truth_dangerous.push(truth_c.envelope.state.is_dangerous());
        truth_compliant.push(check_accel(&truth_c.envelope, ego, al, at, dt, p).is_ok());
        for (k, (stream, frames)) in streams.iter().enumerate() {
            let (pc, verdicts) = classifiers[k].classify(&rec.frame, &truth_c, &frames[i])?;
            let check = check_accel(&pc.envelope, ego, al, at, dt, p);
            out[k].push(StreamVerdicts {
                stream: *stream,
                t: rec.frame.t,
                compliant: check.is_ok(),
                violation: check.err(),
                envelope: pc.envelope,
                verdicts,
            });
        }
    }
    Ok(Evaluation { streams: out, truth_dangerous, truth_compliant })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LabelCounts {
    pub irrelevant: u64,
    pub comfort_relevant: u64,
    pub safety_relevant: u64,
}

impl LabelCounts {
    fn add(&mut self, label: RelevanceLabel) {
        match label {
            RelevanceLabel::Irrelevant => self.irrelevant += 1,
            RelevanceLabel::ComfortRelevant => self.comfort_relevant += 1,
            RelevanceLabel::SafetyRelevant => self.safety_relevant += 1,
        }
    }

    fn merge(&mut self, o: &LabelCounts) {
        self.irrelevant += o.irrelevant;
        self.comfort_relevant += o.comfort_relevant;
        self.safety_relevant += o.safety_relevant;
    }

    pub fn total(&self) -> u64 {
        self.irrelevant + self.comfort_relevant + self.safety_relevant
    }
}

/// Integer counts only, so aggregation over runs is exact and independent
/// of order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RunStatistics {
    pub runs: u64,
    pub frames: u64,
    pub dangerous_frames: u64,
    pub proper_responses_triggered: u64,
    pub verdicts: BTreeMap<Stream, LabelCounts>,
    pub safety_frames_a: u64,
    pub safety_frames_b: u64,
    pub safety_frames_fused: u64,
    pub blind_frames_fused: u64,
    pub coincident_frames: u64,
    pub system_failures: u64,
    pub collisions: u64,
    /// Collisions in scenarios that deliberately break the behavioural
    /// assumptions.
    pub collisions_out_of_model: u64,
    /// In-model collisions with a compliant ego and no system-level sensing
    /// failure at or before the collision frame.
    pub unexplained_collisions: u64,
    pub noncompliant_frames: u64,
    pub truth_noncompliant_frames: u64,
    pub decisions: BTreeMap<Decision, u64>,
}

impl RunStatistics {
    pub fn merge(&mut self, o: &RunStatistics) {
        self.runs += o.runs;
        self.frames += o.frames;
        self.dangerous_frames += o.dangerous_frames;
        self.proper_responses_triggered += o.proper_responses_triggered;
        for (k, v) in &o.verdicts {
            self.verdicts.entry(*k).or_default().merge(v);
        }
        self.safety_frames_a += o.safety_frames_a;
        self.safety_frames_b += o.safety_frames_b;
        self.safety_frames_fused += o.safety_frames_fused;
        self.blind_frames_fused += o.blind_frames_fused;
        self.coincident_frames += o.coincident_frames;
        self.system_failures += o.system_failures;
        self.collisions += o.collisions;
        self.collisions_out_of_model += o.collisions_out_of_model;
        self.unexplained_collisions += o.unexplained_collisions;
        self.noncompliant_frames += o.noncompliant_frames;
        self.truth_noncompliant_frames += o.truth_noncompliant_frames;
        for (k, v) in &o.decisions {
            *self.decisions.entry(*k).or_default() += v;
        }
    }

    pub fn exposure_hours(&self, dt_s: f64) -> f64 {
        self.frames as f64 * dt_s / 3600.0
    }

    pub fn verdict_total(&self) -> u64 {
        self.verdicts.values().map(LabelCounts::total).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionEvent {
    pub t: f64,
    pub frame_index: usize,
    pub actor_id: ActorId,
    /// A system-level sensing failure was recorded at or before this frame.
    pub explained: bool,
    /// Every frame up to the collision was compliant with the fused envelope.
    pub ego_compliant: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub scenario: String,
    pub master_seed: u64,
    pub run_index: u64,
    pub truth: Vec<TruthRecord>,
    pub channel_a: Vec<ChannelObservation>,
    pub channel_b: Vec<ChannelObservation>,
    pub fused: Vec<FusedPerception>,
    /// Per frame: channel A, channel B, fused.
    pub verdicts: Vec<StreamVerdicts>,
    pub episode: EpisodeReport,
    pub collision: Option<CollisionEvent>,
    pub stats: RunStatistics,
}

impl RunOutput {
    pub fn stream_verdicts(&self, stream: Stream) -> impl Iterator<Item = &StreamVerdicts> {
        self.verdicts.iter().filter(move |v| v.stream == stream)
    }
}

/// Bodies touch or overlap on both axes.
pub fn in_collision(a: &ActorState, b: &ActorState) -> bool {
    let long_gap = (b.rear() - a.s).max(a.rear() - b.s);
    let lat_gap = (b.left_edge() - a.right_edge()).max(a.left_edge() - b.right_edge());
    long_gap <= 0.0 && lat_gap < 0.0
}

fn build_frame(scn: &ValidScenario, t: f64, ego: &ActorState, actors: &[(ActorSpec, ActorState)]) -> WorldFrame {
    let spec = scn.spec();
    let mut list = Vec::with_capacity(actors.len() + 1);
    list.push(ego.clone());
    list.extend(actors.iter().filter(|(a, _)| t >= a.appears_at() - APPEAR_EPS).map(|(_, s)| s.clone()));
    let occlusions = spec
        .occlusions
        .iter()
        .filter(|o| o.until_t.is_none_or(|u| t < u - APPEAR_EPS))
        .map(|o| OcclusionRegion { s_near: o.s_edge - ego.s, lateral_offset: o.lateral_offset, hides: o.hides })
        .filter(|r| r.s_near > 0.0)
        .collect();
    WorldFrame {
        t,
        ego_id: ego.actor_id,
        actors: list,
        occlusions,
        lanes: spec.lanes.clone(),
        crossings: spec.crossings.clone(),
    }
}

/// Run one scenario instance. Fully determined by the scenario and
/// `run_index`.
pub fn run_scenario(scn: &ValidScenario, run_index: u64) -> Result<RunOutput, HarnessError> {
    let spec = scn.spec();
    let p = scn.params();
    let dt = spec.dt_s;
    let seed = spec.master_seed;
    let mut ch_a = SensingChannel::new(ChannelId::CameraOnly, spec.channels.a.clone(), channel_rng(seed, run_index, ChannelId::CameraOnly));
    let mut ch_b = SensingChannel::new(ChannelId::RadarLidar, spec.channels.b.clone(), channel_rng(seed, run_index, ChannelId::RadarLidar));
    let mut ego = spec.ego.initial_state();
    let mut actors: Vec<(ActorSpec, ActorState)> = spec.actors.iter().map(|a| (a.clone(), a.initial_state())).collect();
    let mut monitor = PerceivedMonitor::new(p);
    let mut controller = EgoController::new(p, spec.ego.target_speed, spec.ego.lane);

    let n = scn.frames();
    let mut truth = Vec::with_capacity(n);
    let mut channel_a = Vec::with_capacity(n);
    let mut channel_b = Vec::with_capacity(n);
    let mut fused = Vec::with_capacity(n);
    let mut hit: Option<(usize, ActorId)> = None;
    let mut triggered = 0u64;
    let mut owed_before = false;

    for i in 0..n {
        let t = i as f64 * dt;
        let frame = build_frame(scn, t, &ego, &actors);
        let obs_a = ch_a.observe(&frame);
        let obs_b = ch_b.observe(&frame);
        let fp = fuse(&obs_a, &obs_b, &spec.fusion)?;
        let pf = PerceivedFrame::from(&fp);
        let c = monitor.update(&pf);
        let owed = c.owes_brake() || c.owes_lateral();
        if owed && !owed_before {
            triggered += 1;
        }
        owed_before = owed;
        let cmd = controller.command(&pf.frame, &c, dt);

        let collided = frame.others().find(|o| in_collision(&ego, o)).map(|o| o.actor_id);
        truth.push(TruthRecord { frame, ego_accel: EgoAccel { long: cmd.a_long, lat: cmd.a_lat }, decision: Some(cmd.decision) });
        channel_a.push(obs_a);
        channel_b.push(obs_b);
        fused.push(fp);
        if let Some(id) = collided {
            hit = Some((i, id));
            break;
        }

        ego = integrate(&ego, cmd.a_long, cmd.a_lat, dt);
        for (a, s) in actors.iter_mut() {
            if t >= a.appears_at() - APPEAR_EPS {
                let (al, at) = script_accel(&a.behavior, s, t, dt);
                *s = integrate(s, al, at, dt);
            }
        }
    }

    let pa: Vec<PerceivedFrame> = channel_a.iter().map(PerceivedFrame::from).collect();
    let pb: Vec<PerceivedFrame> = channel_b.iter().map(PerceivedFrame::from).collect();
    let pfz: Vec<PerceivedFrame> = fused.iter().map(PerceivedFrame::from).collect();
    let eval = evaluate_streams(
        &truth,
        &[(Stream::ChannelA, &pa), (Stream::ChannelB, &pb), (Stream::Fused, &pfz)],
        &p,
        &spec.relevance,
    )?;

    let per_frame = |k: usize| -> Vec<Vec<RelevanceVerdict>> { eval.streams[k].iter().map(|s| s.verdicts.clone()).collect() };
    let (va, vb, vf) = (per_frame(0), per_frame(1), per_frame(2));
    let window = scn.coincidence_window();
    let episode = episode_summary(&va, &vb, &vf, window, hit.is_some() as usize);
    let failures = system_failure_frames(&va, &vb, &vf, window);

    let fused_compliant: Vec<bool> = eval.streams[2].iter().map(|s| s.compliant).collect();
    let collision = hit.map(|(i, id)| CollisionEvent {
        t: truth[i].frame.t,
        frame_index: i,
        actor_id: id,
        explained: failures[..=i].iter().any(|&f| f),
        ego_compliant: fused_compliant[..=i].iter().all(|&c| c),
    });

    let mut stats = RunStatistics { runs: 1, frames: truth.len() as u64, ..Default::default() };
    stats.dangerous_frames = eval.truth_dangerous.iter().filter(|&&d| d).count() as u64;
    stats.proper_responses_triggered = triggered;
    for (k, stream) in [Stream::ChannelA, Stream::ChannelB, Stream::Fused].into_iter().enumerate() {
        let counts = stats.verdicts.entry(stream).or_default();
        for rec in &eval.streams[k] {
            for v in &rec.verdicts {
                counts.add(v.label);
            }
        }
    }
    stats.safety_frames_a = episode.safety_frames_a as u64;
    stats.safety_frames_b = episode.safety_frames_b as u64;
    stats.safety_frames_fused = episode.safety_frames_fused as u64;
    stats.blind_frames_fused = episode.blind_frames_fused as u64;
    stats.coincident_frames = episode.coincident_frames as u64;
    stats.system_failures = episode.system_failures as u64;
    if let Some(c) = &collision {
        stats.collisions = 1;
        if spec.assumption_violation {
            stats.collisions_out_of_model = 1;
        } else if c.ego_compliant && !c.explained {
            stats.unexplained_collisions = 1;
        }
    }
    stats.noncompliant_frames = fused_compliant.iter().filter(|&&c| !c).count() as u64;
    stats.truth_noncompliant_frames = eval.truth_compliant.iter().filter(|&&c| !c).count() as u64;
    for d in truth.iter().filter_map(|r| r.decision) {
        *stats.decisions.entry(d).or_default() += 1;
    }

    let mut verdicts = Vec::with_capacity(3 * truth.len());
    let mut streams = eval.streams.into_iter().map(|s| s.into_iter()).collect::<Vec<_>>();
    for _ in 0..truth.len() {
        for s in streams.iter_mut() {
            verdicts.push(s.next().expect("one record per frame"));
        }
    }

    Ok(RunOutput {
        scenario: spec.name.clone(),
        master_seed: seed,
        run_index,
        truth,
        channel_a,
        channel_b,
        fused,
        verdicts,
        episode,
        collision,
        stats,
    })
}
