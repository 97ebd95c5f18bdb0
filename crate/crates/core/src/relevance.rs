//! Separates sensing discrepancies that matter for safety from those that
//! only cost comfort and those that change nothing.
//!
//! A discrepancy is judged by what it does to the proper response. The truth
//! world and the perceived world each run their own [`SafetyMonitor`]; a
//! discrepancy is safety relevant when the perceived constraints fail to
//! cover an obligation the truth constraints place on the ego, comfort
//! relevant when the perceived constraints are stricter than truth needs,
//! and irrelevant otherwise.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernel::{ActorConstraint, DangerCause, FrameConstraints, SafetyMonitor};
use crate::perception::{ChannelObservation, FusedPerception};
use crate::world::{ActorId, LateralAction, ResponseEnvelope, ValidatedParameters, WorldFrame};

const ENVELOPE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Discrepancy {
    MissedActor,
    GhostActor,
    StateError,
    Misclassification,
    ChannelBlind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelevanceLabel {
    Irrelevant,
    ComfortRelevant,
    SafetyRelevant,
}

impl fmt::Display for RelevanceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RelevanceLabel::Irrelevant => "irrelevant",
            RelevanceLabel::ComfortRelevant => "comfort_relevant",
            RelevanceLabel::SafetyRelevant => "safety_relevant",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelevanceVerdict {
    pub t: f64,
    pub discrepancy: Discrepancy,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub actor_id: Option<ActorId>,
    pub label: RelevanceLabel,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RelevanceConfig {
    /// Position error (m) above which a detection counts as a state error.
    pub position_tolerance_m: f64,
    /// Velocity error (m/s) above which a detection counts as a state error.
    pub velocity_tolerance_mps: f64,
}

impl Default for RelevanceConfig {
    fn default() -> Self {
        Self { position_tolerance_m: 0.1, velocity_tolerance_mps: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RelevanceError {
    #[error("truth at t = {truth} but perception at t = {perceived}")]
    Misaligned { truth: f64, perceived: f64 },
    #[error("truth ego {truth} differs from perceived ego {perceived}")]
    EgoMismatch { truth: ActorId, perceived: ActorId },
    #[error("histories have different lengths ({truth} vs {perceived})")]
    HistoryLength { truth: usize, perceived: usize },
    #[error("history is empty")]
    EmptyHistory,
}

/// What a perception stream delivered for one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerceivedFrame {
    pub frame: WorldFrame,
    /// Nothing was perceived; the frame holds the ego only.
    pub blind: bool,
}

impl From<&ChannelObservation> for PerceivedFrame {
    fn from(o: &ChannelObservation) -> Self {
        Self { frame: o.to_world_frame(), blind: !o.available }
    }
}

impl From<&FusedPerception> for PerceivedFrame {
    fn from(f: &FusedPerception) -> Self {
        Self { frame: f.frame.clone(), blind: f.availability.blind }
    }
}

/// Monitor for a perception stream, switching to the blind response when
/// nothing was perceived. Tracks coast through blind frames.
#[derive(Debug, Clone)]
pub struct PerceivedMonitor {
    monitor: SafetyMonitor,
}

impl PerceivedMonitor {
    pub fn new(p: ValidatedParameters) -> Self {
        Self { monitor: SafetyMonitor::new(p) }
    }

    pub fn update(&mut self, perceived: &PerceivedFrame) -> FrameConstraints {
        if perceived.blind {
            self.monitor.blind(&perceived.frame)
        } else {
            self.monitor.update(&perceived.frame)
        }
    }
}

/// Incremental classifier for one perception stream against truth. The
/// truth constraints are computed by the caller so several streams can share
/// one truth monitor.
#[derive(Debug, Clone)]
pub struct RelevanceClassifier {
    perceived: PerceivedMonitor,
    cfg: RelevanceConfig,
}

impl RelevanceClassifier {
    pub fn new(p: ValidatedParameters, cfg: RelevanceConfig) -> Self {
        Self { perceived: PerceivedMonitor::new(p), cfg }
    }

    /// Verdicts for one frame, together with the constraints the perceived
    /// world places on the ego.
    pub fn classify(
        &mut self,
        truth: &WorldFrame,
        truth_c: &FrameConstraints,
        perceived: &PerceivedFrame,
    ) -> Result<(FrameConstraints, Vec<RelevanceVerdict>), RelevanceError> {
        check_aligned(truth, &perceived.frame)?;
        let perceived_c = self.perceived.update(perceived);
        let verdicts = verdicts_for(truth, truth_c, perceived, &perceived_c, &self.cfg);
        Ok((perceived_c, verdicts))
    }
}

fn check_aligned(truth: &WorldFrame, perceived: &WorldFrame) -> Result<(), RelevanceError> {
    if truth.t != perceived.t {
        return Err(RelevanceError::Misaligned { truth: truth.t, perceived: perceived.t });
    }
    if truth.ego_id != perceived.ego_id {
        return Err(RelevanceError::EgoMismatch { truth: truth.ego_id, perceived: perceived.ego_id });
    }
    Ok(())
}

/// Classify every discrepancy in the last frame of the two histories. Each
/// history holds the frames up to and including the frame of interest.
pub fn classify_frame(
    history_truth: &[WorldFrame],
    history_perceived: &[PerceivedFrame],
    p: &ValidatedParameters,
    cfg: &RelevanceConfig,
) -> Result<Vec<RelevanceVerdict>, RelevanceError> {
    if history_truth.len() != history_perceived.len() {
        return Err(RelevanceError::HistoryLength { truth: history_truth.len(), perceived: history_perceived.len() });
    }
    let (Some(truth), Some(perceived)) = (history_truth.last(), history_perceived.last()) else {
        return Err(RelevanceError::EmptyHistory);
    };
    let mut truth_m = SafetyMonitor::new(*p);
    let mut perceived_m = PerceivedMonitor::new(*p);
    let mut last = None;
    for (tf, pf) in history_truth.iter().zip(history_perceived) {
        check_aligned(tf, &pf.frame)?;
        last = Some((truth_m.update(tf), perceived_m.update(pf)));
    }
    let (truth_c, perceived_c) = last.expect("non-empty");
    Ok(verdicts_for(truth, &truth_c, perceived, &perceived_c, cfg))
}

fn rule_for(cause: Option<DangerCause>) -> &'static str {
    match cause {
        Some(DangerCause::Lateral) => "rule 2 (lateral distance)",
        _ => "rule 1 (longitudinal distance)",
    }
}

/// Reason the perceived constraints fail to cover what truth demands because
/// of actor `x`, if they do.
fn uncovered_obligation(
    x: &ActorConstraint,
    truth_c: &FrameConstraints,
    perceived_c: &FrameConstraints,
) -> Option<String> {
    let te = &x.envelope;
    let pe = &perceived_c.envelope;
    let id = x.actor_id;
    if te.min_required_brake_long > pe.min_required_brake_long + ENVELOPE_EPS {
        return Some(format!(
            "rule 1 (longitudinal distance): truth demands braking of {:.2} m/s^2 for actor {id}, perception demands {:.2}",
            te.min_required_brake_long, pe.min_required_brake_long
        ));
    }
    if te.max_allowed_accel_long < pe.max_allowed_accel_long - ENVELOPE_EPS {
        return Some(format!(
            "{}: truth caps acceleration at {:.2} m/s^2 for actor {id}, perception allows {:.2}",
            rule_for(x.cause),
            te.max_allowed_accel_long,
            pe.max_allowed_accel_long
        ));
    }
    if te.lateral_action == LateralAction::ReachZeroLateralVelocity && pe.lateral_action == LateralAction::None {
        return Some(format!(
            "rule 2 (lateral distance): truth demands zero lateral velocity for actor {id}, perception does not"
        ));
    }
    if !perceived_c.blind && (x.owes_brake || x.owes_lateral) {
        if let Some(since) = te.since_t {
            let started = pe.since_t.is_some_and(|ps| ps <= since + ENVELOPE_EPS);
            if !started {
                return Some(format!(
                    "{}: response to actor {id} owed from t = {since:.3} s, perception has not started it",
                    rule_for(x.cause)
                ));
            }
        }
    }
    let truth_yield = truth_c.yields.iter().find(|y| y.actor_id == id).map(|y| y.stop_before_s);
    if let Some(stop) = truth_yield {
        if !perceived_c.blind && perceived_c.yield_stop().is_none_or(|s| s > stop + ENVELOPE_EPS) {
            return Some(format!(
                "rule 3 (right of way): truth requires yielding to actor {id} before s = {stop:.2} m, perception does not"
            ));
        }
    }
    None
}

/// Reason the perceived envelope `pe` is stricter than the truth aggregate.
fn stricter_than_truth(
    pe: &ResponseEnvelope,
    owes: bool,
    comfort_dangerous: bool,
    yield_stop: Option<f64>,
    truth_c: &FrameConstraints,
) -> Option<String> {
    let te = &truth_c.envelope;
    if pe.min_required_brake_long > te.min_required_brake_long + ENVELOPE_EPS {
        return Some(format!("perception demands braking of {:.2} m/s^2 not needed", pe.min_required_brake_long));
    }
    if pe.max_allowed_accel_long < te.max_allowed_accel_long - ENVELOPE_EPS {
        return Some(format!("perception caps acceleration at {:.2} m/s^2 instead of {:.2}", pe.max_allowed_accel_long, te.max_allowed_accel_long));
    }
    if pe.lateral_action == LateralAction::ReachZeroLateralVelocity && te.lateral_action == LateralAction::None {
        return Some("perception demands a lateral stop not needed".into());
    }
    if owes {
        if let Some(ps) = pe.since_t {
            if te.since_t.is_none_or(|ts| ps < ts - ENVELOPE_EPS) {
                return Some(format!("perception starts a response at t = {ps:.3} s not needed"));
            }
        }
    }
    if let Some(s) = yield_stop {
        if truth_c.yield_stop().is_none_or(|ts| s < ts - ENVELOPE_EPS) {
            return Some(format!("perception yields before s = {s:.2} m without need"));
        }
    }
    if comfort_dangerous && !truth_c.comfort_dangerous() {
        return Some("perception breaches a comfort margin that truth keeps".into());
    }
    None
}

fn label_actor(
    id: ActorId,
    truth_c: &FrameConstraints,
    perceived_c: &FrameConstraints,
) -> (RelevanceLabel, String) {
    if let Some(x) = truth_c.actor(id) {
        if let Some(reason) = uncovered_obligation(x, truth_c, perceived_c) {
            return (RelevanceLabel::SafetyRelevant, reason);
        }
    }
    if let Some(y) = perceived_c.actor(id) {
        let yield_stop = perceived_c.yields.iter().find(|d| d.actor_id == id).map(|d| d.stop_before_s);
        if let Some(reason) =
            stricter_than_truth(&y.envelope, y.owes_brake || y.owes_lateral, y.comfort_dangerous, yield_stop, truth_c)
        {
            return (RelevanceLabel::ComfortRelevant, reason);
        }
    }
    if let Some(x) = truth_c.actor(id) {
        if x.comfort_dangerous && !perceived_c.comfort_dangerous() && !perceived_c.blind {
            return (
                RelevanceLabel::ComfortRelevant,
                format!("actor {id} is inside the comfort margin in truth but not in perception"),
            );
        }
    }
    (RelevanceLabel::Irrelevant, "no change to the proper response".into())
}

fn verdicts_for(
    truth: &WorldFrame,
    truth_c: &FrameConstraints,
    perceived: &PerceivedFrame,
    perceived_c: &FrameConstraints,
    cfg: &RelevanceConfig,
) -> Vec<RelevanceVerdict> {
    let t = truth.t;
    if perceived.blind {
        let (label, reason) = match stricter_than_truth(
            &perceived_c.envelope,
            perceived_c.envelope.min_required_brake_long > 0.0,
            false,
            None,
            truth_c,
        ) {
            Some(r) => (RelevanceLabel::ComfortRelevant, format!("no perception: {r}")),
            None => (RelevanceLabel::Irrelevant, "no perception, but the blind response covers truth".into()),
        };
        return vec![RelevanceVerdict { t, discrepancy: Discrepancy::ChannelBlind, actor_id: None, label, reason }];
    }

    let mut out = Vec::new();
    let mut push = |discrepancy, id: ActorId| {
        let (label, reason) = label_actor(id, truth_c, perceived_c);
        out.push(RelevanceVerdict { t, discrepancy, actor_id: Some(id), label, reason });
    };
    for x in truth.others() {
        match perceived.frame.actor(x.actor_id) {
            None => push(Discrepancy::MissedActor, x.actor_id),
            Some(y) => {
                if y.kind != x.kind {
                    push(Discrepancy::Misclassification, x.actor_id);
                }
                let pos = (y.s - x.s).abs().max((y.l - x.l).abs());
                let vel = (y.v_long - x.v_long).abs().max((y.v_lat - x.v_lat).abs());
                if pos > cfg.position_tolerance_m || vel > cfg.velocity_tolerance_mps {
                    push(Discrepancy::StateError, x.actor_id);
                }
            }
        }
    }
    for y in perceived.frame.others() {
        if truth.actor(y.actor_id).is_none() {
            push(Discrepancy::GhostActor, y.actor_id);
        }
    }
    out
}

/// Counts for one run, plus the frames at which system-level sensing
/// failures began.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EpisodeReport {
    pub frames: usize,
    pub safety_frames_a: usize,
    pub safety_frames_b: usize,
    pub safety_frames_fused: usize,
    pub comfort_frames_a: usize,
    pub comfort_frames_b: usize,
    pub comfort_frames_fused: usize,
    pub blind_frames_fused: usize,
    /// Frames where both channels failed within one coincidence window.
    pub coincident_frames: usize,
    /// Failure episodes: coincident channel failures, fused safety-relevant
    /// verdicts and fused blindness, merged when closer than the window.
    pub system_failures: usize,
    pub system_failure_starts: Vec<usize>,
    pub collisions: usize,
}

fn has_label(frame: &[RelevanceVerdict], label: RelevanceLabel) -> bool {
    frame.iter().any(|v| v.label == label)
}

/// Frames at which a system-level sensing failure is recorded.
pub fn system_failure_frames(
    a: &[Vec<RelevanceVerdict>],
    b: &[Vec<RelevanceVerdict>],
    fused: &[Vec<RelevanceVerdict>],
    window: usize,
) -> Vec<bool> {
    let n = a.len().min(b.len()).min(fused.len());
    let w = window.max(1);
    let fa: Vec<bool> = a[..n].iter().map(|f| has_label(f, RelevanceLabel::SafetyRelevant)).collect();
    let fb: Vec<bool> = b[..n].iter().map(|f| has_label(f, RelevanceLabel::SafetyRelevant)).collect();
    // prefix counts answer "any failure of the other channel within w - 1"
    let prefix = |xs: &[bool]| -> Vec<usize> {
        let mut acc = vec![0; xs.len() + 1];
        for (i, &x) in xs.iter().enumerate() {
            acc[i + 1] = acc[i] + x as usize;
        }
        acc
    };
    let (pa, pb) = (prefix(&fa), prefix(&fb));
    let any_near = |pre: &[usize], i: usize| {
        let lo = i.saturating_sub(w - 1);
        let hi = (i + w).min(n);
        pre[hi] > pre[lo]
    };
    (0..n)
        .map(|i| {
            (fa[i] && any_near(&pb, i))
                || (fb[i] && any_near(&pa, i))
                || has_label(&fused[i], RelevanceLabel::SafetyRelevant)
                || fused[i].iter().any(|v| v.discrepancy == Discrepancy::ChannelBlind)
        })
        .collect()
}

pub fn episode_summary(
    a: &[Vec<RelevanceVerdict>],
    b: &[Vec<RelevanceVerdict>],
    fused: &[Vec<RelevanceVerdict>],
    window: usize,
    collisions: usize,
) -> EpisodeReport {
    let w = window.max(1);
    let failures = system_failure_frames(a, b, fused, w);
    let mut starts = Vec::new();
    let mut last: Option<usize> = None;
    for (i, _) in failures.iter().enumerate().filter(|(_, &f)| f) {
        if last.is_none_or(|l| i - l >= w) {
            starts.push(i);
        }
        last = Some(i);
    }
    let count = |xs: &[Vec<RelevanceVerdict>], l| xs.iter().filter(|f| has_label(f, l)).count();
    let n = failures.len();
    let both = |i: usize| has_label(&a[i], RelevanceLabel::SafetyRelevant) && has_label(&b[i], RelevanceLabel::SafetyRelevant);
    EpisodeReport {
        frames: n,
        safety_frames_a: count(a, RelevanceLabel::SafetyRelevant),
        safety_frames_b: count(b, RelevanceLabel::SafetyRelevant),
        safety_frames_fused: count(fused, RelevanceLabel::SafetyRelevant),
        comfort_frames_a: count(a, RelevanceLabel::ComfortRelevant),
        comfort_frames_b: count(b, RelevanceLabel::ComfortRelevant),
        comfort_frames_fused: count(fused, RelevanceLabel::ComfortRelevant),
        blind_frames_fused: fused.iter().filter(|f| f.iter().any(|v| v.discrepancy == Discrepancy::ChannelBlind)).count(),
        coincident_frames: (0..n).filter(|&i| both(i)).count(),
        system_failures: starts.len(),
        system_failure_starts: starts,
        collisions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::{ActorKind, ActorState, LaneId, RssParameters};
    use proptest::prelude::*;

    fn vehicle(id: u32, s: f64, l: f64, v: f64) -> ActorState {
        ActorState {
            actor_id: ActorId(id),
            kind: ActorKind::Vehicle,
            s,
            l,
            v_long: v,
            v_lat: 0.0,
            length: 4.5,
            width: 1.8,
            lane_id: LaneId(0),
        }
    }

    fn frame(t: f64, actors: Vec<ActorState>) -> WorldFrame {
        WorldFrame { t, ego_id: ActorId(0), actors, occlusions: vec![], lanes: vec![LaneId(0)], crossings: vec![] }
    }

    fn seen(f: &WorldFrame) -> PerceivedFrame {
        PerceivedFrame { frame: f.clone(), blind: false }
    }

    fn without(f: &WorldFrame, id: u32) -> PerceivedFrame {
        let mut g = f.clone();
        g.actors.retain(|a| a.actor_id != ActorId(id));
        PerceivedFrame { frame: g, blind: false }
    }

    fn params() -> ValidatedParameters {
        RssParameters::default().validate().unwrap()
    }

    #[test]
    fn off_road_object_miss_is_irrelevant() {
        let p = params();
        let mut object = vehicle(7, 40.0, 50.0, 0.0);
        object.kind = ActorKind::StaticObject;
        let truth: Vec<_> = (0..10).map(|i| frame(i as f64 * 0.1, vec![vehicle(0, 2.0 * i as f64, 0.0, 20.0), object.clone()])).collect();
        let perceived: Vec<_> = truth.iter().map(|f| without(f, 7)).collect();
        for k in 1..=truth.len() {
            let v = classify_frame(&truth[..k], &perceived[..k], &p, &RelevanceConfig::default()).unwrap();
            assert_eq!(v.len(), 1);
            assert_eq!(v[0].discrepancy, Discrepancy::MissedActor);
            assert_eq!(v[0].label, RelevanceLabel::Irrelevant, "{}", v[0].reason);
        }
    }

    #[test]
    fn ghost_ahead_is_comfort_relevant() {
        let p = params();
        let truth: Vec<_> = (0..8).map(|i| frame(i as f64 * 0.1, vec![vehicle(0, 1.5 * i as f64, 0.0, 15.0)])).collect();
        let perceived: Vec<_> = truth
            .iter()
            .map(|f| {
                let mut g = f.clone();
                let ego_s = g.actors[0].s;
                g.actors.push(vehicle(GHOST, ego_s + 24.5, 0.0, 0.0));
                seen(&g)
            })
            .collect();
        for k in 1..=truth.len() {
            let v = classify_frame(&truth[..k], &perceived[..k], &p, &RelevanceConfig::default()).unwrap();
            assert_eq!(v.len(), 1);
            assert_eq!(v[0].discrepancy, Discrepancy::GhostActor);
            assert_eq!(v[0].label, RelevanceLabel::ComfortRelevant, "{}", v[0].reason);
        }
    }

    const GHOST: u32 = 0x8000_0001;

    #[test]
    fn lead_missed_inside_safe_distance_is_rule_one() {
        let p = params();
        // 30 m gap at 20 m/s behind a stopped lead: well inside 69.6 m
        let truth: Vec<_> = (0..3).map(|i| frame(i as f64 * 0.1, vec![vehicle(0, 0.0, 0.0, 20.0), vehicle(1, 34.5, 0.0, 0.0)])).collect();
        let perceived: Vec<_> = truth.iter().map(|f| without(f, 1)).collect();
        let v = classify_frame(&truth, &perceived, &p, &RelevanceConfig::default()).unwrap();
        assert_eq!(v[0].label, RelevanceLabel::SafetyRelevant);
        assert!(v[0].reason.starts_with("rule 1"), "{}", v[0].reason);
    }

    #[test]
    fn single_missed_frame_during_safe_following() {
        let p = params();
        let truth: Vec<_> = (0..60)
            .map(|i| {
                let t = i as f64 * 0.1;
                frame(t, vec![vehicle(0, 20.0 * t, 0.0, 20.0), vehicle(1, 20.0 * t + 60.0, 0.0, 20.0)])
            })
            .collect();
        let perceived: Vec<_> = truth.iter().enumerate().map(|(i, f)| if i == 59 { without(f, 1) } else { seen(f) }).collect();
        let v = classify_frame(&truth, &perceived, &p, &RelevanceConfig::default()).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].label, RelevanceLabel::Irrelevant, "{}", v[0].reason);
        for k in 1..59 {
            assert!(classify_frame(&truth[..k], &perceived[..k], &p, &RelevanceConfig::default()).unwrap().is_empty());
        }
    }

    #[test]
    fn transient_misclassification_is_covered_by_fallback() {
        let p = params();
        let truth: Vec<_> = (0..10)
            .map(|i| {
                let t = i as f64 * 0.1;
                frame(t, vec![vehicle(0, 10.0 * t, 0.0, 10.0), vehicle(1, 10.0 * t + 30.0, 0.0, 10.0)])
            })
            .collect();
        let perceived: Vec<_> = truth
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let mut g = seen(f);
                if i >= 5 {
                    g.frame.actors[1].kind = ActorKind::StaticObject;
                }
                g
            })
            .collect();
        for k in 6..=10 {
            let v = classify_frame(&truth[..k], &perceived[..k], &p, &RelevanceConfig::default()).unwrap();
            assert_eq!(v[0].discrepancy, Discrepancy::Misclassification);
            assert_ne!(v[0].label, RelevanceLabel::SafetyRelevant, "{}", v[0].reason);
        }
    }

    #[test]
    fn zero_fault_stream_has_no_verdicts() {
        let p = params();
        let truth: Vec<_> = (0..20)
            .map(|i| {
                let t = i as f64 * 0.1;
                frame(t, vec![vehicle(0, 20.0 * t, 0.0, 20.0), vehicle(1, 20.0 + 10.0 * t, 0.0, 10.0)])
            })
            .collect();
        let perceived: Vec<_> = truth.iter().map(seen).collect();
        for k in 1..=truth.len() {
            assert!(classify_frame(&truth[..k], &perceived[..k], &p, &RelevanceConfig::default()).unwrap().is_empty());
        }
    }

    #[test]
    fn blind_channel_is_not_safety_relevant() {
        let p = params();
        let truth = vec![frame(0.0, vec![vehicle(0, 0.0, 0.0, 20.0), vehicle(1, 34.5, 0.0, 0.0)])];
        let blind = vec![PerceivedFrame { frame: frame(0.0, vec![vehicle(0, 0.0, 0.0, 20.0)]), blind: true }];
        let v = classify_frame(&truth, &blind, &p, &RelevanceConfig::default()).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].discrepancy, Discrepancy::ChannelBlind);
        assert_eq!(v[0].label, RelevanceLabel::ComfortRelevant);
    }

    #[test]
    fn misaligned_frames_rejected() {
        let p = params();
        let truth = vec![frame(0.0, vec![vehicle(0, 0.0, 0.0, 1.0)])];
        let perceived = vec![seen(&frame(0.1, vec![vehicle(0, 0.0, 0.0, 1.0)]))];
        assert!(matches!(
            classify_frame(&truth, &perceived, &p, &RelevanceConfig::default()),
            Err(RelevanceError::Misaligned { .. })
        ));
    }

    fn safety_at(frames: &[usize], n: usize) -> Vec<Vec<RelevanceVerdict>> {
        (0..n)
            .map(|i| {
                if frames.contains(&i) {
                    vec![RelevanceVerdict {
                        t: i as f64,
                        discrepancy: Discrepancy::MissedActor,
                        actor_id: Some(ActorId(1)),
                        label: RelevanceLabel::SafetyRelevant,
                        reason: "rule 1".into(),
                    }]
                } else {
                    Vec::new()
                }
            })
            .collect()
    }

    #[test]
    fn episode_examples() {
        let n = 6000;
        let none = safety_at(&[], n);
        let r = episode_summary(&safety_at(&[100], n), &safety_at(&[5000], n), &none, 10, 0);
        assert_eq!(r.system_failures, 0);
        let r = episode_summary(&safety_at(&[100], n), &safety_at(&[100], n), &none, 10, 0);
        assert_eq!(r.system_failures, 1);
        let r = episode_summary(&safety_at(&[100, 101, 102, 103, 104, 105], n), &safety_at(&[103], n), &none, 10, 0);
        assert_eq!(r.system_failures, 1);
        assert_eq!(r.system_failure_starts, vec![100]);
        let r = episode_summary(&none, &none, &safety_at(&[7], n), 10, 0);
        assert_eq!(r.system_failures, 1);
    }

    /// Direct enumeration of coincident pairs, then clustering.
    fn brute_force_episodes(a: &[usize], b: &[usize], fused: &[usize], w: usize) -> usize {
        let mut marked = std::collections::BTreeSet::new();
        for &i in a {
            for &j in b {
                if i.abs_diff(j) < w {
                    marked.insert(i);
                    marked.insert(j);
                }
            }
        }
        marked.extend(fused.iter().copied());
        let mut episodes = 0;
        let mut last: Option<usize> = None;
        for &i in &marked {
            if last.is_none_or(|l| i - l >= w) {
                episodes += 1;
            }
            last = Some(i);
        }
        episodes
    }

    proptest! {
        #[test]
        fn episode_count_matches_brute_force(
            a in proptest::collection::btree_set(0usize..300, 0..30),
            b in proptest::collection::btree_set(0usize..300, 0..30),
            f in proptest::collection::btree_set(0usize..300, 0..5),
            w in 1usize..20,
        ) {
            let a: Vec<_> = a.into_iter().collect();
            let b: Vec<_> = b.into_iter().collect();
            let f: Vec<_> = f.into_iter().collect();
            let r = episode_summary(&safety_at(&a, 300), &safety_at(&b, 300), &safety_at(&f, 300), w, 0);
            prop_assert_eq!(r.system_failures, brute_force_episodes(&a, &b, &f, w));
        }

        /// Harder lead braking never turns a safety-relevant miss into a
        /// harmless one.
        #[test]
        fn monotone_in_lead_braking(d1 in 0.5..8.0f64, extra in 0.0..4.0f64, gap in 20.0..120.0f64, n in 5usize..40) {
            let p = params();
            let d2 = (d1 + extra).min(p.brake_max_long);
            // the ego holds 20 m/s, so only histories before it would reach
            // the lead are physical
            let lead_rear = |decel: f64, t: f64| {
                let t_stop = (20.0 / decel).min(t);
                gap + 20.0 * t_stop - 0.5 * decel * t_stop * t_stop
            };
            let t_last = (n - 1) as f64 * 0.1;
            prop_assume!(lead_rear(d2, t_last) > 20.0 * t_last);
            let run = |decel: f64| {
                let truth: Vec<_> = (0..n)
                    .map(|i| {
                        let t = i as f64 * 0.1;
                        let v_lead = (20.0 - decel * t).max(0.0);
                        let t_stop = (20.0 / decel).min(t);
                        let s_lead = gap + 4.5 + 20.0 * t_stop - 0.5 * decel * t_stop * t_stop;
                        frame(t, vec![vehicle(0, 20.0 * t, 0.0, 20.0), vehicle(1, s_lead, 0.0, v_lead)])
                    })
                    .collect::<Vec<_>>();
                let perceived: Vec<_> = truth.iter().map(|f| without(f, 1)).collect();
                classify_frame(&truth, &perceived, &p, &RelevanceConfig::default()).unwrap()[0].label
            };
            if run(d1) == RelevanceLabel::SafetyRelevant {
                prop_assert_eq!(run(d2), RelevanceLabel::SafetyRelevant);
            }
        }
    }
}
