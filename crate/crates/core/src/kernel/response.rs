//! Danger threshold and proper response for a single ego/actor pair.
//!
//! [`PairTracker`] is the incremental form used by the monitor; the slice
//! functions [`danger_threshold`] and [`proper_response`] fold a recorded
//! history through it.

use serde::{Deserialize, Serialize};

use super::assess::{Relation, SituationAssessment};
use super::KernelError;
use crate::world::{EnvelopeState, LateralAction, ResponseEnvelope, ValidatedParameters};

/// Tolerance on time comparisons; favours the stricter envelope.
const TIME_EPS: f64 = 1e-9;
/// Below this speed the ego counts as stationary.
pub const STATIONARY_EPS: f64 = 1e-9;

/// One tick of a pair history.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairSample {
    pub t: f64,
    pub ego_v_long: f64,
    pub assessment: SituationAssessment,
}

/// Which safety distance was lost last when a dangerous episode began.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DangerCause {
    Longitudinal,
    Lateral,
    Simultaneous,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Episode {
    threshold_t: f64,
    cause: DangerCause,
    ego_is_rear: bool,
}

/// Envelope for one pair together with the obligations it implies,
/// independent of where the response-time window currently is.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairResponse {
    pub envelope: ResponseEnvelope,
    pub cause: Option<DangerCause>,
    /// The ego owes longitudinal braking (possibly still inside the response
    /// time window).
    pub owes_brake: bool,
    pub owes_lateral: bool,
}

#[derive(Debug, Clone, Default)]
pub struct PairTracker {
    prev: Option<PairSample>,
    episode: Option<Episode>,
}

impl PairTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn last_t(&self) -> Option<f64> {
        self.prev.map(|s| s.t)
    }

    pub fn threshold(&self) -> Option<f64> {
        self.episode.map(|e| e.threshold_t)
    }

    pub fn update(&mut self, sample: PairSample, p: &ValidatedParameters) -> PairResponse {
        let dt = self.prev.map_or(0.0, |prev| (sample.t - prev.t).max(0.0));
        let a = &sample.assessment;
        if !a.dangerous {
            self.episode = None;
            self.prev = Some(sample);
            return PairResponse {
                envelope: ResponseEnvelope::unconstrained(p),
                cause: None,
                owes_brake: false,
                owes_lateral: false,
            };
        }

        let episode = *self.episode.get_or_insert_with(|| match self.prev {
            Some(prev) if !prev.assessment.dangerous => {
                let was = &prev.assessment;
                let cause = match (was.long_safe, was.lat_safe) {
                    (true, true) => DangerCause::Simultaneous,
                    (true, false) => DangerCause::Longitudinal,
                    _ => DangerCause::Lateral,
                };
                Episode { threshold_t: prev.t, cause, ego_is_rear: was.relation == Relation::OtherAhead }
            }
            _ => {
                // dangerous from the first observed tick
                let cause = if a.relation == Relation::Overlapping {
                    DangerCause::Lateral
                } else {
                    DangerCause::Simultaneous
                };
                Episode { threshold_t: sample.t, cause, ego_is_rear: a.relation == Relation::OtherAhead }
            }
        });
        self.prev = Some(sample);

        let responding = sample.t + dt > episode.threshold_t + p.response_time_s + TIME_EPS;
        let owes_brake = episode.cause != DangerCause::Lateral && episode.ego_is_rear;
        let owes_lateral = episode.cause == DangerCause::Lateral;

        let state = match episode.cause {
            DangerCause::Longitudinal => EnvelopeState::DangerousLongitudinal,
            DangerCause::Lateral => EnvelopeState::DangerousLateral,
            DangerCause::Simultaneous => EnvelopeState::DangerousBoth,
        };
        let mut envelope = ResponseEnvelope {
            state,
            max_allowed_accel_long: p.accel_max_long,
            min_required_brake_long: 0.0,
            lateral_action: LateralAction::None,
            since_t: Some(episode.threshold_t),
        };
        if responding && owes_brake {
            if sample.ego_v_long <= STATIONARY_EPS {
                envelope.max_allowed_accel_long = 0.0;
            } else {
                envelope.max_allowed_accel_long = -p.brake_min_long;
                envelope.min_required_brake_long = p.brake_min_long;
            }
        }
        if responding && owes_lateral {
            envelope.lateral_action = LateralAction::ReachZeroLateralVelocity;
        }
        PairResponse { envelope, cause: Some(episode.cause), owes_brake, owes_lateral }
    }
}

/// Time of the last non-dangerous tick preceding the most recent dangerous
/// run, the first tick when the history starts dangerous, or `None` when the
/// pair was never dangerous.
pub fn danger_threshold(history: &[PairSample]) -> Result<Option<f64>, KernelError> {
    if history.is_empty() {
        return Err(KernelError::EmptyHistory);
    }
    let Some(last_dangerous) = history.iter().rposition(|s| s.assessment.dangerous) else {
        return Ok(None);
    };
    let run_start = history[..=last_dangerous]
        .iter()
        .rposition(|s| !s.assessment.dangerous)
        .map_or(0, |i| i + 1);
    Ok(Some(if run_start == 0 { history[0].t } else { history[run_start - 1].t }))
}

/// Envelope owed at the last tick of `history`.
pub fn proper_response(history: &[PairSample], p: &ValidatedParameters) -> Result<ResponseEnvelope, KernelError> {
    if history.is_empty() {
        return Err(KernelError::EmptyHistory);
    }
    let mut tracker = PairTracker::new();
    let mut last = None;
    for s in history {
        last = Some(tracker.update(*s, p));
    }
    Ok(last.expect("non-empty").envelope)
}
