use serde::{Deserialize, Serialize};

use super::monitor::SafetyMonitor;
use super::KernelError;
use crate::world::{ActorState, LateralAction, ResponseEnvelope, ValidatedParameters, WorldFrame};

const ACCEL_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplianceVerdict {
    pub t: f64,
    pub compliant: bool,
    pub envelope: ResponseEnvelope,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub violation: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplianceReport {
    pub verdicts: Vec<ComplianceVerdict>,
    pub first_violation: Option<usize>,
}

impl ComplianceReport {
    pub fn all_compliant(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Checks one applied acceleration pair against an envelope. `dt` is the
/// hold time of the command, used to accept a lateral command that lands
/// exactly on zero lateral velocity.
pub fn check_accel(
    envelope: &ResponseEnvelope,
    ego: &ActorState,
    a_long: f64,
    a_lat: f64,
    dt: f64,
    p: &ValidatedParameters,
) -> Result<(), String> {
    if a_long > envelope.max_allowed_accel_long + ACCEL_EPS {
        return Err(format!(
            "longitudinal acceleration {a_long:.3} exceeds allowed {:.3}",
            envelope.max_allowed_accel_long
        ));
    }
    if envelope.lateral_action == LateralAction::ReachZeroLateralVelocity {
        let v = ego.v_lat;
        if v.abs() <= ACCEL_EPS {
            // cancelling a residual velocity is allowed; building one up is not
            let residual = if dt > 0.0 { (v + a_lat * dt).abs() } else { a_lat.abs() };
            if residual > ACCEL_EPS {
                return Err(format!("lateral acceleration {a_lat:.3} while lateral velocity must stay zero"));
            }
        } else {
            let opposing = -a_lat * v.signum();
            let needed = if dt > 0.0 { p.brake_min_lat.min(v.abs() / dt) } else { p.brake_min_lat };
            if opposing + ACCEL_EPS < needed {
                return Err(format!("lateral braking {opposing:.3} below required {needed:.3}"));
            }
        }
    }
    Ok(())
}

/// Per-frame check that the ego's applied accelerations stay inside the
/// envelope derived from the trace up to that frame. Comfort margins are not
/// applied.
pub fn compliance_check(
    trace: &[WorldFrame],
    ego_accels: &[(f64, f64)],
    p: &ValidatedParameters,
) -> Result<ComplianceReport, KernelError> {
    if trace.len() != ego_accels.len() {
        return Err(KernelError::LengthMismatch { frames: trace.len(), accels: ego_accels.len() });
    }
    let mut monitor = SafetyMonitor::new(*p);
    let mut verdicts = Vec::with_capacity(trace.len());
    let mut first_violation = None;
    for (i, (frame, &(a_long, a_lat))) in trace.iter().zip(ego_accels).enumerate() {
        let constraints = monitor.update(frame);
        let dt = hold_time(trace, i);
        let result = check_accel(&constraints.envelope, frame.ego(), a_long, a_lat, dt, p);
        if result.is_err() && first_violation.is_none() {
            first_violation = Some(i);
        }
        verdicts.push(ComplianceVerdict {
            t: frame.t,
            compliant: result.is_ok(),
            envelope: constraints.envelope,
            violation: result.err(),
        });
    }
    Ok(ComplianceReport { verdicts, first_violation })
}

pub(crate) fn hold_time(trace: &[WorldFrame], i: usize) -> f64 {
    if i + 1 < trace.len() {
        trace[i + 1].t - trace[i].t
    } else if i > 0 {
        trace[i].t - trace[i - 1].t
    } else {
        0.0
    }
}
