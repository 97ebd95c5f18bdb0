//! Closed-form safe distances.

use super::KernelError;
use crate::world::ValidatedParameters;

/// Minimum bumper gap a rear vehicle at `v_rear` must keep to a front
/// vehicle at `v_front`: the rear may accelerate at `accel_max_long` for the
/// response time before braking at `brake_min_long`, while the front brakes
/// at `brake_max_long`. Comfort margins are not included.
pub fn safe_longitudinal_distance(
    v_rear: f64,
    v_front: f64,
    p: &ValidatedParameters,
) -> Result<f64, KernelError> {
    if !(v_rear >= 0.0) || !(v_front >= 0.0) {
        return Err(KernelError::NegativeVelocity { v_rear, v_front });
    }
    Ok(longitudinal_unchecked(v_rear, v_front, p))
}

pub(crate) fn longitudinal_unchecked(v_rear: f64, v_front: f64, p: &ValidatedParameters) -> f64 {
    let rho = p.response_time_s;
    let v_resp = v_rear + rho * p.accel_max_long;
    let d = v_rear * rho + 0.5 * p.accel_max_long * rho * rho + v_resp * v_resp / (2.0 * p.brake_min_long)
        - v_front * v_front / (2.0 * p.brake_max_long);
    d.max(0.0)
}

/// Distance the ego covers from speed `v` if it keeps accelerating for the
/// response time and then brakes at `brake_min_long` to a stop.
pub fn stopping_distance(v: f64, p: &ValidatedParameters) -> f64 {
    longitudinal_unchecked(v.max(0.0), 0.0, p)
}

/// Signed lateral displacement while braking a lateral velocity `v` to zero.
fn braking_displacement(v: f64, brake: f64) -> f64 {
    v * v.abs() / (2.0 * brake)
}

/// Minimum lateral edge-to-edge distance between a left actor with lateral
/// velocity `v1_lat` and a right actor with `v2_lat` (both signed, positive
/// rightward). Always at least `lateral_margin_mu`.
pub fn safe_lateral_distance(v1_lat: f64, v2_lat: f64, p: &ValidatedParameters) -> f64 {
    let rho = p.response_time_s;
    let b = p.brake_min_lat;
    let v1_resp = v1_lat + rho * p.accel_max_lat;
    let v2_resp = v2_lat - rho * p.accel_max_lat;
    let left_travel = 0.5 * (v1_lat + v1_resp) * rho + braking_displacement(v1_resp, b);
    let right_travel = 0.5 * (v2_lat + v2_resp) * rho + braking_displacement(v2_resp, b);
    p.lateral_margin_mu + (left_travel - right_travel).max(0.0)
}
