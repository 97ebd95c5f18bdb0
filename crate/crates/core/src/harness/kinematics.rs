//! Exact constant-acceleration integration over one step.
//!
//! Each actor holds its commanded acceleration for the whole step. The
//! longitudinal speed never drops below zero: an actor that would stop
//! mid-step stops there and stays put for the rest of the step.

use super::scenario::Behavior;
use crate::world::{ActorId, ActorState, LaneId, WorldFrame, LANE_WIDTH_M};

const SCRIPT_TIME_EPS: f64 = 1e-9;

pub fn lane_of(l: f64) -> LaneId {
    LaneId((l / LANE_WIDTH_M).round() as i32)
}

/// Advance one actor by `dt` under constant `(a_long, a_lat)`.
pub fn integrate(state: &ActorState, a_long: f64, a_lat: f64, dt: f64) -> ActorState {
    let mut next = state.clone();
    let v = state.v_long;
    if a_long < 0.0 && v + a_long * dt < 0.0 {
        let t_stop = v / -a_long;
        next.s += v * t_stop + 0.5 * a_long * t_stop * t_stop;
        next.v_long = 0.0;
    } else {
        next.s += v * dt + 0.5 * a_long * dt * dt;
        next.v_long = (v + a_long * dt).max(0.0);
    }
    next.l += state.v_lat * dt + 0.5 * a_lat * dt * dt;
    next.v_lat += a_lat * dt;
    next.lane_id = lane_of(next.l);
    next
}

/// Acceleration a behaviour script commands at time `t`.
pub fn script_accel(behavior: &Behavior, state: &ActorState, t: f64, dt: f64) -> (f64, f64) {
    match *behavior {
        Behavior::BrakeAt { t: t0, decel } if t >= t0 - SCRIPT_TIME_EPS => (-decel, 0.0),
        Behavior::CutIn { t: t0, lateral_rate, target_lane, lateral_accel } if t >= t0 - SCRIPT_TIME_EPS => {
            let remaining = crate::world::lane_center(target_lane) - state.l;
            // fastest approach that can still stop laterally on the lane center
            let desired = remaining.signum() * lateral_rate.min((2.0 * lateral_accel * remaining.abs()).sqrt());
            let a = ((desired - state.v_lat) / dt).clamp(-lateral_accel, lateral_accel);
            (0.0, a)
        }
        _ => (0.0, 0.0),
    }
}

/// Advance every actor in `frame` by `dt`: scripted actors by their
/// behaviour, the ego by `ego_accel`, anything else at constant velocity.
pub fn step(frame: &WorldFrame, scripts: &[(ActorId, Behavior)], ego_accel: (f64, f64), dt: f64) -> WorldFrame {
    let mut next = frame.clone();
    next.t = frame.t + dt;
    for a in next.actors.iter_mut() {
        let (al, at) = if a.actor_id == frame.ego_id {
            ego_accel
        } else {
            scripts
                .iter()
                .find(|(id, _)| *id == a.actor_id)
                .map_or((0.0, 0.0), |(_, b)| script_accel(b, a, frame.t, dt))
        };
        *a = integrate(a, al, at, dt);
    }
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::ActorKind;

    fn car(v: f64) -> ActorState {
        ActorState {
            actor_id: ActorId(1),
            kind: ActorKind::Vehicle,
            s: 0.0,
            l: 0.0,
            v_long: v,
            v_lat: 0.0,
            length: 4.5,
            width: 1.8,
            lane_id: LaneId(0),
        }
    }

    #[test]
    fn constant_speed_advances() {
        let next = integrate(&car(10.0), 0.0, 0.0, 0.1);
        assert!((next.s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn braking_one_second() {
        let mut c = car(20.0);
        for _ in 0..10 {
            c = integrate(&c, -4.0, 0.0, 0.1);
        }
        assert!((c.v_long - 16.0).abs() < 1e-9);
        assert!((c.s - 18.0).abs() < 1e-9);
    }

    #[test]
    fn stop_clamp_matches_stopping_distance() {
        let mut c = car(20.0);
        for _ in 0..100 {
            c = integrate(&c, -6.0, 0.0, 0.1);
        }
        assert_eq!(c.v_long, 0.0);
        assert!((c.s - 400.0 / 12.0).abs() < 1e-9);
    }

    #[test]
    fn scripted_lead_stops_on_time() {
        // brake_at(2.0, 6.0) from 20 m/s: stopped at 2 + 20/6 s
        let b = Behavior::BrakeAt { t: 2.0, decel: 6.0 };
        let dt = 0.01;
        let mut c = car(20.0);
        let mut stopped_at = None;
        for i in 0..1000 {
            let t = i as f64 * dt;
            let (al, at) = script_accel(&b, &c, t, dt);
            c = integrate(&c, al, at, dt);
            if stopped_at.is_none() && c.v_long == 0.0 {
                stopped_at = Some(t + dt);
            }
        }
        let expect = 2.0 + 20.0 / 6.0;
        assert!((stopped_at.unwrap() - expect).abs() <= dt, "{stopped_at:?}");
        assert!((c.s - (40.0 + 400.0 / 12.0)).abs() < 1e-6);
    }

    #[test]
    fn cut_in_settles_on_lane_center() {
        let b = Behavior::CutIn { t: 0.0, lateral_rate: 1.5, target_lane: LaneId(1), lateral_accel: 1.0 };
        let mut c = car(10.0);
        for i in 0..200 {
            let (al, at) = script_accel(&b, &c, i as f64 * 0.05, 0.05);
            c = integrate(&c, al, at, 0.05);
        }
        assert!((c.l - LANE_WIDTH_M).abs() < 0.05, "{}", c.l);
        assert!(c.v_lat.abs() < 0.1);
        assert_eq!(c.lane_id, LaneId(1));
    }
}
