//! A lead car brakes hard in front of the ego. The pair tracker reports the
//! danger threshold and the envelope tick by tick, and the ego obeys it with
//! the weakest permitted braking.
//!
//! Run with `cargo run --example danger_and_response`.

use rss_core::kernel::{assess_pair, PairSample, PairTracker};
use rss_core::{ActorId, ActorKind, ActorState, LaneId, RssParameters};

fn car(id: u32, s: f64, v: f64) -> ActorState {
    ActorState {
        actor_id: ActorId(id),
        kind: ActorKind::Vehicle,
        s,
        l: 0.0,
        v_long: v,
        v_lat: 0.0,
        length: 4.5,
        width: 1.8,
        lane_id: LaneId(0),
    }
}

fn advance(a: &mut ActorState, accel: f64, dt: f64) {
    let v = a.v_long;
    if accel < 0.0 && v + accel * dt <= 0.0 {
        a.s += v * v / (-2.0 * accel);
        a.v_long = 0.0;
    } else {
        a.s += v * dt + 0.5 * accel * dt * dt;
        a.v_long = v + accel * dt;
    }
}

fn main() {
    let p = RssParameters::default().validate().expect("defaults are valid");
    let dt = 0.1;
    let mut ego = car(0, 0.0, 20.0);
    let mut lead = car(1, 60.0, 20.0);
    let mut tracker = PairTracker::new();
    println!("{:>5} {:>7} {:>8} {:>8} {:>24} {:>9} {:>7}", "t", "gap", "needed", "ego v", "state", "threshold", "accel");
    for i in 0..=80 {
        let t = i as f64 * dt;
        let assessment = assess_pair(&ego, &lead, &p, false);
        let r = tracker.update(PairSample { t, ego_v_long: ego.v_long, assessment }, &p);
        let accel = if r.envelope.min_required_brake_long > 0.0 {
            -r.envelope.min_required_brake_long
        } else {
            r.envelope.max_allowed_accel_long.min(0.0)
        };
        if i % 5 == 0 || r.envelope.min_required_brake_long > 0.0 && i % 2 == 0 {
            println!(
                "{t:>5.1} {:>7.2} {:>8.2} {:>8.2} {:>24} {:>9} {accel:>7.2}",
                assessment.long_distance_actual,
                assessment.long_distance_required,
                ego.v_long,
                format!("{:?}", r.envelope.state),
                r.envelope.since_t.map_or("-".into(), |s| format!("{s:.1}")),
            );
        }
        assert!(!assessment.collision, "the proper response prevents contact");
        let lead_accel = if t >= 2.0 { -p.brake_max_long } else { 0.0 };
        advance(&mut ego, accel, dt);
        advance(&mut lead, lead_accel, dt);
    }
    println!("final gap {:.2} m, both stopped", lead.rear() - ego.s);
}
