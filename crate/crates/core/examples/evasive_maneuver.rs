//! Debris in the ego lane. With the neighbouring lane free the ego swerves;
//! with a car alongside it brakes instead.
//!
//! Run with `cargo run --example evasive_maneuver`.

use rss_core::harness::{library_scenario, run_scenario, Decision};
use rss_core::kernel::evasive_maneuver_check;
use rss_core::{ActorId, LaneId};

fn main() {
    for name in ["debris_free_lane", "debris_blocked_lane"] {
        let scn = library_scenario(name).expect("shipped").validate().expect("valid");
        let p = scn.params();
        let out = run_scenario(&scn, 0).expect("runs");
        println!("{name}: {}", scn.spec().description);
        let revealed = &out.truth.iter().find(|r| r.frame.actor(ActorId(1)).is_some()).expect("debris appears").frame;
        let verdict = evasive_maneuver_check(revealed, LaneId(-1), &p).expect("lane -1 exists");
        println!("  move into lane -1 when the debris appears: {verdict:?}");
        let mut last = None;
        for r in &out.truth {
            if r.decision != last {
                let e = r.frame.ego();
                println!(
                    "  t = {:>4.1}: {:<15} s = {:>6.2} l = {:>5.2} v = {:>5.2}",
                    r.frame.t,
                    format!("{:?}", r.decision.unwrap_or(Decision::Cruise)),
                    e.s,
                    e.l,
                    e.v_long
                );
                last = r.decision;
            }
        }
        let e = out.truth.last().expect("frames").frame.ego().clone();
        println!("  end: lane {}, s = {:.2}, v = {:.2}, collision {}\n", e.lane_id, e.s, e.v_long, out.collision.is_some());
    }
}
