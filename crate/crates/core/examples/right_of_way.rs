//! The ego holds right of way at a crossing but yields to an agent that can
//! no longer stop at its stop line, then the same situation in closed loop.
//!
//! Run with `cargo run --example right_of_way`.

use rss_core::harness::{library_scenario, run_scenario, Decision};
use rss_core::kernel::{right_of_way_decision, RightOfWayQuery};
use rss_core::{ActorId, RssParameters};

fn main() {
    let p = RssParameters::default().validate().expect("defaults are valid");
    println!("crossing agent at 15 m/s; yield once it needs more than {} m/s^2 to stop", p.brake_max_long);
    for dist in [40.0, 20.0, 15.0, 14.0, 10.0, 0.0] {
        let q = RightOfWayQuery { ego_dist_to_conflict: 30.0, ego_v: 15.0, other_dist_to_stopline: dist, other_v: 15.0 };
        let needed = if dist > 0.0 { 15.0 * 15.0 / (2.0 * dist) } else { f64::INFINITY };
        println!("  {dist:>5.1} m from its stop line, needs {needed:>6.2} m/s^2 -> {:?}", right_of_way_decision(&q, &p));
    }

    let scn = library_scenario("red_light_runner").expect("shipped").validate().expect("valid");
    let crossing = scn.spec().crossings[0].clone();
    let out = run_scenario(&scn, 0).expect("runs");
    println!("\nred-light runner, crossing from s = {} to {}", crossing.s_near, crossing.s_far);
    let mut last = None;
    for r in &out.truth {
        if r.decision != last {
            let runner = r.frame.actor(ActorId(1)).expect("runner present");
            println!(
                "  t = {:>4.1}: {:<18} ego s = {:>6.2} v = {:>5.2}, runner l = {:>6.2}",
                r.frame.t,
                format!("{:?}", r.decision.unwrap_or(Decision::Cruise)),
                r.frame.ego().s,
                r.frame.ego().v_long,
                runner.l
            );
            last = r.decision;
        }
    }
    println!("collision: {}", out.collision.map_or("none".into(), |c| format!("at t = {:.1}", c.t)));
}
