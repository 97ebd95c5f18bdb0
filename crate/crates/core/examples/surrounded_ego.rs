//! Neighbours on both sides cut into the ego at once, faster than the
//! behavioural model allows. The ego stays inside its envelope and is still
//! hit; the run is flagged as outside the model rather than as a monitor
//! failure.
//!
//! Run with `cargo run --example surrounded_ego`.

use rss_core::harness::{library_scenario, run_scenario};
use rss_core::ActorId;

fn main() {
    let scn = library_scenario("surrounded_ego").expect("shipped").validate().expect("valid");
    println!("{}: {}", scn.spec().name, scn.spec().description);
    let out = run_scenario(&scn, 0).expect("runs");
    for r in out.truth.iter().step_by(2) {
        let e = r.frame.ego();
        let gap = |id| {
            let o = r.frame.actor(ActorId(id)).expect("neighbour present");
            (o.l - e.l).abs() - 0.5 * (o.width + e.width)
        };
        println!(
            "  t = {:>3.1}: ego v = {:>5.2}, accel {:>6.2}, side gaps left {:>5.2} m / right {:>5.2} m",
            r.frame.t,
            e.v_long,
            r.ego_accel.long,
            gap(1),
            gap(2)
        );
    }
    match out.collision {
        Some(c) => println!(
            "collision at t = {:.1} with actor {}; ego compliant throughout: {}; counted out of model: {}",
            c.t,
            c.actor_id,
            c.ego_compliant,
            out.stats.collisions_out_of_model == 1
        ),
        None => println!("no collision"),
    }
}
