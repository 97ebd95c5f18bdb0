//! Speed limits in front of an occlusion that may hide a pedestrian, and a
//! sweep of emergence times showing the ego is never caught out.
//!
//! Run with `cargo run --example occlusion_caution`.

use rss_core::harness::{library_scenario, run_scenario};
use rss_core::io::prepare_scenario;
use rss_core::kernel::occlusion_speed_limit;
use rss_core::world::{HiddenAgent, OcclusionRegion};
use rss_core::RssParameters;

fn main() {
    let p = RssParameters::default().validate().expect("defaults are valid");
    println!("speed limit by distance to the occlusion edge");
    for s_near in [2.0, 5.0, 10.0, 20.0, 40.0, 80.0] {
        let region = OcclusionRegion { s_near, lateral_offset: 2.5, hides: HiddenAgent::Pedestrian };
        let v = occlusion_speed_limit(&region, &p);
        println!("  {s_near:>5.1} m -> {v:>6.2} m/s ({:>5.1} km/h)", v * 3.6);
    }

    println!("\npedestrian stepping out from behind a parked van");
    let mut worst_gap = f64::INFINITY;
    for k in 0..=16 {
        let t = k as f64 * 0.5;
        let scn = prepare_scenario(
            library_scenario("occlusion").expect("shipped"),
            &[format!("actors.0.behavior.t={t}")],
        )
        .expect("valid override");
        let out = run_scenario(&scn, 0).expect("runs");
        let closest = out
            .truth
            .iter()
            .filter_map(|r| {
                let ped = r.frame.others().next()?;
                let ego = r.frame.ego();
                let in_path = ped.left_edge() < ego.right_edge() && ped.right_edge() > ego.left_edge();
                in_path.then(|| ped.rear() - ego.s)
            })
            .fold(f64::INFINITY, f64::min);
        worst_gap = worst_gap.min(closest);
        println!(
            "  emerges at t = {t:>3.1} s: {}, closest in-path gap {}",
            if out.collision.is_some() { "COLLISION" } else { "no collision" },
            if closest.is_finite() { format!("{closest:.2} m") } else { "never in path".into() }
        );
    }
    println!("smallest in-path gap over the sweep: {worst_gap:.2} m");
}
