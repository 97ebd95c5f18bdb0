//! A Monte Carlo batch of the mixed-fault scenario. Every collision with a
//! compliant ego must be preceded by a system-level sensing failure.
//!
//! Run with `cargo run --release --example monte_carlo [runs]`.

use rss_core::harness::{library_scenario, run_batch};
use rss_core::io::batch_summary;

fn main() {
    let runs: u64 = std::env::args().nth(1).map_or(200, |a| a.parse().expect("runs must be a number"));
    let scn = library_scenario("mixed_faults").expect("shipped").validate().expect("valid");
    let started = std::time::Instant::now();
    let report = run_batch(&scn, runs, 0).expect("batch runs");
    print!("{}", batch_summary(&report));
    println!("took {:.2?}", started.elapsed());
    for (run, c) in report.collisions.iter().take(10) {
        println!(
            "  run {run:>4}: collision at t = {:>5.1} s with actor {}, ego compliant {}, sensing failure recorded {}",
            c.t, c.actor_id, c.ego_compliant, c.explained
        );
    }
    assert_eq!(report.stats.unexplained_collisions, 0, "soundness: no unexplained collisions");
}
