//! Simulate a scenario, write its traces, read them back and recompute the
//! verdicts offline. The replayed verdict trace is identical to the one the
//! simulation wrote.
//!
//! Run with `cargo run --example trace_replay`.

use rss_core::harness::{library_scenario, run_scenario};
use rss_core::io::{load_trace, record_line, replay, write_run};

fn main() {
    let scn = library_scenario("lead_missed_inside_dmin").expect("shipped").validate().expect("valid");
    let out = run_scenario(&scn, 0).expect("runs");
    let dir = tempfile::tempdir().expect("temporary directory");
    let (files, report) = write_run(dir.path(), &scn, &out).expect("traces written");
    print!("{}", report.summary());
    for f in &files {
        let size = std::fs::metadata(f).map(|m| m.len()).unwrap_or(0);
        println!("  {} ({size} bytes)", f.file_name().unwrap_or_default().to_string_lossy());
    }

    let load = |name: &str| load_trace(&dir.path().join(name)).expect("trace loads");
    let perceived = [load("channel_a.jsonl"), load("channel_b.jsonl"), load("fused.jsonl")];
    let records = replay(&load("truth.jsonl"), &perceived, None).expect("replay succeeds");
    let replayed: String = records.iter().map(|r| record_line(r) + "\n").collect();
    let original = std::fs::read_to_string(dir.path().join("verdicts.jsonl")).expect("verdicts written");
    println!("replayed {} records, identical to the simulated verdicts: {}", records.len(), replayed == original);
}
