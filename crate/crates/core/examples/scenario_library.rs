//! Run every shipped scenario once and print what happened.

use rss_core::harness::{library_scenario, run_scenario, Stream, LIBRARY};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (name, _) in LIBRARY {
        let scn = library_scenario(name).expect("shipped").validate()?;
        let out = run_scenario(&scn, 0)?;
        let s = &out.stats;
        let counts = |st| s.verdicts.get(&st).copied().unwrap_or_default();
        let (a, b, f) = (counts(Stream::ChannelA), counts(Stream::ChannelB), counts(Stream::Fused));
        println!("{name}");
        println!(
            "  frames {}  dangerous {}  responses {}  noncompliant {}  collision {:?}",
            s.frames, s.dangerous_frames, s.proper_responses_triggered, s.noncompliant_frames, out.collision
        );
        println!(
            "  safety/comfort verdicts  a {}/{}  b {}/{}  fused {}/{}  system failures {}",
            a.safety_relevant, a.comfort_relevant, b.safety_relevant, b.comfort_relevant, f.safety_relevant,
            f.comfort_relevant, s.system_failures
        );
        println!("  decisions {:?}", s.decisions);
        let ego = out.truth.last().map(|r| r.frame.ego().clone()).expect("at least one frame");
        println!("  final ego s {:.1} l {:.2} v {:.2}", ego.s, ego.l, ego.v_long);
    }
    Ok(())
}
