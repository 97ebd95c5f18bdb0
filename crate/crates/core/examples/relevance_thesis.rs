//! Most sensing mistakes do not matter for safety. The classifier compares
//! what a channel perceived with the truth and only flags a miss when it
//! hides an obligation the truth imposes.
//!
//! Run with `cargo run --example relevance_thesis`.

use rss_core::relevance::{classify_frame, PerceivedFrame, RelevanceConfig};
use rss_core::{ActorId, ActorKind, ActorState, LaneId, RssParameters, WorldFrame};

fn actor(id: u32, kind: ActorKind, s: f64, l: f64, v: f64) -> ActorState {
    ActorState { actor_id: ActorId(id), kind, s, l, v_long: v, v_lat: 0.0, length: 4.5, width: 1.8, lane_id: LaneId(0) }
}

fn frame(actors: Vec<ActorState>) -> WorldFrame {
    WorldFrame { t: 0.0, ego_id: ActorId(0), actors, occlusions: vec![], lanes: vec![LaneId(0)], crossings: vec![] }
}

fn main() {
    let p = RssParameters::default().validate().expect("defaults are valid");
    let cfg = RelevanceConfig::default();
    let ego = actor(0, ActorKind::Vehicle, 0.0, 0.0, 20.0);
    let cases = [
        ("static object 50 m off the road, missed", actor(1, ActorKind::StaticObject, 60.0, 50.0, 0.0), false, false),
        ("lead car 90 m ahead, missed", actor(1, ActorKind::Vehicle, 94.5, 0.0, 20.0), false, false),
        ("lead car 20 m ahead, missed", actor(1, ActorKind::Vehicle, 24.5, 0.0, 20.0), false, false),
        ("phantom car 40 m ahead that is not there", actor(9, ActorKind::Vehicle, 44.5, 0.0, 20.0), true, true),
        ("lead car 20 m ahead, seen 3 m too far", actor(1, ActorKind::Vehicle, 24.5, 0.0, 20.0), true, false),
    ];
    for (what, other, perceived_has_it, ghost) in cases {
        let truth = if ghost { frame(vec![ego.clone()]) } else { frame(vec![ego.clone(), other.clone()]) };
        let mut seen = other.clone();
        if !ghost && perceived_has_it {
            seen.s += 3.0;
        }
        let perceived = if perceived_has_it { frame(vec![ego.clone(), seen]) } else { frame(vec![ego.clone()]) };
        let verdicts = classify_frame(&[truth], &[PerceivedFrame { frame: perceived, blind: false }], &p, &cfg)
            .expect("aligned frames");
        println!("{what}");
        for v in &verdicts {
            println!("  {:?} -> {}: {}", v.discrepancy, v.label, v.reason);
        }
        if verdicts.is_empty() {
            println!("  no discrepancy recorded");
        }
    }
}
