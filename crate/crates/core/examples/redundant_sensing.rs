//! Two independently faulty sensing channels observe the same scene and are
//! fused by keeping everything either channel saw. The fused view loses an
//! object only when both channels miss it at once.
//!
//! Run with `cargo run --example redundant_sensing`.

use rss_core::perception::{channel_rng, fuse, ChannelId, FaultModel, FusionConfig, SensingChannel};
use rss_core::{ActorId, ActorKind, ActorState, LaneId, WorldFrame};

fn car(id: u32, s: f64) -> ActorState {
    ActorState {
        actor_id: ActorId(id),
        kind: ActorKind::Vehicle,
        s,
        l: 0.0,
        v_long: 20.0,
        v_lat: 0.0,
        length: 4.5,
        width: 1.8,
        lane_id: LaneId(0),
    }
}

fn main() {
    let faults = FaultModel { p_false_negative: 0.1, pos_noise_sigma: 0.2, ..FaultModel::default() };
    let mut a = SensingChannel::new(ChannelId::CameraOnly, faults.clone(), channel_rng(7, 0, ChannelId::CameraOnly));
    let mut b = SensingChannel::new(ChannelId::RadarLidar, faults, channel_rng(7, 0, ChannelId::RadarLidar));
    let cfg = FusionConfig::default();
    let frames = 100_000;
    let (mut miss_a, mut miss_b, mut miss_fused) = (0u64, 0u64, 0u64);
    for i in 0..frames {
        let t = i as f64 * 0.1;
        let frame = WorldFrame {
            t,
            ego_id: ActorId(0),
            actors: vec![car(0, 20.0 * t), car(1, 20.0 * t + 40.0)],
            occlusions: vec![],
            lanes: vec![LaneId(0)],
            crossings: vec![],
        };
        let oa = a.observe(&frame);
        let ob = b.observe(&frame);
        let fused = fuse(&oa, &ob, &cfg).expect("same timestamp");
        let sees = |actors: &[ActorState]| actors.iter().any(|x| x.actor_id == ActorId(1));
        miss_a += u64::from(!sees(&oa.perceived));
        miss_b += u64::from(!sees(&ob.perceived));
        miss_fused += u64::from(!sees(&fused.frame.actors));
        if i < 5 {
            let lead = fused.frame.actor(ActorId(1));
            println!(
                "t = {t:.1}: A sees lead {}, B sees lead {}, fused lead at s = {}",
                sees(&oa.perceived),
                sees(&ob.perceived),
                lead.map_or("missing".into(), |l| format!("{:.2}", l.s))
            );
        }
    }
    let n = frames as f64;
    let (pa, pb) = (miss_a as f64 / n, miss_b as f64 / n);
    println!("\nover {frames} frames");
    println!("  channel A miss rate  {pa:.4}");
    println!("  channel B miss rate  {pb:.4}");
    println!("  fused miss rate      {:.5} (product of the two: {:.5})", miss_fused as f64 / n, pa * pb);
}
