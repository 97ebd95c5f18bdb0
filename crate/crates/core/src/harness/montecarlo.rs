//! Monte Carlo batches over independent runs, and a direct check that the
//! two channels' miss processes are statistically independent.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::run::{run_scenario, CollisionEvent, RunStatistics};
use super::scenario::ValidScenario;
use super::HarnessError;
use crate::perception::{channel_rng, ChannelId, FaultModel, SensingChannel};
use crate::reliability::{empirical_mtbf, EmpiricalMtbf};
use crate::world::{ActorId, ActorKind, ActorState, LaneId, WorldFrame};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub scenario: String,
    pub master_seed: u64,
    pub runs: u64,
    pub dt_s: f64,
    pub exposure_hours: f64,
    pub stats: RunStatistics,
    pub mtbf_channel_a: EmpiricalMtbf,
    pub mtbf_channel_b: EmpiricalMtbf,
    pub mtbf_system: EmpiricalMtbf,
    /// (run index, collision) for every run that ended in one.
    pub collisions: Vec<(u64, CollisionEvent)>,
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, HarnessError> {
    rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(|e| HarnessError::Pool(e.to_string()))
}

/// Run `runs` instances (run indices `0..runs`) on `workers` threads
/// (0 = all cores). The report does not depend on the worker count.
pub fn run_batch(scn: &ValidScenario, runs: u64, workers: usize) -> Result<MonteCarloReport, HarnessError> {
    let results: Vec<(u64, RunStatistics, Option<CollisionEvent>)> = pool(workers)?.install(|| {
        (0..runs)
            .into_par_iter()
            .map(|i| run_scenario(scn, i).map(|out| (i, out.stats, out.collision)))
            .collect::<Result<_, _>>()
    })?;
    let mut stats = RunStatistics::default();
    let mut collisions = Vec::new();
    for (i, s, c) in &results {
        stats.merge(s);
        if let Some(c) = c {
            collisions.push((*i, *c));
        }
    }
    let dt = scn.spec().dt_s;
    let hours = stats.exposure_hours(dt);
    let mtbf = |failures: u64| empirical_mtbf(failures, hours).expect("exposure is positive");
    Ok(MonteCarloReport {
        scenario: scn.spec().name.clone(),
        master_seed: scn.spec().master_seed,
        runs,
        dt_s: dt,
        exposure_hours: hours,
        mtbf_channel_a: mtbf(stats.safety_frames_a),
        mtbf_channel_b: mtbf(stats.safety_frames_b),
        mtbf_system: mtbf(stats.system_failures),
        stats,
        collisions,
    })
}

/// Joint miss statistics of two channels observing the same actor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndependenceReport {
    pub frames: u64,
    pub p_a: f64,
    pub p_b: f64,
    pub misses_a: u64,
    pub misses_b: u64,
    pub joint_misses: u64,
    pub expected_joint: f64,
    /// Binomial standard deviation of the joint count under independence.
    pub sigma: f64,
    pub z: f64,
    /// Pearson correlation of the two miss indicators.
    pub correlation: f64,
}

const CHUNK_FRAMES: u64 = 1 << 18;

fn two_car_frame() -> WorldFrame {
    let car = |id: u32, s: f64| ActorState {
        actor_id: ActorId(id),
        kind: ActorKind::Vehicle,
        s,
        l: 0.0,
        v_long: 20.0,
        v_lat: 0.0,
        length: 4.5,
        width: 1.8,
        lane_id: LaneId(0),
    };
    WorldFrame {
        t: 0.0,
        ego_id: ActorId(0),
        actors: vec![car(0, 0.0), car(1, 40.0)],
        occlusions: Vec::new(),
        lanes: vec![LaneId(0)],
        crossings: Vec::new(),
    }
}

/// Feed one lead vehicle to two sensing channels whose only fault is a
/// per-actor miss rate, and compare the joint miss count with the
/// expectation under independence. Chunk `c` uses run index `c`.
pub fn independence_experiment(master_seed: u64, frames: u64, p_a: f64, p_b: f64) -> IndependenceReport {
    let chunks = frames.div_ceil(CHUNK_FRAMES);
    let (ma, mb, mj) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let n = CHUNK_FRAMES.min(frames - c * CHUNK_FRAMES);
            let faults = |p| FaultModel { p_false_negative: p, ..FaultModel::default() };
            let mut ca = SensingChannel::new(ChannelId::CameraOnly, faults(p_a), channel_rng(master_seed, c, ChannelId::CameraOnly));
            let mut cb = SensingChannel::new(ChannelId::RadarLidar, faults(p_b), channel_rng(master_seed, c, ChannelId::RadarLidar));
            let mut frame = two_car_frame();
            let (mut a, mut b, mut j) = (0u64, 0u64, 0u64);
            for k in 0..n {
                frame.t = k as f64 * 0.1;
                let xa = ca.observe(&frame).perceived.len() < 2;
                let xb = cb.observe(&frame).perceived.len() < 2;
                a += xa as u64;
                b += xb as u64;
                j += (xa && xb) as u64;
            }
            (a, b, j)
        })
        .reduce(|| (0, 0, 0), |x, y| (x.0 + y.0, x.1 + y.1, x.2 + y.2));
    let n = frames as f64;
    let q = p_a * p_b;
    let expected = n * q;
    let sigma = (n * q * (1.0 - q)).sqrt();
    let (fa, fb, fj) = (ma as f64 / n, mb as f64 / n, mj as f64 / n);
    let denom = (fa * (1.0 - fa) * fb * (1.0 - fb)).sqrt();
    IndependenceReport {
        frames,
        p_a,
        p_b,
        misses_a: ma,
        misses_b: mb,
        joint_misses: mj,
        expected_joint: expected,
        sigma,
        z: if sigma > 0.0 { (mj as f64 - expected) / sigma } else { 0.0 },
        correlation: if denom > 0.0 { (fj - fa * fb) / denom } else { 0.0 },
    }
}
