//! Run and batch reports, and writing a run's five traces to a directory.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::trace::{
    write_record, FusedLine, ObservationLine, TraceHeader, TraceRecord, TruthLine, VerdictLine, FORMAT_VERSION,
};
use super::IoError;
use crate::harness::{CollisionEvent, MonteCarloReport, RunOutput, RunStatistics, Stream, ValidScenario};
use crate::relevance::EpisodeReport;
use crate::reliability::{empirical_mtbf, fmt_num, EmpiricalMtbf};

pub const TRACE_FILES: [(Stream, &str); 5] = [
    (Stream::Truth, "truth.jsonl"),
    (Stream::ChannelA, "channel_a.jsonl"),
    (Stream::ChannelB, "channel_b.jsonl"),
    (Stream::Fused, "fused.jsonl"),
    (Stream::Verdicts, "verdicts.jsonl"),
];
pub const REPORT_FILE: &str = "report.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub format_version: u32,
    pub scenario: String,
    pub master_seed: u64,
    pub run_index: u64,
    pub dt_s: f64,
    pub assumption_violation: bool,
    pub exposure_hours: f64,
    pub stats: RunStatistics,
    pub episode: EpisodeReport,
    pub collision: Option<CollisionEvent>,
    pub mtbf_system: EmpiricalMtbf,
}

impl RunReport {
    pub fn new(scn: &ValidScenario, out: &RunOutput) -> Self {
        let dt = scn.spec().dt_s;
        let hours = out.stats.exposure_hours(dt);
        Self {
            format_version: FORMAT_VERSION,
            scenario: out.scenario.clone(),
            master_seed: out.master_seed,
            run_index: out.run_index,
            dt_s: dt,
            assumption_violation: scn.spec().assumption_violation,
            exposure_hours: hours,
            stats: out.stats.clone(),
            episode: out.episode.clone(),
            collision: out.collision,
            mtbf_system: empirical_mtbf(out.stats.system_failures, hours).expect("a run has at least one frame"),
        }
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scenario {} (seed {}, run {})", self.scenario, self.master_seed, self.run_index);
        stats_summary(&mut s, &self.stats, self.dt_s);
        match &self.collision {
            Some(c) => {
                let _ = writeln!(
                    s,
                    "collision      t = {:.2} s with actor {} (ego compliant: {}, sensing failure recorded: {})",
                    c.t, c.actor_id, c.ego_compliant, c.explained
                );
            }
            None => {
                let _ = writeln!(s, "collision      none");
            }
        }
        s
    }
}

fn stats_summary(s: &mut String, st: &RunStatistics, dt: f64) {
    let _ = writeln!(s, "frames         {} ({:.6} h)", st.frames, st.exposure_hours(dt));
    let _ = writeln!(s, "dangerous      {} frames, {} proper responses triggered", st.dangerous_frames, st.proper_responses_triggered);
    for (stream, c) in &st.verdicts {
        let _ = writeln!(
            s,
            "verdicts {:<9} safety {} / comfort {} / irrelevant {}",
            stream.as_str(),
            c.safety_relevant,
            c.comfort_relevant,
            c.irrelevant
        );
    }
    let _ = writeln!(
        s,
        "failures       system {} (coincident frames {}, fused blind frames {})",
        st.system_failures, st.coincident_frames, st.blind_frames_fused
    );
    let _ = writeln!(
        s,
        "collisions     {} (out of model {}, unexplained {})",
        st.collisions, st.collisions_out_of_model, st.unexplained_collisions
    );
    let _ = writeln!(s, "noncompliant   {} frames vs fused envelope, {} vs truth", st.noncompliant_frames, st.truth_noncompliant_frames);
}

pub fn batch_summary(r: &MonteCarloReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "scenario {} (seed {}, {} runs)", r.scenario, r.master_seed, r.runs);
    stats_summary(&mut s, &r.stats, r.dt_s);
    for (name, m) in [("channel A", &r.mtbf_channel_a), ("channel B", &r.mtbf_channel_b), ("system", &r.mtbf_system)] {
        let _ = writeln!(
            s,
            "mtbf {:<9} {} failures in {:.4} h: point {}, 95% interval [{}, {}]",
            name,
            m.failures,
            m.exposure_hours,
            m.point_hours.map_or("unbounded".to_string(), |h| format!("{} h", fmt_num(h))),
            format_args!("{} h", fmt_num(m.lower_hours)),
            m.upper
        );
    }
    s
}

pub fn header(scn: &ValidScenario, run_index: u64, stream: Stream) -> TraceHeader {
    let spec = scn.spec();
    TraceHeader {
        format_version: FORMAT_VERSION,
        stream,
        scenario: spec.name.clone(),
        master_seed: spec.master_seed,
        run_index,
        dt_s: spec.dt_s,
        params: *scn.params().get(),
        relevance: spec.relevance,
        fusion: spec.fusion,
        coincidence_window_frames: scn.coincidence_window(),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, IoError> {
    File::create(path).map(BufWriter::new).map_err(|e| IoError::Io(format!("{}: {e}", path.display())))
}

/// Records of one stream of a run, header first.
pub fn stream_records(scn: &ValidScenario, out: &RunOutput, stream: Stream) -> Vec<TraceRecord> {
    let mut recs = vec![TraceRecord::Header(header(scn, out.run_index, stream))];
    match stream {
        Stream::Truth => recs.extend(out.truth.iter().map(|r| TraceRecord::Frame(TruthLine::from(r)))),
        Stream::ChannelA | Stream::ChannelB => {
            let obs = if stream == Stream::ChannelA { &out.channel_a } else { &out.channel_b };
            recs.extend(obs.iter().map(|o| TraceRecord::Observation(ObservationLine { stream, t: o.t, observation: o.clone() })));
        }
        Stream::Fused => {
            recs.extend(out.fused.iter().map(|f| TraceRecord::Fused(FusedLine { stream, t: f.frame.t, fused: f.clone() })))
        }
        Stream::Verdicts => recs.extend(out.verdicts.iter().map(|v| TraceRecord::Verdicts(VerdictLine::from(v)))),
    }
    recs
}

/// Write the five traces and the report into `dir`, creating it if needed.
pub fn write_run(dir: &Path, scn: &ValidScenario, out: &RunOutput) -> Result<(Vec<PathBuf>, RunReport), IoError> {
    std::fs::create_dir_all(dir).map_err(|e| IoError::Io(format!("{}: {e}", dir.display())))?;
    let mut written = Vec::new();
    for (stream, file) in TRACE_FILES {
        let path = dir.join(file);
        let mut w = create(&path)?;
        for rec in stream_records(scn, out, stream) {
            write_record(&mut w, &rec)?;
        }
        w.flush().map_err(|e| IoError::Io(format!("{}: {e}", path.display())))?;
        written.push(path);
    }
    let report = RunReport::new(scn, out);
    let path = dir.join(REPORT_FILE);
    write_json(&path, &report)?;
    written.push(path);
    Ok((written, report))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| IoError::Invalid(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| IoError::Io(format!("{}: {e}", path.display())))
}
