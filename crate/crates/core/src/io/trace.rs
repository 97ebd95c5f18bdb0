//! Line-delimited JSON traces. Every file starts with a header record; each
//! following line is one frame of one stream and carries `stream` and `t`.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::IoError;
use crate::harness::{Decision, EgoAccel, Stream, StreamVerdicts, TruthRecord};
use crate::perception::{ChannelObservation, FusedPerception, FusionConfig};
use crate::relevance::{PerceivedFrame, RelevanceConfig, RelevanceVerdict};
use crate::world::{ResponseEnvelope, RssParameters, WorldFrame};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub format_version: u32,
    pub stream: Stream,
    pub scenario: String,
    pub master_seed: u64,
    pub run_index: u64,
    pub dt_s: f64,
    pub params: RssParameters,
    pub relevance: RelevanceConfig,
    pub fusion: FusionConfig,
    pub coincidence_window_frames: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthLine {
    pub stream: Stream,
    pub t: f64,
    pub frame: WorldFrame,
    #[serde(default)]
    pub ego_accel: EgoAccel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decision: Option<Decision>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationLine {
    pub stream: Stream,
    pub t: f64,
    pub observation: ChannelObservation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusedLine {
    pub stream: Stream,
    pub t: f64,
    pub fused: FusedPerception,
}

/// Compliance and relevance of one perception stream (`source`) at one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictLine {
    pub stream: Stream,
    pub t: f64,
    pub source: Stream,
    pub compliant: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violation: Option<String>,
    pub envelope: ResponseEnvelope,
    pub verdicts: Vec<RelevanceVerdict>,
}

/// Relevance verdicts alone, one per discrepancy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelevanceLine {
    pub stream: Stream,
    pub t: f64,
    pub source: Stream,
    pub verdict: RelevanceVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum TraceRecord {
    Header(TraceHeader),
    Frame(TruthLine),
    Observation(ObservationLine),
    Fused(FusedLine),
    Verdicts(VerdictLine),
    Relevance(RelevanceLine),
}

impl TraceRecord {
    pub fn t(&self) -> Option<f64> {
        match self {
            TraceRecord::Header(_) => None,
            TraceRecord::Frame(r) => Some(r.t),
            TraceRecord::Observation(r) => Some(r.t),
            TraceRecord::Fused(r) => Some(r.t),
            TraceRecord::Verdicts(r) => Some(r.t),
            TraceRecord::Relevance(r) => Some(r.t),
        }
    }
}

impl From<&TruthRecord> for TruthLine {
    fn from(r: &TruthRecord) -> Self {
        Self { stream: Stream::Truth, t: r.frame.t, frame: r.frame.clone(), ego_accel: r.ego_accel, decision: r.decision }
    }
}

impl From<TruthLine> for TruthRecord {
    fn from(l: TruthLine) -> Self {
        Self { frame: l.frame, ego_accel: l.ego_accel, decision: l.decision }
    }
}

impl From<&StreamVerdicts> for VerdictLine {
    fn from(v: &StreamVerdicts) -> Self {
        Self {
            stream: Stream::Verdicts,
            t: v.t,
            source: v.stream,
            compliant: v.compliant,
            violation: v.violation.clone(),
            envelope: v.envelope,
            verdicts: v.verdicts.clone(),
        }
    }
}

pub fn write_record(w: &mut impl Write, rec: &TraceRecord) -> Result<(), IoError> {
    serde_json::to_writer(&mut *w, rec).map_err(|e| IoError::Io(e.to_string()))?;
    w.write_all(b"\n").map_err(|e| IoError::Io(e.to_string()))
}

pub fn record_line(rec: &TraceRecord) -> String {
    serde_json::to_string(rec).expect("trace records serialize")
}

/// A whole trace file: its header and the records that follow.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub header: TraceHeader,
    pub records: Vec<TraceRecord>,
}

/// Parse a trace, checking the header, the format version, that every
/// record belongs to the header's stream, and that `t` strictly increases
/// (verdict streams repeat `t` once per source).
pub fn read_trace(r: impl BufRead) -> Result<Trace, IoError> {
    let mut header: Option<TraceHeader> = None;
    let mut records = Vec::new();
    let mut last_t = f64::NEG_INFINITY;
    for (n, line) in r.lines().enumerate() {
        let line = line.map_err(|e| IoError::Io(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: TraceRecord =
            serde_json::from_str(&line).map_err(|e| IoError::Invalid(format!("line {}: {e}", n + 1)))?;
        match (&header, rec) {
            (None, TraceRecord::Header(h)) => {
                if h.format_version != FORMAT_VERSION {
                    return Err(IoError::Invalid(format!(
                        "format_version {} is not supported (expected {FORMAT_VERSION})",
                        h.format_version
                    )));
                }
                header = Some(h);
            }
            (None, _) => return Err(IoError::Invalid("trace does not begin with a header record".into())),
            (Some(_), TraceRecord::Header(_)) => {
                return Err(IoError::Invalid(format!("line {}: second header record", n + 1)))
            }
            (Some(h), rec) => {
                let t = rec.t().expect("non-header records carry t");
                let stream = record_stream(&rec);
                if stream != h.stream {
                    return Err(IoError::Invalid(format!(
                        "line {}: {} record in a {} trace",
                        n + 1,
                        stream.as_str(),
                        h.stream.as_str()
                    )));
                }
                let repeats = matches!(rec, TraceRecord::Verdicts(_) | TraceRecord::Relevance(_));
                if t < last_t || (t == last_t && !repeats) {
                    return Err(IoError::Invalid(format!("line {}: t = {t} does not increase", n + 1)));
                }
                last_t = t;
                records.push(rec);
            }
        }
    }
    let header = header.ok_or_else(|| IoError::Invalid("trace is empty".into()))?;
    if records.is_empty() {
        return Err(IoError::Invalid("trace has a header but no frames".into()));
    }
    Ok(Trace { header, records })
}

fn record_stream(rec: &TraceRecord) -> Stream {
    match rec {
        TraceRecord::Header(h) => h.stream,
        TraceRecord::Frame(r) => r.stream,
        TraceRecord::Observation(r) => r.stream,
        TraceRecord::Fused(r) => r.stream,
        TraceRecord::Verdicts(r) => r.stream,
        TraceRecord::Relevance(r) => r.stream,
    }
}

impl Trace {
    pub fn truth(&self) -> Result<Vec<TruthRecord>, IoError> {
        self.records
            .iter()
            .map(|r| match r {
                TraceRecord::Frame(l) => Ok(TruthRecord::from(l.clone())),
                _ => Err(IoError::Invalid(format!("{} trace holds no ground-truth frames", self.header.stream.as_str()))),
            })
            .collect()
    }

    pub fn perceived(&self) -> Result<Vec<PerceivedFrame>, IoError> {
        self.records
            .iter()
            .map(|r| match r {
                TraceRecord::Observation(l) => Ok(PerceivedFrame::from(&l.observation)),
                TraceRecord::Fused(l) => Ok(PerceivedFrame::from(&l.fused)),
                _ => Err(IoError::Invalid(format!("{} trace holds no perception frames", self.header.stream.as_str()))),
            })
            .collect()
    }
}
