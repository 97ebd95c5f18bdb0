//! Scenario loading, trace and report formats, offline replay, and the
//! command-line surface.

pub mod cli;
mod overrides;
mod report;
mod trace;

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use thiserror::Error;

use crate::harness::{evaluate_streams, Evaluation, parse_scenario, HarnessError, ScenarioSpec, Stream, ValidScenario};
use crate::world::RssParameters;

pub use overrides::apply_overrides;
pub use report::{batch_summary, header, stream_records, write_json, write_run, RunReport, REPORT_FILE, TRACE_FILES};
pub use trace::{
    read_trace, record_line, write_record, FusedLine, ObservationLine, RelevanceLine, Trace, TraceHeader,
    TraceRecord, TruthLine, VerdictLine, FORMAT_VERSION,
};

#[derive(Debug, Error)]
pub enum IoError {
    /// Input that cannot be accepted: bad scenario, bad trace, bad flag.
    #[error("{0}")]
    Invalid(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl IoError {
    /// Process exit code: 2 for validation errors, 3 for i/o errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            IoError::Invalid(_) => 2,
            IoError::Io(_) => 3,
        }
    }
}

impl From<HarnessError> for IoError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Pool(msg) => IoError::Io(msg),
            other => IoError::Invalid(other.to_string()),
        }
    }
}

pub fn read_text(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|e| IoError::Io(format!("{}: {e}", path.display())))
}

/// Read and validate a scenario file, applying `key=value` overrides first.
pub fn load_scenario(path: &Path, overrides: &[String]) -> Result<ValidScenario, IoError> {
    let spec = parse_scenario(&read_text(path)?)?;
    prepare_scenario(spec, overrides)
}

pub fn prepare_scenario(spec: ScenarioSpec, overrides: &[String]) -> Result<ValidScenario, IoError> {
    Ok(apply_overrides(&spec, overrides)?.validate()?)
}

pub fn load_trace(path: &Path) -> Result<Trace, IoError> {
    let f = File::open(path).map_err(|e| IoError::Io(format!("{}: {e}", path.display())))?;
    read_trace(BufReader::new(f)).map_err(|e| match e {
        IoError::Invalid(msg) => IoError::Invalid(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Recompute per-frame compliance and relevance of each perceived trace
/// against the truth trace. With the perception traces of a simulated run
/// in the order A, B, fused, the output equals that run's verdict trace.
pub fn replay(truth: &Trace, perceived: &[Trace], params: Option<RssParameters>) -> Result<Vec<TraceRecord>, IoError> {
    let (hdr, eval) = evaluate(truth, perceived, params)?;
    let mut out = vec![TraceRecord::Header(hdr)];
    let n = eval.streams.first().map_or(0, Vec::len);
    for i in 0..n {
        for s in &eval.streams {
            out.push(TraceRecord::Verdicts(VerdictLine::from(&s[i])));
        }
    }
    Ok(out)
}

/// Relevance verdicts only, one record per discrepancy.
pub fn classify(truth: &Trace, perceived: &[Trace], params: Option<RssParameters>) -> Result<Vec<TraceRecord>, IoError> {
    let (hdr, eval) = evaluate(truth, perceived, params)?;
    let mut out = vec![TraceRecord::Header(hdr)];
    let n = eval.streams.first().map_or(0, Vec::len);
    for i in 0..n {
        for s in &eval.streams {
            let sv = &s[i];
            out.extend(sv.verdicts.iter().map(|v| {
                TraceRecord::Relevance(RelevanceLine { stream: Stream::Verdicts, t: sv.t, source: sv.stream, verdict: v.clone() })
            }));
        }
    }
    Ok(out)
}

fn evaluate(
    truth: &Trace,
    perceived: &[Trace],
    params: Option<RssParameters>,
) -> Result<(TraceHeader, Evaluation), IoError> {
    if truth.header.stream != Stream::Truth {
        return Err(IoError::Invalid(format!("expected a truth trace, got {}", truth.header.stream.as_str())));
    }
    if perceived.is_empty() {
        return Err(IoError::Invalid("at least one perception trace is required".into()));
    }
    let rss = params.unwrap_or(truth.header.params);
    let p = rss.validate().map_err(|e| IoError::Invalid(format!("params: {e}")))?;
    let truth_records = truth.truth()?;
    let mut frames = Vec::with_capacity(perceived.len());
    let mut streams = Vec::with_capacity(perceived.len());
    for tr in perceived {
        if !matches!(tr.header.stream, Stream::ChannelA | Stream::ChannelB | Stream::Fused) {
            return Err(IoError::Invalid(format!("{} is not a perception stream", tr.header.stream.as_str())));
        }
        frames.push(tr.perceived()?);
        streams.push(tr.header.stream);
    }
    let inputs: Vec<_> = streams.iter().zip(&frames).map(|(s, f)| (*s, f.as_slice())).collect();
    let eval = evaluate_streams(&truth_records, &inputs, &p, &truth.header.relevance)?;
    let mut hdr = truth.header.clone();
    hdr.stream = Stream::Verdicts;
    hdr.params = rss;
    Ok((hdr, eval))
}
