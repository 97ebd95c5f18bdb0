//! Failure-rate arithmetic for redundant independent sensing: MTBF, joint
//! failure of two channels, safety factor against a human baseline, fleet
//! incident rate and the failure-free driving needed to demonstrate an MTBF.
//!
//! Rates are probabilities of at least one safety-relevant failure per hour
//! of operation.

use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReliabilityError {
    #[error("failure rate must lie in [0, 1] (got {0})")]
    RateOutOfRange(f64),
    #[error("{field} must be positive and finite (got {value})")]
    NotPositive { field: &'static str, value: f64 },
    #[error("coincidence window must lie in (0, 1] hours (got {0})")]
    Window(f64),
    #[error("system failure rate is zero; the ratio is unbounded")]
    ZeroSystemRate,
}

/// Probability of at least one failure per hour of operation.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FailureRate(f64);

impl FailureRate {
    pub fn new(p_per_hour: f64) -> Result<Self, ReliabilityError> {
        if (0.0..=1.0).contains(&p_per_hour) {
            Ok(Self(p_per_hour))
        } else {
            Err(ReliabilityError::RateOutOfRange(p_per_hour))
        }
    }

    pub fn p_per_hour(self) -> f64 {
        self.0
    }

    /// Per-frame injection probability for a simulator stepping at `dt_s`.
    pub fn per_frame(self, dt_s: f64) -> f64 {
        (self.0 * dt_s / 3600.0).min(1.0)
    }
}

impl TryFrom<f64> for FailureRate {
    type Error = ReliabilityError;
    fn try_from(v: f64) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<FailureRate> for f64 {
    fn from(r: FailureRate) -> f64 {
        r.0
    }
}

/// Mean time between failures in hours; a zero rate gives no finite value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mtbf {
    Finite(f64),
    Infinite,
}

impl Mtbf {
    pub fn hours(self) -> Option<f64> {
        match self {
            Mtbf::Finite(h) => Some(h),
            Mtbf::Infinite => None,
        }
    }
}

impl fmt::Display for Mtbf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mtbf::Finite(h) => write!(f, "{} h", fmt_num(*h)),
            Mtbf::Infinite => f.write_str("infinite (zero failure rate)"),
        }
    }
}

pub fn mtbf_from_rate(r: FailureRate) -> Mtbf {
    if r.0 == 0.0 {
        Mtbf::Infinite
    } else {
        Mtbf::Finite(1.0 / r.0)
    }
}

pub fn rate_from_mtbf(hours: f64) -> Result<FailureRate, ReliabilityError> {
    positive("mtbf_hours", hours)?;
    FailureRate::new(1.0 / hours)
}

/// Rate at which both channels fail within the same coincidence window.
/// A one-hour window gives the plain product.
pub fn joint_rate(a: FailureRate, b: FailureRate, window_hours: f64) -> Result<FailureRate, ReliabilityError> {
    if !(window_hours > 0.0 && window_hours <= 1.0) {
        return Err(ReliabilityError::Window(window_hours));
    }
    FailureRate::new(a.0 * b.0 * window_hours)
}

pub fn safety_factor_vs_human(system: FailureRate, human: FailureRate) -> Result<f64, ReliabilityError> {
    if system.0 == 0.0 {
        return Err(ReliabilityError::ZeroSystemRate);
    }
    Ok(human.0 / system.0)
}

/// Expected incidents per hour across the whole fleet.
pub fn fleet_incident_rate(mtbf_hours: f64, fleet_size: u64) -> Result<f64, ReliabilityError> {
    positive("mtbf_hours", mtbf_hours)?;
    positive("fleet_size", fleet_size as f64)?;
    Ok(fleet_size as f64 / mtbf_hours)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationBurden {
    pub failure_free_hours: f64,
    pub miles: f64,
    pub calendar_days: f64,
}

impl ValidationBurden {
    pub fn calendar_years(&self) -> f64 {
        self.calendar_days / 365.0
    }
}

/// Failure-free driving needed to demonstrate `mtbf_goal_hours`, where the
/// multiplier scales the goal (1 means "drive the MTBF once").
pub fn validation_burden(
    mtbf_goal_hours: f64,
    avg_speed_mph: f64,
    fleet_size: u64,
    hours_per_vehicle_day: f64,
    demonstration_multiplier: f64,
) -> Result<ValidationBurden, ReliabilityError> {
    positive("mtbf_goal_hours", mtbf_goal_hours)?;
    positive("avg_speed_mph", avg_speed_mph)?;
    positive("fleet_size", fleet_size as f64)?;
    positive("hours_per_vehicle_day", hours_per_vehicle_day)?;
    positive("demonstration_multiplier", demonstration_multiplier)?;
    let hours = mtbf_goal_hours * demonstration_multiplier;
    Ok(ValidationBurden {
        failure_free_hours: hours,
        miles: hours * avg_speed_mph,
        calendar_days: hours / (fleet_size as f64 * hours_per_vehicle_day),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMtbf {
    pub failures: u64,
    pub exposure_hours: f64,
    /// `exposure / failures`; absent when nothing failed.
    pub point_hours: Option<f64>,
    /// Two-sided 95 % interval from the chi-squared bounds on a Poisson count.
    pub lower_hours: f64,
    pub upper: Mtbf,
}

pub fn empirical_mtbf(failures: u64, exposure_hours: f64) -> Result<EmpiricalMtbf, ReliabilityError> {
    positive("exposure_hours", exposure_hours)?;
    let k = failures as f64;
    let upper_rate = ChiSquared::new(2.0 * k + 2.0).expect("dof > 0").inverse_cdf(0.975) / (2.0 * exposure_hours);
    let upper = if failures == 0 {
        Mtbf::Infinite
    } else {
        let lower_rate = ChiSquared::new(2.0 * k).expect("dof > 0").inverse_cdf(0.025) / (2.0 * exposure_hours);
        Mtbf::Finite(1.0 / lower_rate)
    };
    Ok(EmpiricalMtbf {
        failures,
        exposure_hours,
        point_hours: (failures > 0).then(|| exposure_hours / k),
        lower_hours: 1.0 / upper_rate,
        upper,
    })
}

fn positive(field: &'static str, value: f64) -> Result<(), ReliabilityError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(ReliabilityError::NotPositive { field, value })
    }
}

/// Six significant digits, plain notation for moderate magnitudes.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let a = x.abs();
    if (1e-3..1e6).contains(&a) {
        let digits = (5 - a.log10().floor() as i32).max(0) as usize;
        let s = format!("{x:.digits$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{x:.5e}");
        let (mantissa, exp) = s.split_once('e').expect("exponent form");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{exp}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityInputs {
    pub p_human: f64,
    pub p_channel_a: f64,
    pub p_channel_b: f64,
    pub mtbf_goal: f64,
    /// MTBF used for the fleet-rate row.
    pub fleet_mtbf: f64,
    pub fleet: u64,
    pub speed_mph: f64,
    pub hours_per_day: f64,
    pub multiplier: f64,
    /// Fleet size used to demonstrate a single channel's MTBF.
    pub validation_fleet: u64,
    pub window: f64,
}

impl Default for ReliabilityInputs {
    fn default() -> Self {
        Self {
            p_human: 2e-5,
            p_channel_a: 1e-4,
            p_channel_b: 1e-4,
            mtbf_goal: 1e7,
            fleet_mtbf: 1e6,
            fleet: 1_000_000,
            speed_mph: 30.0,
            hours_per_day: 2.0,
            multiplier: 1.0,
            validation_fleet: 100,
            window: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub quantity: String,
    pub value: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub footnote: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Footnote {
    pub id: u8,
    pub stated: String,
    pub computed: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityReport {
    pub inputs: ReliabilityInputs,
    pub rows: Vec<TableRow>,
    pub footnotes: Vec<Footnote>,
}

impl ReliabilityReport {
    pub fn row(&self, quantity_prefix: &str) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.quantity.starts_with(quantity_prefix))
    }
}

fn mtbf_text(m: Mtbf) -> String {
    m.to_string()
}

/// The whole derivation chain from per-hour rates to validation burden.
/// Where the computed number differs from the commonly quoted figure, the
/// row carries a footnote with both values.
pub fn reliability_table(inp: &ReliabilityInputs) -> Result<ReliabilityReport, ReliabilityError> {
    let human = FailureRate::new(inp.p_human)?;
    let a = FailureRate::new(inp.p_channel_a)?;
    let b = FailureRate::new(inp.p_channel_b)?;
    let mut rows = Vec::new();
    let mut footnotes = Vec::new();
    let mut row = |q: &str, v: String, note: Option<u8>| rows.push(TableRow { quantity: q.into(), value: v, footnote: note });

    row("human failure rate", format!("{} /h", fmt_num(human.0)), None);
    row("human MTBF", mtbf_text(mtbf_from_rate(human)), None);

    let twin_human = joint_rate(human, human, inp.window)?;
    row("joint rate, two human-level channels", format!("{} /h", fmt_num(twin_human.0)), None);
    row("joint MTBF, two human-level channels", mtbf_text(mtbf_from_rate(twin_human)), None);
    match safety_factor_vs_human(twin_human, human) {
        Ok(f) => row("safety factor, two human-level channels", format!("{}x", fmt_num(f)), None),
        Err(_) => row("safety factor, two human-level channels", "unbounded".into(), None),
    }

    let fleet_rate = fleet_incident_rate(inp.fleet_mtbf, inp.fleet)?;
    row(
        "fleet incident rate",
        format!("{} incident/hour (MTBF {} h, fleet {})", fmt_num(fleet_rate), fmt_num(inp.fleet_mtbf), inp.fleet),
        None,
    );

    let goal = validation_burden(inp.mtbf_goal, inp.speed_mph, 1, inp.hours_per_day, inp.multiplier)?;
    footnotes.push(Footnote {
        id: 1,
        stated: "an MTBF of 10^7 hours means at most one failure in 1 million hours".into(),
        computed: format!("an MTBF of {} h is one failure per {} hours", fmt_num(inp.mtbf_goal), fmt_num(inp.mtbf_goal)),
    });
    row("failure-free hours to demonstrate MTBF goal", format!("{} h", fmt_num(goal.failure_free_hours)), Some(1));
    footnotes.push(Footnote {
        id: 2,
        stated: "30 billion miles".into(),
        computed: format!("{} miles at {} mph", fmt_num(goal.miles), fmt_num(inp.speed_mph)),
    });
    row("miles to demonstrate MTBF goal", format!("{} miles", fmt_num(goal.miles)), Some(2));

    row("channel A MTBF", mtbf_text(mtbf_from_rate(a)), None);
    row("channel B MTBF", mtbf_text(mtbf_from_rate(b)), None);
    let joint = joint_rate(a, b, inp.window)?;
    row("joint rate, channels A and B", format!("{} /h", fmt_num(joint.0)), None);
    let joint_mtbf = mtbf_from_rate(joint);
    row("joint MTBF, channels A and B", mtbf_text(joint_mtbf), None);
    match safety_factor_vs_human(joint, human) {
        Ok(f) => {
            footnotes.push(Footnote {
                id: 3,
                stated: "10,000 times safer than a human driver".into(),
                computed: format!("{}x against a human rate of {} /h", fmt_num(f), fmt_num(human.0)),
            });
            row("safety factor, channels A and B", format!("{}x", fmt_num(f)), Some(3));
        }
        Err(_) => row("safety factor, channels A and B", "unbounded (zero joint rate)".into(), None),
    }
    if let Mtbf::Finite(h) = joint_mtbf {
        row(
            "joint MTBF exceeds goal",
            format!("{} ({} h vs {} h)", h >= inp.mtbf_goal, fmt_num(h), fmt_num(inp.mtbf_goal)),
            None,
        );
    }

    if let Some(ch) = mtbf_from_rate(a).hours() {
        let solo = validation_burden(ch, inp.speed_mph, 1, inp.hours_per_day, inp.multiplier)?;
        footnotes.push(Footnote {
            id: 4,
            stated: "2 hours a day for 10 years".into(),
            computed: format!(
                "{} years at {} h/day for {} h",
                fmt_num(solo.calendar_years()),
                fmt_num(inp.hours_per_day),
                fmt_num(ch)
            ),
        });
        row(
            "single vehicle, demonstrate channel MTBF",
            format!("{} days ({} years)", fmt_num(solo.calendar_days), fmt_num(solo.calendar_years())),
            Some(4),
        );
        let fleet = validation_burden(ch, inp.speed_mph, inp.validation_fleet, inp.hours_per_day, inp.multiplier)?;
        row(
            "validation fleet, demonstrate channel MTBF",
            format!("{} days with {} vehicles", fmt_num(fleet.calendar_days), inp.validation_fleet),
            None,
        );
    }
    if let Mtbf::Finite(h) = joint_mtbf {
        let single = validation_burden(h, inp.speed_mph, 1, inp.hours_per_day, inp.multiplier)?;
        footnotes.push(Footnote {
            id: 5,
            stated: "2 hours a day for 10,000 years".into(),
            computed: format!("{} years at {} h/day for {} h", fmt_num(single.calendar_years()), fmt_num(inp.hours_per_day), fmt_num(h)),
        });
        row(
            "single channel at joint MTBF, one vehicle",
            format!("{} years", fmt_num(single.calendar_years())),
            Some(5),
        );
    }

    Ok(ReliabilityReport { inputs: inp.clone(), rows, footnotes })
}

impl fmt::Display for ReliabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.rows.iter().map(|r| r.quantity.len()).max().unwrap_or(0);
        for r in &self.rows {
            let mark = r.footnote.map(|n| format!(" [{n}]")).unwrap_or_default();
            writeln!(f, "{:<width$}  {}{}", r.quantity, r.value, mark)?;
        }
        if !self.footnotes.is_empty() {
            writeln!(f)?;
            for n in &self.footnotes {
                writeln!(f, "[{}] commonly stated: {}; computed: {}", n.id, n.stated, n.computed)?;
            }
        }
        Ok(())
    }
}
