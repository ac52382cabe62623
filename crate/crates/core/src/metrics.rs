// SPDX-License-Identifier: Apache-2.0

//! Confirmation statistics and comparison reports derived from traces, with
//! CSV and JSON export.
//!
//! Every floating-point value written by this module has exactly six
//! decimals. Latency is `confirmed_at - issued_at` in simulated seconds;
//! unconfirmed transactions are censored and never enter latency quantiles.

use std::io::{Read, Write};

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;
use thiserror::Error;

use crate::config::SimConfig;
use crate::ledger::TransactionId;
use crate::selection::Strategy;
use crate::sim::{SimTrace, TxClass, TxRecord};
use crate::time::SimTime;

pub const CSV_HEADER: [&str; 6] = ["id", "class", "issued_at", "confirmed_at", "latency", "parents"];

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("traces describe different workloads (first difference at record {index})")]
    WorkloadMismatch { index: usize },
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv failure: {0}")]
    Csv(#[from] csv::Error),
    #[error("json failure: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed trace row {row}: {reason}")]
    Malformed { row: usize, reason: String },
}

fn fixed6<S: Serializer>(value: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    let raw = RawValue::from_string(format!("{value:.6}")).map_err(serde::ser::Error::custom)?;
    raw.serialize(serializer)
}

fn fixed6_opt<S: Serializer>(value: &Option<f64>, serializer: S) -> Result<S::Ok, S::Error> {
    match value {
        Some(v) => fixed6(v, serializer),
        None => serializer.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassStats {
    pub class: TxClass,
    pub issued: usize,
    pub confirmed: usize,
    #[serde(serialize_with = "fixed6_opt")]
    pub mean_latency: Option<f64>,
    #[serde(serialize_with = "fixed6_opt")]
    pub median_latency: Option<f64>,
    #[serde(serialize_with = "fixed6_opt")]
    pub p95_latency: Option<f64>,
    #[serde(serialize_with = "fixed6")]
    pub unconfirmed_fraction: f64,
}

fn micros_to_secs(micros: f64) -> f64 {
    micros / 1_000_000.0
}

/// Per-class statistics over `records`.
///
/// The median of an even-sized sample is the mean of the two middle values;
/// p95 is the nearest-rank value `ceil(0.95 n)`.
pub fn class_stats_of(records: &[TxRecord], class: TxClass) -> ClassStats {
    let members: Vec<&TxRecord> = records.iter().filter(|r| r.class == class).collect();
    let mut latencies: Vec<u64> = members.iter().filter_map(|r| r.latency()).map(SimTime::as_micros).collect();
    latencies.sort_unstable();

    let issued = members.len();
    let confirmed = latencies.len();
    let n = confirmed;
    let (mean, median, p95) = if n == 0 {
        (None, None, None)
    } else {
        let sum: u64 = latencies.iter().sum();
        let median =
            if n % 2 == 1 { latencies[n / 2] as f64 } else { (latencies[n / 2 - 1] + latencies[n / 2]) as f64 / 2.0 };
        let rank = (95 * n).div_ceil(100);
        (
            Some(micros_to_secs(sum as f64 / n as f64)),
            Some(micros_to_secs(median)),
            Some(micros_to_secs(latencies[rank - 1] as f64)),
        )
    };
    let unconfirmed_fraction = if issued == 0 { 0.0 } else { 1.0 - confirmed as f64 / issued as f64 };
    ClassStats {
        class,
        issued,
        confirmed,
        mean_latency: mean,
        median_latency: median,
        p95_latency: p95,
        unconfirmed_fraction,
    }
}

pub fn class_stats(trace: &SimTrace, class: TxClass) -> ClassStats {
    class_stats_of(&trace.records, class)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyStats {
    pub priority: ClassStats,
    pub common: ClassStats,
}

impl StrategyStats {
    pub fn of(records: &[TxRecord]) -> Self {
        StrategyStats {
            priority: class_stats_of(records, TxClass::Priority),
            common: class_stats_of(records, TxClass::Common),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgingEcho {
    pub enabled: bool,
    #[serde(serialize_with = "fixed6")]
    pub threshold_seconds: f64,
}

/// The configuration as echoed into JSON outputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    #[serde(serialize_with = "fixed6")]
    pub lambda: f64,
    #[serde(serialize_with = "fixed6")]
    pub rho: f64,
    #[serde(serialize_with = "fixed6")]
    pub horizon_seconds: f64,
    #[serde(serialize_with = "fixed6")]
    pub visibility_delay_seconds: f64,
    pub theta: u64,
    pub strategy: Strategy,
    pub aging: AgingEcho,
    pub seed: u64,
    pub pinned_priority: Vec<u64>,
}

impl From<&SimConfig> for ConfigEcho {
    fn from(c: &SimConfig) -> Self {
        ConfigEcho {
            lambda: c.lambda,
            rho: c.rho,
            horizon_seconds: c.horizon_seconds,
            visibility_delay_seconds: c.visibility_delay_seconds,
            theta: c.theta,
            strategy: c.strategy,
            aging: AgingEcho { enabled: c.aging.enabled, threshold_seconds: c.aging.threshold_seconds },
            seed: c.seed,
            pinned_priority: c.pinned_priority.clone(),
        }
    }
}

/// What `simulate` writes to `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub config: ConfigEcho,
    pub records: usize,
    pub priority: ClassStats,
    pub common: ClassStats,
}

impl RunSummary {
    pub fn of(trace: &SimTrace) -> Self {
        let stats = StrategyStats::of(&trace.records);
        RunSummary {
            config: ConfigEcho::from(&trace.config),
            records: trace.records.len(),
            priority: stats.priority,
            common: stats.common,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub config: ConfigEcho,
    pub uniform: StrategyStats,
    pub ptsa: StrategyStats,
    /// `(mean_uniform - mean_ptsa) / mean_uniform` for the priority class.
    #[serde(serialize_with = "fixed6_opt")]
    pub latency_reduction: Option<f64>,
    /// Common-class unconfirmed fraction, ptsa minus uniform.
    #[serde(serialize_with = "fixed6")]
    pub starvation_delta: f64,
}

impl ComparisonReport {
    /// True when the priority class confirms strictly faster on average
    /// under the priority strategy.
    pub fn ptsa_wins(&self) -> bool {
        match (self.uniform.priority.mean_latency, self.ptsa.priority.mean_latency) {
            (Some(u), Some(p)) => p < u,
            _ => false,
        }
    }
}

/// Compares two runs of one workload. The config echo comes from the
/// baseline trace.
pub fn compare(uniform: &SimTrace, ptsa: &SimTrace) -> Result<ComparisonReport, MetricsError> {
    compare_records(&uniform.config, &uniform.records, &ptsa.records)
}

pub fn compare_records(
    config: &SimConfig,
    uniform: &[TxRecord],
    ptsa: &[TxRecord],
) -> Result<ComparisonReport, MetricsError> {
    let key = |r: &TxRecord| (r.issued_at, r.class);
    if let Some(index) = uniform.iter().zip(ptsa).position(|(a, b)| key(a) != key(b)) {
        return Err(MetricsError::WorkloadMismatch { index });
    }
    if uniform.len() != ptsa.len() {
        return Err(MetricsError::WorkloadMismatch { index: uniform.len().min(ptsa.len()) });
    }
    let uniform = StrategyStats::of(uniform);
    let ptsa = StrategyStats::of(ptsa);
    let latency_reduction = match (uniform.priority.mean_latency, ptsa.priority.mean_latency) {
        (Some(u), Some(p)) if u > 0.0 => Some((u - p) / u),
        _ => None,
    };
    let starvation_delta = ptsa.common.unconfirmed_fraction - uniform.common.unconfirmed_fraction;
    Ok(ComparisonReport { config: ConfigEcho::from(config), uniform, ptsa, latency_reduction, starvation_delta })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedOutcome {
    pub seed: u64,
    pub ptsa_wins: bool,
    #[serde(serialize_with = "fixed6_opt")]
    pub latency_reduction: Option<f64>,
    #[serde(serialize_with = "fixed6")]
    pub starvation_delta: f64,
}

/// Roll-up over a batch of paired seeds, written as `aggregate.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub base_seed: u64,
    pub seeds: usize,
    /// Seeds where the priority class mean latency is strictly lower under ptsa.
    pub ptsa_wins: usize,
    /// Mean of the per-seed `latency_reduction` values that are defined.
    #[serde(serialize_with = "fixed6_opt")]
    pub mean_latency_reduction: Option<f64>,
    #[serde(serialize_with = "fixed6_opt")]
    pub max_starvation_delta: Option<f64>,
    pub per_seed: Vec<SeedOutcome>,
}

impl Aggregate {
    pub fn of(base_seed: u64, reports: &[ComparisonReport]) -> Self {
        let per_seed: Vec<SeedOutcome> = reports
            .iter()
            .map(|r| SeedOutcome {
                seed: r.config.seed,
                ptsa_wins: r.ptsa_wins(),
                latency_reduction: r.latency_reduction,
                starvation_delta: r.starvation_delta,
            })
            .collect();
        let defined: Vec<f64> = per_seed.iter().filter_map(|s| s.latency_reduction).collect();
        let mean_latency_reduction = (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64);
        let max_starvation_delta = per_seed.iter().map(|s| s.starvation_delta).reduce(f64::max);
        Aggregate {
            base_seed,
            seeds: reports.len(),
            ptsa_wins: per_seed.iter().filter(|s| s.ptsa_wins).count(),
            mean_latency_reduction,
            max_starvation_delta,
            per_seed,
        }
    }
}

fn opt_time(t: Option<SimTime>) -> String {
    t.map(|t| t.to_string()).unwrap_or_default()
}

/// Writes one row per record, in issue order.
pub fn export_csv<W: Write>(trace: &SimTrace, destination: W) -> Result<(), MetricsError> {
    let mut writer = csv::Writer::from_writer(destination);
    writer.write_record(CSV_HEADER)?;
    for r in &trace.records {
        let parents = r.parents.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(";");
        writer.write_record([
            r.id.to_string(),
            r.class.as_str().to_owned(),
            r.issued_at.to_string(),
            opt_time(r.confirmed_at),
            opt_time(r.latency()),
            parents,
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// Pretty-printed JSON followed by a newline.
pub fn export_json<T: Serialize, W: Write>(value: &T, mut destination: W) -> Result<(), MetricsError> {
    serde_json::to_writer_pretty(&mut destination, value)?;
    destination.write_all(b"\n")?;
    destination.flush()?;
    Ok(())
}

fn parse_time(row: usize, field: &str) -> Result<Option<SimTime>, MetricsError> {
    if field.is_empty() {
        return Ok(None);
    }
    let seconds: f64 =
        field.parse().map_err(|_| MetricsError::Malformed { row, reason: format!("bad time `{field}`") })?;
    Ok(Some(SimTime::from_secs_f64(seconds)))
}

/// Reads a trace CSV back into records. `promoted_at` is not exported and
/// comes back empty.
pub fn parse_csv<R: Read>(source: R) -> Result<Vec<TxRecord>, MetricsError> {
    let mut reader = csv::Reader::from_reader(source);
    let header = reader.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(MetricsError::Malformed { row: 0, reason: "unexpected header".into() });
    }
    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row_no = i + 1;
        let row = row?;
        let bad = |reason: String| MetricsError::Malformed { row: row_no, reason };
        let id: u64 = row[0].parse().map_err(|_| bad(format!("bad id `{}`", &row[0])))?;
        let class = match &row[1] {
            "priority" => TxClass::Priority,
            "common" => TxClass::Common,
            other => return Err(bad(format!("bad class `{other}`"))),
        };
        let issued_at = parse_time(row_no, &row[2])?.ok_or_else(|| bad("missing issued_at".into()))?;
        let confirmed_at = parse_time(row_no, &row[3])?;
        let parents = row[5]
            .split(';')
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map(TransactionId::new).map_err(|_| bad(format!("bad parent `{s}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        records.push(TxRecord {
            id: TransactionId::new(id),
            class,
            issued_at,
            parents,
            confirmed_at,
            promoted_at: None,
        });
    }
    Ok(records)
}
