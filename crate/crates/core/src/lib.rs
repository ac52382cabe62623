// SPDX-License-Identifier: Apache-2.0

//! A deterministic discrete-event simulator of a Tangle ledger.
//!
//! Transactions arrive as a Poisson stream, pick their parents with either a
//! uniform-random baseline or a priority-aware strategy, and confirm once
//! their cumulative weight reaches a threshold. Traces record every
//! transaction's lifecycle so per-class confirmation latency can be compared
//! across strategies on identical workloads.

pub mod config;
pub mod ledger;
pub mod metrics;
pub mod oracle;
pub mod selection;
pub mod sim;
pub mod time;

pub use config::{AgingConfig, ConfigError, SimConfig, REFERENCE_CONFIG_TOML};
pub use ledger::{LedgerError, Tangle, Transaction, TransactionId, MAX_PARENTS};
pub use metrics::{class_stats, compare, export_csv, export_json, ClassStats, ComparisonReport, MetricsError};
pub use selection::{
    build_candidates, effective_priority, select_ptsa, select_uniform, Branch, PriorityPolicy, SelectionCandidates,
    SelectionError, SelectionResult, Strategy,
};
pub use sim::{paired_runs, run_simulation, simulate, SimOutcome, SimTrace, TxClass, TxRecord};
pub use time::SimTime;
