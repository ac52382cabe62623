// SPDX-License-Identifier: Apache-2.0

//! Discrete-event simulation of transaction issuance and attachment.
//!
//! A run is a pure function of its [`SimConfig`]. Arrival times and priority
//! flags come from one random stream and attachment choices from another, so
//! two runs that differ only in strategy see exactly the same workload.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::config::{ConfigError, SimConfig};
use crate::ledger::{Tangle, TransactionId};
use crate::selection::{build_candidates, SelectionCandidates, Strategy};
use crate::time::SimTime;

const ARRIVAL_STREAM: u64 = 0;
const ATTACHMENT_STREAM: u64 = 1;

/// Issue-time class of a transaction. Aging never changes it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TxClass {
    Priority,
    Common,
}

impl TxClass {
    pub fn from_flag(priority_flag: bool) -> Self {
        if priority_flag {
            TxClass::Priority
        } else {
            TxClass::Common
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TxClass::Priority => "priority",
            TxClass::Common => "common",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TxRecord {
    pub id: TransactionId,
    pub class: TxClass,
    pub issued_at: SimTime,
    pub parents: Vec<TransactionId>,
    pub confirmed_at: Option<SimTime>,
    /// First selection instant at which aging counted this common
    /// transaction as high priority.
    pub promoted_at: Option<SimTime>,
}

impl TxRecord {
    pub fn latency(&self) -> Option<SimTime> {
        self.confirmed_at.map(|c| c - self.issued_at)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub config: SimConfig,
    /// One record per issued transaction, genesis excluded, in issue order.
    pub records: Vec<TxRecord>,
    /// Tip count right after each insertion.
    pub tip_pool_sizes: Vec<(SimTime, usize)>,
}

impl SimTrace {
    /// The `(issued_at, class)` sequence that defines the workload.
    pub fn workload(&self) -> impl Iterator<Item = (SimTime, TxClass)> + '_ {
        self.records.iter().map(|r| (r.issued_at, r.class))
    }
}

/// A finished run together with its final ledger.
#[derive(Debug, Clone)]
pub struct SimOutcome {
    pub trace: SimTrace,
    pub tangle: Tangle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arrival {
    pub issued_at: SimTime,
    pub priority_flag: bool,
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Poisson arrivals on `[0, horizon)` with independent priority marking.
///
/// Inter-arrival gaps are exponential with mean `1 / lambda`, rounded to the
/// microsecond and at least one microsecond so issue times strictly increase.
pub fn generate_workload(config: &SimConfig) -> Result<Vec<Arrival>, ConfigError> {
    config.validate()?;
    let mut rng = stream(config.seed, ARRIVAL_STREAM);
    let gaps = Exp::new(config.lambda).expect("validated rate");
    let horizon = config.horizon();
    let mut now = SimTime::ZERO;
    let mut arrivals = Vec::new();
    loop {
        let gap = SimTime::from_secs_f64(gaps.sample(&mut rng)).max(SimTime::from_micros(1));
        now = now + gap;
        if now >= horizon {
            break;
        }
        let drawn = rng.random_bool(config.rho);
        let ordinal = arrivals.len() as u64 + 1;
        arrivals.push(Arrival { issued_at: now, priority_flag: drawn || config.pinned_priority.contains(&ordinal) });
    }
    Ok(arrivals)
}

// Parents when the strategy has nothing to draw from: any visible tips, then
// recent non-tips, then genesis.
fn degenerate_parents(candidates: Option<&SelectionCandidates>, genesis: TransactionId) -> Vec<TransactionId> {
    let mut parents: Vec<TransactionId> = Vec::with_capacity(2);
    if let Some(c) = candidates {
        for &id in c.tips.iter().chain(&c.fallback) {
            if parents.len() == 2 {
                break;
            }
            if !parents.contains(&id) {
                parents.push(id);
            }
        }
    }
    if parents.is_empty() {
        parents.push(genesis);
    }
    parents
}

/// Runs `config` with its configured strategy and keeps the final ledger.
pub fn simulate(config: &SimConfig) -> Result<SimOutcome, ConfigError> {
    let arrivals = generate_workload(config)?;
    let mut rng = stream(config.seed, ATTACHMENT_STREAM);
    let delay = config.visibility_delay();
    let policy = config.policy();
    let strategy = config.strategy;

    let mut tangle = Tangle::new();
    let genesis = tangle.genesis();
    let mut records: Vec<TxRecord> = Vec::with_capacity(arrivals.len());
    let mut tip_pool_sizes = Vec::with_capacity(arrivals.len());

    for arrival in &arrivals {
        let now = arrival.issued_at;
        let parents = match build_candidates(&tangle, now, delay, policy) {
            Ok(candidates) => {
                for id in &candidates.priority {
                    if let Some(record) = id.get().checked_sub(1).and_then(|i| records.get_mut(i as usize)) {
                        if record.class == TxClass::Common && record.promoted_at.is_none() {
                            record.promoted_at = Some(now);
                        }
                    }
                }
                match strategy.select(&candidates, &mut rng) {
                    Ok(selection) => selection.parents,
                    Err(_) => degenerate_parents(Some(&candidates), genesis),
                }
            }
            Err(_) => degenerate_parents(None, genesis),
        };

        let id = tangle
            .add_transaction(&parents, now, arrival.priority_flag)
            .expect("selected parents are stored and time advances");
        tangle.confirmation_sweep(config.theta, now);
        tip_pool_sizes.push((now, tangle.tips().len()));
        records.push(TxRecord {
            id,
            class: TxClass::from_flag(arrival.priority_flag),
            issued_at: now,
            parents: tangle.get(id).expect("just inserted").parents.clone(),
            confirmed_at: None,
            promoted_at: None,
        });

        if cfg!(debug_assertions) && id.get().is_multiple_of(100) {
            if let Err(violation) = tangle.verify(config.theta) {
                panic!("ledger invariant broken after {id}: {violation}");
            }
        }
    }

    for record in &mut records {
        record.confirmed_at = tangle.get(record.id).and_then(|tx| tx.confirmed_at);
    }

    Ok(SimOutcome { trace: SimTrace { config: config.clone(), records, tip_pool_sizes }, tangle })
}

pub fn run_simulation(config: &SimConfig) -> Result<SimTrace, ConfigError> {
    simulate(config).map(|outcome| outcome.trace)
}

/// The same workload under the uniform baseline and under the priority
/// strategy, in that order. The configured strategy is ignored.
pub fn paired_outcomes(config: &SimConfig) -> Result<(SimOutcome, SimOutcome), ConfigError> {
    let uniform = simulate(&config.with_strategy(Strategy::Uniform))?;
    let ptsa = simulate(&config.with_strategy(Strategy::Ptsa))?;
    Ok((uniform, ptsa))
}

pub fn paired_runs(config: &SimConfig) -> Result<(SimTrace, SimTrace), ConfigError> {
    paired_outcomes(config).map(|(u, p)| (u.trace, p.trace))
}
