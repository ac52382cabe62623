// SPDX-License-Identifier: Apache-2.0

//! Tip selection: the uniform-random baseline and the priority-aware
//! strategy, plus the aging policy that promotes long-waiting transactions.
//!
//! Strategies are pure functions of a [`SelectionCandidates`] snapshot and a
//! caller-supplied random source. Candidate lists are sorted by id so a given
//! seed always yields the same parents.

use std::fmt;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ledger::{Tangle, Transaction, TransactionId};
use crate::time::SimTime;

/// How many recent non-tip transactions a snapshot keeps for padding
/// selections that would otherwise approve fewer than two transactions.
pub const FALLBACK_DEPTH: usize = 3;

#[derive(Debug, Clone, Copy, Error, PartialEq, Eq)]
pub enum SelectionError {
    #[error("no selectable transaction exists")]
    EmptyCandidates,
}

/// Age-based promotion of common transactions into the priority class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PriorityPolicy {
    pub enabled: bool,
    /// Age at which an unconfirmed transaction counts as high priority.
    pub threshold: SimTime,
}

impl PriorityPolicy {
    pub const fn disabled() -> Self {
        PriorityPolicy { enabled: false, threshold: SimTime::ZERO }
    }

    pub const fn aging_after(threshold: SimTime) -> Self {
        PriorityPolicy { enabled: true, threshold }
    }
}

/// Whether `tx` is treated as high priority at `now`: flagged at issue, or
/// promoted by aging once it has waited at least the policy threshold.
pub fn effective_priority(tx: &Transaction, now: SimTime, policy: PriorityPolicy) -> bool {
    tx.priority_flag || (policy.enabled && now.saturating_sub(tx.issued_at) >= policy.threshold)
}

/// A read-only snapshot of what a strategy may approve.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SelectionCandidates {
    /// Visible, unconfirmed, effectively high-priority transactions. Not necessarily tips.
    pub priority: Vec<TransactionId>,
    /// Visible tips that are not effectively high priority.
    pub common: Vec<TransactionId>,
    /// Every visible tip regardless of class. The baseline draws from this pool.
    pub tips: Vec<TransactionId>,
    /// The most recently issued visible non-tip transactions, newest first.
    pub fallback: Vec<TransactionId>,
    pub as_of: SimTime,
}

impl SelectionCandidates {
    /// The number of unconfirmed priority candidates.
    pub fn count_unconfirmed_priority(&self) -> usize {
        self.priority.len()
    }

    fn is_empty(&self) -> bool {
        self.priority.is_empty() && self.common.is_empty() && self.tips.is_empty() && self.fallback.is_empty()
    }
}

/// Snapshots the ledger at `now`. A transaction is visible once it is at
/// least `visibility_delay` old.
pub fn build_candidates(
    tangle: &Tangle,
    now: SimTime,
    visibility_delay: SimTime,
    policy: PriorityPolicy,
) -> Result<SelectionCandidates, SelectionError> {
    let cutoff = now.checked_sub(visibility_delay).ok_or(SelectionError::EmptyCandidates)?;
    let visible = |tx: &Transaction| tx.issued_at <= cutoff;
    let lookup = |id: &TransactionId| tangle.get(*id).expect("sets only hold stored ids");

    let tips: Vec<TransactionId> = tangle.tips().iter().filter(|id| visible(lookup(id))).copied().collect();
    let common = tips.iter().filter(|id| !effective_priority(lookup(id), now, policy)).copied().collect();
    let priority = tangle
        .unconfirmed()
        .iter()
        .filter(|id| {
            let tx = lookup(id);
            visible(tx) && effective_priority(tx, now, policy)
        })
        .copied()
        .collect();
    let fallback = tangle
        .transactions()
        .iter()
        .rev()
        .filter(|tx| visible(tx) && !tangle.is_tip(tx.id))
        .take(FALLBACK_DEPTH)
        .map(|tx| tx.id)
        .collect();

    let candidates = SelectionCandidates { priority, common, tips, fallback, as_of: now };
    if candidates.is_empty() {
        return Err(SelectionError::EmptyCandidates);
    }
    Ok(candidates)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Uniform,
    Ptsa,
}

impl Strategy {
    pub fn select<R: Rng + ?Sized>(
        self,
        candidates: &SelectionCandidates,
        rng: &mut R,
    ) -> Result<SelectionResult, SelectionError> {
        match self {
            Strategy::Uniform => select_uniform(candidates, rng),
            Strategy::Ptsa => select_ptsa(candidates, rng),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Uniform => "uniform",
            Strategy::Ptsa => "ptsa",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which rule produced a selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// Uniform draw over all tips.
    Baseline,
    /// No unconfirmed priority candidates: two common tips.
    NoPriority,
    /// Exactly one: the priority transaction plus one common tip.
    OnePriority,
    /// Two or more: two priority transactions plus one common tip.
    ManyPriority,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Baseline => "baseline",
            Branch::NoPriority => "p=0",
            Branch::OnePriority => "p=1",
            Branch::ManyPriority => "p>=2",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionResult {
    /// Pairwise distinct. Two or three ids, or a single id while only one
    /// transaction is visible.
    pub parents: Vec<TransactionId>,
    pub branch: Branch,
}

fn draw<R: Rng + ?Sized>(pool: &[TransactionId], amount: usize, rng: &mut R) -> Vec<TransactionId> {
    let amount = amount.min(pool.len());
    index::sample(rng, pool.len(), amount).into_iter().map(|i| pool[i]).collect()
}

// Pads a selection to two parents with the newest non-tip transactions not already chosen.
fn pad_to_pair(parents: &mut Vec<TransactionId>, fallback: &[TransactionId]) {
    for &id in fallback {
        if parents.len() >= 2 {
            break;
        }
        if !parents.contains(&id) {
            parents.push(id);
        }
    }
}

fn finish(
    mut parents: Vec<TransactionId>,
    branch: Branch,
    candidates: &SelectionCandidates,
) -> Result<SelectionResult, SelectionError> {
    pad_to_pair(&mut parents, &candidates.fallback);
    Ok(SelectionResult { parents, branch })
}

/// Two distinct tips uniformly at random from every visible tip.
pub fn select_uniform<R: Rng + ?Sized>(
    candidates: &SelectionCandidates,
    rng: &mut R,
) -> Result<SelectionResult, SelectionError> {
    if candidates.tips.is_empty() {
        return Err(SelectionError::EmptyCandidates);
    }
    finish(draw(&candidates.tips, 2, rng), Branch::Baseline, candidates)
}

/// Priority-aware selection keyed on the number of unconfirmed priority
/// candidates `p`:
///
/// * `p = 0`: two common tips at random.
/// * `p = 1`: the priority transaction and one common tip at random.
/// * `p >= 2`: two priority transactions and one common tip, all at random.
///
/// The common slot is dropped when no common tip exists. Any result short of
/// two parents is padded with recent non-tip transactions.
pub fn select_ptsa<R: Rng + ?Sized>(
    candidates: &SelectionCandidates,
    rng: &mut R,
) -> Result<SelectionResult, SelectionError> {
    if candidates.priority.is_empty() && candidates.common.is_empty() {
        return Err(SelectionError::EmptyCandidates);
    }
    let (mut parents, branch) = match candidates.count_unconfirmed_priority() {
        0 => return finish(draw(&candidates.common, 2, rng), Branch::NoPriority, candidates),
        1 => (candidates.priority.clone(), Branch::OnePriority),
        _ => (draw(&candidates.priority, 2, rng), Branch::ManyPriority),
    };
    parents.extend(draw(&candidates.common, 1, rng));
    finish(parents, branch, candidates)
}
