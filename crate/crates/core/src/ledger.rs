// SPDX-License-Identifier: Apache-2.0

//! The DAG ledger: transaction storage, tip pool, cumulative weight and the
//! threshold confirmation sweep.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::time::SimTime;

/// Upper bound on the number of transactions a single transaction may approve.
pub const MAX_PARENTS: usize = 8;

/// Identity of a ledger vertex. Ids are insertion ordinals; genesis is `0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TransactionId(u64);

impl TransactionId {
    pub const GENESIS: TransactionId = TransactionId(0);

    pub const fn new(raw: u64) -> Self {
        TransactionId(raw)
    }

    pub const fn get(self) -> u64 {
        self.0
    }

    fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for TransactionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transaction {
    pub id: TransactionId,
    /// Distinct approved transactions, in request order. Empty only for genesis.
    pub parents: Vec<TransactionId>,
    pub issued_at: SimTime,
    /// `true` marks a high-priority transaction, `false` a common one.
    pub priority_flag: bool,
    pub confirmed_at: Option<SimTime>,
}

impl Transaction {
    pub fn is_genesis(&self) -> bool {
        self.parents.is_empty()
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LedgerError {
    #[error("parent {0} is not in the ledger")]
    UnknownParent(TransactionId),
    #[error("a transaction must approve between 1 and {MAX_PARENTS} transactions, got {0}")]
    ParentArity(usize),
    #[error("issue time {issued_at} precedes the latest stored transaction at {latest}")]
    TimeRegression { issued_at: SimTime, latest: SimTime },
    #[error("transaction {0} is not in the ledger")]
    UnknownTransaction(TransactionId),
}

/// A broken structural invariant found by [`Tangle::verify`].
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum InvariantViolation {
    #[error("maintained tip set differs from recomputed tip set")]
    TipSet,
    #[error("transaction {0} confirmation state disagrees with its cumulative weight")]
    Confirmation(TransactionId),
    #[error("transaction {0} was confirmed before it was issued")]
    ConfirmedBeforeIssue(TransactionId),
    #[error("transaction {0} references parent {1} that is not older than it")]
    ParentOrder(TransactionId, TransactionId),
}

/// The Tangle. Single writer; hand the whole value between threads if needed.
#[derive(Debug, Clone)]
pub struct Tangle {
    transactions: Vec<Transaction>,
    approvers: Vec<Vec<TransactionId>>,
    weights: Vec<u64>,
    tips: BTreeSet<TransactionId>,
    confirmed: BTreeSet<TransactionId>,
    unconfirmed: BTreeSet<TransactionId>,
    // Traversal scratch: a node is visited in the current walk iff its mark equals `epoch`.
    marks: Vec<u32>,
    epoch: u32,
}

impl Default for Tangle {
    fn default() -> Self {
        Self::new()
    }
}

impl Tangle {
    /// A ledger holding only genesis, issued at time zero.
    pub fn new() -> Self {
        let genesis = Transaction {
            id: TransactionId::GENESIS,
            parents: Vec::new(),
            issued_at: SimTime::ZERO,
            priority_flag: false,
            confirmed_at: None,
        };
        Tangle {
            transactions: vec![genesis],
            approvers: vec![Vec::new()],
            weights: vec![1],
            tips: BTreeSet::from([TransactionId::GENESIS]),
            confirmed: BTreeSet::new(),
            unconfirmed: BTreeSet::from([TransactionId::GENESIS]),
            marks: vec![0],
            epoch: 0,
        }
    }

    pub fn genesis(&self) -> TransactionId {
        TransactionId::GENESIS
    }

    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    /// Always false: genesis exists from construction.
    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    pub fn contains(&self, id: TransactionId) -> bool {
        id.index() < self.transactions.len()
    }

    pub fn get(&self, id: TransactionId) -> Option<&Transaction> {
        self.transactions.get(id.index())
    }

    fn require(&self, id: TransactionId) -> Result<&Transaction, LedgerError> {
        self.get(id).ok_or(LedgerError::UnknownTransaction(id))
    }

    /// Transactions in insertion order, which is also a topological order.
    pub fn transactions(&self) -> &[Transaction] {
        &self.transactions
    }

    pub fn latest(&self) -> &Transaction {
        self.transactions.last().expect("genesis is always present")
    }

    pub fn approvers(&self, id: TransactionId) -> Result<&[TransactionId], LedgerError> {
        self.require(id)?;
        Ok(&self.approvers[id.index()])
    }

    /// Transactions not yet approved by any other transaction.
    pub fn tips(&self) -> &BTreeSet<TransactionId> {
        &self.tips
    }

    pub fn is_tip(&self, id: TransactionId) -> bool {
        self.tips.contains(&id)
    }

    pub fn confirmed(&self) -> &BTreeSet<TransactionId> {
        &self.confirmed
    }

    pub fn unconfirmed(&self) -> &BTreeSet<TransactionId> {
        &self.unconfirmed
    }

    pub fn is_confirmed(&self, id: TransactionId) -> bool {
        self.confirmed.contains(&id)
    }

    /// One plus the number of distinct transactions approving `id` directly or indirectly.
    pub fn cumulative_weight(&self, id: TransactionId) -> Result<u64, LedgerError> {
        self.require(id)?;
        Ok(self.weights[id.index()])
    }

    /// Inserts a transaction approving `parents` and returns its id.
    ///
    /// Repeated parent ids are accepted and collapsed to one edge. Every
    /// distinct ancestor of the new transaction gains exactly one unit of
    /// cumulative weight.
    pub fn add_transaction(
        &mut self,
        parents: &[TransactionId],
        issued_at: SimTime,
        priority_flag: bool,
    ) -> Result<TransactionId, LedgerError> {
        if parents.is_empty() || parents.len() > MAX_PARENTS {
            return Err(LedgerError::ParentArity(parents.len()));
        }
        if let Some(&missing) = parents.iter().find(|p| !self.contains(**p)) {
            return Err(LedgerError::UnknownParent(missing));
        }
        let latest = self.latest().issued_at;
        if issued_at < latest {
            return Err(LedgerError::TimeRegression { issued_at, latest });
        }

        let mut distinct: Vec<TransactionId> = Vec::with_capacity(parents.len());
        for &p in parents {
            if !distinct.contains(&p) {
                distinct.push(p);
            }
        }

        let id = TransactionId(self.transactions.len() as u64);
        for &p in &distinct {
            self.approvers[p.index()].push(id);
            self.tips.remove(&p);
        }
        self.transactions.push(Transaction { id, parents: distinct, issued_at, priority_flag, confirmed_at: None });
        self.approvers.push(Vec::new());
        self.weights.push(1);
        self.marks.push(0);
        self.tips.insert(id);
        self.unconfirmed.insert(id);

        self.increment_past_cone(id);
        Ok(id)
    }

    fn next_epoch(&mut self) -> u32 {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.marks.iter_mut().for_each(|m| *m = 0);
            self.epoch = 1;
        }
        self.epoch
    }

    fn increment_past_cone(&mut self, id: TransactionId) {
        let epoch = self.next_epoch();
        let mut stack: Vec<TransactionId> = self.transactions[id.index()].parents.clone();
        for p in &stack {
            self.marks[p.index()] = epoch;
        }
        while let Some(current) = stack.pop() {
            self.weights[current.index()] += 1;
            for &parent in &self.transactions[current.index()].parents {
                let mark = &mut self.marks[parent.index()];
                if *mark != epoch {
                    *mark = epoch;
                    stack.push(parent);
                }
            }
        }
    }

    /// Confirms every unconfirmed transaction whose cumulative weight has
    /// reached `threshold`, stamping it with `now`. Returns the newly
    /// confirmed ids in ascending order. A threshold of zero behaves as one.
    pub fn confirmation_sweep(&mut self, threshold: u64, now: SimTime) -> Vec<TransactionId> {
        let newly: Vec<TransactionId> =
            self.unconfirmed.iter().copied().filter(|id| self.weights[id.index()] >= threshold).collect();
        for &id in &newly {
            let tx = &mut self.transactions[id.index()];
            tx.confirmed_at = Some(now.max(tx.issued_at));
            self.unconfirmed.remove(&id);
            self.confirmed.insert(id);
        }
        newly
    }

    /// Every distinct transaction that approves `id` directly or indirectly.
    pub fn future_cone(&self, id: TransactionId) -> Result<BTreeSet<TransactionId>, LedgerError> {
        self.require(id)?;
        Ok(self.walk(id, |t, n| &t.approvers[n.index()]))
    }

    /// Every distinct ancestor of `id`.
    pub fn past_cone(&self, id: TransactionId) -> Result<BTreeSet<TransactionId>, LedgerError> {
        self.require(id)?;
        Ok(self.walk(id, |t, n| &t.transactions[n.index()].parents))
    }

    fn walk<'a, F>(&'a self, start: TransactionId, next: F) -> BTreeSet<TransactionId>
    where
        F: Fn(&'a Tangle, TransactionId) -> &'a [TransactionId],
    {
        let mut seen = BTreeSet::new();
        let mut stack = vec![start];
        while let Some(current) = stack.pop() {
            for &n in next(self, current) {
                if seen.insert(n) {
                    stack.push(n);
                }
            }
        }
        seen
    }

    /// Recomputes the tip and confirmed sets from scratch and compares them
    /// with the maintained ones.
    pub fn verify(&self, threshold: u64) -> Result<(), InvariantViolation> {
        let mut referenced = vec![false; self.transactions.len()];
        for tx in &self.transactions {
            for &p in &tx.parents {
                if p >= tx.id {
                    return Err(InvariantViolation::ParentOrder(tx.id, p));
                }
                referenced[p.index()] = true;
            }
        }
        let recomputed: BTreeSet<TransactionId> =
            self.transactions.iter().filter(|tx| !referenced[tx.id.index()]).map(|tx| tx.id).collect();
        if recomputed != self.tips {
            return Err(InvariantViolation::TipSet);
        }
        for tx in &self.transactions {
            let heavy = self.weights[tx.id.index()] >= threshold;
            let marked = self.confirmed.contains(&tx.id);
            if heavy != marked || marked == self.unconfirmed.contains(&tx.id) || marked != tx.confirmed_at.is_some() {
                return Err(InvariantViolation::Confirmation(tx.id));
            }
            if tx.confirmed_at.is_some_and(|c| c < tx.issued_at) {
                return Err(InvariantViolation::ConfirmedBeforeIssue(tx.id));
            }
        }
        Ok(())
    }

    /// Overwrites a stored weight. Only for exercising oracle failure paths.
    #[doc(hidden)]
    pub fn inject_weight_fault(&mut self, id: TransactionId, weight: u64) {
        if let Some(w) = self.weights.get_mut(id.index()) {
            *w = weight;
        }
    }
}
