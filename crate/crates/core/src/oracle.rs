// SPDX-License-Identifier: Apache-2.0

//! Brute-force reference computations and the checks behind `self-check`.
//!
//! Nothing here touches the ledger's maintained approver lists or weights:
//! reverse edges are rebuilt from parent lists and every count comes from a
//! fresh traversal.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ledger::{Tangle, TransactionId, MAX_PARENTS};
use crate::selection::{select_ptsa, Branch, SelectionCandidates, SelectionError};
use crate::time::SimTime;

/// Cumulative weight of every transaction by reverse breadth-first search,
/// indexed by id.
pub fn brute_force_weights(tangle: &Tangle) -> Vec<u64> {
    let n = tangle.len();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for tx in tangle.transactions() {
        for p in &tx.parents {
            children[p.get() as usize].push(tx.id.get() as usize);
        }
    }
    let mut seen = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    (0..n)
        .map(|start| {
            let mut count = 1u64;
            seen[start] = start;
            queue.push_back(start);
            while let Some(node) = queue.pop_front() {
                for &child in &children[node] {
                    if seen[child] != start {
                        seen[child] = start;
                        count += 1;
                        queue.push_back(child);
                    }
                }
            }
            count
        })
        .collect()
}

/// Builds a random DAG of `size` transactions (genesis included). Each new
/// transaction approves 1 to 8 uniformly chosen earlier transactions, with
/// repeats allowed.
pub fn random_dag<R: Rng + ?Sized>(rng: &mut R, size: usize) -> Tangle {
    let mut tangle = Tangle::new();
    for i in 1..size {
        let arity = rng.random_range(1..=MAX_PARENTS);
        let parents: Vec<TransactionId> =
            (0..arity).map(|_| TransactionId::new(rng.random_range(0..i as u64))).collect();
        tangle
            .add_transaction(&parents, SimTime::from_micros(i as u64), false)
            .expect("parents drawn from existing ids");
    }
    tangle
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightMismatch {
    pub id: TransactionId,
    pub maintained: u64,
    pub brute_force: u64,
}

pub fn check_weights(tangle: &Tangle) -> Result<(), WeightMismatch> {
    let expected = brute_force_weights(tangle);
    for tx in tangle.transactions() {
        let maintained = tangle.cumulative_weight(tx.id).expect("stored id");
        let brute_force = expected[tx.id.get() as usize];
        if maintained != brute_force {
            return Err(WeightMismatch { id: tx.id, maintained, brute_force });
        }
    }
    Ok(())
}

/// The parent edges of a ledger, one `child -> parent` pair per line.
pub struct EdgeList<'a>(pub &'a Tangle);

impl fmt::Display for EdgeList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "nodes {}", self.0.len())?;
        for tx in self.0.transactions() {
            for p in &tx.parents {
                writeln!(f, "{} -> {}", tx.id, p)?;
            }
        }
        Ok(())
    }
}

/// Corruption applied to each DAG before checking. Used to exercise the
/// failure path of the self-check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    None,
    BumpGenesisWeight,
}

impl Fault {
    fn apply(self, tangle: &mut Tangle) {
        if let Fault::BumpGenesisWeight = self {
            let g = tangle.genesis();
            let w = tangle.cumulative_weight(g).expect("genesis");
            tangle.inject_weight_fault(g, w + 1);
        }
    }
}

/// A failed weight check, shrunk to the shortest failing insertion prefix.
#[derive(Debug, Clone)]
pub struct WeightCounterexample {
    pub trial: usize,
    pub mismatch: WeightMismatch,
    pub dag: Tangle,
}

/// Checks maintained weights against brute force over `trials` seeded random
/// DAGs of at most `max_size` transactions.
pub fn weight_self_check(
    seed: u64,
    trials: usize,
    max_size: usize,
    fault: Fault,
) -> Result<usize, Box<WeightCounterexample>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        let size = rng.random_range(1..=max_size);
        let dag_seed: u64 = rng.random();
        let build = |n: usize| {
            let mut t = random_dag(&mut ChaCha8Rng::seed_from_u64(dag_seed), n);
            fault.apply(&mut t);
            t
        };
        if check_weights(&build(size)).is_err() {
            let (dag, mismatch) = (1..=size)
                .find_map(|n| {
                    let dag = build(n);
                    check_weights(&dag).err().map(|m| (dag, m))
                })
                .expect("the full DAG fails");
            return Err(Box::new(WeightCounterexample { trial, mismatch, dag }));
        }
    }
    Ok(trials)
}

/// Pool sizes exercised by the exhaustive branch table.
pub const PRIORITY_COUNTS: [usize; 4] = [0, 1, 2, 5];
pub const COMMON_COUNTS: [usize; 4] = [0, 1, 2, 10];

const PRIORITY_BASE: u64 = 100;
const COMMON_BASE: u64 = 200;
const FALLBACK_BASE: u64 = 300;

/// One cell of the branch table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchCase {
    pub priority: usize,
    pub common: usize,
    pub expected: Result<(Branch, usize), SelectionError>,
    pub observed: Result<(Branch, usize), SelectionError>,
    pub problem: Option<String>,
}

impl BranchCase {
    pub fn passed(&self) -> bool {
        self.problem.is_none()
    }
}

/// Synthetic candidates with `p` priority and `c` common ids plus two
/// padding non-tips.
pub fn table_candidates(p: usize, c: usize) -> SelectionCandidates {
    let ids = |base: u64, n: usize| (0..n as u64).map(|i| TransactionId::new(base + i)).collect();
    let common: Vec<TransactionId> = ids(COMMON_BASE, c);
    SelectionCandidates {
        priority: ids(PRIORITY_BASE, p),
        tips: common.clone(),
        common,
        fallback: ids(FALLBACK_BASE, 2),
        as_of: SimTime::ZERO,
    }
}

/// The branch and arity each cell must produce.
pub fn expected_outcome(p: usize, c: usize) -> Result<(Branch, usize), SelectionError> {
    match (p, c) {
        (0, 0) => Err(SelectionError::EmptyCandidates),
        (0, _) => Ok((Branch::NoPriority, 2)),
        (1, _) => Ok((Branch::OnePriority, 2)),
        (_, 0) => Ok((Branch::ManyPriority, 2)),
        _ => Ok((Branch::ManyPriority, 3)),
    }
}

fn classify(id: TransactionId) -> usize {
    match id.get() {
        x if x >= FALLBACK_BASE => 2,
        x if x >= COMMON_BASE => 1,
        _ => 0,
    }
}

/// Runs every cell of the table under several seeds.
pub fn branch_table(seeds: std::ops::Range<u64>) -> Vec<BranchCase> {
    let mut cases = Vec::new();
    for &p in &PRIORITY_COUNTS {
        for &c in &COMMON_COUNTS {
            let candidates = table_candidates(p, c);
            let expected = expected_outcome(p, c);
            let mut observed = expected;
            let mut problem = None;
            for seed in seeds.clone() {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let result = select_ptsa(&candidates, &mut rng);
                observed = result.as_ref().map(|r| (r.branch, r.parents.len())).map_err(|e| *e);
                if observed != expected {
                    problem = Some(format!("seed {seed}: expected {expected:?}, got {observed:?}"));
                    break;
                }
                let Ok(result) = result else { continue };
                if let Some(msg) = composition_problem(p, c, &result.parents) {
                    problem = Some(format!("seed {seed}: {msg}"));
                    break;
                }
            }
            cases.push(BranchCase { priority: p, common: c, expected, observed, problem });
        }
    }
    cases
}

fn composition_problem(p: usize, c: usize, parents: &[TransactionId]) -> Option<String> {
    let mut by_class = [0usize; 3];
    for (i, id) in parents.iter().enumerate() {
        if parents[..i].contains(id) {
            return Some(format!("parent {id} repeated"));
        }
        by_class[classify(*id)] += 1;
    }
    let want_priority = p.min(2);
    let want_common = if p == 0 { c.min(2) } else { c.min(1) };
    if by_class[0] != want_priority {
        return Some(format!("{} priority parents, want {want_priority}", by_class[0]));
    }
    if by_class[1] != want_common {
        return Some(format!("{} common parents, want {want_common}", by_class[1]));
    }
    None
}
