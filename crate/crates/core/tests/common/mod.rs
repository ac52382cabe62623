// SPDX-License-Identifier: Apache-2.0

//! Test-only reference computations over parent lists, by bitset closure.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tangle_sim::{SimTime, Tangle, TransactionId};

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn union(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }
    fn count(&self) -> u64 {
        self.0.iter().map(|w| u64::from(w.count_ones())).sum()
    }
}

fn parents_of(tangle: &Tangle) -> Vec<Vec<usize>> {
    tangle.transactions().iter().map(|tx| tx.parents.iter().map(|p| p.get() as usize).collect()).collect()
}

/// `1 + |future cone|` for every transaction.
pub fn reference_weights(tangle: &Tangle) -> Vec<u64> {
    let parents = parents_of(tangle);
    let n = parents.len();
    let mut children = vec![Vec::new(); n];
    for (child, ps) in parents.iter().enumerate() {
        for &p in ps {
            children[p].push(child);
        }
    }
    let mut below: Vec<Bits> = vec![Bits::new(n); n];
    for t in (0..n).rev() {
        let mut acc = Bits::new(n);
        for &c in &children[t] {
            acc.set(c);
            acc.union(&below[c]);
        }
        below[t] = acc;
    }
    below.iter().map(|b| 1 + b.count()).collect()
}

/// `|past cone|` for every transaction.
pub fn reference_past_sizes(tangle: &Tangle) -> Vec<u64> {
    let parents = parents_of(tangle);
    let n = parents.len();
    let mut above: Vec<Bits> = Vec::with_capacity(n);
    for ps in &parents {
        let mut acc = Bits::new(n);
        for &p in ps {
            acc.set(p);
            acc.union(&above[p]);
        }
        above.push(acc);
    }
    above.iter().map(Bits::count).collect()
}

pub fn reference_tips(tangle: &Tangle) -> BTreeSet<TransactionId> {
    let referenced: BTreeSet<TransactionId> =
        tangle.transactions().iter().flat_map(|tx| tx.parents.iter().copied()).collect();
    tangle.transactions().iter().map(|tx| tx.id).filter(|id| !referenced.contains(id)).collect()
}

/// Each new transaction approves 1..=8 earlier ones drawn with replacement.
pub fn seeded_dag(seed: u64, size: usize) -> Tangle {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tangle = Tangle::new();
    for i in 1..size as u64 {
        let k = rng.random_range(1..=8);
        let parents: Vec<TransactionId> = (0..k).map(|_| TransactionId::new(rng.random_range(0..i))).collect();
        tangle.add_transaction(&parents, SimTime::from_micros(i), false).unwrap();
    }
    tangle
}

/// Every ledger-level invariant, checked against the reference computations.
pub fn ledger_invariant_problems(tangle: &Tangle, theta: u64) -> Vec<String> {
    let mut problems = Vec::new();
    if &reference_tips(tangle) != tangle.tips() {
        problems.push("tip set differs from recomputation".to_owned());
    }
    let weights = reference_weights(tangle);
    for tx in tangle.transactions() {
        let w = tangle.cumulative_weight(tx.id).unwrap();
        if w != weights[tx.id.get() as usize] {
            problems.push(format!("weight of {} is {w}, reference {}", tx.id, weights[tx.id.get() as usize]));
        }
        if (w >= theta) != tangle.is_confirmed(tx.id) {
            problems.push(format!("confirmation of {} disagrees with weight {w}", tx.id));
        }
    }
    let total_weight: u64 =
        (0..tangle.len() as u64).map(|i| tangle.cumulative_weight(TransactionId::new(i)).unwrap()).sum();
    let total_past: u64 = reference_past_sizes(tangle).iter().map(|s| 1 + s).sum();
    if total_weight != total_past {
        problems.push(format!("sum of weights {total_weight} != sum of (1 + past cone) {total_past}"));
    }
    problems
}
