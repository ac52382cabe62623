// SPDX-License-Identifier: Apache-2.0

mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tangle_sim::metrics::{self, StrategyStats};
use tangle_sim::{
    run_simulation, select_ptsa, select_uniform, SelectionCandidates, SimConfig, SimTime, Strategy, Tangle,
    TransactionId,
};

/// Parent choices as raw fractions; resolved against the ledger size at insertion.
fn dag_plan() -> impl proptest::strategy::Strategy<Value = Vec<Vec<u16>>> {
    prop::collection::vec(prop::collection::vec(any::<u16>(), 1..=8), 0..120)
}

fn build(plan: &[Vec<u16>], mut each: impl FnMut(&Tangle)) -> Tangle {
    let mut tangle = Tangle::new();
    for (i, picks) in plan.iter().enumerate() {
        let existing = tangle.len() as u64;
        let parents: Vec<TransactionId> = picks.iter().map(|&r| TransactionId::new(u64::from(r) % existing)).collect();
        tangle.add_transaction(&parents, SimTime::from_micros(i as u64), false).unwrap();
        each(&tangle);
    }
    tangle
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weights_match_reference_closure(plan in dag_plan()) {
        let tangle = build(&plan, |_| {});
        let reference = common::reference_weights(&tangle);
        for tx in tangle.transactions() {
            prop_assert_eq!(tangle.cumulative_weight(tx.id).unwrap(), reference[tx.id.get() as usize]);
        }
    }

    #[test]
    fn tip_set_and_tip_weight(plan in dag_plan()) {
        build(&plan, |tangle| {
            assert_eq!(&common::reference_tips(tangle), tangle.tips());
            for tip in tangle.tips() {
                assert_eq!(tangle.cumulative_weight(*tip).unwrap(), 1);
                assert!(tangle.future_cone(*tip).unwrap().is_empty());
            }
        });
    }

    #[test]
    fn weights_never_decrease_and_confirmations_only_grow(plan in dag_plan(), theta in 1u64..12) {
        let mut previous: Vec<u64> = vec![1];
        let mut confirmed: BTreeSet<TransactionId> = BTreeSet::new();
        let mut tangle = Tangle::new();
        for (i, picks) in plan.iter().enumerate() {
            let existing = tangle.len() as u64;
            let parents: Vec<TransactionId> =
                picks.iter().map(|&r| TransactionId::new(u64::from(r) % existing)).collect();
            let now = SimTime::from_micros(i as u64);
            tangle.add_transaction(&parents, now, false).unwrap();
            tangle.confirmation_sweep(theta, now);
            for (j, before) in previous.iter().enumerate() {
                prop_assert!(tangle.cumulative_weight(TransactionId::new(j as u64)).unwrap() >= *before);
            }
            prop_assert!(tangle.confirmed().is_superset(&confirmed));
            previous = (0..tangle.len() as u64).map(|j| tangle.cumulative_weight(TransactionId::new(j)).unwrap()).collect();
            confirmed = tangle.confirmed().clone();
            prop_assert!(tangle.verify(theta).is_ok());
        }
    }

    #[test]
    fn conservation_and_topological_order(plan in dag_plan()) {
        let tangle = build(&plan, |_| {});
        let total: u64 = (0..tangle.len() as u64).map(|i| tangle.cumulative_weight(TransactionId::new(i)).unwrap()).sum();
        let past: u64 = tangle.transactions().iter().map(|tx| 1 + tangle.past_cone(tx.id).unwrap().len() as u64).sum();
        prop_assert_eq!(total, past);
        for tx in tangle.transactions() {
            prop_assert!(tx.parents.iter().all(|p| *p < tx.id));
            if !tx.is_genesis() {
                prop_assert!(tangle.past_cone(tx.id).unwrap().contains(&tangle.genesis()));
            }
        }
    }

    #[test]
    fn ptsa_result_shape(p in 0usize..7, c in 0usize..12, fallback in 0usize..3, seed in any::<u64>()) {
        let ids = |base: u64, n: usize| -> Vec<TransactionId> { (0..n as u64).map(|i| TransactionId::new(base + i)).collect() };
        let candidates = SelectionCandidates {
            priority: ids(100, p),
            common: ids(200, c),
            tips: ids(200, c),
            fallback: ids(300, fallback),
            as_of: SimTime::ZERO,
        };
        let first = select_ptsa(&candidates, &mut ChaCha8Rng::seed_from_u64(seed));
        let again = select_ptsa(&candidates, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(&first, &again);
        let Ok(result) = first else {
            prop_assert!(p == 0 && c == 0);
            return Ok(());
        };
        let parents = &result.parents;
        let distinct: BTreeSet<_> = parents.iter().collect();
        prop_assert_eq!(distinct.len(), parents.len());
        prop_assert!(parents.len() <= 3);
        let priority = parents.iter().filter(|id| (100..200).contains(&id.get())).count();
        let commons = parents.iter().filter(|id| (200..300).contains(&id.get())).count();
        prop_assert_eq!(priority, p.min(2));
        if p >= 1 && c >= 1 {
            prop_assert_eq!(commons, 1);
        }
        if p + c + fallback >= 2 {
            prop_assert!(parents.len() >= 2);
        }
    }

    #[test]
    fn csv_round_trip_preserves_stats(seed in 0u64..1000, theta in 1u64..10) {
        let config = SimConfig { horizon_seconds: 20.0, rho: 0.2, theta, seed, ..SimConfig::default() };
        let trace = run_simulation(&config).unwrap();
        let mut bytes = Vec::new();
        metrics::export_csv(&trace, &mut bytes).unwrap();
        let parsed = metrics::parse_csv(bytes.as_slice()).unwrap();
        prop_assert_eq!(parsed.len(), trace.records.len());
        for (a, b) in parsed.iter().zip(&trace.records) {
            prop_assert_eq!((a.id, a.class, a.issued_at, a.confirmed_at, &a.parents), (b.id, b.class, b.issued_at, b.confirmed_at, &b.parents));
        }
        prop_assert_eq!(StrategyStats::of(&parsed), StrategyStats::of(&trace.records));
    }
}

#[test]
fn uniform_pairs_are_uniform() {
    const DRAWS: usize = 10_000;
    for k in [3usize, 5, 8] {
        let tips: Vec<TransactionId> = (1..=k as u64).map(TransactionId::new).collect();
        let candidates = SelectionCandidates { common: tips.clone(), tips, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
        for strategy in [Strategy::Uniform, Strategy::Ptsa] {
            let mut counts: BTreeMap<(TransactionId, TransactionId), usize> = BTreeMap::new();
            for _ in 0..DRAWS {
                let parents = strategy.select(&candidates, &mut rng).unwrap().parents;
                let (a, b) = (parents[0].min(parents[1]), parents[0].max(parents[1]));
                *counts.entry((a, b)).or_default() += 1;
            }
            let pairs = k * (k - 1) / 2;
            assert_eq!(counts.len(), pairs);
            let p = 1.0 / pairs as f64;
            let mean = DRAWS as f64 * p;
            let sigma = (DRAWS as f64 * p * (1.0 - p)).sqrt();
            for (pair, n) in counts {
                assert!((n as f64 - mean).abs() <= 5.0 * sigma, "{strategy} k={k} {pair:?}: {n} vs {mean}");
            }
        }
    }
}

#[test]
fn uniform_sampling_ignores_class() {
    let tips: Vec<TransactionId> = (1..=4).map(TransactionId::new).collect();
    let candidates = SelectionCandidates {
        priority: vec![TransactionId::new(1)],
        common: tips[1..].to_vec(),
        tips,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let with_first = (0..4000)
        .filter(|_| select_uniform(&candidates, &mut rng).unwrap().parents.contains(&TransactionId::new(1)))
        .count();
    // P(tip 1 chosen) = 1/2 under uniform pairs from 4 tips.
    assert!((with_first as f64 / 4000.0 - 0.5).abs() < 0.05, "{with_first}");
}
