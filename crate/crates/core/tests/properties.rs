//! Property tests: metric identities, bound soundness on exhaustive subsets,
//! cover anti-monotonicity, and pruned/unpruned search equivalence.

use proptest::prelude::*;

use perfslice::bitset::Bitset;
use perfslice::bounds;
use perfslice::dataset::{
    cover, extract, generate_selectors, Attribute, ColumnData, Dataset, Pattern, SelectorTable,
};
use perfslice::measure;
use perfslice::metrics::{self, LabeledScoreSet};
use perfslice::scoring::ScoringSpec;
use perfslice::search::{mine, SearchConfig};

fn labeled_set(max_len: usize) -> impl Strategy<Value = LabeledScoreSet> {
    // Coarse score grid so ties actually happen.
    prop::collection::vec((any::<bool>(), 0..12i32), 2..max_len).prop_map(|pairs| {
        let labels = pairs.iter().map(|&(y, _)| u8::from(y)).collect();
        let scores = pairs.iter().map(|&(_, s)| s as f64 / 4.0).collect();
        LabeledScoreSet::new(labels, scores).unwrap()
    })
}

// O(P*N) pair-counting oracle with ties worth 1/2, in exact integer halves.
fn pair_count_auc(s: &LabeledScoreSet) -> Option<f64> {
    let pos: Vec<f64> = s
        .labels()
        .iter()
        .zip(s.scores())
        .filter(|(&y, _)| y == 1)
        .map(|(_, &sc)| sc)
        .collect();
    let neg: Vec<f64> = s
        .labels()
        .iter()
        .zip(s.scores())
        .filter(|(&y, _)| y == 0)
        .map(|(_, &sc)| sc)
        .collect();
    if pos.is_empty() || neg.is_empty() {
        return None;
    }
    let mut doubled = 0u128;
    for &p in &pos {
        for &n in &neg {
            if p > n {
                doubled += 2;
            } else if p == n {
                doubled += 1;
            }
        }
    }
    Some(doubled as f64 / (2.0 * pos.len() as f64 * neg.len() as f64))
}

fn subsets_of(s: &LabeledScoreSet) -> Vec<LabeledScoreSet> {
    let n = s.len();
    let mut out = Vec::with_capacity(1 << n);
    for mask in 1u32..(1 << n) {
        let mut labels = Vec::new();
        let mut scores = Vec::new();
        for i in 0..n {
            if mask >> i & 1 == 1 {
                labels.push(s.labels()[i]);
                scores.push(s.scores()[i]);
            }
        }
        out.push(LabeledScoreSet::new(labels, scores).unwrap());
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn roc_auc_equals_pair_counting(s in labeled_set(60)) {
        let trapezoid = metrics::roc_auc(&s).ok();
        let pairs = pair_count_auc(&s);
        match (trapezoid, pairs) {
            (Some(a), Some(b)) => prop_assert_eq!(a, b),
            (None, None) => {}
            other => prop_assert!(false, "disagree on definedness: {:?}", other),
        }
    }

    #[test]
    fn metrics_are_rank_invariant(s in labeled_set(40), shift in -3.0f64..3.0) {
        // Strictly increasing map: scaled exp keeps order and breaks no ties.
        let mapped = LabeledScoreSet::new(
            s.labels().to_vec(),
            s.scores().iter().map(|&x| (x + shift).exp() * 2.0 + 1.0).collect(),
        ).unwrap();
        if let (Ok(a), Ok(b)) = (metrics::roc_auc(&s), metrics::roc_auc(&mapped)) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        if let (Ok(a), Ok(b)) = (metrics::arl(&s), metrics::arl(&mapped)) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        if let (Ok(a), Ok(b)) = (metrics::pr_auc(&s), metrics::pr_auc(&mapped)) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn label_swap_score_negation_duality(s in labeled_set(40)) {
        let swapped = LabeledScoreSet::new(
            s.labels().iter().map(|&y| 1 - y).collect(),
            s.scores().iter().map(|&x| -x).collect(),
        ).unwrap();
        if let (Ok(a), Ok(b)) = (metrics::roc_auc(&s), metrics::roc_auc(&swapped)) {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn metric_ranges(s in labeled_set(40)) {
        if let Ok(v) = metrics::arl(&s) {
            prop_assert!(v >= 0.0 && v <= s.negatives() as f64);
        }
        if let Ok(v) = metrics::roc_auc(&s) {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        if let Ok(v) = metrics::pr_auc(&s) {
            prop_assert!(v > 0.0 && v <= 1.0);
        }
        let cb = metrics::class_balance(&s);
        prop_assert!((0.0..=1.0).contains(&cb));
        // cb is symmetric in (P, N).
        let flipped = LabeledScoreSet::new(
            s.labels().iter().map(|&y| 1 - y).collect(),
            s.scores().to_vec(),
        ).unwrap();
        prop_assert_eq!(cb, metrics::class_balance(&flipped));
    }

    #[test]
    fn arl_roc_link_without_ties(n_pos in 1usize..8, n_neg in 1usize..8, seed in any::<u64>()) {
        // Distinct scores via a seeded permutation of unique values.
        let n = n_pos + n_neg;
        let mut values: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let mut state = seed | 1;
        for i in (1..n).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let j = (state >> 33) as usize % (i + 1);
            values.swap(i, j);
        }
        let labels: Vec<u8> = (0..n).map(|i| u8::from(i < n_pos)).collect();
        let s = LabeledScoreSet::new(labels, values).unwrap();
        let auc = metrics::roc_auc(&s).unwrap();
        let arl = metrics::arl(&s).unwrap();
        prop_assert!((auc - (1.0 - arl / n_neg as f64)).abs() < 1e-12);
    }

    #[test]
    fn lb_roc_auc_matches_literal_case_analysis(s in labeled_set(30)) {
        // The single-pass min/max comparison agrees with a literal pairwise
        // evaluation of the three separation cases.
        if let Ok(fast) = bounds::lb_roc_auc(&s) {
            let pairs = || {
                s.labels().iter().zip(s.scores()).flat_map(|a| {
                    s.labels().iter().zip(s.scores()).map(move |b| (a, b))
                })
            };
            let strict = pairs().all(|((&y, &sc), (&y2, &sc2))| {
                (y >= y2 || sc < sc2) && (y <= y2 || sc > sc2)
            });
            let weak = pairs().all(|((&y, &sc), (&y2, &sc2))| {
                (y >= y2 || sc <= sc2) && (y <= y2 || sc >= sc2)
            });
            let literal = if strict {
                1.0
            } else if weak {
                0.5
            } else {
                0.0
            };
            prop_assert_eq!(fast, literal);
        }
    }

    #[test]
    fn bounds_are_subset_extrema(s in labeled_set(9)) {
        let subsets = subsets_of(&s);
        // ROC AUC minimum.
        if let Ok(lb) = bounds::lb_roc_auc(&s) {
            let min = subsets.iter()
                .filter_map(|c| metrics::roc_auc(c).ok())
                .fold(f64::INFINITY, f64::min);
            prop_assert_eq!(lb, min);
        }
        // PR AUC minimum.
        if let Ok(lb) = bounds::lb_pr_auc(&s) {
            let min = subsets.iter()
                .filter_map(|c| metrics::pr_auc(c).ok())
                .fold(f64::INFINITY, f64::min);
            prop_assert!((lb - min).abs() < 1e-12);
        }
        // ARL maximum.
        if let Ok(mp) = bounds::max_pen(&s) {
            let max = subsets.iter()
                .filter_map(|c| metrics::arl(c).ok())
                .fold(f64::NEG_INFINITY, f64::max);
            prop_assert_eq!(mp, max);
        }
        // Weight maximum for alpha <= beta.
        for (a, b) in [(0.1, 0.1), (0.3, 1.0), (1.0, 1.0)] {
            let ub = bounds::ub_weight(s.positives(), s.negatives(), a, b);
            let max = subsets.iter()
                .map(|c| metrics::weight(c, a, b))
                .fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(ub.tight);
            prop_assert!((ub.value - max).abs() < 1e-9, "ub {} vs max {}", ub.value, max);
        }
    }
}

fn random_dataset(seed: u64, n: usize, n_attrs: usize) -> Dataset {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let attributes = (0..n_attrs)
        .map(|a| {
            let arity = rng.random_range(2..=4usize);
            Attribute {
                name: format!("a{a}"),
                data: ColumnData::Nominal {
                    codes: (0..n)
                        .map(|_| Some(rng.random_range(0..arity) as u32))
                        .collect(),
                    values: (0..arity).map(|v| format!("v{v}")).collect(),
                },
            }
        })
        .collect();
    let labels: Vec<u8> = (0..n).map(|_| u8::from(rng.random_bool(0.4))).collect();
    let scores: Vec<f64> = (0..n)
        .map(|_| rng.random_range(0..40) as f64 / 8.0)
        .collect();
    Dataset::from_parts(attributes, labels, scores, "y", "yhat").unwrap()
}

#[test]
fn cover_anti_monotone_on_random_patterns() {
    for seed in 0..5 {
        let ds = random_dataset(seed, 60, 4);
        let table = SelectorTable::new(&ds, generate_selectors(&ds, 3));
        let ids: Vec<u32> = (0..table.len() as u32).collect();
        for &a in &ids {
            for &b in &ids {
                if a >= b || table.attribute_of(a) == table.attribute_of(b) {
                    continue;
                }
                let gen = Pattern::new(vec![a], &table).unwrap();
                let spec = Pattern::new(vec![a, b], &table).unwrap();
                assert!(cover(&spec, &table).is_subset_of(&cover(&gen, &table)));
            }
        }
    }
}

#[test]
fn pruned_and_unpruned_agree_on_random_datasets() {
    for seed in 0..6 {
        let ds = random_dataset(100 + seed, 120, 5);
        let table = SelectorTable::new(&ds, generate_selectors(&ds, 3));
        for name in measure::names() {
            let m = measure::by_name(name).unwrap();
            for w in [0.0, 0.3] {
                let mut cfg = SearchConfig::new(ScoringSpec::new(m, w, w));
                cfg.top_k = 5;
                cfg.max_depth = 3;
                cfg.min_cover = 5;
                cfg.pruning = true;
                let pruned = mine(&ds, &table, &cfg).unwrap();
                cfg.pruning = false;
                let unpruned = mine(&ds, &table, &cfg).unwrap();
                assert!(
                    pruned.same_entries(&unpruned),
                    "seed {seed} measure {name} weight {w}"
                );
                assert!(pruned.stats.evaluated <= unpruned.stats.evaluated);
            }
        }
    }
}

#[test]
fn min_cover_monotonicity() {
    let ds = random_dataset(7, 150, 4);
    let table = SelectorTable::new(&ds, generate_selectors(&ds, 3));
    let m = measure::by_name("roc_auc").unwrap();
    let mut cfg = SearchConfig::new(ScoringSpec::new(m, 0.0, 0.0));
    // Uncapped: the invariant concerns the eligible pattern set.
    cfg.top_k = usize::MAX / 2;
    cfg.max_depth = 2;
    let mut previous: Option<Vec<Pattern>> = None;
    for min_cover in [5, 15, 40, 80] {
        cfg.min_cover = min_cover;
        let rs = mine(&ds, &table, &cfg).unwrap();
        let patterns: Vec<Pattern> = rs.entries.iter().map(|e| e.pattern.clone()).collect();
        if let Some(prev) = &previous {
            // Raising min_cover never adds a result.
            for p in &patterns {
                assert!(prev.contains(p), "min_cover {min_cover} added {p:?}");
            }
        }
        previous = Some(patterns);
    }
}

#[test]
fn generalization_aware_never_exceeds_estimate_of_parent() {
    // Pruning on the plain weighted estimate stays sound under gen-aware
    // scoring: every specialization's gen-aware score is bounded by the
    // parent's optimistic estimate.
    let ds = random_dataset(42, 100, 4);
    let table = SelectorTable::new(&ds, generate_selectors(&ds, 3));
    let m = measure::by_name("roc_auc").unwrap();
    let spec = ScoringSpec::new(m, 0.3, 0.3).gen_aware(true);
    let full_value = m.evaluate(&ds.full_set()).unwrap();

    let mut cfg = SearchConfig::new(spec);
    cfg.top_k = 1000;
    cfg.max_depth = 3;
    cfg.min_cover = 5;
    let rs = mine(&ds, &table, &cfg).unwrap();

    for entry in &rs.entries {
        let ids = entry.pattern.ids();
        for drop in 0..ids.len() {
            let parent_ids: Vec<u32> = ids
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != drop)
                .map(|(_, &v)| v)
                .collect();
            let parent = Pattern::new(parent_ids, &table).unwrap();
            let set = extract(&cover(&parent, &table), &ds);
            if !m.is_defined(&set) {
                continue;
            }
            let oe = bounds::optimistic_estimate(
                m,
                &set,
                full_value,
                spec.alpha,
                spec.beta,
                spec.direction,
            )
            .unwrap();
            assert!(
                entry.interestingness <= oe + 1e-9,
                "gen-aware {} exceeds parent estimate {}",
                entry.interestingness,
                oe
            );
        }
    }
}

#[test]
fn search_is_deterministic() {
    let ds = random_dataset(3, 200, 5);
    let table = SelectorTable::new(&ds, generate_selectors(&ds, 3));
    let m = measure::by_name("pr_auc").unwrap();
    let mut cfg = SearchConfig::new(ScoringSpec::new(m, 1.0, 1.0).gen_aware(true));
    cfg.top_k = 10;
    cfg.max_depth = 3;
    cfg.min_cover = 10;
    let a = mine(&ds, &table, &cfg).unwrap();
    let b = mine(&ds, &table, &cfg).unwrap();
    assert!(a.same_entries(&b));
    assert_eq!(a.stats.evaluated, b.stats.evaluated);
    assert_eq!(a.stats.pruned, b.stats.pruned);
}

#[test]
fn extract_keeps_instance_order() {
    let ds = random_dataset(9, 30, 3);
    let mut c = Bitset::zeros(30);
    for i in [2, 7, 11, 29] {
        c.set(i);
    }
    let s = extract(&c, &ds);
    let expected_scores: Vec<f64> = [2, 7, 11, 29].iter().map(|&i| ds.scores()[i]).collect();
    assert_eq!(s.scores(), expected_scores.as_slice());
}
