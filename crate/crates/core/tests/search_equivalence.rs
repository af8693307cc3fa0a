mod common;

use common::{config, random_dataset, ranked, rng};
use radsearch::cube::{build_dc, scan_cube, scan_rule};
use radsearch::rowtree::RowTree;
use radsearch::search::{hill_climb, naive_search, nsn_search, radsearch, radsearch_with_cache};
use radsearch::{ScoreFn, StatTable};
use rand::Rng;

fn binomial(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1))
}

#[test]
fn rad_nsn_naive_agree_on_random_data() {
    let mut r = rng(11);
    for case in 0..60 {
        let rows = r.random_range(20..200);
        let m = r.random_range(3..=6);
        let ds = random_dataset(&mut r, rows, m);
        let score = ScoreFn::ALL[case % ScoreFn::ALL.len()];
        let k = r.random_range(1..=3);
        let support = if case % 2 == 0 { 1 } else { rows.div_ceil(10) };
        let cfg = config(&ds, score, k, support).with_top_n(10);
        let rad = radsearch(&ds, &cfg).unwrap();
        let nsn = nsn_search(&ds, &cfg).unwrap();
        let naive = naive_search(&ds, &cfg).unwrap();
        assert_eq!(ranked(&rad), ranked(&naive), "case {case} score {score:?}");
        assert_eq!(ranked(&nsn), ranked(&naive), "case {case} score {score:?}");
        let table = StatTable::new(&ds, &cfg.spec);
        let all: Vec<u32> = (0..rows as u32).collect();
        for entry in &rad.rules {
            assert_eq!(entry.sumstats, scan_rule(&ds, &table, &entry.rule, &all));
        }
    }
}

#[test]
fn top_n_beyond_rule_space_returns_all_supported_rules() {
    let mut r = rng(5);
    let ds = random_dataset(&mut r, 60, 3);
    let cfg = config(&ds, ScoreFn::MeanTarget, 2, 1).with_top_n(10_000);
    let rad = radsearch(&ds, &cfg).unwrap();
    let supported = naive_search(&ds, &cfg).unwrap().rules.len();
    assert_eq!(rad.rules.len(), supported);
    let mut rules: Vec<_> = rad.rules.iter().map(|e| e.rule.clone()).collect();
    rules.sort();
    rules.dedup();
    assert_eq!(rules.len(), supported);
}

#[test]
fn statistics_audit_enumeration() {
    let mut r = rng(21);
    for _ in 0..10 {
        let m = r.random_range(3..=6);
        let ds = random_dataset(&mut r, 80, m);
        let k = r.random_range(1..=3.min(m));
        let cfg = config(&ds, ScoreFn::MeanTarget, k, 1);
        let rad = radsearch(&ds, &cfg).unwrap();
        let nsn = nsn_search(&ds, &cfg).unwrap();

        // every cell of every cube is scored
        let mut cells = 0u64;
        let attrs: Vec<usize> = (0..m).collect();
        for q in 0..=k {
            radsearch_subsets(&attrs, q, &mut |s| cells += s.iter().map(|&a| ds.arity(a) as u64).product::<u64>());
        }
        assert_eq!(rad.stats.rules_scored, cells);
        assert_eq!(nsn.stats.rules_scored, cells);
        let cubes: u64 = (0..=k).map(|q| binomial(m, q)).sum();
        assert_eq!(nsn.stats.cubes_evaluated, cubes);
        assert_eq!(rad.stats.cubes_evaluated, cubes);

        // rowtree level d is reset once per enumeration-tree edge at depth d:
        // the number of d+1 prefixes that extend to some q-subset
        for q in 1..=k {
            let ops = &rad.stats.rowtree_level_ops[q - 1];
            for (d, &n) in ops.iter().enumerate() {
                let mut edges = 0u64;
                radsearch_subsets(&attrs[..m - (q - d - 1)], d + 1, &mut |_| edges += 1);
                assert_eq!(n, edges, "pass {q} level {d}");
            }
        }
    }
}

fn radsearch_subsets(items: &[usize], q: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(items: &[usize], start: usize, q: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == q {
            f(cur);
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, i + 1, q, cur, f);
            cur.pop();
        }
    }
    rec(items, 0, q, &mut Vec::new(), f);
}

#[test]
fn cached_cubes_match_direct_scans() {
    let mut r = rng(33);
    for _ in 0..15 {
        let m = r.random_range(3..=6);
        let rows = r.random_range(20..300);
        let ds = random_dataset(&mut r, rows, m);
        let k = 3;
        let cfg = config(&ds, ScoreFn::NegVariance, k, 1);
        let (_, ad) = radsearch_with_cache(&ds, &cfg).unwrap();
        let table = StatTable::new(&ds, &cfg.spec);
        let all: Vec<u32> = (0..rows as u32).collect();
        assert!(ad.closure_error(&ds, &table, &all) <= 1e-9);
        let attrs: Vec<usize> = (0..m).collect();
        for q in 0..=k {
            radsearch_subsets(&attrs, q, &mut |s| {
                let rt = RowTree::build(&ds, &table, s, all.clone()).unwrap();
                let built = build_dc(s, &ad, rt.root()).unwrap();
                let scanned = scan_cube(&ds, &table, s, &all);
                assert!(built.max_abs_diff(&scanned) <= 1e-9, "subset {s:?}");
            });
        }
    }
}

#[test]
fn hill_climb_never_beats_exhaustive_search() {
    let mut r = rng(44);
    for case in 0..40 {
        let m = r.random_range(3..=6);
        let rows = r.random_range(20..200);
        let ds = random_dataset(&mut r, rows, m);
        let score = ScoreFn::ALL[case % ScoreFn::ALL.len()];
        let cfg = config(&ds, score, r.random_range(1..=3), 1);
        let hill = hill_climb(&ds, &cfg).unwrap();
        let rad = radsearch(&ds, &cfg).unwrap();
        assert!(hill.best_score() <= rad.best_score());
    }
}

#[test]
fn pruning_preserves_results() {
    let mut r = rng(55);
    for case in 0..40 {
        let m = r.random_range(3..=6);
        let rows = r.random_range(20..300);
        let ds = random_dataset(&mut r, rows, m);
        let score = if case % 2 == 0 { ScoreFn::Strength } else { ScoreFn::Impact };
        let support = [1, rows / 10, rows / 4][case % 3].max(1);
        let cfg = config(&ds, score, r.random_range(1..=3), support).with_top_n(1 + case % 5);
        let plain = radsearch(&ds, &cfg).unwrap();
        let pruned = radsearch(&ds, &cfg.clone().with_pruning(true)).unwrap();
        assert_eq!(ranked(&plain), ranked(&pruned), "case {case}");
    }
}

#[test]
fn best_score_monotone_in_k_and_support() {
    let mut r = rng(66);
    for case in 0..20 {
        let ds = random_dataset(&mut r, 150, 5);
        let score = ScoreFn::ALL[case % ScoreFn::ALL.len()];
        let best = |k, s| radsearch(&ds, &config(&ds, score, k, s)).unwrap().best_score();
        assert!(best(1, 1) <= best(2, 1) && best(2, 1) <= best(3, 1));
        assert!(best(2, 1) >= best(2, 15) && best(2, 15) >= best(2, 40));
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let mut r = rng(77);
    let ds = random_dataset(&mut r, 300, 6);
    let cfg = config(&ds, ScoreFn::MeanTarget, 3, 3).with_top_n(10);
    let one = radsearch(&ds, &cfg).unwrap();
    let four = radsearch(&ds, &cfg.clone().with_threads(4)).unwrap();
    assert_eq!(one.rules, four.rules);
    assert_eq!(one.stats.rowtree_level_ops, four.stats.rowtree_level_ops);
    assert_eq!(one.stats.adtree_nodes_per_depth, four.stats.adtree_nodes_per_depth);
}
