mod common;

use common::{random_dataset, rng};
use radsearch::learners::{kfold_eval, learn_dlist, learn_radreg, learn_reglist, LearnerSpec, ModelKind};
use radsearch::search::{hill_climb, radsearch};
use radsearch::{Algorithm, Dataset, ScoreFn, SearchConfig};
use rand::Rng;

fn xor_dataset(rows: usize, noise_attrs: usize, seed: u64) -> Dataset {
    let mut r = rng(seed);
    let mut cols: Vec<Vec<u32>> = (0..2 + noise_attrs).map(|_| (0..rows).map(|_| r.random_range(0..2)).collect()).collect();
    let class: Vec<u32> = (0..rows).map(|i| cols[0][i] ^ cols[1][i]).collect();
    cols.push(class);
    let mut names: Vec<String> = (0..2 + noise_attrs).map(|i| format!("x{i}")).collect();
    names.push("cls".into());
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    let arities = vec![2; cols.len()];
    Dataset::from_codes(&names, &arities, cols, vec![]).unwrap()
}

#[test]
fn dlist_fits_xor_with_disjoint_entries() {
    let ds = xor_dataset(400, 3, 1);
    let cfg = SearchConfig::new(&ds, ScoreFn::NegEntropy, "cls", 2, 5).unwrap();
    let list = learn_dlist(&ds, "cls", &cfg, Algorithm::Rad).unwrap();
    let out = ds.attribute_index("cls").unwrap();
    assert!((0..ds.n_rows()).all(|r| list.predict(&ds, r) == ds.code(r, out)));
    // each entry claims exactly the rows its rule matched at learn time
    let mut claimed = vec![0.0; list.rules.len()];
    for r in 0..ds.n_rows() {
        if let Some(i) = list.entry_for(&ds, r) {
            claimed[i] += 1.0;
        }
    }
    for (entry, n) in list.rules.iter().zip(claimed) {
        assert_eq!(entry.distribution.iter().sum::<f64>(), n);
    }
}

#[test]
fn dlist_entries_never_worse_than_remaining_entropy() {
    let mut r = rng(8);
    let ds = random_dataset(&mut r, 300, 5);
    let cfg = SearchConfig::new(&ds, ScoreFn::NegEntropy, "a4", 2, 10).unwrap();
    let list = learn_dlist(&ds, "a4", &cfg, Algorithm::Rad).unwrap();
    let mut remaining: Vec<u32> = (0..300).collect();
    for entry in &list.rules {
        let base = cfg.clone().with_rows(remaining.clone());
        let empty_score = radsearch(&ds, &SearchConfig { k: 1, ..base.clone() }).unwrap();
        let whole = empty_score.rules.iter().find(|e| e.rule.is_empty()).map_or(f64::NEG_INFINITY, |e| e.score);
        assert!(entry.score >= whole);
        // hill-climbing on the same rows never finds a better rule
        let hill = hill_climb(&ds, &base).unwrap();
        assert!(hill.best_score() <= entry.score);
        remaining.retain(|&x| !entry.rule.matches(&ds, x as usize));
    }
}

#[test]
fn reglist_means_dominate_what_remains() {
    let mut r = rng(9);
    let ds = random_dataset(&mut r, 300, 5);
    let cfg = SearchConfig::new(&ds, ScoreFn::MeanTarget, "y", 2, 15).unwrap();
    let list = learn_reglist(&ds, "y", &cfg, Algorithm::Rad).unwrap();
    assert!(!list.rules.is_empty());
    let y = ds.target_by_name("y").unwrap();
    let mut remaining: Vec<u32> = (0..300).collect();
    for entry in &list.rules {
        remaining.retain(|&x| !entry.rule.matches(&ds, x as usize));
        if !remaining.is_empty() {
            let rest = remaining.iter().map(|&x| y[x as usize]).sum::<f64>() / remaining.len() as f64;
            assert!(entry.prediction >= rest);
        }
    }
    let hill = learn_reglist(&ds, "y", &cfg, Algorithm::Hill).unwrap();
    assert!(hill.rules[0].score <= list.rules[0].score);
}

#[test]
fn radreg_exact_single_term_and_monotone_mse() {
    let mut r = rng(10);
    let a: Vec<u32> = (0..200).map(|_| r.random_range(0..2)).collect();
    let b: Vec<u32> = (0..200).map(|_| r.random_range(0..3)).collect();
    let y: Vec<f64> = a.iter().map(|&v| 1.25 + 4.5 * (v == 1) as u8 as f64).collect();
    let ds = Dataset::from_codes(&["A", "B"], &[2, 3], vec![a, b], vec![("y", y)]).unwrap();
    let cfg = SearchConfig::new(&ds, ScoreFn::MeanTarget, "y", 2, 1).unwrap();
    let m = learn_radreg(&ds, "y", &cfg, Algorithm::Rad, 3).unwrap();
    assert_eq!(m.terms.len(), 1);
    for row in 0..200 {
        assert!((m.predict(&ds, row) - ds.target(0)[row]).abs() < 1e-9);
    }

    let mut r = rng(12);
    let ds = random_dataset(&mut r, 400, 6);
    let m = learn_radreg(&ds, "y", &SearchConfig::new(&ds, ScoreFn::MeanTarget, "y", 2, 5).unwrap(), Algorithm::Rad, 5)
        .unwrap();
    assert!(m.training_mse.windows(2).all(|w| w[1] <= w[0] + 1e-12));
}

#[test]
fn kfold_majority_error_matches_expectation() {
    // a class independent of every attribute with support too high for any
    // rule: the list is just the majority default
    let mut r = rng(13);
    let rows = 1000;
    let noise: Vec<u32> = (0..rows).map(|_| r.random_range(0..2)).collect();
    let cls: Vec<u32> = (0..rows).map(|_| r.random_bool(0.3) as u32).collect();
    let ds = Dataset::from_codes(&["n", "cls"], &[2, 2], vec![noise, cls.clone()], vec![]).unwrap();
    let base = SearchConfig::new(&ds, ScoreFn::NegEntropy, "cls", 1, 90).unwrap();
    let spec = LearnerSpec { kind: ModelKind::Dlist, subject: "cls".into(), base, searcher: Algorithm::Rad };
    let report = kfold_eval(&ds, &spec, 10, 4).unwrap();
    let minority = cls.iter().filter(|&&c| c == 1).count() as f64 / rows as f64;
    assert!((report.mean - minority).abs() <= 3.0 * report.std_error.max(0.01), "{report:?}");
    assert_eq!(report, kfold_eval(&ds, &spec, 10, 4).unwrap());
}
