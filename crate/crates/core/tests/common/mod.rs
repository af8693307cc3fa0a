#![allow(dead_code)]

use radsearch::{Dataset, ScoreFn, SearchConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random dataset: `m` attributes with arities in {2,3,4} (the last one is
/// used as the class for class scores) and an integer target `y` in 0..10,
/// so every sum is exact.
pub fn random_dataset(rng: &mut ChaCha8Rng, rows: usize, m: usize) -> Dataset {
    let arities: Vec<usize> = (0..m).map(|_| rng.random_range(2..=4)).collect();
    let columns: Vec<Vec<u32>> = arities
        .iter()
        .map(|&a| {
            // skewed level frequencies make MCVs and elision interesting
            let skew: f64 = rng.random_range(0.0..0.8);
            (0..rows)
                .map(|_| if rng.random_bool(skew) { 0 } else { rng.random_range(0..a as u32) })
                .collect()
        })
        .collect();
    let y: Vec<f64> = (0..rows)
        .map(|r| {
            let bump = if columns[0][r] == 1 && columns[1][r] == 1 { 5.0 } else { 0.0 };
            bump + rng.random_range(0..10) as f64
        })
        .collect();
    let names: Vec<String> = (0..m).map(|i| format!("a{i}")).collect();
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    Dataset::from_codes(&names, &arities, columns, vec![("y", y)]).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Config for `score` with the class attribute (last) when it needs one.
pub fn config(ds: &Dataset, score: ScoreFn, k: usize, support: usize) -> SearchConfig {
    let subject = if score.uses_output_attribute() {
        ds.attribute_name(ds.n_attributes() - 1).to_string()
    } else {
        "y".to_string()
    };
    let max_k = if score.uses_output_attribute() { ds.n_attributes() - 1 } else { ds.n_attributes() };
    SearchConfig::new(ds, score, &subject, k.min(max_k), support).unwrap()
}

/// `(score, rule)` pairs for comparing ranked lists.
pub fn ranked(res: &radsearch::SearchResult) -> Vec<(f64, radsearch::Rule)> {
    res.rules.iter().map(|r| (r.score, r.rule.clone())).collect()
}
