//! Seeded synthetic datasets with controllable compressibility.
//!
//! Attributes are named `x0, x1, ...` with levels `"0"`, `"1"`, ...; every
//! dataset carries a small-integer target `y` so that sums are exact.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Correlated attributes: `x0` is drawn fresh; `x{i}` copies `x{i-1}` with
/// probability `1 - lambda` and is otherwise drawn fresh. A fresh draw is 0
/// with probability `1 - lambda` and a uniform nonzero level otherwise.
///
/// `y` is twice the number of nonzero values among the first three
/// attributes plus uniform noise in `0..10`.
pub fn correlated(rows: usize, attributes: usize, arity: usize, lambda: f64, seed: u64) -> Result<Dataset> {
    check(attributes, arity, lambda)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut columns = vec![Vec::with_capacity(rows); attributes];
    for _ in 0..rows {
        let mut prev = fresh(&mut rng, arity, lambda);
        columns[0].push(prev);
        for col in columns.iter_mut().skip(1) {
            if !rng.random_bool(1.0 - lambda) {
                prev = fresh(&mut rng, arity, lambda);
            }
            col.push(prev);
        }
    }
    build(columns, arity, &mut rng)
}

/// Independent binary attributes, each 1 with probability `p`.
pub fn iid_bernoulli(rows: usize, attributes: usize, p: f64, seed: u64) -> Result<Dataset> {
    check(attributes, 2, p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let columns = (0..attributes)
        .map(|_| (0..rows).map(|_| rng.random_bool(p) as u32).collect())
        .collect();
    build(columns, 2, &mut rng)
}

fn check(attributes: usize, arity: usize, p: f64) -> Result<()> {
    if attributes == 0 || arity < 2 {
        return Err(Error::Config("need at least one attribute of arity at least 2".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Config(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

fn fresh(rng: &mut ChaCha8Rng, arity: usize, lambda: f64) -> u32 {
    if rng.random_bool(lambda) {
        rng.random_range(1..arity as u32)
    } else {
        0
    }
}

fn build(columns: Vec<Vec<u32>>, arity: usize, rng: &mut ChaCha8Rng) -> Result<Dataset> {
    let m = columns.len();
    let rows = columns[0].len();
    let y = (0..rows)
        .map(|r| {
            let signal = columns.iter().take(3).filter(|c| c[r] != 0).count() as f64;
            2.0 * signal + rng.random_range(0..10) as f64
        })
        .collect();
    let names: Vec<String> = (0..m).map(|i| format!("x{i}")).collect();
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    Dataset::from_codes(&names, &vec![arity; m], columns, vec![("y", y)])
}
