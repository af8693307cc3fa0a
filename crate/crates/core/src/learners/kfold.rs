use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

use super::{learn, training_rows, LearnerSpec, ModelKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KFoldReport {
    pub folds: usize,
    pub seed: u64,
    /// `misclassification` or `mse`.
    pub metric: String,
    pub per_fold: Vec<f64>,
    pub mean: f64,
    pub std_error: f64,
}

/// Cross-validates `spec` over its training rows. Row `i` of a seeded
/// shuffle goes to fold `i % folds`.
pub fn kfold_eval(ds: &Dataset, spec: &LearnerSpec, folds: usize, seed: u64) -> Result<KFoldReport> {
    let mut rows = training_rows(ds, &spec.base);
    if folds < 2 {
        return Err(Error::Config("cross-validation needs at least 2 folds".into()));
    }
    if folds > rows.len() {
        return Err(Error::InsufficientRows(format!(
            "{folds} folds over {} rows; use fewer folds",
            rows.len()
        )));
    }
    let smallest = rows.len() / folds;
    if smallest < spec.base.n_support {
        return Err(Error::InsufficientRows(format!(
            "folds of {smallest} rows are smaller than the support threshold {}; use fewer folds",
            spec.base.n_support
        )));
    }
    rows.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut per_fold = Vec::with_capacity(folds);
    for f in 0..folds {
        let (mut test, mut train) = (Vec::new(), Vec::new());
        for (i, &r) in rows.iter().enumerate() {
            if i % folds == f { test.push(r) } else { train.push(r) }
        }
        test.sort_unstable();
        train.sort_unstable();
        let mut fold_spec = spec.clone();
        fold_spec.base.in_play_rows = Some(train);
        let model = learn(ds, &fold_spec)?;
        per_fold.push(model.loss(ds, &test));
    }

    let n = folds as f64;
    let mean = per_fold.iter().sum::<f64>() / n;
    let var = per_fold.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / (n - 1.0);
    let metric = match spec.kind {
        ModelKind::Dlist => "misclassification",
        _ => "mse",
    };
    Ok(KFoldReport { folds, seed, metric: metric.into(), per_fold, mean, std_error: (var / n).sqrt() })
}
