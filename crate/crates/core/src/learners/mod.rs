//! Learners that call the rule search in a loop.
//!
//! Every learner takes a base [`SearchConfig`] for `k`, `n_support`,
//! threading and excluded attributes; its `in_play_rows` are the training
//! rows. Score, statistics vector and `top_n` are chosen by the learner.

mod kfold;
mod lists;
mod lsq;
mod radreg;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rule::Rule;
use crate::score::ScoreFn;
use crate::search::{run, Algorithm, RankedRule, SearchConfig};

pub use kfold::{kfold_eval, KFoldReport};
pub use lists::{learn_dlist, learn_reglist, DecisionList, DecisionRule, RegressionList, RegressionRule};
pub use lsq::{least_squares_fit, LsFit, RANK_TOLERANCE};
pub use radreg::{learn_radreg, AdditiveRuleModel, AdditiveTerm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Dlist,
    Reglist,
    Radreg { max_terms: usize },
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Dlist => "dlist",
            ModelKind::Reglist => "reglist",
            ModelKind::Radreg { .. } => "radreg",
        }
    }
}

/// Everything needed to train one model: what to fit, on which column
/// (output attribute or target), with which base search settings.
#[derive(Debug, Clone)]
pub struct LearnerSpec {
    pub kind: ModelKind,
    pub subject: String,
    pub base: SearchConfig,
    pub searcher: Algorithm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Model {
    Dlist(DecisionList),
    Reglist(RegressionList),
    Radreg(AdditiveRuleModel),
}

impl Model {
    /// Predicted value for `row`: a class code for decision lists.
    pub fn predict(&self, ds: &Dataset, row: usize) -> f64 {
        match self {
            Model::Dlist(m) => m.predict(ds, row) as f64,
            Model::Reglist(m) => m.predict(ds, row),
            Model::Radreg(m) => m.predict(ds, row),
        }
    }

    /// Misclassification rate for decision lists, mean squared error otherwise.
    pub fn loss(&self, ds: &Dataset, rows: &[u32]) -> f64 {
        if rows.is_empty() {
            return 0.0;
        }
        let total: f64 = match self {
            Model::Dlist(m) => rows
                .iter()
                .filter(|&&r| m.predict(ds, r as usize) != ds.code(r as usize, m.output_attribute))
                .count() as f64,
            Model::Reglist(m) => squared_error(ds, &m.target, rows, |r| m.predict(ds, r)),
            Model::Radreg(m) => squared_error(ds, &m.target, rows, |r| m.predict(ds, r)),
        };
        total / rows.len() as f64
    }

    pub fn render(&self) -> String {
        match self {
            Model::Dlist(m) => m.render(),
            Model::Reglist(m) => m.render(),
            Model::Radreg(m) => m.render(),
        }
    }
}

fn squared_error(ds: &Dataset, target: &str, rows: &[u32], predict: impl Fn(usize) -> f64) -> f64 {
    let y = ds.target_by_name(target).expect("model target exists in its dataset");
    rows.iter()
        .map(|&r| {
            let e = y[r as usize] - predict(r as usize);
            e * e
        })
        .sum()
}

/// Trains the model described by `spec`.
pub fn learn(ds: &Dataset, spec: &LearnerSpec) -> Result<Model> {
    match spec.kind {
        ModelKind::Dlist => learn_dlist(ds, &spec.subject, &spec.base, spec.searcher).map(Model::Dlist),
        ModelKind::Reglist => learn_reglist(ds, &spec.subject, &spec.base, spec.searcher).map(Model::Reglist),
        ModelKind::Radreg { max_terms } => {
            learn_radreg(ds, &spec.subject, &spec.base, spec.searcher, max_terms).map(Model::Radreg)
        }
    }
}

/// Training rows named by the base config, or all rows.
fn training_rows(ds: &Dataset, base: &SearchConfig) -> Vec<u32> {
    base.in_play_rows.clone().unwrap_or_else(|| (0..ds.n_rows() as u32).collect())
}

/// Runs one best-rule search for `score` over `rows`, inheriting the base
/// config's `k`, support, threading and exclusions.
fn best_rule(
    ds: &Dataset,
    base: &SearchConfig,
    searcher: Algorithm,
    score: ScoreFn,
    subject: &str,
    rows: &[u32],
) -> Result<Option<RankedRule>> {
    let mut cfg = SearchConfig::new(ds, score, subject, base.k, base.n_support)?;
    for &a in &base.excluded_attributes {
        cfg = cfg.excluding(a);
    }
    cfg.threads = base.threads;
    cfg.memory_cap = base.memory_cap;
    cfg.pruning = base.pruning && score.has_bound();
    cfg.in_play_rows = Some(rows.to_vec());
    let eligible = ds.n_attributes() - cfg.excluded_attributes.len();
    cfg.k = cfg.k.min(eligible);
    if cfg.k == 0 {
        return Err(Error::Config("no attributes left to build rules from".into()));
    }
    Ok(run(ds, &cfg, searcher)?.rules.into_iter().next())
}

/// Rows of `rows` matched by `rule`, and the rest.
fn split_rows(ds: &Dataset, rule: &Rule, rows: &[u32]) -> (Vec<u32>, Vec<u32>) {
    rows.iter().partition(|&&r| rule.matches(ds, r as usize))
}
