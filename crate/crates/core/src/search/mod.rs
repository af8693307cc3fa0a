//! Rule search drivers.
//!
//! All searchers share one result contract: a ranked list of at most `top_n`
//! rules of length `<= k` (the empty rule included), best first, ordered by
//! score and then by [`Rule`]'s ordering on ties.

mod baseline;
mod collector;
mod hill;
mod rad;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, StatTable, StatVecSpec, SumStats};
use crate::error::{Error, Result};
use crate::rule::Rule;
use crate::score::{ScoreContext, ScoreFn};

pub use baseline::{naive_search, nsn_search};
pub use collector::{ranks_ahead, TopN};
pub use hill::hill_climb;
pub use rad::{radsearch, radsearch_with_cache};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Rad,
    Nsn,
    Naive,
    Hill,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Rad => "rad",
            Algorithm::Nsn => "nsn",
            Algorithm::Naive => "naive",
            Algorithm::Hill => "hill",
        }
    }

    pub fn from_name(name: &str) -> Option<Algorithm> {
        [Algorithm::Rad, Algorithm::Nsn, Algorithm::Naive, Algorithm::Hill]
            .into_iter()
            .find(|a| a.name() == name)
    }

    /// True for the searchers guaranteed to return the optimum.
    pub fn is_exhaustive(self) -> bool {
        !matches!(self, Algorithm::Hill)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Maximum rule length, at least 1.
    pub k: usize,
    pub n_support: usize,
    pub score: ScoreFn,
    pub spec: StatVecSpec,
    pub top_n: usize,
    pub excluded_attributes: Vec<usize>,
    /// Table-level pruning; only legal for scores with an optimistic bound.
    pub pruning: bool,
    /// Rows to search over, sorted; `None` means every row.
    pub in_play_rows: Option<Vec<u32>>,
    /// Worker threads; 0 uses every available core.
    pub threads: usize,
    /// Cap on AD-tree and cube memory, in bytes.
    pub memory_cap: Option<usize>,
}

impl SearchConfig {
    /// A config for `score` over `subject` (a target, or the output attribute
    /// for class scores, which is then excluded from rules).
    pub fn new(ds: &Dataset, score: ScoreFn, subject: &str, k: usize, n_support: usize) -> Result<Self> {
        let spec = score.spec_for(ds, subject)?;
        let excluded_attributes = if score.uses_output_attribute() {
            vec![ds.attribute_index(subject).expect("spec construction checked the name")]
        } else {
            Vec::new()
        };
        Ok(SearchConfig {
            k,
            n_support,
            score,
            spec,
            top_n: 1,
            excluded_attributes,
            pruning: false,
            in_play_rows: None,
            threads: 1,
            memory_cap: None,
        })
    }

    pub fn with_top_n(mut self, top_n: usize) -> Self {
        self.top_n = top_n;
        self
    }

    pub fn with_pruning(mut self, pruning: bool) -> Self {
        self.pruning = pruning;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn with_rows(mut self, rows: Vec<u32>) -> Self {
        self.in_play_rows = Some(rows);
        self
    }

    pub fn excluding(mut self, attribute: usize) -> Self {
        if !self.excluded_attributes.contains(&attribute) {
            self.excluded_attributes.push(attribute);
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedRule {
    pub rule: Rule,
    pub sumstats: SumStats,
    pub score: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub algorithm: String,
    pub cubes_evaluated: u64,
    pub rules_scored: u64,
    pub tables_pruned: u64,
    /// Rowtrees allocated from scratch (one per worker per pass).
    pub rowtrees_built: u64,
    /// `[pass q - 1][depth]`: number of times a rowtree level was (re)set.
    pub rowtree_level_ops: Vec<Vec<u64>>,
    pub rowtree_rows_touched: u64,
    pub adtree_nodes_per_depth: Vec<usize>,
    pub adtree_bytes: usize,
    pub elapsed_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub rules: Vec<RankedRule>,
    pub stats: SearchStats,
}

impl SearchResult {
    pub fn best(&self) -> Option<&RankedRule> {
        self.rules.first()
    }

    pub fn best_score(&self) -> f64 {
        self.best().map_or(f64::NEG_INFINITY, |r| r.score)
    }
}

/// Runs the selected searcher.
pub fn run(ds: &Dataset, cfg: &SearchConfig, algorithm: Algorithm) -> Result<SearchResult> {
    match algorithm {
        Algorithm::Rad => radsearch(ds, cfg),
        Algorithm::Nsn => nsn_search(ds, cfg),
        Algorithm::Naive => naive_search(ds, cfg),
        Algorithm::Hill => hill_climb(ds, cfg),
    }
}

/// Table-level pruning test: true only when the store is full
/// (`worst_kept` is `Some`) and the optimistic bound of `parent_stats` falls
/// strictly below the weakest kept score.
pub fn prune_check(cfg: &SearchConfig, ctx: &ScoreContext, parent_stats: &[f64], worst_kept: Option<f64>) -> Result<bool> {
    if !cfg.pruning {
        return Ok(false);
    }
    let bound = cfg.score.optimistic_bound(parent_stats, ctx)?;
    Ok(bound_prunes(bound, worst_kept))
}

#[inline]
pub(crate) fn bound_prunes(bound: f64, worst_kept: Option<f64>) -> bool {
    worst_kept.is_some_and(|w| bound < w)
}

/// Validated inputs shared by every searcher.
pub(crate) struct Prepared<'a> {
    pub ds: &'a Dataset,
    pub table: StatTable,
    pub rows: Vec<u32>,
    pub eligible: Vec<usize>,
    pub ctx: ScoreContext,
    pub score: ScoreFn,
    pub started: Instant,
}

impl Prepared<'_> {
    #[inline]
    pub fn score(&self, s: &[f64]) -> f64 {
        self.score.score(s, &self.ctx)
    }
}

pub(crate) fn prepare<'a>(ds: &'a Dataset, cfg: &SearchConfig) -> Result<Prepared<'a>> {
    let started = Instant::now();
    if cfg.k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    if cfg.top_n == 0 {
        return Err(Error::Config("top_n must be at least 1".into()));
    }
    cfg.score.check_spec(&cfg.spec)?;
    if cfg.pruning && !cfg.score.has_bound() {
        return Err(Error::Config(format!(
            "pruning needs an optimistic bound, which score {:?} lacks",
            cfg.score.name()
        )));
    }
    if let Some(&bad) = cfg.excluded_attributes.iter().find(|&&a| a >= ds.n_attributes()) {
        return Err(Error::Config(format!("excluded attribute {bad} out of range")));
    }
    let eligible: Vec<usize> = (0..ds.n_attributes())
        .filter(|a| !cfg.excluded_attributes.contains(a))
        .collect();
    if cfg.k > eligible.len() {
        return Err(Error::Config(format!(
            "k = {} exceeds the {} eligible attributes",
            cfg.k,
            eligible.len()
        )));
    }
    let rows = match &cfg.in_play_rows {
        Some(rows) => {
            if rows.windows(2).any(|w| w[0] >= w[1]) || rows.last().is_some_and(|&r| r as usize >= ds.n_rows()) {
                return Err(Error::Config("in-play rows must be sorted, distinct, and in range".into()));
            }
            rows.clone()
        }
        None => (0..ds.n_rows() as u32).collect(),
    };
    if rows.is_empty() || rows.len() < cfg.n_support {
        return Err(Error::InsufficientRows(format!(
            "{} in-play rows, support threshold {}",
            rows.len(),
            cfg.n_support
        )));
    }
    let table = StatTable::new(ds, &cfg.spec);
    let global = table.sum(&rows);
    let max_target = if cfg.score.uses_output_attribute() {
        0.0
    } else {
        rows.iter()
            .map(|&r| table.row(r as usize)[1])
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let ctx = ScoreContext::new(cfg.score, global, cfg.n_support, max_target);
    if let Some(cap) = cfg.memory_cap {
        let widest = eligible.iter().map(|&a| ds.arity(a)).max().unwrap_or(1);
        let cube_bytes = widest.saturating_pow(cfg.k as u32).saturating_mul(table.dim() * 8);
        if cube_bytes > cap {
            return Err(Error::MemoryBudget { used: cube_bytes, cap, pass: 0 });
        }
    }
    Ok(Prepared { ds, table, rows, eligible, ctx, score: cfg.score, started })
}

/// Calls `f` on every `q`-subset of `items` in lexicographic order.
pub(crate) fn for_each_subset(items: &[usize], q: usize, mut f: impl FnMut(&[usize])) {
    fn rec(items: &[usize], start: usize, q: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == q {
            f(cur);
            return;
        }
        let need = q - cur.len();
        for i in start..=items.len().saturating_sub(need) {
            if items.len() < need {
                break;
            }
            cur.push(items[i]);
            rec(items, i + 1, q, cur, f);
            cur.pop();
        }
    }
    let mut cur = Vec::with_capacity(q);
    rec(items, 0, q, &mut cur, &mut f);
}

/// Runs `f(i)` for `i in 0..n` on up to `threads` workers, results in order.
pub(crate) fn run_workers<T: Send>(threads: usize, n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Result<Vec<T>> {
    if threads == 1 || n <= 1 {
        return Ok((0..n).map(f).collect());
    }
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(|| (0..n).into_par_iter().map(f).collect()))
}
