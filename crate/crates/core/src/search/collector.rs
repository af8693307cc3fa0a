use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::dataset::SumStats;
use crate::rule::Rule;

use super::RankedRule;

/// Orders entries best first: higher score, then shorter rule, then smaller
/// literal list.
#[derive(Debug, Clone)]
struct RankKey {
    score: f64,
    rule: Rule,
}

impl PartialEq for RankKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for RankKey {}

impl PartialOrd for RankKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RankKey {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .score
            .total_cmp(&self.score)
            .then_with(|| self.rule.cmp(&other.rule))
    }
}

/// Returns true if `(score, rule)` ranks strictly ahead of `(other_score, other)`.
pub fn ranks_ahead(score: f64, rule: &Rule, other_score: f64, other: &Rule) -> bool {
    match score.total_cmp(&other_score) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => rule < other,
    }
}

/// Bounded best-first store of scored rules. `-inf` and NaN never enter.
#[derive(Debug, Clone)]
pub struct TopN {
    capacity: usize,
    entries: BTreeMap<RankKey, SumStats>,
}

impl TopN {
    pub fn new(capacity: usize) -> Self {
        TopN { capacity: capacity.max(1), entries: BTreeMap::new() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.entries.len() >= self.capacity
    }

    /// Score of the weakest kept rule, once the store is full.
    pub fn worst_kept(&self) -> Option<f64> {
        if self.is_full() {
            self.entries.last_key_value().map(|(k, _)| k.score)
        } else {
            None
        }
    }

    /// Offers a candidate; `make` is only called if the candidate may enter.
    #[inline]
    pub fn offer(&mut self, score: f64, make: impl FnOnce() -> (Rule, SumStats)) -> bool {
        if score.is_nan() || score == f64::NEG_INFINITY {
            return false;
        }
        if let Some(w) = self.worst_kept() {
            if score < w {
                return false;
            }
        }
        let (rule, stats) = make();
        self.insert(score, rule, stats)
    }

    fn insert(&mut self, score: f64, rule: Rule, stats: SumStats) -> bool {
        let key = RankKey { score, rule };
        if self.is_full() {
            let (worst, _) = self.entries.last_key_value().expect("full store is nonempty");
            if key >= *worst {
                return false;
            }
        }
        if self.entries.insert(key, stats).is_some() {
            return true;
        }
        if self.entries.len() > self.capacity {
            self.entries.pop_last();
        }
        true
    }

    pub fn merge(&mut self, other: TopN) {
        for (k, s) in other.entries {
            self.offer(k.score, || (k.rule, s));
        }
    }

    pub fn into_ranked(self) -> Vec<RankedRule> {
        self.entries
            .into_iter()
            .map(|(k, sumstats)| RankedRule { rule: k.rule, score: k.score, sumstats })
            .collect()
    }
}
