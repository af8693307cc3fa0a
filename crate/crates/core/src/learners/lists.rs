//! Decision lists and regression lists: find a rule, predict for its rows,
//! drop them, repeat.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rule::Rule;
use crate::score::ScoreFn;
use crate::search::{Algorithm, SearchConfig};

use super::{best_rule, split_rows, training_rows};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionRule {
    pub rule: Rule,
    pub rule_text: String,
    pub class: u32,
    pub label: String,
    /// Class counts among the rows the rule took.
    pub distribution: Vec<f64>,
    /// Search score of the rule when it was chosen.
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionList {
    pub output_attribute: usize,
    pub output_name: String,
    pub rules: Vec<DecisionRule>,
    pub default_class: u32,
    pub default_label: String,
}

impl DecisionList {
    pub fn predict(&self, ds: &Dataset, row: usize) -> u32 {
        self.rules
            .iter()
            .find(|r| r.rule.matches(ds, row))
            .map_or(self.default_class, |r| r.class)
    }

    /// Index of the entry that claims `row`, `None` for the default.
    pub fn entry_for(&self, ds: &Dataset, row: usize) -> Option<usize> {
        self.rules.iter().position(|r| r.rule.matches(ds, row))
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, r) in self.rules.iter().enumerate() {
            let lead = if i == 0 { "if" } else { "else if" };
            out += &format!("{lead} {} then predict {}={}\n", r.rule_text, self.output_name, r.label);
        }
        let lead = if self.rules.is_empty() { "predict" } else { "else predict" };
        out += &format!("{lead} {}={}\n", self.output_name, self.default_label);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionRule {
    pub rule: Rule,
    pub rule_text: String,
    pub prediction: f64,
    pub matched: usize,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionList {
    pub target: String,
    pub rules: Vec<RegressionRule>,
    pub default_value: f64,
}

impl RegressionList {
    pub fn predict(&self, ds: &Dataset, row: usize) -> f64 {
        self.rules
            .iter()
            .find(|r| r.rule.matches(ds, row))
            .map_or(self.default_value, |r| r.prediction)
    }

    pub fn entry_for(&self, ds: &Dataset, row: usize) -> Option<usize> {
        self.rules.iter().position(|r| r.rule.matches(ds, row))
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, r) in self.rules.iter().enumerate() {
            let lead = if i == 0 { "if" } else { "else if" };
            out += &format!("{lead} {} then predict {}={:.2}\n", r.rule_text, self.target, r.prediction);
        }
        let lead = if self.rules.is_empty() { "predict" } else { "else predict" };
        out += &format!("{lead} {}={:.2}\n", self.target, self.default_value);
        out
    }
}

/// Most common class among `rows` (lowest code on ties); `None` if empty.
fn majority(ds: &Dataset, attribute: usize, rows: &[u32]) -> Option<u32> {
    if rows.is_empty() {
        return None;
    }
    let mut counts = vec![0usize; ds.arity(attribute)];
    for &r in rows {
        counts[ds.code(r as usize, attribute) as usize] += 1;
    }
    let mut best = 0;
    for (v, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = v;
        }
    }
    Some(best as u32)
}

/// Learns a decision list predicting `output` by repeatedly taking the
/// lowest-entropy rule over the rows not yet claimed.
///
/// Stops when fewer than `n_support` rows remain, no rule meets support, or
/// the best rule is the empty one (which would only restate the default).
pub fn learn_dlist(ds: &Dataset, output: &str, base: &SearchConfig, searcher: Algorithm) -> Result<DecisionList> {
    let out_attr = ds
        .attribute_index(output)
        .ok_or_else(|| Error::Config(format!("output attribute {output:?} is not a categorical column")))?;
    let train = training_rows(ds, base);
    let global_default = majority(ds, out_attr, &train).unwrap_or(0);
    let mut remaining = train;
    let mut rules = Vec::new();

    if ds.arity(out_attr) > 1 {
        while !remaining.is_empty() && remaining.len() >= base.n_support {
            let Some(best) = best_rule(ds, base, searcher, ScoreFn::NegEntropy, output, &remaining)? else {
                break;
            };
            if best.rule.is_empty() {
                break;
            }
            let (matched, rest) = split_rows(ds, &best.rule, &remaining);
            let class = majority(ds, out_attr, &matched).expect("a supported rule matches rows");
            rules.push(DecisionRule {
                rule_text: best.rule.display(ds).to_string(),
                rule: best.rule,
                class,
                label: ds.level(out_attr, class).to_string(),
                distribution: best.sumstats.0,
                score: best.score,
            });
            remaining = rest;
        }
    }

    let default_class = majority(ds, out_attr, &remaining).unwrap_or(global_default);
    Ok(DecisionList {
        output_attribute: out_attr,
        output_name: output.to_string(),
        rules,
        default_class,
        default_label: ds.level(out_attr, default_class).to_string(),
    })
}

/// Learns a regression list for `target` by repeatedly taking the rule with
/// the highest mean over the rows not yet claimed. Stops as [`learn_dlist`].
pub fn learn_reglist(ds: &Dataset, target: &str, base: &SearchConfig, searcher: Algorithm) -> Result<RegressionList> {
    let y = ds
        .target_by_name(target)
        .ok_or_else(|| Error::Config(format!("{target:?} is not a declared numeric target")))?;
    let mean = |rows: &[u32]| rows.iter().map(|&r| y[r as usize]).sum::<f64>() / rows.len() as f64;
    let train = training_rows(ds, base);
    let global_mean = if train.is_empty() { 0.0 } else { mean(&train) };
    let mut remaining = train;
    let mut rules = Vec::new();

    while !remaining.is_empty() && remaining.len() >= base.n_support {
        let Some(best) = best_rule(ds, base, searcher, ScoreFn::MeanTarget, target, &remaining)? else {
            break;
        };
        if best.rule.is_empty() {
            break;
        }
        let (matched, rest) = split_rows(ds, &best.rule, &remaining);
        rules.push(RegressionRule {
            rule_text: best.rule.display(ds).to_string(),
            rule: best.rule,
            prediction: best.score,
            matched: matched.len(),
            score: best.score,
        });
        remaining = rest;
    }

    let default_value = if remaining.is_empty() { global_mean } else { mean(&remaining) };
    Ok(RegressionList { target: target.to_string(), rules, default_value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::fixture_t1;

    fn base(ds: &Dataset, k: usize, support: usize) -> SearchConfig {
        SearchConfig::new(ds, ScoreFn::MeanTarget, "y", k, support).unwrap()
    }

    #[test]
    fn reglist_t1_first_rule() {
        let ds = fixture_t1();
        let list = learn_reglist(&ds, "y", &base(&ds, 2, 2), Algorithm::Rad).unwrap();
        assert_eq!(list.rules[0].rule_text, "A=1 ∧ B=1");
        assert_eq!(list.rules[0].prediction, 7.5);
        assert!(list.render().starts_with("if A=1 ∧ B=1 then predict y=7.50\n"));
    }

    #[test]
    fn dlist_pure_rule_then_default() {
        // class copies A; B is noise
        let a = vec![0, 0, 0, 0, 1, 1, 1, 1];
        let b = vec![0, 1, 0, 1, 0, 1, 0, 1];
        let ds = Dataset::from_codes(&["A", "B", "cls"], &[2, 2, 2], vec![a.clone(), b, a], vec![]).unwrap();
        let cfg = SearchConfig::new(&ds, ScoreFn::NegEntropy, "cls", 2, 1).unwrap();
        let list = learn_dlist(&ds, "cls", &cfg, Algorithm::Rad).unwrap();
        assert_eq!(list.rules.len(), 1);
        assert_eq!(list.rules[0].rule_text, "A=0");
        assert_eq!(list.default_label, "1");
        assert!((0..8).all(|r| list.predict(&ds, r) == ds.code(r, 2)));
    }

    #[test]
    fn dlist_too_few_rows_gives_default_only() {
        let ds = fixture_t1();
        let cfg = SearchConfig::new(&ds, ScoreFn::NegEntropy, "C", 1, 9).unwrap();
        let list = learn_dlist(&ds, "C", &cfg, Algorithm::Rad).unwrap();
        assert!(list.rules.is_empty());
        assert_eq!(list.default_class, 0);
    }

    #[test]
    fn constant_target_predicts_constant() {
        let ds = fixture_t1().with_target("y", vec![3.0; 8]).unwrap();
        let list = learn_reglist(&ds, "y", &base(&ds, 2, 1), Algorithm::Rad).unwrap();
        assert!((0..8).all(|r| list.predict(&ds, r) == 3.0));
    }
}
