//! Stepwise additive regression over rule indicators.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rule::Rule;
use crate::score::ScoreFn;
use crate::search::{Algorithm, SearchConfig};

use super::lsq::least_squares_fit;
use super::{best_rule, training_rows};

/// Name of the scratch target holding current residuals during learning.
const RESIDUAL: &str = "__residual";

/// Search scores at or below this fraction of the total sum of squares are
/// treated as explaining nothing.
const MIN_GAIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdditiveTerm {
    pub rule: Rule,
    pub rule_text: String,
    pub coefficient: f64,
    /// Between-group sum of squares of the rule on the residuals it was
    /// chosen from.
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdditiveRuleModel {
    pub target: String,
    pub intercept: f64,
    pub terms: Vec<AdditiveTerm>,
    /// Training MSE of the intercept-only model, then after each term.
    pub training_mse: Vec<f64>,
    pub stop_reason: String,
}

impl AdditiveRuleModel {
    pub fn predict(&self, ds: &Dataset, row: usize) -> f64 {
        self.intercept
            + self
                .terms
                .iter()
                .filter(|t| t.rule.matches(ds, row))
                .map(|t| t.coefficient)
                .sum::<f64>()
    }

    pub fn render(&self) -> String {
        let mut out = format!("begin with {} = {:.2}\n", self.target, self.intercept);
        for t in &self.terms {
            let (verb, amount) = if t.coefficient < 0.0 { ("subtract", -t.coefficient) } else { ("add", t.coefficient) };
            out += &format!("if {} {verb} {amount:.2}\n", t.rule_text);
        }
        out
    }
}

/// Adds, one at a time, the rule that best separates the current residuals,
/// refitting every coefficient jointly after each addition.
///
/// Stops after `max_terms` terms, when the best rule explains no variance, or
/// when the new indicator is collinear with the existing design.
pub fn learn_radreg(
    ds: &Dataset,
    target: &str,
    base: &SearchConfig,
    searcher: Algorithm,
    max_terms: usize,
) -> Result<AdditiveRuleModel> {
    if max_terms == 0 {
        return Err(Error::Config("max_terms must be at least 1".into()));
    }
    let y = ds
        .target_by_name(target)
        .ok_or_else(|| Error::Config(format!("{target:?} is not a declared numeric target")))?;
    let train = training_rows(ds, base);
    if train.is_empty() {
        return Err(Error::InsufficientRows("no training rows".into()));
    }
    let y_train: Vec<f64> = train.iter().map(|&r| y[r as usize]).collect();
    let n = y_train.len() as f64;
    let mean = y_train.iter().sum::<f64>() / n;
    let sst: f64 = y_train.iter().map(|v| (v - mean) * (v - mean)).sum();

    let mut columns: Vec<Vec<f64>> = vec![vec![1.0; train.len()]];
    let mut coefficients = vec![mean];
    let mut rules: Vec<(Rule, f64)> = Vec::new();
    let mut training_mse = vec![sst / n];
    let mut stop_reason = format!("reached {max_terms} terms");

    while rules.len() < max_terms {
        let residuals = residuals(&train, &y_train, &columns, &coefficients, ds.n_rows());
        let scratch = ds.with_target(RESIDUAL, residuals)?;
        let best = best_rule(&scratch, base, searcher, ScoreFn::BetweenGroupSs, RESIDUAL, &train)?;
        let Some(best) = best.filter(|b| !b.rule.is_empty()) else {
            stop_reason = "no rule meets support".into();
            break;
        };
        if best.score <= MIN_GAIN * sst {
            stop_reason = "best rule explains no remaining variance".into();
            break;
        }
        let indicator: Vec<f64> =
            train.iter().map(|&r| if best.rule.matches(ds, r as usize) { 1.0 } else { 0.0 }).collect();
        columns.push(indicator);
        let fit = least_squares_fit(&columns, &y_train);
        if fit.rank_deficient {
            columns.pop();
            stop_reason = format!("rule {} is collinear with the current terms", best.rule.display(ds));
            break;
        }
        coefficients = fit.coefficients;
        rules.push((best.rule, best.score));
        let sse: f64 = residuals_on(&y_train, &columns, &coefficients).iter().map(|e| e * e).sum();
        training_mse.push(sse / n);
    }

    let terms = rules
        .into_iter()
        .zip(&coefficients[1..])
        .map(|((rule, score), &coefficient)| AdditiveTerm {
            rule_text: rule.display(ds).to_string(),
            rule,
            coefficient,
            score,
        })
        .collect();
    Ok(AdditiveRuleModel {
        target: target.to_string(),
        intercept: coefficients[0],
        terms,
        training_mse,
        stop_reason,
    })
}

fn residuals_on(y: &[f64], columns: &[Vec<f64>], coefficients: &[f64]) -> Vec<f64> {
    (0..y.len())
        .map(|i| y[i] - columns.iter().zip(coefficients).map(|(c, b)| c[i] * b).sum::<f64>())
        .collect()
}

/// Residuals spread back to full dataset length; rows outside `train` get 0.
fn residuals(train: &[u32], y: &[f64], columns: &[Vec<f64>], coefficients: &[f64], n_rows: usize) -> Vec<f64> {
    let mut out = vec![0.0; n_rows];
    for (&r, e) in train.iter().zip(residuals_on(y, columns, coefficients)) {
        out[r as usize] = e;
    }
    out
}
