//! Greedy literal-at-a-time search.

use crate::cube::scan_cube;
use crate::dataset::{Dataset, SumStats};
use crate::error::Result;
use crate::rule::{Literal, Rule};

use super::{prepare, ranks_ahead, SearchConfig, SearchResult, SearchStats, TopN};

/// Starts from the best single literal and keeps adding the best one-literal
/// extension until the rule reaches length `k` or stops improving. Every rule
/// on the trajectory competes for the result.
pub fn hill_climb(ds: &Dataset, cfg: &SearchConfig) -> Result<SearchResult> {
    let prep = prepare(ds, cfg)?;
    let mut stats = SearchStats { algorithm: "hill".into(), ..Default::default() };
    let mut top = TopN::new(cfg.top_n);

    let mut current = Rule::empty();
    let mut current_score = f64::NEG_INFINITY;
    let mut matched = prep.rows.clone();
    while current.len() < cfg.k {
        let mut best: Option<(f64, Rule, SumStats)> = None;
        for &a in &prep.eligible {
            if current.contains_attribute(a) {
                continue;
            }
            let cube = scan_cube(ds, &prep.table, &[a], &matched);
            stats.cubes_evaluated += 1;
            for v in 0..cube.n_cells() {
                let s = cube.cell(v);
                let score = prep.score(s);
                stats.rules_scored += 1;
                if score == f64::NEG_INFINITY || score.is_nan() {
                    continue;
                }
                let rule = current.extended(Literal::new(a, v as u32))?;
                if best.as_ref().is_none_or(|(bs, br, _)| ranks_ahead(score, &rule, *bs, br)) {
                    best = Some((score, rule, SumStats(s.to_vec())));
                }
            }
        }
        let Some((score, rule, s)) = best else { break };
        if !current.is_empty() && score <= current_score {
            break;
        }
        let last = *rule.literals().iter().find(|l| !current.contains_attribute(l.attribute)).expect("one new literal");
        matched.retain(|&r| ds.code(r as usize, last.attribute) == last.value);
        top.offer(score, || (rule.clone(), s));
        current = rule;
        current_score = score;
    }
    stats.elapsed_secs = prep.started.elapsed().as_secs_f64();
    Ok(SearchResult { rules: top.into_ranked(), stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::fixture_t1;
    use crate::score::ScoreFn;

    #[test]
    fn t1_greedy_trace() {
        let ds = fixture_t1();
        let cfg = SearchConfig::new(&ds, ScoreFn::MeanTarget, "y", 2, 1).unwrap().with_top_n(5);
        let res = hill_climb(&ds, &cfg).unwrap();
        let got: Vec<(String, f64)> =
            res.rules.iter().map(|r| (r.rule.display(&ds).to_string(), r.score)).collect();
        assert_eq!(got, vec![("A=1 ∧ B=1".to_string(), 7.5), ("A=1".to_string(), 6.5)]);
    }

    #[test]
    fn nothing_meets_support() {
        let ds = fixture_t1();
        let cfg = SearchConfig::new(&ds, ScoreFn::MeanTarget, "y", 2, 5).unwrap();
        assert!(hill_climb(&ds, &cfg).unwrap().rules.is_empty());
    }
}
