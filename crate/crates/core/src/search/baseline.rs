//! Reference searchers: a per-rule scan and a per-subset datacube scan.

use crate::cube::{scan_cube, scan_rule};
use crate::dataset::{Dataset, SumStats};
use crate::error::Result;
use crate::rule::{Literal, Rule};

use super::{for_each_subset, prepare, SearchConfig, SearchResult, SearchStats, TopN};

/// Scores every rule of length `<= k` with its own pass over the rows.
pub fn naive_search(ds: &Dataset, cfg: &SearchConfig) -> Result<SearchResult> {
    let prep = prepare(ds, cfg)?;
    let mut stats = SearchStats { algorithm: "naive".into(), ..Default::default() };
    let mut top = TopN::new(cfg.top_n);
    for q in 0..=cfg.k {
        for_each_subset(&prep.eligible, q, |attrs| {
            let mut values = vec![0u32; q];
            loop {
                let rule = Rule::from_sorted(
                    attrs.iter().zip(&values).map(|(&a, &v)| Literal::new(a, v)).collect(),
                );
                let s = scan_rule(ds, &prep.table, &rule, &prep.rows);
                stats.rules_scored += 1;
                let score = prep.score(s.as_slice());
                top.offer(score, || (rule, s));
                // odometer over value tuples, last attribute fastest
                let mut pos = q;
                loop {
                    if pos == 0 {
                        return;
                    }
                    pos -= 1;
                    values[pos] += 1;
                    if (values[pos] as usize) < ds.arity(attrs[pos]) {
                        break;
                    }
                    values[pos] = 0;
                }
            }
        });
    }
    stats.elapsed_secs = prep.started.elapsed().as_secs_f64();
    Ok(SearchResult { rules: top.into_ranked(), stats })
}

/// Builds one datacube per attribute subset by scanning the rows, then
/// scores every cell.
pub fn nsn_search(ds: &Dataset, cfg: &SearchConfig) -> Result<SearchResult> {
    let prep = prepare(ds, cfg)?;
    let mut stats = SearchStats { algorithm: "nsn".into(), ..Default::default() };
    let mut top = TopN::new(cfg.top_n);
    for q in 0..=cfg.k {
        for_each_subset(&prep.eligible, q, |attrs| {
            let cube = scan_cube(ds, &prep.table, attrs, &prep.rows);
            stats.cubes_evaluated += 1;
            for idx in 0..cube.n_cells() {
                let s = cube.cell(idx);
                stats.rules_scored += 1;
                top.offer(prep.score(s), || (cube.rule_of(idx), SumStats(s.to_vec())));
            }
        });
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
    fn naive_t1_k3() {
        let ds = fixture_t1();
        let cfg = SearchConfig::new(&ds, ScoreFn::MeanTarget, "y", 3, 1).unwrap();
        let res = naive_search(&ds, &cfg).unwrap();
        assert_eq!(res.rules[0].rule.display(&ds).to_string(), "A=1 ∧ B=1 ∧ C=1");
        assert_eq!(res.rules[0].score, 8.0);
        assert_eq!(res.stats.rules_scored, 1 + 6 + 12 + 8);
    }

    #[test]
    fn nsn_counts_cubes() {
        let ds = fixture_t1();
        let cfg = SearchConfig::new(&ds, ScoreFn::MeanTarget, "y", 2, 1).unwrap().with_top_n(50);
        let res = nsn_search(&ds, &cfg).unwrap();
        assert_eq!(res.stats.cubes_evaluated, 1 + 3 + 3);
        assert_eq!(res.rules, naive_search(&ds, &cfg).unwrap().rules);
    }
}
