//! Exhaustive search that builds every datacube from a rowtree plus an
//! AD-tree of cached sumstats, visiting attribute subsets by iterative
//! deepening so each pass only queries content cached by earlier passes.

use std::collections::HashMap;

use crate::adtree::ADTree;
use crate::cube::build_dc;
use crate::dataset::SumStats;
use crate::error::{Error, Result};
use crate::rowtree::RowTree;
use crate::rule::Rule;

use super::{bound_prunes, prepare, run_workers, Prepared, SearchConfig, SearchResult, SearchStats, TopN};

type Bounds = HashMap<Vec<usize>, f64>;

/// Everything one pass shares read-only across workers.
struct PassInput<'a> {
    prep: &'a Prepared<'a>,
    cfg: &'a SearchConfig,
    q: usize,
    root: &'a RowTree,
    ad: &'a ADTree,
    bounds: &'a Bounds,
    global: &'a TopN,
}

/// What one worker hands back at the end of a pass.
struct WorkerOutput {
    top: TopN,
    ad: ADTree,
    bounds: Bounds,
    level_ops: Vec<u64>,
    rows_touched: u64,
    cubes: u64,
    rules: u64,
    pruned: u64,
}

pub fn radsearch(ds: &crate::dataset::Dataset, cfg: &SearchConfig) -> Result<SearchResult> {
    radsearch_with_cache(ds, cfg).map(|(res, _)| res)
}

/// [`radsearch`], also returning the AD-tree it grew (every rowtree over at
/// most `k - 1` attributes that the search visited).
pub fn radsearch_with_cache(ds: &crate::dataset::Dataset, cfg: &SearchConfig) -> Result<(SearchResult, ADTree)> {
    let prep = prepare(ds, cfg)?;
    let dim = prep.table.dim();
    let mut stats = SearchStats { algorithm: "rad".into(), ..Default::default() };

    let root = RowTree::root_only(&prep.table, prep.rows.clone());
    stats.rowtrees_built += 1;
    let mut ad = ADTree::new(cfg.k - 1, ds.arities(), dim);
    ad.insert_from_rowtree(&root)?;

    let mut top = TopN::new(cfg.top_n);
    let mut bounds = Bounds::new();
    let global = root.root().sumstats.clone();
    stats.cubes_evaluated += 1;
    stats.rules_scored += 1;
    top.offer(prep.score(global.as_slice()), || (Rule::empty(), global.clone()));
    if cfg.pruning {
        bounds.insert(Vec::new(), cfg.score.optimistic_bound(global.as_slice(), &prep.ctx)?);
    }

    let m = prep.eligible.len();
    for q in 1..=cfg.k {
        let input = PassInput {
            prep: &prep,
            cfg,
            q,
            root: &root,
            ad: &ad,
            bounds: &bounds,
            global: &top,
        };
        // worker i owns the subsets whose first attribute is eligible[i]
        let n_workers = m + 1 - q;
        let outputs = run_workers(cfg.threads, n_workers, |i| run_worker(&input, i))?;
        stats.rowtrees_built += n_workers as u64;

        let mut level_ops = vec![0u64; q];
        let mut fragments = Vec::with_capacity(outputs.len());
        let mut merged = top.clone();
        for out in outputs {
            let out = out?;
            merged.merge(out.top);
            fragments.push(out.ad);
            bounds.extend(out.bounds);
            for (total, n) in level_ops.iter_mut().zip(&out.level_ops) {
                *total += n;
            }
            stats.rowtree_rows_touched += out.rows_touched;
            stats.cubes_evaluated += out.cubes;
            stats.rules_scored += out.rules;
            stats.tables_pruned += out.pruned;
        }
        top = merged;
        for fragment in fragments {
            ad.merge(fragment);
        }
        stats.rowtree_level_ops.push(level_ops);
        if let Some(cap) = cfg.memory_cap {
            let used = ad.memory_estimate();
            if used > cap {
                return Err(Error::MemoryBudget { used, cap, pass: q });
            }
        }
    }

    stats.adtree_nodes_per_depth = ad.node_counts();
    stats.adtree_bytes = ad.memory_estimate();
    stats.elapsed_secs = prep.started.elapsed().as_secs_f64();
    Ok((SearchResult { rules: top.into_ranked(), stats }, ad))
}

fn run_worker(input: &PassInput<'_>, first: usize) -> Result<WorkerOutput> {
    let prep = input.prep;
    let mut w = Worker {
        input,
        rt: input.root.clone(),
        out: WorkerOutput {
            top: input.global.clone(),
            ad: ADTree::new(input.cfg.k - 1, prep.ds.arities(), prep.table.dim()),
            bounds: Bounds::new(),
            level_ops: vec![0; input.q],
            rows_touched: 0,
            cubes: 0,
            rules: 0,
            pruned: 0,
        },
        subset: Vec::with_capacity(input.q),
    };
    w.visit(0, first)?;
    Ok(w.out)
}

struct Worker<'a, 'b> {
    input: &'a PassInput<'b>,
    rt: RowTree,
    out: WorkerOutput,
    subset: Vec<usize>,
}

impl Worker<'_, '_> {
    /// Places eligible[index] at `depth`, then descends over all completions.
    fn visit(&mut self, depth: usize, index: usize) -> Result<()> {
        let input = self.input;
        let prep = input.prep;
        let q = input.q;
        let attribute = prep.eligible[index];
        self.subset.truncate(depth);
        self.subset.push(attribute);
        let leaf = depth + 1 == q;

        if input.cfg.pruning && self.pruned(leaf) {
            self.out.pruned += 1;
            return Ok(());
        }

        self.out.level_ops[depth] += 1;
        self.out.rows_touched += self.rt.set_level(prep.ds, &prep.table, depth, attribute)?;

        if !leaf {
            let m = prep.eligible.len();
            for next in index + 1..=m - (q - depth - 1) {
                self.visit(depth + 1, next)?;
            }
            return Ok(());
        }

        if q < input.cfg.k {
            self.out.ad.insert_from_rowtree(&self.rt)?;
        }
        let cube = build_dc(&self.subset, input.ad, self.rt.root())?;
        self.out.cubes += 1;
        let mut best_bound = f64::NEG_INFINITY;
        for idx in 0..cube.n_cells() {
            let s = cube.cell(idx);
            let score = prep.score(s);
            self.out.rules += 1;
            self.out.top.offer(score, || (cube.rule_of(idx), SumStats(s.to_vec())));
            if input.cfg.pruning {
                best_bound = best_bound.max(input.cfg.score.optimistic_bound(s, &prep.ctx)?);
            }
        }
        if input.cfg.pruning {
            self.out.bounds.insert(self.subset.clone(), best_bound);
        }
        Ok(())
    }

    /// Whether the current subset (a prefix, or a complete table at `leaf`)
    /// can be skipped. Subsets missing from the bounds map were pruned in an
    /// earlier pass, so everything above them is prunable too.
    fn pruned(&self, leaf: bool) -> bool {
        let worst = self.out.top.worst_kept();
        if worst.is_none() {
            return false;
        }
        let bounds = self.input.bounds;
        let bound = if leaf {
            // tightest bound among the tables one attribute smaller
            let mut b = f64::INFINITY;
            let mut smaller = Vec::with_capacity(self.subset.len());
            for skip in 0..self.subset.len() {
                smaller.clear();
                smaller.extend(self.subset.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &a)| a));
                match bounds.get(&smaller) {
                    Some(&x) => b = b.min(x),
                    None => return true,
                }
            }
            b
        } else {
            match bounds.get(&self.subset) {
                Some(&x) => x,
                None => return true,
            }
        };
        bound_prunes(bound, worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::fixture_t1;
    use crate::score::ScoreFn;
    use crate::search::naive_search;

    #[test]
    fn t1_mean_k2() {
        let ds = fixture_t1();
        let cfg = SearchConfig::new(&ds, ScoreFn::MeanTarget, "y", 2, 1).unwrap();
        let res = radsearch(&ds, &cfg).unwrap();
        assert_eq!(res.rules.len(), 1);
        assert_eq!(res.rules[0].rule.display(&ds).to_string(), "A=1 ∧ B=1");
        assert_eq!(res.rules[0].score, 7.5);
        // 1 + 3*2 + 3*4 cells
        assert_eq!(res.stats.rules_scored, 19);
        assert_eq!(res.stats.cubes_evaluated, 7);
    }

    #[test]
    fn t1_mean_k3_and_support_gate() {
        let ds = fixture_t1();
        let cfg = SearchConfig::new(&ds, ScoreFn::MeanTarget, "y", 3, 1).unwrap();
        let res = radsearch(&ds, &cfg).unwrap();
        assert_eq!(res.rules[0].rule.display(&ds).to_string(), "A=1 ∧ B=1 ∧ C=1");
        assert_eq!(res.rules[0].score, 8.0);

        // every literal matches 4 rows; only the empty rule clears support 5
        let cfg = SearchConfig::new(&ds, ScoreFn::MeanTarget, "y", 1, 5).unwrap().with_top_n(10);
        let res = radsearch(&ds, &cfg).unwrap();
        assert_eq!(res.rules.len(), 1);
        assert!(res.rules[0].rule.is_empty());
        assert_eq!(res.rules[0].score, 4.5);
    }

    #[test]
    fn top_n_larger_than_rule_space_returns_everything() {
        let ds = fixture_t1();
        let cfg = SearchConfig::new(&ds, ScoreFn::MeanTarget, "y", 2, 1).unwrap().with_top_n(100);
        let rad = radsearch(&ds, &cfg).unwrap();
        let naive = naive_search(&ds, &cfg).unwrap();
        assert_eq!(rad.rules.len(), 19);
        assert_eq!(rad.rules, naive.rules);
        assert!(rad.rules.windows(2).all(|w| w[0].score >= w[1].score));
    }

    #[test]
    fn level_ops_follow_enumeration_tree() {
        let ds = fixture_t1();
        let cfg = SearchConfig::new(&ds, ScoreFn::MeanTarget, "y", 3, 1).unwrap();
        let res = radsearch(&ds, &cfg).unwrap();
        assert_eq!(res.stats.rowtree_level_ops, vec![vec![3], vec![2, 3], vec![1, 1, 1]]);
    }

    #[test]
    fn memory_cap_aborts() {
        let ds = fixture_t1();
        let mut cfg = SearchConfig::new(&ds, ScoreFn::MeanTarget, "y", 3, 1).unwrap();
        cfg.memory_cap = Some(200);
        assert!(matches!(radsearch(&ds, &cfg), Err(Error::MemoryBudget { .. })));
    }

    #[test]
    fn threads_do_not_change_results() {
        let ds = fixture_t1();
        let cfg = SearchConfig::new(&ds, ScoreFn::MeanTarget, "y", 3, 1).unwrap().with_top_n(7);
        let one = radsearch(&ds, &cfg).unwrap();
        let many = radsearch(&ds, &cfg.clone().with_threads(4)).unwrap();
        assert_eq!(one.rules, many.rules);
        assert_eq!(one.stats.rowtree_level_ops, many.stats.rowtree_level_ops);
    }
}
