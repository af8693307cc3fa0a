//! Rowtrees: a per-attribute-list index of matching rows in which every split
//! drops the child for the most common value (MCV).
//!
//! MCVs are conditional (computed over each node's own rows) and ties go to
//! the lowest value code. Children with no rows are omitted.

use crate::dataset::{Dataset, StatTable, SumStats};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RowTreeNode {
    pub depth: usize,
    /// Sorted row indices matching this node's rule.
    pub rows: Vec<u32>,
    pub sumstats: SumStats,
    pub split: Option<Split>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub attribute: usize,
    pub mcv: u32,
    /// Non-MCV children with at least one row, sorted by value code.
    pub children: Vec<(u32, RowTreeNode)>,
}

impl RowTreeNode {
    fn leaf(depth: usize, rows: Vec<u32>, table: &StatTable) -> Self {
        let sumstats = table.sum(&rows);
        RowTreeNode { depth, rows, sumstats, split: None }
    }

    pub fn child(&self, value: u32) -> Option<&RowTreeNode> {
        let split = self.split.as_ref()?;
        split
            .children
            .binary_search_by_key(&value, |(v, _)| *v)
            .ok()
            .map(|i| &split.children[i].1)
    }

    /// Replaces this node's split (and everything below it). Returns the
    /// number of row indices touched.
    fn resplit(&mut self, ds: &Dataset, table: &StatTable, attribute: usize) -> u64 {
        let column = ds.column(attribute);
        let mut counts = vec![0usize; ds.arity(attribute)];
        for &r in &self.rows {
            counts[column[r as usize] as usize] += 1;
        }
        let mut mcv = 0usize;
        for (v, &c) in counts.iter().enumerate() {
            if c > counts[mcv] {
                mcv = v;
            }
        }
        let mut buckets: Vec<Vec<u32>> = counts
            .iter()
            .enumerate()
            .map(|(v, &c)| if v == mcv { Vec::new() } else { Vec::with_capacity(c) })
            .collect();
        for &r in &self.rows {
            let v = column[r as usize] as usize;
            if v != mcv {
                buckets[v].push(r);
            }
        }
        let mut touched = self.rows.len() as u64;
        let children = buckets
            .into_iter()
            .enumerate()
            .filter(|(_, rows)| !rows.is_empty())
            .map(|(v, rows)| {
                touched += rows.len() as u64;
                (v as u32, RowTreeNode::leaf(self.depth + 1, rows, table))
            })
            .collect();
        self.split = Some(Split { attribute, mcv: mcv as u32, children });
        touched
    }

    fn resplit_at(&mut self, ds: &Dataset, table: &StatTable, level: usize, attribute: usize) -> u64 {
        if self.depth == level {
            return self.resplit(ds, table, attribute);
        }
        let mut touched = 0;
        if let Some(split) = self.split.as_mut() {
            for (_, child) in split.children.iter_mut() {
                touched += child.resplit_at(ds, table, level, attribute);
            }
        }
        touched
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a RowTreeNode)) {
        f(self);
        if let Some(split) = &self.split {
            for (_, child) in &split.children {
                child.visit(f);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowTree {
    attributes: Vec<usize>,
    root: RowTreeNode,
}

impl RowTree {
    /// A tree with no levels over `rows` (which must be sorted).
    pub fn root_only(table: &StatTable, rows: Vec<u32>) -> Self {
        RowTree { attributes: Vec::new(), root: RowTreeNode::leaf(0, rows, table) }
    }

    /// Builds the full tree over `attributes` (sorted, distinct).
    pub fn build(ds: &Dataset, table: &StatTable, attributes: &[usize], rows: Vec<u32>) -> Result<Self> {
        check_attributes(ds, attributes)?;
        if rows.windows(2).any(|w| w[0] >= w[1]) || rows.last().is_some_and(|&r| r as usize >= ds.n_rows()) {
            return Err(Error::Contract("rowtree rows must be sorted, distinct, and in range".into()));
        }
        let mut rt = RowTree::root_only(table, rows);
        for (level, &a) in attributes.iter().enumerate() {
            rt.set_level(ds, table, level, a)?;
        }
        Ok(rt)
    }

    pub fn attributes(&self) -> &[usize] {
        &self.attributes
    }

    pub fn root(&self) -> &RowTreeNode {
        &self.root
    }

    /// Sets the split attribute of depth-`level` nodes to `attribute`,
    /// discarding deeper levels. `level == attributes().len()` appends a level.
    /// Nodes above `level` are reused untouched. Returns the number of row
    /// indices touched.
    pub fn set_level(&mut self, ds: &Dataset, table: &StatTable, level: usize, attribute: usize) -> Result<u64> {
        if level > self.attributes.len() {
            return Err(Error::Contract(format!(
                "cannot set level {level} of a {}-level rowtree",
                self.attributes.len()
            )));
        }
        if attribute >= ds.n_attributes() {
            return Err(Error::Contract(format!("attribute {attribute} out of range")));
        }
        if level > 0 && self.attributes[level - 1] >= attribute {
            return Err(Error::Contract(format!(
                "attribute list {:?} + {attribute} at level {level} is not sorted and distinct",
                &self.attributes[..level]
            )));
        }
        self.attributes.truncate(level);
        self.attributes.push(attribute);
        Ok(self.root.resplit_at(ds, table, level, attribute))
    }

    /// Returns the tree for `attributes()[..level] + [attribute]`.
    pub fn tweak(&self, ds: &Dataset, table: &StatTable, level: usize, attribute: usize) -> Result<RowTree> {
        let mut out = self.clone();
        out.set_level(ds, table, level, attribute)?;
        Ok(out)
    }

    /// Row-weighted fraction of rows that survive MCV elision from a node to
    /// its children, over non-leaf nodes with rows. `None` if no such node.
    pub fn measure_lambda(&self) -> Option<f64> {
        let (mut kept, mut total) = (0usize, 0usize);
        self.root.visit(&mut |n| {
            if let Some(split) = &n.split {
                if !n.rows.is_empty() {
                    total += n.rows.len();
                    kept += split.children.iter().map(|(_, c)| c.rows.len()).sum::<usize>();
                }
            }
        });
        (total > 0).then(|| kept as f64 / total as f64)
    }

    /// Total row indices stored across all nodes.
    pub fn stored_rows(&self) -> usize {
        self.rows_per_depth().iter().sum()
    }

    pub fn rows_per_depth(&self) -> Vec<usize> {
        let mut out = vec![0usize; self.attributes.len() + 1];
        self.root.visit(&mut |n| out[n.depth] += n.rows.len());
        out
    }

    pub fn node_count(&self) -> usize {
        let mut n = 0;
        self.root.visit(&mut |_| n += 1);
        n
    }

    pub fn for_each_node<'a>(&'a self, mut f: impl FnMut(&'a RowTreeNode)) {
        self.root.visit(&mut f);
    }
}

pub(crate) fn check_attributes(ds: &Dataset, attributes: &[usize]) -> Result<()> {
    if attributes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Contract(format!("attribute list {attributes:?} not sorted and distinct")));
    }
    if attributes.last().is_some_and(|&a| a >= ds.n_attributes()) {
        return Err(Error::Contract(format!("attribute list {attributes:?} out of range")));
    }
    Ok(())
}
