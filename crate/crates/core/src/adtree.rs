//! A depth-capped AD-tree of conditional sumstats, fed from rowtrees.
//!
//! Each [`ADNode`] holds the sumstats of one conjunctive condition; each
//! [`VaryNode`] below it records the conditional MCV of one further attribute
//! and stores children for the other values only. Cubes that cross an MCV
//! branch are rebuilt by subtracting sibling cubes from the marginal.

use std::collections::BTreeMap;

use crate::dataset::{Dataset, StatTable, SumStats};
use crate::error::{Error, Result};
use crate::rowtree::{RowTree, RowTreeNode};
use crate::rule::Literal;

#[derive(Debug, Clone, PartialEq)]
pub struct ADNode {
    pub sumstats: SumStats,
    /// Keyed by attribute; only attributes above every conditioned attribute.
    pub vary: BTreeMap<usize, VaryNode>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VaryNode {
    pub attribute: usize,
    pub mcv: u32,
    pub children: BTreeMap<u32, ADNode>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ADTree {
    max_depth: usize,
    arities: Vec<usize>,
    dim: usize,
    root: Option<ADNode>,
}

#[derive(Clone, Copy)]
enum Item {
    Cond(usize, u32),
    Dim(usize),
}

impl Item {
    fn attribute(&self) -> usize {
        match *self {
            Item::Cond(a, _) | Item::Dim(a) => a,
        }
    }
}

impl ADTree {
    /// An empty tree able to hold conditions of up to `max_depth` literals.
    pub fn new(max_depth: usize, arities: Vec<usize>, dim: usize) -> Self {
        ADTree { max_depth, arities, dim, root: None }
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    pub fn arity(&self, attribute: usize) -> usize {
        self.arities[attribute]
    }

    pub fn root(&self) -> Option<&ADNode> {
        self.root.as_ref()
    }

    /// Records every node of `rt` at its condition path. Idempotent.
    pub fn insert_from_rowtree(&mut self, rt: &RowTree) -> Result<()> {
        if rt.attributes().len() > self.max_depth {
            return Err(Error::Contract(format!(
                "rowtree over {} attributes exceeds AD-tree depth {}",
                rt.attributes().len(),
                self.max_depth
            )));
        }
        let root = self.root.get_or_insert_with(|| ADNode {
            sumstats: rt.root().sumstats.clone(),
            vary: BTreeMap::new(),
        });
        insert_node(root, rt.root());
        Ok(())
    }

    /// Unions `other` into this tree. Overlapping content must agree.
    pub fn merge(&mut self, other: ADTree) {
        match (&mut self.root, other.root) {
            (_, None) => {}
            (None, Some(r)) => self.root = Some(r),
            (Some(a), Some(b)) => merge_node(a, b),
        }
    }

    /// `DC(cube_attributes | condition)`; see [`ADTree::query_cells`].
    pub fn query_cube(&self, cube_attributes: &[usize], condition: &[Literal]) -> Result<crate::cube::DataCube> {
        let cells = self.query_cells(cube_attributes, condition)?;
        let shape = cube_attributes.iter().map(|&a| self.arities[a]).collect();
        Ok(crate::cube::DataCube::from_parts(cube_attributes.to_vec(), shape, self.dim, cells))
    }

    /// Flat cells of `DC(cube_attributes | condition)`.
    ///
    /// `cube_attributes` must be sorted and disjoint from the condition's
    /// attributes, and together they may mention at most `max_depth`
    /// attributes.
    pub fn query_cells(&self, cube_attributes: &[usize], condition: &[Literal]) -> Result<Vec<f64>> {
        if cube_attributes.len() + condition.len() > self.max_depth {
            return Err(Error::Contract(format!(
                "query over {} attributes with {} conditions exceeds AD-tree depth {}",
                cube_attributes.len(),
                condition.len(),
                self.max_depth
            )));
        }
        let mut items: Vec<Item> = condition
            .iter()
            .map(|l| Item::Cond(l.attribute, l.value))
            .chain(cube_attributes.iter().map(|&a| Item::Dim(a)))
            .collect();
        items.sort_by_key(Item::attribute);
        if items.windows(2).any(|w| w[0].attribute() == w[1].attribute())
            || cube_attributes.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::Contract(format!(
                "query attributes {cube_attributes:?} must be sorted and disjoint from condition {condition:?}"
            )));
        }
        let miss = || Error::CacheMiss {
            attributes: cube_attributes.to_vec(),
            condition: condition.iter().map(|l| (l.attribute, l.value)).collect(),
        };
        let root = self.root.as_ref().ok_or_else(miss)?;
        self.query_rec(root, &items).ok_or_else(miss)
    }

    fn cells_len(&self, items: &[Item]) -> usize {
        items
            .iter()
            .map(|it| match it {
                Item::Dim(a) => self.arities[*a],
                Item::Cond(..) => 1,
            })
            .product::<usize>()
            * self.dim
    }

    fn query_rec(&self, node: &ADNode, items: &[Item]) -> Option<Vec<f64>> {
        let Some((first, rest)) = items.split_first() else {
            return Some(node.sumstats.0.clone());
        };
        let vary = node.vary.get(&first.attribute())?;
        match *first {
            Item::Cond(_, value) if value != vary.mcv => match vary.children.get(&value) {
                Some(child) => self.query_rec(child, rest),
                None => Some(vec![0.0; self.cells_len(rest)]),
            },
            Item::Cond(..) => {
                let mut acc = self.query_rec(node, rest)?;
                for child in vary.children.values() {
                    sub_assign(&mut acc, &self.query_rec(child, rest)?);
                }
                Some(acc)
            }
            Item::Dim(a) => {
                let sub_len = self.cells_len(rest);
                let mut out = vec![0.0; self.arities[a] * sub_len];
                let mut mcv_cells = self.query_rec(node, rest)?;
                for (&v, child) in &vary.children {
                    let sub = self.query_rec(child, rest)?;
                    sub_assign(&mut mcv_cells, &sub);
                    let v = v as usize;
                    out[v * sub_len..(v + 1) * sub_len].copy_from_slice(&sub);
                }
                let m = vary.mcv as usize;
                out[m * sub_len..(m + 1) * sub_len].copy_from_slice(&mcv_cells);
                Some(out)
            }
        }
    }

    /// Number of stored [`ADNode`]s per depth (root is depth 0).
    pub fn node_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.max_depth + 1];
        if let Some(root) = &self.root {
            count_nodes(root, 0, &mut counts);
        }
        counts
    }

    pub fn vary_count(&self) -> usize {
        fn rec(n: &ADNode) -> usize {
            n.vary.values().map(|v| 1 + v.children.values().map(rec).sum::<usize>()).sum()
        }
        self.root.as_ref().map_or(0, rec)
    }

    /// Rough heap footprint in bytes.
    pub fn memory_estimate(&self) -> usize {
        let nodes: usize = self.node_counts().iter().sum();
        nodes * (std::mem::size_of::<ADNode>() + 8 * self.dim + 48)
            + self.vary_count() * (std::mem::size_of::<VaryNode>() + 48)
    }

    /// Visits every stored condition path with its node.
    pub fn for_each_node(&self, mut f: impl FnMut(&[Literal], &ADNode)) {
        fn rec(n: &ADNode, path: &mut Vec<Literal>, f: &mut impl FnMut(&[Literal], &ADNode)) {
            f(path, n);
            for vary in n.vary.values() {
                for (&v, child) in &vary.children {
                    path.push(Literal::new(vary.attribute, v));
                    rec(child, path, f);
                    path.pop();
                }
            }
        }
        if let Some(root) = &self.root {
            rec(root, &mut Vec::new(), &mut f);
        }
    }

    /// Checks, for every vary node, that the parent's sumstats equal the
    /// directly scanned MCV branch plus the stored children. Returns the
    /// largest absolute discrepancy.
    pub fn closure_error(&self, ds: &Dataset, table: &StatTable, rows: &[u32]) -> f64 {
        let mut worst = 0.0f64;
        self.for_each_node(|path, node| {
            for vary in node.vary.values() {
                let mut total = SumStats::zeros(self.dim);
                for &r in rows {
                    let r = r as usize;
                    if path.iter().all(|l| ds.code(r, l.attribute) == l.value)
                        && ds.code(r, vary.attribute) == vary.mcv
                    {
                        total.add_slice(table.row(r));
                    }
                }
                for child in vary.children.values() {
                    total += &child.sumstats;
                }
                for (a, b) in total.0.iter().zip(&node.sumstats.0) {
                    worst = worst.max((a - b).abs());
                }
            }
        });
        worst
    }
}

fn sub_assign(acc: &mut [f64], other: &[f64]) {
    for (a, b) in acc.iter_mut().zip(other) {
        *a -= b;
    }
}

fn insert_node(ad: &mut ADNode, rt: &RowTreeNode) {
    if ad.sumstats != rt.sumstats {
        ad.sumstats = rt.sumstats.clone();
    }
    let Some(split) = &rt.split else { return };
    let vary = ad.vary.entry(split.attribute).or_insert_with(|| VaryNode {
        attribute: split.attribute,
        mcv: split.mcv,
        children: BTreeMap::new(),
    });
    debug_assert_eq!(vary.mcv, split.mcv, "conditional MCV differs between rowtrees");
    for (v, child) in &split.children {
        let ad_child = vary.children.entry(*v).or_insert_with(|| ADNode {
            sumstats: child.sumstats.clone(),
            vary: BTreeMap::new(),
        });
        insert_node(ad_child, child);
    }
}

fn merge_node(a: &mut ADNode, b: ADNode) {
    for (attr, vb) in b.vary {
        match a.vary.get_mut(&attr) {
            None => {
                a.vary.insert(attr, vb);
            }
            Some(va) => {
                for (v, cb) in vb.children {
                    match va.children.get_mut(&v) {
                        None => {
                            va.children.insert(v, cb);
                        }
                        Some(ca) => merge_node(ca, cb),
                    }
                }
            }
        }
    }
}

fn count_nodes(n: &ADNode, depth: usize, counts: &mut [usize]) {
    counts[depth] += 1;
    for vary in n.vary.values() {
        for child in vary.children.values() {
            count_nodes(child, depth + 1, counts);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::scan_cube;
    use crate::dataset::{fixture_t1, ComponentDecl, StatVecSpec};
    use crate::rule::Rule;

    fn t1() -> (Dataset, StatTable) {
        let ds = fixture_t1();
        let spec = StatVecSpec::new(&ds, &[ComponentDecl::ConstantOne, ComponentDecl::Target("y".into())])
            .unwrap();
        let table = StatTable::new(&ds, &spec);
        (ds, table)
    }

    fn all(ds: &Dataset) -> Vec<u32> {
        (0..ds.n_rows() as u32).collect()
    }

    fn insert(ad: &mut ADTree, ds: &Dataset, table: &StatTable, attrs: &[usize]) {
        let rt = RowTree::build(ds, table, attrs, all(ds)).unwrap();
        ad.insert_from_rowtree(&rt).unwrap();
    }

    #[test]
    fn insert_single_attribute() {
        let (ds, table) = t1();
        let mut ad = ADTree::new(2, ds.arities(), 2);
        insert(&mut ad, &ds, &table, &[0]);
        let root = ad.root().unwrap();
        assert_eq!(root.sumstats.0, vec![8.0, 36.0]);
        let vary = &root.vary[&0];
        assert_eq!(vary.mcv, 0);
        assert_eq!(vary.children.len(), 1);
        // direct scan of rows 4..=7
        assert_eq!(vary.children[&1].sumstats, table.sum(&[4, 5, 6, 7]));
        assert_eq!(vary.children[&1].sumstats.0, vec![4.0, 26.0]);
    }

    #[test]
    fn insert_is_idempotent() {
        let (ds, table) = t1();
        let mut once = ADTree::new(2, ds.arities(), 2);
        insert(&mut once, &ds, &table, &[0, 1]);
        let mut twice = once.clone();
        insert(&mut twice, &ds, &table, &[0, 1]);
        assert_eq!(once, twice);
    }

    #[test]
    fn later_inserts_leave_existing_entries() {
        let (ds, table) = t1();
        let mut ad = ADTree::new(2, ds.arities(), 2);
        insert(&mut ad, &ds, &table, &[0]);
        let before = ad.root().unwrap().vary[&0].children[&1].sumstats.clone();
        insert(&mut ad, &ds, &table, &[0, 1]);
        let a1 = &ad.root().unwrap().vary[&0].children[&1];
        assert_eq!(a1.sumstats, before);
        assert!(a1.vary.contains_key(&1));

        let mut scratch = ADTree::new(2, ds.arities(), 2);
        insert(&mut scratch, &ds, &table, &[0, 1]);
        assert_eq!(ad, scratch);
    }

    #[test]
    fn too_deep_insert_rejected() {
        let (ds, table) = t1();
        let mut ad = ADTree::new(1, ds.arities(), 2);
        let rt = RowTree::build(&ds, &table, &[0, 1], all(&ds)).unwrap();
        assert!(matches!(ad.insert_from_rowtree(&rt), Err(Error::Contract(_))));
    }

    #[test]
    fn root_query() {
        let (ds, table) = t1();
        let mut ad = ADTree::new(2, ds.arities(), 2);
        insert(&mut ad, &ds, &table, &[]);
        assert_eq!(ad.query_cells(&[], &[]).unwrap(), vec![8.0, 36.0]);
    }

    #[test]
    fn mcv_condition_reconstructed_by_subtraction() {
        let (ds, table) = t1();
        let mut ad = ADTree::new(2, ds.arities(), 2);
        for attrs in [&[0usize][..], &[1], &[0, 1]] {
            insert(&mut ad, &ds, &table, attrs);
        }
        let a0 = Rule::from_pairs(&[(0, 0)]).unwrap();
        let got = ad.query_cube(&[1], a0.literals()).unwrap();
        assert_eq!(got, scan_cube(&ds, &table, &[1], &[0, 1, 2, 3]));
        let a1 = Rule::from_pairs(&[(0, 1)]).unwrap();
        let got = ad.query_cube(&[1], a1.literals()).unwrap();
        assert_eq!(got, scan_cube(&ds, &table, &[1], &[4, 5, 6, 7]));
    }

    #[test]
    fn zero_row_condition_gives_zero_cube() {
        let ds = Dataset::from_codes(&["A", "B"], &[3, 2], vec![vec![0, 0, 1, 1], vec![0, 1, 0, 1]], vec![])
            .unwrap();
        let spec = StatVecSpec::new(&ds, &[ComponentDecl::ConstantOne]).unwrap();
        let table = StatTable::new(&ds, &spec);
        let mut ad = ADTree::new(2, ds.arities(), 1);
        insert(&mut ad, &ds, &table, &[0, 1]);
        let lit = [Literal::new(0, 2)];
        assert_eq!(ad.query_cells(&[1], &lit).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn capacity_and_miss_errors() {
        let (ds, table) = t1();
        let mut ad = ADTree::new(1, ds.arities(), 2);
        insert(&mut ad, &ds, &table, &[0]);
        assert!(matches!(ad.query_cells(&[0, 1], &[]), Err(Error::Contract(_))));
        assert!(matches!(ad.query_cells(&[1], &[]), Err(Error::CacheMiss { .. })));
        let empty = ADTree::new(1, ds.arities(), 2);
        assert!(matches!(empty.query_cells(&[], &[]), Err(Error::CacheMiss { .. })));
    }

    #[test]
    fn merge_equals_joint_insert() {
        let (ds, table) = t1();
        let mut a = ADTree::new(2, ds.arities(), 2);
        let mut b = ADTree::new(2, ds.arities(), 2);
        let mut joint = ADTree::new(2, ds.arities(), 2);
        insert(&mut a, &ds, &table, &[0, 1]);
        insert(&mut b, &ds, &table, &[0, 2]);
        insert(&mut b, &ds, &table, &[1, 2]);
        for attrs in [&[0usize, 1][..], &[0, 2], &[1, 2]] {
            insert(&mut joint, &ds, &table, attrs);
        }
        a.merge(b);
        assert_eq!(a, joint);
        assert_eq!(a.closure_error(&ds, &table, &all(&ds)), 0.0);
    }
}
