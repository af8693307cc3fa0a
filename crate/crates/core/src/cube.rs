//! Dense datacubes of sumstats, and the three ways this crate builds them:
//! a single pass over rows ([`scan_cube`]), one pass per rule ([`scan_rule`]),
//! and the rowtree/AD-tree recursion ([`build_dc`]).

use crate::adtree::ADTree;
use crate::dataset::{Dataset, StatTable, SumStats};
use crate::error::{Error, Result};
use crate::rowtree::RowTreeNode;
use crate::rule::{Literal, Rule};

/// Cells are stored row-major over `attributes` (last attribute fastest),
/// each cell holding `dim` consecutive sumstats components.
#[derive(Debug, Clone, PartialEq)]
pub struct DataCube {
    attributes: Vec<usize>,
    shape: Vec<usize>,
    dim: usize,
    cells: Vec<f64>,
}

impl DataCube {
    pub fn zeros(attributes: Vec<usize>, shape: Vec<usize>, dim: usize) -> Self {
        let n: usize = shape.iter().product();
        DataCube { attributes, shape, dim, cells: vec![0.0; n * dim] }
    }

    /// Builds a cube from raw cell data laid out as described on the type.
    pub fn from_parts(attributes: Vec<usize>, shape: Vec<usize>, dim: usize, cells: Vec<f64>) -> Self {
        debug_assert_eq!(cells.len(), shape.iter().product::<usize>() * dim);
        DataCube { attributes, shape, dim, cells }
    }

    pub fn attributes(&self) -> &[usize] {
        &self.attributes
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len() / self.dim
    }

    pub fn raw(&self) -> &[f64] {
        &self.cells
    }

    #[inline]
    pub fn cell(&self, index: usize) -> &[f64] {
        &self.cells[index * self.dim..(index + 1) * self.dim]
    }

    pub fn index_of(&self, values: &[u32]) -> usize {
        values
            .iter()
            .zip(&self.shape)
            .fold(0, |acc, (&v, &n)| acc * n + v as usize)
    }

    pub fn values_of(&self, mut index: usize) -> Vec<u32> {
        let mut out = vec![0u32; self.shape.len()];
        for (slot, &n) in out.iter_mut().zip(&self.shape).rev() {
            *slot = (index % n) as u32;
            index /= n;
        }
        out
    }

    pub fn cell_at(&self, values: &[u32]) -> &[f64] {
        self.cell(self.index_of(values))
    }

    /// The rule naming cell `index`.
    pub fn rule_of(&self, index: usize) -> Rule {
        Rule::from_sorted(
            self.attributes
                .iter()
                .zip(self.values_of(index))
                .map(|(&a, v)| Literal::new(a, v))
                .collect(),
        )
    }

    /// Componentwise sum over all cells.
    pub fn total(&self) -> SumStats {
        let mut s = SumStats::zeros(self.dim);
        for c in self.cells.chunks_exact(self.dim) {
            s.add_slice(c);
        }
        s
    }

    /// Sums out the attribute at position `pos`.
    pub fn marginalize(&self, pos: usize) -> DataCube {
        let mut attributes = self.attributes.clone();
        let mut shape = self.shape.clone();
        attributes.remove(pos);
        shape.remove(pos);
        let mut out = DataCube::zeros(attributes, shape, self.dim);
        for i in 0..self.n_cells() {
            let mut v = self.values_of(i);
            v.remove(pos);
            let j = out.index_of(&v);
            for (a, b) in out.cells[j * self.dim..(j + 1) * self.dim].iter_mut().zip(self.cell(i)) {
                *a += b;
            }
        }
        out
    }

    /// Largest absolute componentwise difference; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &DataCube) -> f64 {
        if self.attributes != other.attributes || self.shape != other.shape || self.dim != other.dim {
            return f64::INFINITY;
        }
        self.cells
            .iter()
            .zip(&other.cells)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// One pass over `rows`: each row adds its statvec to exactly one cell.
pub fn scan_cube(ds: &Dataset, table: &StatTable, attributes: &[usize], rows: &[u32]) -> DataCube {
    let shape: Vec<usize> = attributes.iter().map(|&a| ds.arity(a)).collect();
    let dim = table.dim();
    let mut cube = DataCube::zeros(attributes.to_vec(), shape.clone(), dim);
    let columns: Vec<&[u32]> = attributes.iter().map(|&a| ds.column(a)).collect();
    for &r in rows {
        let r = r as usize;
        let mut idx = 0usize;
        for (col, &n) in columns.iter().zip(&shape) {
            idx = idx * n + col[r] as usize;
        }
        let stat = table.row(r);
        for (a, b) in cube.cells[idx * dim..(idx + 1) * dim].iter_mut().zip(stat) {
            *a += b;
        }
    }
    cube
}

/// Sum of statvecs over the rows of `rows` that satisfy `rule`.
pub fn scan_rule(ds: &Dataset, table: &StatTable, rule: &Rule, rows: &[u32]) -> SumStats {
    let mut s = SumStats::zeros(table.dim());
    for &r in rows {
        if rule.matches(ds, r as usize) {
            s.add_slice(table.row(r as usize));
        }
    }
    s
}

/// Builds `DC(attributes | node's rule)` from the rowtree below `node` and the
/// AD-tree. The rowtree below `node` must split on `attributes` in order.
///
/// Work is proportional to the cube size, independent of row counts.
pub fn build_dc(attributes: &[usize], ad: &ADTree, node: &RowTreeNode) -> Result<DataCube> {
    let mut condition = Vec::with_capacity(attributes.len());
    build_rec(attributes, ad, node, &mut condition)
}

/// Recursive form of [`build_dc`] with the node's rule passed explicitly.
pub fn build_dc_under(
    attributes: &[usize],
    ad: &ADTree,
    node: &RowTreeNode,
    rule: &Rule,
) -> Result<DataCube> {
    let mut condition = rule.literals().to_vec();
    build_rec(attributes, ad, node, &mut condition)
}

fn build_rec(
    attributes: &[usize],
    ad: &ADTree,
    node: &RowTreeNode,
    condition: &mut Vec<Literal>,
) -> Result<DataCube> {
    let dim = node.sumstats.len();
    let Some((&first, rest)) = attributes.split_first() else {
        return Ok(DataCube::from_parts(vec![], vec![], dim, node.sumstats.0.clone()));
    };
    let split = node
        .split
        .as_ref()
        .filter(|s| s.attribute == first)
        .ok_or_else(|| {
            Error::Contract(format!(
                "rowtree node at depth {} does not split on attribute {first}",
                node.depth
            ))
        })?;
    let arity = ad.arity(first);
    let rest_shape: Vec<usize> = rest.iter().map(|&a| ad.arity(a)).collect();
    let sub_len = rest_shape.iter().product::<usize>() * dim;

    let mut shape = Vec::with_capacity(attributes.len());
    shape.push(arity);
    shape.extend_from_slice(&rest_shape);
    let mut out = DataCube::zeros(attributes.to_vec(), shape, dim);

    // marginal over the remaining attributes, then peel off the stored values
    let mut mcv_cells = ad.query_cells(rest, condition)?;
    for (value, child) in &split.children {
        condition.push(Literal::new(first, *value));
        let sub = build_rec(rest, ad, child, condition)?;
        condition.pop();
        for (m, s) in mcv_cells.iter_mut().zip(&sub.cells) {
            *m -= s;
        }
        let v = *value as usize;
        out.cells[v * sub_len..(v + 1) * sub_len].copy_from_slice(&sub.cells);
    }
    let m = split.mcv as usize;
    out.cells[m * sub_len..(m + 1) * sub_len].copy_from_slice(&mcv_cells);
    Ok(out)
}
