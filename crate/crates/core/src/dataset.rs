//! Column-major categorical tables, CSV ingestion, and per-row statistics vectors.
//!
//! Every rule attribute is a dense integer code in `0..arity`. Real-valued
//! columns are kept separately as named targets; they only ever enter a search
//! through a [`StatVecSpec`] component.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::ops::{AddAssign, Index, SubAssign};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Level used for empty categorical cells.
pub const NA_LEVEL: &str = "<NA>";

/// One categorical attribute: its level strings and a code per row.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoricalColumn {
    pub name: String,
    pub levels: Vec<String>,
    pub codes: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetColumn {
    pub name: String,
    pub values: Vec<f64>,
}

/// Immutable categorical dataset with optional real-valued targets.
///
/// Columns are reference counted so that learners can derive datasets with
/// replaced targets (residuals) without copying the attribute codes.
#[derive(Debug, Clone)]
pub struct Dataset {
    names: Vec<String>,
    levels: Vec<Vec<String>>,
    columns: Arc<Vec<Vec<u32>>>,
    target_names: Vec<String>,
    targets: Vec<Arc<Vec<f64>>>,
    n_rows: usize,
}

impl Dataset {
    pub fn new(attributes: Vec<CategoricalColumn>, targets: Vec<TargetColumn>) -> Result<Self> {
        let n_rows = attributes
            .first()
            .map(|c| c.codes.len())
            .or_else(|| targets.first().map(|t| t.values.len()))
            .unwrap_or(0);
        let mut seen = HashMap::new();
        let mut names = Vec::with_capacity(attributes.len());
        let mut levels = Vec::with_capacity(attributes.len());
        let mut columns = Vec::with_capacity(attributes.len());
        for col in attributes {
            if seen.insert(col.name.clone(), ()).is_some() {
                return Err(Error::Schema(format!("duplicate column name {:?}", col.name)));
            }
            if col.levels.is_empty() {
                return Err(Error::Schema(format!("attribute {:?} has no levels", col.name)));
            }
            if col.codes.len() != n_rows {
                return Err(Error::Schema(format!(
                    "attribute {:?} has {} rows, expected {}",
                    col.name,
                    col.codes.len(),
                    n_rows
                )));
            }
            let arity = col.levels.len();
            if let Some(bad) = col.codes.iter().find(|&&c| c as usize >= arity) {
                return Err(Error::Schema(format!(
                    "attribute {:?}: code {} outside arity {}",
                    col.name, bad, arity
                )));
            }
            names.push(col.name);
            levels.push(col.levels);
            columns.push(col.codes);
        }
        let mut target_names = Vec::new();
        let mut target_values = Vec::new();
        for t in targets {
            if seen.insert(t.name.clone(), ()).is_some() {
                return Err(Error::Schema(format!("duplicate column name {:?}", t.name)));
            }
            if t.values.len() != n_rows {
                return Err(Error::Schema(format!(
                    "target {:?} has {} rows, expected {}",
                    t.name,
                    t.values.len(),
                    n_rows
                )));
            }
            target_names.push(t.name);
            target_values.push(Arc::new(t.values));
        }
        Ok(Dataset {
            names,
            levels,
            columns: Arc::new(columns),
            target_names,
            targets: target_values,
            n_rows,
        })
    }

    /// Builds a dataset from raw codes, labelling levels `"0"`, `"1"`, ...
    pub fn from_codes(
        names: &[&str],
        arities: &[usize],
        columns: Vec<Vec<u32>>,
        targets: Vec<(&str, Vec<f64>)>,
    ) -> Result<Self> {
        if names.len() != arities.len() || names.len() != columns.len() {
            return Err(Error::Schema("names, arities and columns differ in length".into()));
        }
        let attributes = names
            .iter()
            .zip(arities)
            .zip(columns)
            .map(|((name, &arity), codes)| CategoricalColumn {
                name: name.to_string(),
                levels: (0..arity).map(|v| v.to_string()).collect(),
                codes,
            })
            .collect();
        let targets = targets
            .into_iter()
            .map(|(name, values)| TargetColumn { name: name.to_string(), values })
            .collect();
        Dataset::new(attributes, targets)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_attributes(&self) -> usize {
        self.names.len()
    }

    pub fn attribute_names(&self) -> &[String] {
        &self.names
    }

    pub fn attribute_name(&self, attribute: usize) -> &str {
        &self.names[attribute]
    }

    pub fn arity(&self, attribute: usize) -> usize {
        self.levels[attribute].len()
    }

    pub fn arities(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    pub fn levels(&self, attribute: usize) -> &[String] {
        &self.levels[attribute]
    }

    pub fn level(&self, attribute: usize, code: u32) -> &str {
        &self.levels[attribute][code as usize]
    }

    #[inline]
    pub fn column(&self, attribute: usize) -> &[u32] {
        &self.columns[attribute]
    }

    #[inline]
    pub fn code(&self, row: usize, attribute: usize) -> u32 {
        self.columns[attribute][row]
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn level_code(&self, attribute: usize, level: &str) -> Option<u32> {
        self.levels[attribute].iter().position(|l| l == level).map(|c| c as u32)
    }

    pub fn target_names(&self) -> &[String] {
        &self.target_names
    }

    pub fn target_index(&self, name: &str) -> Option<usize> {
        self.target_names.iter().position(|n| n == name)
    }

    pub fn target(&self, index: usize) -> &[f64] {
        &self.targets[index]
    }

    pub fn target_by_name(&self, name: &str) -> Option<&[f64]> {
        self.target_index(name).map(|i| self.target(i))
    }

    /// Returns a dataset sharing this one's attribute columns, with target
    /// `name` replaced (or appended when absent).
    pub fn with_target(&self, name: &str, values: Vec<f64>) -> Result<Dataset> {
        if values.len() != self.n_rows {
            return Err(Error::Schema(format!(
                "target {:?} has {} rows, expected {}",
                name,
                values.len(),
                self.n_rows
            )));
        }
        if self.attribute_index(name).is_some() {
            return Err(Error::Schema(format!("target name {name:?} collides with an attribute")));
        }
        let mut out = self.clone();
        match out.target_index(name) {
            Some(i) => out.targets[i] = Arc::new(values),
            None => {
                out.target_names.push(name.to_string());
                out.targets.push(Arc::new(values));
            }
        }
        Ok(out)
    }

    /// Writes the dataset as CSV: attributes (as level strings) then targets.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let header: Vec<&str> = self
            .names
            .iter()
            .chain(self.target_names.iter())
            .map(String::as_str)
            .collect();
        w.write_record(&header)?;
        let mut record = Vec::with_capacity(header.len());
        for row in 0..self.n_rows {
            record.clear();
            for a in 0..self.names.len() {
                let level = self.level(a, self.code(row, a));
                record.push(if level == NA_LEVEL { String::new() } else { level.to_string() });
            }
            for t in &self.targets {
                record.push(t[row].to_string());
            }
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv_path(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(f))
    }
}

/// How a numeric column is cut into categorical bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Binning {
    EqualWidth(usize),
    EqualFrequency(usize),
}

/// Role of one CSV column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColumnRole {
    Categorical,
    NumericTarget,
    Ignore,
    Binned(Binning),
}

/// Column role declarations.
///
/// Text form: groups separated by `;`, each a comma-separated list of
/// column names followed by a role, e.g. `"A,B,C cat; y num; age bin-ef:4"`.
/// Roles are `cat`, `num`, `ignore`, `bin-ew:N` and `bin-ef:N`. The name `*`
/// assigns a role to every column not declared elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    pub roles: Vec<(String, ColumnRole)>,
    pub default_role: Option<ColumnRole>,
}

impl Schema {
    pub fn parse(text: &str) -> Result<Schema> {
        let mut roles: Vec<(String, ColumnRole)> = Vec::new();
        let mut default_role = None;
        for group in text.split(';').map(str::trim).filter(|g| !g.is_empty()) {
            let (names, role) = group
                .rsplit_once(char::is_whitespace)
                .ok_or_else(|| Error::Schema(format!("group {group:?} lacks a role")))?;
            let role = parse_role(role.trim())?;
            for name in names.split(',').map(str::trim).filter(|n| !n.is_empty()) {
                if name == "*" {
                    default_role = Some(role);
                } else if roles.iter().any(|(n, _)| n == name) {
                    return Err(Error::Schema(format!("column {name:?} declared twice")));
                } else {
                    roles.push((name.to_string(), role));
                }
            }
        }
        if roles.is_empty() && default_role.is_none() {
            return Err(Error::Schema("empty schema".into()));
        }
        Ok(Schema { roles, default_role })
    }

    pub fn role(&self, column: &str) -> Option<ColumnRole> {
        self.roles
            .iter()
            .find(|(n, _)| n == column)
            .map(|(_, r)| *r)
            .or(self.default_role)
    }
}

fn parse_role(text: &str) -> Result<ColumnRole> {
    let bins = |s: &str| -> Result<usize> {
        match s.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(Error::Schema(format!("bad bin count {s:?}"))),
        }
    };
    match text {
        "cat" | "categorical" => Ok(ColumnRole::Categorical),
        "num" | "target" => Ok(ColumnRole::NumericTarget),
        "ignore" => Ok(ColumnRole::Ignore),
        _ => {
            if let Some(n) = text.strip_prefix("bin-ew:") {
                Ok(ColumnRole::Binned(Binning::EqualWidth(bins(n)?)))
            } else if let Some(n) = text.strip_prefix("bin-ef:") {
                Ok(ColumnRole::Binned(Binning::EqualFrequency(bins(n)?)))
            } else {
                Err(Error::Schema(format!("unknown column role {text:?}")))
            }
        }
    }
}

/// Reads a CSV file with a header row according to `schema`.
pub fn load_csv(path: impl AsRef<Path>, schema: &Schema) -> Result<Dataset> {
    let f = std::fs::File::open(path)?;
    read_csv(std::io::BufReader::new(f), schema)
}

/// Categorical levels are coded in first-occurrence order; empty cells become
/// [`NA_LEVEL`].
pub fn read_csv<R: Read>(reader: R, schema: &Schema) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let mut roles = Vec::with_capacity(header.len());
    for name in &header {
        let role = schema
            .role(name)
            .ok_or_else(|| Error::Schema(format!("column {name:?} has no declared role")))?;
        roles.push(role);
    }
    for (name, _) in &schema.roles {
        if !header.iter().any(|h| h == name) {
            return Err(Error::Schema(format!("declared column {name:?} not found in header")));
        }
    }

    enum Builder {
        Cat { index: HashMap<String, u32>, levels: Vec<String>, codes: Vec<u32> },
        Raw(Vec<String>),
        Target(Vec<f64>),
        Skip,
    }
    let mut builders: Vec<Builder> = roles
        .iter()
        .map(|r| match r {
            ColumnRole::Categorical => Builder::Cat {
                index: HashMap::new(),
                levels: Vec::new(),
                codes: Vec::new(),
            },
            ColumnRole::Binned(_) => Builder::Raw(Vec::new()),
            ColumnRole::NumericTarget => Builder::Target(Vec::new()),
            ColumnRole::Ignore => Builder::Skip,
        })
        .collect();

    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let row = i + 1;
        if record.len() != header.len() {
            return Err(Error::ColumnCount { row, expected: header.len(), found: record.len() });
        }
        for (c, cell) in record.iter().enumerate() {
            match &mut builders[c] {
                Builder::Cat { index, levels, codes } => {
                    let key = if cell.is_empty() { NA_LEVEL } else { cell };
                    let code = match index.get(key) {
                        Some(&code) => code,
                        None => {
                            let code = levels.len() as u32;
                            index.insert(key.to_string(), code);
                            levels.push(key.to_string());
                            code
                        }
                    };
                    codes.push(code);
                }
                Builder::Raw(v) => v.push(cell.to_string()),
                Builder::Target(v) => match cell.parse::<f64>() {
                    Ok(x) if !cell.is_empty() => v.push(x),
                    _ => {
                        return Err(Error::MissingNumeric {
                            row,
                            column: header[c].clone(),
                            value: cell.to_string(),
                        })
                    }
                },
                Builder::Skip => {}
            }
        }
    }

    let mut attributes = Vec::new();
    let mut targets = Vec::new();
    for ((name, role), builder) in header.into_iter().zip(roles).zip(builders) {
        match (builder, role) {
            (Builder::Cat { mut levels, codes, .. }, _) => {
                if levels.is_empty() {
                    levels.push(NA_LEVEL.to_string());
                }
                attributes.push(CategoricalColumn { name, levels, codes });
            }
            (Builder::Raw(cells), ColumnRole::Binned(binning)) => {
                attributes.push(bin_column(name, &cells, binning)?);
            }
            (Builder::Target(values), _) => targets.push(TargetColumn { name, values }),
            _ => {}
        }
    }
    Dataset::new(attributes, targets)
}

fn parse_cells(name: &str, cells: &[String]) -> Result<Vec<Option<f64>>> {
    cells
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if c.is_empty() {
                Ok(None)
            } else {
                c.parse::<f64>().map(Some).map_err(|_| Error::MissingNumeric {
                    row: i + 1,
                    column: name.to_string(),
                    value: c.clone(),
                })
            }
        })
        .collect()
}

/// Interior bin edges for `values`; a value's bin is the number of edges `<=` it.
pub fn bin_edges(values: &[f64], binning: Binning) -> Vec<f64> {
    if values.is_empty() {
        return Vec::new();
    }
    let mut edges = match binning {
        Binning::EqualWidth(n) => {
            let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let width = (hi - lo) / n as f64;
            (1..n).map(|j| lo + j as f64 * width).collect::<Vec<_>>()
        }
        Binning::EqualFrequency(n) => {
            let mut sorted = values.to_vec();
            sorted.sort_by(f64::total_cmp);
            (1..n).map(|j| sorted[j * sorted.len() / n]).collect()
        }
    };
    edges.dedup();
    // an edge at the minimum would leave the first bin empty
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    edges.retain(|&e| e > lo);
    edges
}

fn bin_column(name: String, cells: &[String], binning: Binning) -> Result<CategoricalColumn> {
    let parsed = parse_cells(&name, cells)?;
    let present: Vec<f64> = parsed.iter().flatten().copied().collect();
    let edges = bin_edges(&present, binning);
    let mut levels = Vec::with_capacity(edges.len() + 2);
    if edges.is_empty() {
        levels.push("*".to_string());
    } else {
        levels.push(format!("<{}", edges[0]));
        for w in edges.windows(2) {
            levels.push(format!("[{},{})", w[0], w[1]));
        }
        levels.push(format!(">={}", edges[edges.len() - 1]));
    }
    let na_code = levels.len() as u32;
    let mut has_na = false;
    let codes = parsed
        .iter()
        .map(|v| match v {
            Some(x) => edges.partition_point(|&e| e <= *x) as u32,
            None => {
                has_na = true;
                na_code
            }
        })
        .collect();
    if has_na {
        levels.push(NA_LEVEL.to_string());
    }
    Ok(CategoricalColumn { name, levels, codes })
}

/// One declared component of a statistics vector, referring to columns by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ComponentDecl {
    ConstantOne,
    Indicator(String, String),
    OneHot(String),
    Target(String),
    TargetSquared(String),
}

/// A resolved component. `OneHot` expands to `arity` entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Component {
    ConstantOne,
    Indicator { attribute: usize, value: u32 },
    OneHot { attribute: usize, arity: usize },
    Target { target: usize },
    TargetSquared { target: usize },
}

impl Component {
    pub fn width(&self) -> usize {
        match self {
            Component::OneHot { arity, .. } => *arity,
            _ => 1,
        }
    }
}

/// Per-row statistics vector definition, resolved against one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatVecSpec {
    components: Vec<Component>,
    labels: Vec<String>,
}

impl StatVecSpec {
    pub fn new(ds: &Dataset, decls: &[ComponentDecl]) -> Result<Self> {
        let attr = |name: &str| {
            ds.attribute_index(name)
                .ok_or_else(|| Error::Config(format!("statvec refers to unknown attribute {name:?}")))
        };
        let target = |name: &str| {
            ds.target_index(name)
                .ok_or_else(|| Error::Config(format!("statvec refers to undeclared target {name:?}")))
        };
        let mut components = Vec::with_capacity(decls.len());
        let mut labels = Vec::new();
        for decl in decls {
            let c = match decl {
                ComponentDecl::ConstantOne => {
                    labels.push("1".to_string());
                    Component::ConstantOne
                }
                ComponentDecl::Indicator(a, v) => {
                    let attribute = attr(a)?;
                    let value = ds.level_code(attribute, v).ok_or_else(|| {
                        Error::Config(format!("attribute {a:?} has no level {v:?}"))
                    })?;
                    labels.push(format!("[{a}={v}]"));
                    Component::Indicator { attribute, value }
                }
                ComponentDecl::OneHot(a) => {
                    let attribute = attr(a)?;
                    for l in ds.levels(attribute) {
                        labels.push(format!("[{a}={l}]"));
                    }
                    Component::OneHot { attribute, arity: ds.arity(attribute) }
                }
                ComponentDecl::Target(t) => {
                    labels.push(t.clone());
                    Component::Target { target: target(t)? }
                }
                ComponentDecl::TargetSquared(t) => {
                    labels.push(format!("{t}^2"));
                    Component::TargetSquared { target: target(t)? }
                }
            };
            components.push(c);
        }
        if components.is_empty() {
            return Err(Error::Config("statvec needs at least one component".into()));
        }
        Ok(StatVecSpec { components, labels })
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// Human-readable name of each expanded entry, in order.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Expanded dimension `d`.
    pub fn dim(&self) -> usize {
        self.components.iter().map(Component::width).sum()
    }

    /// Adds row `row`'s statvec into `out` (length `dim()`).
    #[inline]
    pub fn accumulate(&self, ds: &Dataset, row: usize, out: &mut [f64]) {
        let mut j = 0;
        for c in &self.components {
            match *c {
                Component::ConstantOne => out[j] += 1.0,
                Component::Indicator { attribute, value } => {
                    if ds.code(row, attribute) == value {
                        out[j] += 1.0;
                    }
                }
                Component::OneHot { attribute, .. } => {
                    out[j + ds.code(row, attribute) as usize] += 1.0;
                }
                Component::Target { target } => out[j] += ds.target(target)[row],
                Component::TargetSquared { target } => {
                    let t = ds.target(target)[row];
                    out[j] += t * t;
                }
            }
            j += c.width();
        }
    }
}

/// Evaluates the statistics vector of one row.
pub fn eval_statvec(ds: &Dataset, spec: &StatVecSpec, row: usize) -> Vec<f64> {
    let mut out = vec![0.0; spec.dim()];
    spec.accumulate(ds, row, &mut out);
    out
}

/// Statvecs of every row, precomputed into one flat row-major table.
#[derive(Debug, Clone)]
pub struct StatTable {
    dim: usize,
    values: Vec<f64>,
}

impl StatTable {
    pub fn new(ds: &Dataset, spec: &StatVecSpec) -> Self {
        let dim = spec.dim();
        let mut values = vec![0.0; dim * ds.n_rows()];
        for (row, chunk) in values.chunks_exact_mut(dim).enumerate() {
            spec.accumulate(ds, row, chunk);
        }
        StatTable { dim, values }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.dim..(row + 1) * self.dim]
    }

    /// Sum of statvecs over `rows`.
    pub fn sum(&self, rows: &[u32]) -> SumStats {
        let mut s = SumStats::zeros(self.dim);
        for &r in rows {
            s.add_slice(self.row(r as usize));
        }
        s
    }
}

/// Componentwise sum of statvecs over some row set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumStats(pub Vec<f64>);

impl SumStats {
    pub fn zeros(dim: usize) -> Self {
        SumStats(vec![0.0; dim])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn add_slice(&mut self, other: &[f64]) {
        for (a, b) in self.0.iter_mut().zip(other) {
            *a += b;
        }
    }
}

impl From<Vec<f64>> for SumStats {
    fn from(v: Vec<f64>) -> Self {
        SumStats(v)
    }
}

impl Index<usize> for SumStats {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl AddAssign<&SumStats> for SumStats {
    fn add_assign(&mut self, rhs: &SumStats) {
        self.add_slice(&rhs.0);
    }
}

impl SubAssign<&SumStats> for SumStats {
    fn sub_assign(&mut self, rhs: &SumStats) {
        for (a, b) in self.0.iter_mut().zip(&rhs.0) {
            *a -= b;
        }
    }
}

/// The 8-row fixture over binary attributes A, B, C (row i holds the bits of
/// i, A most significant) with target `y = i + 1`.
pub fn fixture_t1() -> Dataset {
    let bit = |shift: u32| (0..8u32).map(|i| (i >> shift) & 1).collect::<Vec<_>>();
    Dataset::from_codes(
        &["A", "B", "C"],
        &[2, 2, 2],
        vec![bit(2), bit(1), bit(0)],
        vec![("y", (0..8).map(|i| i as f64 + 1.0).collect())],
    )
    .expect("fixture is well formed")
}
