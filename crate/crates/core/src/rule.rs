use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub attribute: usize,
    pub value: u32,
}

impl Literal {
    pub fn new(attribute: usize, value: u32) -> Self {
        Literal { attribute, value }
    }
}

/// A conjunction of `attribute = value` literals with strictly increasing
/// attributes. The empty rule matches every row.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Rule(Vec<Literal>);

impl Rule {
    pub fn empty() -> Self {
        Rule(Vec::new())
    }

    /// Sorts the literals; fails on a repeated attribute.
    pub fn new(mut literals: Vec<Literal>) -> Result<Self> {
        literals.sort();
        if literals.windows(2).any(|w| w[0].attribute == w[1].attribute) {
            return Err(Error::Contract(format!("rule repeats an attribute: {literals:?}")));
        }
        Ok(Rule(literals))
    }

    pub fn from_pairs(pairs: &[(usize, u32)]) -> Result<Self> {
        Rule::new(pairs.iter().map(|&(a, v)| Literal::new(a, v)).collect())
    }

    /// Caller guarantees sorted, distinct attributes.
    pub(crate) fn from_sorted(literals: Vec<Literal>) -> Self {
        debug_assert!(literals.windows(2).all(|w| w[0].attribute < w[1].attribute));
        Rule(literals)
    }

    pub fn literals(&self) -> &[Literal] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn attributes(&self) -> Vec<usize> {
        self.0.iter().map(|l| l.attribute).collect()
    }

    pub fn contains_attribute(&self, attribute: usize) -> bool {
        self.0.iter().any(|l| l.attribute == attribute)
    }

    /// Returns this rule with one more literal on a new attribute.
    pub fn extended(&self, literal: Literal) -> Result<Rule> {
        let mut lits = self.0.clone();
        lits.push(literal);
        Rule::new(lits)
    }

    #[inline]
    pub fn matches(&self, ds: &Dataset, row: usize) -> bool {
        self.0.iter().all(|l| ds.code(row, l.attribute) == l.value)
    }

    /// Checks every value code against the dataset's arities.
    pub fn validate(&self, ds: &Dataset) -> Result<()> {
        for l in &self.0 {
            if l.attribute >= ds.n_attributes() || l.value as usize >= ds.arity(l.attribute) {
                return Err(Error::Contract(format!("literal {l:?} outside dataset")));
            }
        }
        Ok(())
    }

    /// Parses `"A=1 & B=x"` (also accepts `∧` or `,` as separators).
    pub fn parse(ds: &Dataset, text: &str) -> Result<Rule> {
        let mut lits = Vec::new();
        for part in text.split(['&', ',', '∧']).map(str::trim).filter(|p| !p.is_empty()) {
            let (a, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("literal {part:?} lacks '='")))?;
            let attribute = ds
                .attribute_index(a.trim())
                .ok_or_else(|| Error::Config(format!("unknown attribute {a:?}")))?;
            let value = ds
                .level_code(attribute, v.trim())
                .ok_or_else(|| Error::Config(format!("attribute {a:?} has no level {v:?}")))?;
            lits.push(Literal::new(attribute, value));
        }
        Rule::new(lits)
    }

    pub fn display<'a>(&'a self, ds: &'a Dataset) -> RuleDisplay<'a> {
        RuleDisplay { rule: self, ds }
    }
}

/// Order used to rank rules of equal score: shorter first, then literal list.
impl PartialOrd for Rule {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rule {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

pub struct RuleDisplay<'a> {
    rule: &'a Rule,
    ds: &'a Dataset,
}

impl fmt::Display for RuleDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rule.is_empty() {
            return write!(f, "(all)");
        }
        for (i, l) in self.rule.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ∧ ")?;
            }
            write!(
                f,
                "{}={}",
                self.ds.attribute_name(l.attribute),
                self.ds.level(l.attribute, l.value)
            )?;
        }
        Ok(())
    }
}
