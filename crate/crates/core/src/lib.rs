//! Exhaustive search for the best conjunctive rules under scores of summed
//! per-row statistics vectors, plus the rule-list learners built on it.

pub mod adtree;
pub mod cube;
pub mod dataset;
pub mod error;
pub mod learners;
pub mod rowtree;
pub mod rule;
pub mod score;
pub mod search;
pub mod synth;

pub use dataset::{load_csv, read_csv, ComponentDecl, Dataset, Schema, StatTable, StatVecSpec, SumStats};
pub use error::{Error, Result};
pub use rule::{Literal, Rule};
pub use score::{ScoreContext, ScoreFn};
pub use search::{Algorithm, RankedRule, SearchConfig, SearchResult, SearchStats};
pub use learners::{Model, ModelKind, LearnerSpec};
