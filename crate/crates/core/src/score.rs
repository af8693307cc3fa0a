//! Score functions over summed statistics vectors.
//!
//! Every score returns `f64::NEG_INFINITY` for a rule matching fewer than
//! `n_support` rows, or no rows at all. Only [`ScoreFn::Strength`] and
//! [`ScoreFn::Impact`] provide an optimistic bound for pruning.

use serde::{Deserialize, Serialize};

use crate::dataset::{Component, ComponentDecl, Dataset, StatVecSpec, SumStats};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreFn {
    /// Mean target over matching rows. Statvec `[1, t]`.
    MeanTarget,
    /// Negative entropy (natural log) of an output attribute. Statvec `[onehot(o)]`.
    NegEntropy,
    /// Negative population variance of the target. Statvec `[1, t, t^2]`.
    NegVariance,
    /// Fraction of matches holding the most common output class. Statvec `[onehot(o)]`.
    Strength,
    /// `n_r (mu_r - mu_g)`. Statvec `[1, t]`.
    Impact,
    /// Between-group sum of squares of a rule indicator. Statvec `[1, t]`.
    BetweenGroupSs,
}

impl ScoreFn {
    pub const ALL: [ScoreFn; 6] = [
        ScoreFn::MeanTarget,
        ScoreFn::NegEntropy,
        ScoreFn::NegVariance,
        ScoreFn::Strength,
        ScoreFn::Impact,
        ScoreFn::BetweenGroupSs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScoreFn::MeanTarget => "mean",
            ScoreFn::NegEntropy => "ent",
            ScoreFn::NegVariance => "var",
            ScoreFn::Strength => "strength",
            ScoreFn::Impact => "impact",
            ScoreFn::BetweenGroupSs => "bgss",
        }
    }

    pub fn from_name(name: &str) -> Option<ScoreFn> {
        ScoreFn::ALL.into_iter().find(|s| s.name() == name)
    }

    /// True for scores over the class distribution of an output attribute;
    /// false for scores over a real-valued target.
    pub fn uses_output_attribute(self) -> bool {
        matches!(self, ScoreFn::NegEntropy | ScoreFn::Strength)
    }

    pub fn has_bound(self) -> bool {
        matches!(self, ScoreFn::Strength | ScoreFn::Impact)
    }

    /// The statvec shape this score consumes, built for `subject` (a target
    /// name, or an output attribute name for class scores).
    pub fn spec_for(self, ds: &Dataset, subject: &str) -> Result<StatVecSpec> {
        let t = || subject.to_string();
        let decls = match self {
            ScoreFn::MeanTarget | ScoreFn::Impact | ScoreFn::BetweenGroupSs => {
                vec![ComponentDecl::ConstantOne, ComponentDecl::Target(t())]
            }
            ScoreFn::NegVariance => vec![
                ComponentDecl::ConstantOne,
                ComponentDecl::Target(t()),
                ComponentDecl::TargetSquared(t()),
            ],
            ScoreFn::NegEntropy | ScoreFn::Strength => vec![ComponentDecl::OneHot(t())],
        };
        StatVecSpec::new(ds, &decls)
    }

    /// Checks that `spec` has the shape this score needs.
    pub fn check_spec(self, spec: &StatVecSpec) -> Result<()> {
        let c = spec.components();
        let ok = match self {
            ScoreFn::MeanTarget | ScoreFn::Impact | ScoreFn::BetweenGroupSs => matches!(
                c,
                [Component::ConstantOne, Component::Target { .. }]
            ),
            ScoreFn::NegVariance => match c {
                [Component::ConstantOne, Component::Target { target: a }, Component::TargetSquared { target: b }] => {
                    a == b
                }
                _ => false,
            },
            ScoreFn::NegEntropy | ScoreFn::Strength => matches!(c, [Component::OneHot { .. }]),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "score {:?} cannot consume statvec {:?}",
                self.name(),
                spec.labels()
            )))
        }
    }

    /// Number of rows a sumstats vector was accumulated over.
    #[inline]
    pub fn match_count(self, s: &[f64]) -> f64 {
        if self.uses_output_attribute() {
            s.iter().sum()
        } else {
            s[0]
        }
    }

    #[inline]
    pub fn score(self, s: &[f64], ctx: &ScoreContext) -> f64 {
        let n = self.match_count(s);
        if n <= 0.0 || n < ctx.n_support as f64 {
            return f64::NEG_INFINITY;
        }
        match self {
            ScoreFn::MeanTarget => s[1] / n,
            ScoreFn::NegEntropy => s
                .iter()
                .filter(|&&c| c > 0.0)
                .map(|&c| {
                    let p = c / n;
                    p * p.ln()
                })
                .sum::<f64>()
                .min(0.0),
            ScoreFn::NegVariance => (-(n * s[2] - s[1] * s[1]) / (n * n)).min(0.0),
            ScoreFn::Strength => s.iter().copied().fold(0.0, f64::max) / n,
            ScoreFn::Impact => n * (s[1] / n - ctx.global_mean()),
            ScoreFn::BetweenGroupSs => {
                let total = ctx.n_global;
                if n >= total {
                    return f64::NEG_INFINITY;
                }
                let diff = s[1] / n - ctx.global_mean();
                n * total / (total - n) * diff * diff
            }
        }
    }

    /// Upper bound on the score of every specialization of a rule whose
    /// sumstats are `s` (the rule itself included).
    pub fn optimistic_bound(self, s: &[f64], ctx: &ScoreContext) -> Result<f64> {
        let n = self.match_count(s);
        let supported = n > 0.0 && n >= ctx.n_support as f64;
        match self {
            ScoreFn::Strength => Ok(if supported { 1.0 } else { f64::NEG_INFINITY }),
            ScoreFn::Impact => Ok(if supported {
                n * (ctx.max_target - ctx.global_mean())
            } else {
                f64::NEG_INFINITY
            }),
            _ => Err(Error::Config(format!("score {:?} has no optimistic bound", self.name()))),
        }
    }
}

/// Search-wide constants a score may consult.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreContext {
    pub n_support: usize,
    pub global_sumstats: SumStats,
    pub n_global: f64,
    /// Largest target value among in-play rows (for the impact bound).
    pub max_target: f64,
}

impl ScoreContext {
    pub fn new(score: ScoreFn, global_sumstats: SumStats, n_support: usize, max_target: f64) -> Self {
        let n_global = score.match_count(global_sumstats.as_slice());
        ScoreContext { n_support, global_sumstats, n_global, max_target }
    }

    /// Mean target over in-play rows; meaningful for `[1, t, ...]` specs.
    #[inline]
    pub fn global_mean(&self) -> f64 {
        if self.n_global > 0.0 {
            self.global_sumstats[1] / self.n_global
        } else {
            0.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(global: Vec<f64>, support: usize) -> ScoreContext {
        ScoreContext::new(ScoreFn::MeanTarget, SumStats(global), support, 0.0)
    }

    fn ctx_class(global: Vec<f64>, support: usize) -> ScoreContext {
        ScoreContext::new(ScoreFn::Strength, SumStats(global), support, 0.0)
    }

    #[test]
    fn mean_examples() {
        let c = ctx(vec![8.0, 36.0], 1);
        assert_eq!(ScoreFn::MeanTarget.score(&[4.0, 26.0], &c), 6.5);
        assert_eq!(ScoreFn::MeanTarget.score(&[0.0, 0.0], &c), f64::NEG_INFINITY);
        let c = ctx(vec![8.0, 36.0], 5);
        assert_eq!(ScoreFn::MeanTarget.score(&[3.0, 12.0], &c), f64::NEG_INFINITY);
    }

    #[test]
    fn entropy_examples() {
        let c = ctx_class(vec![4.0, 4.0, 4.0], 1);
        assert_eq!(ScoreFn::NegEntropy.score(&[4.0, 0.0, 0.0], &c), 0.0);
        let v = ScoreFn::NegEntropy.score(&[2.0, 2.0, 0.0], &c);
        assert!((v + std::f64::consts::LN_2).abs() < 1e-12);
        assert!((v + std::f64::consts::LN_2).abs() < 1e-12);
        let v = ScoreFn::NegEntropy.score(&[1.0, 1.0, 1.0], &c);
        assert!((v + 3f64.ln()).abs() < 1e-12);
        assert!((v - (-1.098612)).abs() < 1e-6);
    }

    #[test]
    fn variance_examples() {
        let c = ctx(vec![2.0, 4.0, 8.0], 1);
        assert_eq!(ScoreFn::NegVariance.score(&[2.0, 4.0, 8.0], &c), 0.0);
        // population variance of {0, 2}: mean 1, deviations 1 and 1
        let oracle = -([0.0f64, 2.0].iter().map(|t| (t - 1.0) * (t - 1.0)).sum::<f64>() / 2.0);
        assert_eq!(ScoreFn::NegVariance.score(&[2.0, 2.0, 4.0], &c), oracle);
        assert_eq!(oracle, -1.0);
        assert_eq!(ScoreFn::NegVariance.score(&[1.0, 5.0, 25.0], &c), 0.0);
    }

    #[test]
    fn strength_examples() {
        let c = ctx_class(vec![100.0, 100.0], 1);
        assert_eq!(ScoreFn::Strength.score(&[70.0, 30.0], &c), 0.7);
        assert_eq!(ScoreFn::Strength.score(&[5.0, 5.0], &c), 0.5);
        assert_eq!(ScoreFn::Strength.score(&[0.0, 9.0], &c), 1.0);
    }

    #[test]
    fn impact_examples() {
        // global mean 3 over 20 rows
        let c = ScoreContext::new(ScoreFn::Impact, SumStats(vec![20.0, 60.0]), 1, 9.0);
        assert_eq!(ScoreFn::Impact.score(&[10.0, 50.0], &c), 20.0);
        assert_eq!(ScoreFn::Impact.score(&[7.0, 21.0], &c), 0.0);
        let t1 = ScoreContext::new(ScoreFn::Impact, SumStats(vec![8.0, 36.0]), 1, 8.0);
        assert_eq!(ScoreFn::Impact.score(&[4.0, 20.0], &t1), 2.0);
    }

    #[test]
    fn bgss_examples() {
        let c = ScoreContext::new(ScoreFn::BetweenGroupSs, SumStats(vec![8.0, 36.0]), 1, 8.0);
        assert_eq!(ScoreFn::BetweenGroupSs.score(&[4.0, 18.0], &c), 0.0);
        assert_eq!(ScoreFn::BetweenGroupSs.score(&[4.0, 26.0], &c), 32.0);
        assert_eq!(ScoreFn::BetweenGroupSs.score(&[8.0, 36.0], &c), f64::NEG_INFINITY);

        // independent check: SSE(intercept) - SSE(intercept + indicator A=1)
        let y: Vec<f64> = (1..=8).map(f64::from).collect();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let sse = |v: &[f64], m: f64| v.iter().map(|t| (t - m) * (t - m)).sum::<f64>();
        let all = sse(&y, mean(&y));
        let (lo, hi) = y.split_at(4);
        let split = sse(lo, mean(lo)) + sse(hi, mean(hi));
        assert!((all - split - 32.0).abs() < 1e-12);
    }

    #[test]
    fn bounds() {
        let c = ctx_class(vec![100.0, 100.0], 50);
        assert_eq!(ScoreFn::Strength.optimistic_bound(&[70.0, 30.0], &c).unwrap(), 1.0);
        assert_eq!(
            ScoreFn::Strength.optimistic_bound(&[20.0, 20.0], &c).unwrap(),
            f64::NEG_INFINITY
        );
        let c = ScoreContext::new(ScoreFn::Impact, SumStats(vec![20.0, 60.0]), 1, 9.0);
        assert_eq!(ScoreFn::Impact.optimistic_bound(&[10.0, 50.0], &c).unwrap(), 60.0);
        assert!(matches!(
            ScoreFn::MeanTarget.optimistic_bound(&[10.0, 50.0], &c),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn names_round_trip() {
        for s in ScoreFn::ALL {
            assert_eq!(ScoreFn::from_name(s.name()), Some(s));
        }
        assert_eq!(ScoreFn::from_name("nope"), None);
    }

    #[test]
    fn spec_shapes_checked() {
        let ds = crate::dataset::fixture_t1();
        for s in ScoreFn::ALL {
            let subject = if s.uses_output_attribute() { "C" } else { "y" };
            let spec = s.spec_for(&ds, subject).unwrap();
            s.check_spec(&spec).unwrap();
        }
        let mean_spec = ScoreFn::MeanTarget.spec_for(&ds, "y").unwrap();
        assert!(ScoreFn::NegVariance.check_spec(&mean_spec).is_err());
        assert!(ScoreFn::NegEntropy.check_spec(&mean_spec).is_err());
    }
}
