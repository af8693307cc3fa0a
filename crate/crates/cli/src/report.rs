use radsearch::learners::{KFoldReport, Model};
use radsearch::search::{RankedRule, SearchConfig, SearchStats};
use radsearch::Dataset;
use serde_json::{json, Value};

use crate::FORMAT_VERSION;

/// A command's output, renderable as text, TSV or JSON. Wall-clock values
/// live only under `timing` so everything else is reproducible.
pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub results: Value,
    pub statistics: Value,
    pub timing: Value,
    pub text: Vec<String>,
    pub tsv: Vec<Vec<String>>,
}

/// JSON has no infinities; unscored becomes null.
pub fn score_value(score: f64) -> Value {
    if score.is_finite() { json!(score) } else { Value::Null }
}

pub fn fmt_score(score: f64) -> String {
    if score.is_finite() { format!("{score}") } else { "n/a".into() }
}

/// Search statistics minus the elapsed time, which belongs under `timing`.
pub fn stats_value(stats: &SearchStats) -> Value {
    let mut v = serde_json::to_value(stats).expect("stats serialize");
    if let Some(obj) = v.as_object_mut() {
        obj.remove("elapsed_secs");
    }
    v
}

impl Report {
    pub fn new(command: &'static str, config: Value) -> Self {
        Report {
            command,
            config,
            results: Value::Null,
            statistics: json!({}),
            timing: json!({}),
            text: Vec::new(),
            tsv: Vec::new(),
        }
    }

    pub fn set_rules(&mut self, ds: &Dataset, cfg: &SearchConfig, rules: &[RankedRule]) {
        let labels = cfg.spec.labels();
        let mut out = Vec::with_capacity(rules.len());
        self.tsv.push(["rank", "rule", "score", "matched", "sumstats"].map(String::from).to_vec());
        for (i, r) in rules.iter().enumerate() {
            let text = r.rule.display(ds).to_string();
            let matched = cfg.score.match_count(r.sumstats.as_slice());
            out.push(json!({
                "rank": i + 1,
                "rule": text,
                "literals": r.rule.literals().iter().map(|l| json!({
                    "attribute": ds.attribute_name(l.attribute),
                    "level": ds.level(l.attribute, l.value),
                })).collect::<Vec<_>>(),
                "score": score_value(r.score),
                "matched": matched,
                "sumstats": r.sumstats.as_slice(),
            }));
            let sums = r.sumstats.as_slice().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
            self.text.push(format!("{}. {text}  score={}  matched={matched}  sumstats=[{sums}]", i + 1, fmt_score(r.score)));
            self.tsv.push(vec![(i + 1).to_string(), text, fmt_score(r.score), matched.to_string(), sums]);
        }
        if rules.is_empty() {
            self.text.push("no rule meets the support threshold".into());
        }
        self.results = json!({ "sumstats_labels": labels, "rules": out });
    }

    pub fn set_search_stats(&mut self, stats: &SearchStats) {
        self.statistics = stats_value(stats);
        self.timing["search_secs"] = json!(stats.elapsed_secs);
    }

    pub fn set_model(&mut self, model: &Model, cv: Option<&KFoldReport>) {
        let rendered = model.render();
        self.text.extend(rendered.lines().map(String::from));
        match model {
            Model::Dlist(m) => {
                self.tsv.push(["entry", "rule", "predict"].map(String::from).to_vec());
                for (i, r) in m.rules.iter().enumerate() {
                    self.tsv.push(vec![(i + 1).to_string(), r.rule_text.clone(), r.label.clone()]);
                }
                self.tsv.push(vec!["default".into(), String::new(), m.default_label.clone()]);
            }
            Model::Reglist(m) => {
                self.tsv.push(["entry", "rule", "predict"].map(String::from).to_vec());
                for (i, r) in m.rules.iter().enumerate() {
                    self.tsv.push(vec![(i + 1).to_string(), r.rule_text.clone(), r.prediction.to_string()]);
                }
                self.tsv.push(vec!["default".into(), String::new(), m.default_value.to_string()]);
            }
            Model::Radreg(m) => {
                self.tsv.push(["term", "rule", "coefficient"].map(String::from).to_vec());
                self.tsv.push(vec!["intercept".into(), String::new(), m.intercept.to_string()]);
                for (i, t) in m.terms.iter().enumerate() {
                    self.tsv.push(vec![(i + 1).to_string(), t.rule_text.clone(), t.coefficient.to_string()]);
                }
            }
        }
        if let Some(cv) = cv {
            self.text.push(format!(
                "cross-validation: {} folds, {} {:.4} ± {:.4}",
                cv.folds, cv.metric, cv.mean, cv.std_error
            ));
        }
        self.results = json!({
            "model": model,
            "text": rendered.lines().collect::<Vec<_>>(),
            "cross_validation": cv,
        });
    }

    pub fn to_json(&self) -> String {
        let doc = json!({
            "format_version": FORMAT_VERSION,
            "command": self.command,
            "config": self.config,
            "results": self.results,
            "statistics": self.statistics,
            "timing": self.timing,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for line in &self.text {
            s += line;
            s.push('\n');
        }
        if let Some(stats) = self.statistics.as_object() {
            for (k, v) in stats {
                s += &format!("# {k}: {v}\n");
            }
        }
        if let Some(timing) = self.timing.as_object() {
            for (k, v) in timing {
                s += &format!("# timing {k}: {v}\n");
            }
        }
        s
    }

    pub fn to_tsv(&self) -> String {
        let rows: Vec<Vec<String>> = if self.tsv.is_empty() {
            self.text.iter().map(|l| vec![l.clone()]).collect()
        } else {
            self.tsv.clone()
        };
        let mut s = String::new();
        for row in rows {
            s += &row.iter().map(|c| c.replace(['\t', '\n'], " ")).collect::<Vec<_>>().join("\t");
            s.push('\n');
        }
        s
    }
}
