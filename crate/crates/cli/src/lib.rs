//! Command-line front end: argument handling, dataset loading, and report
//! rendering for every subcommand.

mod args;
mod report;

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::Parser;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use radsearch::learners::{kfold_eval, learn, LearnerSpec, ModelKind};
use radsearch::rowtree::RowTree;
use radsearch::search::{self, Algorithm, SearchConfig};
use radsearch::{synth, ComponentDecl, Dataset, ScoreFn, StatTable, StatVecSpec};
use serde_json::{json, Value};

pub use args::{Cli, Command};
use args::{AlgoArg, BenchCmd, DataArgs, Format, GenerateCmd, LambdaCmd, LearnCmd, ModelArg, OutputArgs, RuleArgs, SearchCmd, SyntheticKind};
use report::Report;

/// Tag identifying the layout of JSON reports.
pub const FORMAT_VERSION: &str = "radsearch-report/1";

/// Naive search above this many row visits needs `--yes`.
const NAIVE_COST_LIMIT: f64 = 1e9;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(radsearch::Error),
    Io(std::io::Error),
    /// Exhaustive searchers disagreed.
    Consistency(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Runtime(radsearch::Error::Config(_)) => 1,
            CliError::Runtime(_) | CliError::Io(_) => 2,
            CliError::Consistency(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Runtime(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Consistency(m) => write!(f, "consistency failure: {m}"),
        }
    }
}

impl From<radsearch::Error> for CliError {
    fn from(e: radsearch::Error) -> Self {
        CliError::Runtime(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Parses `args` (including the program name), runs the command, and returns
/// the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{text}");
            } else {
                let _ = write!(stderr, "{text}");
            }
            return code;
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "radsearch: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match command {
        Command::Search(cmd) => cmd_search(cmd, stdout, stderr),
        Command::Learn(cmd) => cmd_learn(cmd, stdout),
        Command::Lambda(cmd) => cmd_lambda(cmd, stdout),
        Command::Bench(cmd) => cmd_bench(cmd, stdout, stderr),
        Command::Generate(cmd) => cmd_generate(cmd, stdout),
    }
}

fn load(data: &DataArgs) -> Result<(Dataset, Value)> {
    if let Some(path) = &data.input {
        let schema_text = data
            .schema
            .as_deref()
            .ok_or_else(|| CliError::Usage("--input needs --schema".into()))?;
        let schema = radsearch::Schema::parse(schema_text)?;
        let ds = radsearch::load_csv(path, &schema)?;
        let echo = json!({ "input": path.display().to_string(), "schema": schema_text });
        return Ok((ds, echo));
    }
    let Some(spec) = &data.synthetic else {
        return Err(CliError::Usage("give --input PATH --schema SPEC or --synthetic R,M,LAMBDA,SEED".into()));
    };
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    let bad = || CliError::Usage(format!("--synthetic expects R,M,LAMBDA,SEED, got {spec:?}"));
    if parts.len() != 4 {
        return Err(bad());
    }
    let rows: usize = parts[0].parse().map_err(|_| bad())?;
    let m: usize = parts[1].parse().map_err(|_| bad())?;
    let lambda: f64 = parts[2].parse().map_err(|_| bad())?;
    let seed: u64 = parts[3].parse().map_err(|_| bad())?;
    let ds = match data.synthetic_kind {
        SyntheticKind::Correlated => synth::correlated(rows, m, data.synthetic_arity, lambda, seed)?,
        SyntheticKind::Iid => synth::iid_bernoulli(rows, m, lambda, seed)?,
    };
    let kind = match data.synthetic_kind {
        SyntheticKind::Correlated => "correlated",
        SyntheticKind::Iid => "iid",
    };
    let echo = json!({
        "synthetic": { "rows": rows, "attributes": m, "lambda": lambda, "seed": seed,
                       "kind": kind, "arity": data.synthetic_arity }
    });
    Ok((ds, echo))
}

/// `INT` or `R/N`, the latter resolved as `ceil(rows / N)`.
pub fn parse_support(text: &str, rows: usize) -> Result<usize> {
    let text = text.trim();
    if let Some(div) = text.strip_prefix("R/") {
        let n: usize = div
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("bad --support {text:?}")))?;
        return Ok(rows.div_ceil(n));
    }
    text.parse().map_err(|_| CliError::Usage(format!("--support expects INT or R/N, got {text:?}")))
}

fn algorithm(a: AlgoArg) -> Algorithm {
    match a {
        AlgoArg::Rad => Algorithm::Rad,
        AlgoArg::Nsn => Algorithm::Nsn,
        AlgoArg::Naive => Algorithm::Naive,
        AlgoArg::Hill => Algorithm::Hill,
    }
}

/// The column a score is computed on, checking `--target` / `--output-attr`
/// against what the score consumes.
fn subject(score: ScoreFn, rule: &RuleArgs) -> Result<String> {
    if score.uses_output_attribute() {
        if rule.target.is_some() {
            return Err(CliError::Usage(format!("--score {} takes --output-attr, not --target", score.name())));
        }
        rule.output_attr
            .clone()
            .ok_or_else(|| CliError::Usage(format!("--score {} needs --output-attr", score.name())))
    } else {
        if rule.output_attr.is_some() {
            return Err(CliError::Usage(format!("--score {} takes --target, not --output-attr", score.name())));
        }
        rule.target
            .clone()
            .ok_or_else(|| CliError::Usage(format!("--score {} needs --target", score.name())))
    }
}

fn parse_score(name: &str) -> Result<ScoreFn> {
    ScoreFn::from_name(name).ok_or_else(|| {
        CliError::Usage(format!("unknown score {name:?}; expected mean, ent, var, strength, impact or bgss"))
    })
}

fn search_config(ds: &Dataset, score: ScoreFn, subject: &str, rule: &RuleArgs) -> Result<(SearchConfig, usize)> {
    if rule.k == 0 {
        return Err(CliError::Usage("--k must be at least 1".into()));
    }
    if rule.prune && !score.has_bound() {
        return Err(CliError::Usage(format!("--prune needs strength or impact, not {}", score.name())));
    }
    let support = parse_support(&rule.support, ds.n_rows())?;
    let mut cfg = SearchConfig::new(ds, score, subject, rule.k, support)?;
    cfg.pruning = rule.prune;
    cfg.threads = rule.threads;
    cfg.memory_cap = rule.memory_cap_mb.map(|mb| mb.saturating_mul(1 << 20));
    Ok((cfg, support))
}

/// Estimated row visits of the naive searcher: rows times the number of rules.
fn naive_cost(ds: &Dataset, cfg: &SearchConfig) -> f64 {
    // elementary symmetric sums of the eligible arities, up to degree k
    let mut e = vec![0.0f64; cfg.k + 1];
    e[0] = 1.0;
    for a in (0..ds.n_attributes()).filter(|a| !cfg.excluded_attributes.contains(a)) {
        for q in (1..=cfg.k).rev() {
            e[q] += e[q - 1] * ds.arity(a) as f64;
        }
    }
    e.iter().sum::<f64>() * ds.n_rows() as f64
}

fn naive_guard(ds: &Dataset, cfg: &SearchConfig, yes: bool, stderr: &mut dyn Write) -> Result<()> {
    let cost = naive_cost(ds, cfg);
    if cost > NAIVE_COST_LIMIT {
        writeln!(stderr, "warning: naive search will scan about {cost:.3e} row-rule pairs")?;
        if !yes {
            return Err(CliError::Usage("naive search cost exceeds the safety limit; pass --yes to run it".into()));
        }
    }
    Ok(())
}

fn rule_echo(rule: &RuleArgs, support: usize) -> Value {
    json!({
        "k": rule.k,
        "support": rule.support,
        "n_support": support,
        "target": rule.target,
        "output_attr": rule.output_attr,
        "prune": rule.prune,
        "threads": rule.threads,
        "memory_cap_mb": rule.memory_cap_mb,
    })
}

/// Mean λ̂ over the rowtree on the first `k` eligible attributes.
fn lambda_probe(ds: &Dataset, cfg: &SearchConfig) -> Option<f64> {
    let attrs: Vec<usize> = (0..ds.n_attributes())
        .filter(|a| !cfg.excluded_attributes.contains(a))
        .take(cfg.k)
        .collect();
    let spec = StatVecSpec::new(ds, &[ComponentDecl::ConstantOne]).ok()?;
    let table = StatTable::new(ds, &spec);
    let rows = cfg.in_play_rows.clone().unwrap_or_else(|| (0..ds.n_rows() as u32).collect());
    RowTree::build(ds, &table, &attrs, rows).ok()?.measure_lambda()
}

fn cmd_search(cmd: SearchCmd, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let started = Instant::now();
    let score = parse_score(&cmd.score)?;
    let subject = subject(score, &cmd.rule)?;
    if cmd.top == 0 {
        return Err(CliError::Usage("--top must be at least 1".into()));
    }
    let (ds, data_echo) = load(&cmd.data)?;
    let (cfg, support) = search_config(&ds, score, &subject, &cmd.rule)?;
    let cfg = cfg.with_top_n(cmd.top);
    let algo = algorithm(cmd.rule.algo);
    if algo == Algorithm::Naive {
        naive_guard(&ds, &cfg, cmd.rule.yes, stderr)?;
    }
    let result = search::run(&ds, &cfg, algo)?;

    let mut config = rule_echo(&cmd.rule, support);
    config["score"] = json!(score.name());
    config["top"] = json!(cmd.top);
    config["algo"] = json!(algo.name());
    config["seed"] = json!(cmd.output.seed);
    config["data"] = data_echo;
    let mut report = Report::new("search", config);
    report.set_rules(&ds, &cfg, &result.rules);
    report.set_search_stats(&result.stats);
    report.statistics["rows"] = json!(ds.n_rows());
    report.statistics["lambda_hat"] = json!(lambda_probe(&ds, &cfg));
    report.timing["total_secs"] = json!(started.elapsed().as_secs_f64());
    emit(&report, &cmd.output, stdout)
}

fn cmd_learn(cmd: LearnCmd, stdout: &mut dyn Write) -> Result<()> {
    let started = Instant::now();
    let (kind, score) = match cmd.model {
        ModelArg::Dlist => (ModelKind::Dlist, ScoreFn::NegEntropy),
        ModelArg::Reglist => (ModelKind::Reglist, ScoreFn::MeanTarget),
        ModelArg::Radreg => {
            if cmd.max_terms == 0 {
                return Err(CliError::Usage("--max-terms must be at least 1".into()));
            }
            (ModelKind::Radreg { max_terms: cmd.max_terms }, ScoreFn::BetweenGroupSs)
        }
    };
    let subject = subject(score, &cmd.rule)?;
    if let Some(f) = cmd.folds {
        if f < 2 {
            return Err(CliError::Usage("--folds must be at least 2".into()));
        }
    }
    let (ds, data_echo) = load(&cmd.data)?;
    let (base, support) = search_config(&ds, score, &subject, &cmd.rule)?;
    let algo = algorithm(cmd.rule.algo);
    if algo == Algorithm::Naive {
        naive_guard(&ds, &base, cmd.rule.yes, &mut std::io::sink())?;
    }
    let spec = LearnerSpec { kind, subject, base, searcher: algo };
    let model = learn(&ds, &spec)?;
    let cv = match cmd.folds {
        Some(folds) => Some(kfold_eval(&ds, &spec, folds, cmd.output.seed)?),
        None => None,
    };

    let mut config = rule_echo(&cmd.rule, support);
    config["model"] = json!(kind.name());
    config["max_terms"] = json!(cmd.max_terms);
    config["folds"] = json!(cmd.folds);
    config["algo"] = json!(algo.name());
    config["seed"] = json!(cmd.output.seed);
    config["data"] = data_echo;
    let mut report = Report::new("learn", config);
    let all: Vec<u32> = (0..ds.n_rows() as u32).collect();
    report.statistics["training_loss"] = json!(model.loss(&ds, &all));
    report.statistics["rows"] = json!(ds.n_rows());
    report.set_model(&model, cv.as_ref());
    report.timing["total_secs"] = json!(started.elapsed().as_secs_f64());
    emit(&report, &cmd.output, stdout)
}

fn cmd_lambda(cmd: LambdaCmd, stdout: &mut dyn Write) -> Result<()> {
    let started = Instant::now();
    if cmd.k == 0 || cmd.samples == 0 {
        return Err(CliError::Usage("--k and --samples must be at least 1".into()));
    }
    let (ds, data_echo) = load(&cmd.data)?;
    let m = ds.n_attributes();
    let depth = cmd.k.min(m);
    let spec = StatVecSpec::new(&ds, &[ComponentDecl::ConstantOne])?;
    let table = StatTable::new(&ds, &spec);
    let rows: Vec<u32> = (0..ds.n_rows() as u32).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cmd.output.seed);
    let mut per_subset = Vec::with_capacity(cmd.samples);
    let mut values = Vec::new();
    for _ in 0..cmd.samples {
        let mut attrs = sample(&mut rng, m, depth).into_vec();
        attrs.sort_unstable();
        let rt = RowTree::build(&ds, &table, &attrs, rows.clone())?;
        let lambda = rt.measure_lambda();
        values.extend(lambda);
        per_subset.push(json!({
            "attributes": attrs.iter().map(|&a| ds.attribute_name(a)).collect::<Vec<_>>(),
            "lambda_hat": lambda,
            "stored_rows": rt.stored_rows(),
            "rows_per_depth": rt.rows_per_depth(),
        }));
    }
    let n = values.len() as f64;
    let mean = (!values.is_empty()).then(|| values.iter().sum::<f64>() / n);
    let spread = mean.map(|mu| (values.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / n).sqrt());
    let min = values.iter().copied().reduce(f64::min);
    let max = values.iter().copied().reduce(f64::max);

    let config = json!({ "k": cmd.k, "samples": cmd.samples, "seed": cmd.output.seed, "data": data_echo });
    let mut report = Report::new("lambda", config);
    report.results = json!({
        "lambda_hat": mean, "std": spread, "min": min, "max": max, "per_subset": per_subset,
    });
    report.statistics["rows"] = json!(ds.n_rows());
    report.statistics["depth"] = json!(depth);
    report.text = vec![
        format!("lambda_hat = {}", mean.map_or("n/a".into(), |v| format!("{v:.4}"))),
        format!(
            "spread: std {} min {} max {} over {} subsets of {depth} attributes",
            fmt_opt(spread),
            fmt_opt(min),
            fmt_opt(max),
            cmd.samples
        ),
    ];
    report.timing["total_secs"] = json!(started.elapsed().as_secs_f64());
    emit(&report, &cmd.output, stdout)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or("n/a".into(), |v| format!("{v:.4}"))
}

fn cmd_bench(cmd: BenchCmd, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let score = parse_score(&cmd.score)?;
    let subject = subject(score, &cmd.rule)?;
    if cmd.repeat == 0 {
        return Err(CliError::Usage("--repeat must be at least 1".into()));
    }
    let algos: Vec<Algorithm> = cmd
        .algos
        .split(',')
        .map(|s| Algorithm::from_name(s.trim()).ok_or_else(|| CliError::Usage(format!("unknown algorithm {s:?}"))))
        .collect::<Result<_>>()?;
    if algos.is_empty() {
        return Err(CliError::Usage("--algos is empty".into()));
    }
    let (ds, data_echo) = load(&cmd.data)?;
    let (cfg, support) = search_config(&ds, score, &subject, &cmd.rule)?;
    if algos.contains(&Algorithm::Naive) {
        naive_guard(&ds, &cfg, cmd.rule.yes, stderr)?;
    }

    let mut results = serde_json::Map::new();
    let mut timing = serde_json::Map::new();
    let mut medians = Vec::new();
    let mut optimal: Vec<(Algorithm, f64, String)> = Vec::new();
    let mut text = Vec::new();
    for &algo in &algos {
        let mut times = Vec::with_capacity(cmd.repeat);
        let mut last = None;
        for _ in 0..cmd.repeat {
            let t = Instant::now();
            let res = search::run(&ds, &cfg, algo)?;
            times.push(t.elapsed().as_secs_f64());
            last = Some(res);
        }
        let res = last.expect("repeat >= 1");
        let median = median(&times);
        medians.push((algo, median));
        let best_rule = res.best().map(|b| b.rule.display(&ds).to_string());
        let best_score = res.best_score();
        if algo.is_exhaustive() {
            optimal.push((algo, best_score, best_rule.clone().unwrap_or_default()));
        }
        text.push(format!(
            "{:<6} median {median:.4}s  best {}  score {}",
            algo.name(),
            best_rule.as_deref().unwrap_or("(none)"),
            report::fmt_score(best_score)
        ));
        results.insert(
            algo.name().into(),
            json!({
                "best_rule": best_rule,
                "best_score": report::score_value(best_score),
                "statistics": report::stats_value(&res.stats),
            }),
        );
        timing.insert(algo.name().into(), json!({ "runs_secs": times, "median_secs": median }));
    }
    let mut speedups = serde_json::Map::new();
    if let Some(&(_, rad)) = medians.iter().find(|(a, _)| *a == Algorithm::Rad) {
        for &(algo, m) in medians.iter().filter(|(a, _)| *a != Algorithm::Rad) {
            let ratio = m / rad;
            speedups.insert(format!("{}/rad", algo.name()), json!(ratio));
            text.push(format!("speedup {}/rad = {ratio:.2}", algo.name()));
        }
    }
    timing.insert("speedups".into(), Value::Object(speedups));

    let consistent = optimal.windows(2).all(|w| w[0].1.to_bits() == w[1].1.to_bits() && w[0].2 == w[1].2);
    text.push(format!("exhaustive searchers agree: {}", if consistent { "yes" } else { "NO" }));

    let mut config = rule_echo(&cmd.rule, support);
    config["score"] = json!(score.name());
    config["algos"] = json!(algos.iter().map(|a| a.name()).collect::<Vec<_>>());
    config["repeat"] = json!(cmd.repeat);
    config["seed"] = json!(cmd.output.seed);
    config["data"] = data_echo;
    let mut report = Report::new("bench", config);
    report.results = Value::Object(results);
    report.statistics["consistent"] = json!(consistent);
    report.statistics["rows"] = json!(ds.n_rows());
    report.statistics["lambda_hat"] = json!(lambda_probe(&ds, &cfg));
    if let Some(l) = report.statistics["lambda_hat"].as_f64() {
        text.push(format!("measured lambda_hat {l:.4}"));
    }
    report.text = text;
    report.timing = Value::Object(timing);
    emit(&report, &cmd.output, stdout)?;
    if consistent {
        Ok(())
    } else {
        Err(CliError::Consistency(format!("exhaustive searchers disagree: {optimal:?}")))
    }
}

fn median(times: &[f64]) -> f64 {
    let mut t = times.to_vec();
    t.sort_by(f64::total_cmp);
    let n = t.len();
    if n % 2 == 1 {
        t[n / 2]
    } else {
        (t[n / 2 - 1] + t[n / 2]) / 2.0
    }
}

fn cmd_generate(cmd: GenerateCmd, stdout: &mut dyn Write) -> Result<()> {
    let ds = match cmd.kind {
        SyntheticKind::Correlated => synth::correlated(cmd.rows, cmd.attributes, cmd.arity, cmd.lambda, cmd.seed)?,
        SyntheticKind::Iid => synth::iid_bernoulli(cmd.rows, cmd.attributes, cmd.lambda, cmd.seed)?,
    };
    match &cmd.out {
        Some(path) => ds.write_csv_path(path)?,
        None => ds.write_csv(&mut *stdout)?,
    }
    Ok(())
}

fn emit(report: &Report, output: &OutputArgs, stdout: &mut dyn Write) -> Result<()> {
    let body = match output.format {
        Format::Json => report.to_json(),
        Format::Tsv => report.to_tsv(),
        Format::Text => report.to_text(),
    };
    match &output.out {
        Some(path) => std::fs::write(path, body)?,
        None => stdout.write_all(body.as_bytes())?,
    }
    Ok(())
}
