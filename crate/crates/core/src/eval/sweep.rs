use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{accuracy, k_grid, ndcg_at_10, train_forest, train_pointwise_ranker};
use crate::baselines::{select_top_k, FeatureScores, Scorer};
use crate::builders::Builder;
use crate::data::{discretize, stratified_folds, Dataset, Split};
use crate::error::{Error, Result};
use crate::qubo::QuboProblem;
use crate::seed;
use crate::solvers::{solve, SolverConfig, SolverId};

/// How features are chosen for a given `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Method {
    /// Penalize a QUBO toward `k` ones and take the lowest-energy sample.
    Qubo(Builder),
    /// Rank features with a linear filter score and keep the top `k`.
    Baseline { scorer: Scorer, bins: usize },
}

impl Method {
    pub fn name(&self) -> String {
        match self {
            Method::Qubo(b) => b.name().to_owned(),
            Method::Baseline { scorer, .. } => format!("baseline:{scorer}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Clf,
    Rank,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MetricName {
    #[serde(rename = "accuracy")]
    Accuracy,
    #[serde(rename = "ndcg@10")]
    Ndcg10,
}

impl std::fmt::Display for MetricName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MetricName::Accuracy => "accuracy",
            MetricName::Ndcg10 => "ndcg@10",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub method: Method,
    pub solver: SolverId,
    pub solver_config: SolverConfig,
    pub penalty_strength: f64,
    pub task: Task,
    pub trees: usize,
    /// Score each `k` by stratified k-fold accuracy over train + validation
    /// instead of the single validation part (classification only).
    pub cv_folds: Option<usize>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k_target: usize,
    pub n_actual: usize,
    pub valid_metric: f64,
    pub selected: Vec<usize>,
    /// Energy of the chosen sample under the penalized problem.
    pub energy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub method: String,
    pub solver: String,
    pub k_target: usize,
    pub selected: Vec<usize>,
    pub n_actual: usize,
    pub energy: Option<f64>,
    pub wall_ms: f64,
}

/// Wall-clock per stage, summed over all `k`, in milliseconds.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub builder_ms: f64,
    pub solve_ms: f64,
    pub train_ms: f64,
    pub evaluate_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_k_trace: Vec<TraceRow>,
    pub chosen_k: usize,
    pub selection: SelectionResult,
    pub test_metric: f64,
    pub metric_name: MetricName,
    pub timings: Timings,
    /// How many times the base QUBO was built (1 for QUBO methods).
    pub qubo_builds: usize,
}

impl EvalReport {
    /// `k_target,n_actual,valid_metric` rows, then
    /// `chosen:<k>,<n_actual>,<test_metric>`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k_target,n_actual,valid_metric\n");
        for r in &self.per_k_trace {
            out.push_str(&format!("{},{},{}\n", r.k_target, r.n_actual, r.valid_metric));
        }
        out.push_str(&format!(
            "chosen:{},{},{}\n",
            self.chosen_k, self.selection.n_actual, self.test_metric
        ));
        out
    }

    /// Full report as JSON; timings are left out unless asked for so that
    /// reruns produce identical files.
    pub fn to_json(&self, include_timings: bool) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if !include_timings {
            let obj = v.as_object_mut().unwrap();
            obj.remove("timings");
            obj["selection"].as_object_mut().unwrap().remove("wall_ms");
        }
        v
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

const STREAM_SOLVE: u64 = 1;
const STREAM_MODEL: u64 = 2;
const STREAM_FOLDS: u64 = 3;
const FINAL_MODEL: u64 = u64::MAX;

enum Base {
    Qubo(QuboProblem),
    Scores(FeatureScores),
}

struct KOutcome {
    row: TraceRow,
    solve: Duration,
    train: Duration,
    evaluate: Duration,
}

/// Runs the k-sweep: build once on the training part, then for each `k`
/// select, train, and score on validation; retrain the best selection on
/// train + validation and report the test metric.
pub fn run_sweep(ds: &Dataset, split: &Split, cfg: &SweepConfig) -> Result<EvalReport> {
    check_setup(ds, split, cfg)?;
    let train_ds = ds.subset(&split.train);

    let started = Instant::now();
    let (base, qubo_builds) = match &cfg.method {
        Method::Qubo(builder) => (Base::Qubo(builder.build(&train_ds)?), 1),
        Method::Baseline { scorer, bins } => {
            let view = scorer.needs_bins().then(|| discretize(&train_ds, *bins)).transpose()?;
            (Base::Scores(scorer.score(&train_ds, view.as_ref())?), 0)
        }
    };
    let builder_time = started.elapsed();

    let outcomes: Vec<KOutcome> = k_grid(ds.n_features())
        .into_par_iter()
        .map(|k| evaluate_k(ds, split, cfg, &base, k))
        .collect::<Result<_>>()?;

    let mut timings = Timings {
        builder_ms: ms(builder_time),
        ..Default::default()
    };
    for o in &outcomes {
        timings.solve_ms += ms(o.solve);
        timings.train_ms += ms(o.train);
        timings.evaluate_ms += ms(o.evaluate);
    }
    let per_k_trace: Vec<TraceRow> = outcomes.into_iter().map(|o| o.row).collect();

    let chosen = per_k_trace
        .iter()
        .filter(|r| r.n_actual > 0)
        .min_by(|a, b| {
            b.valid_metric
                .total_cmp(&a.valid_metric)
                .then(a.n_actual.cmp(&b.n_actual))
                .then(a.k_target.cmp(&b.k_target))
        })
        .ok_or_else(|| Error::invalid_data("every k produced an empty feature selection"))?
        .clone();

    let final_started = Instant::now();
    let dev = split.development();
    let model_seed = seed::derive(seed::derive(cfg.seed, STREAM_MODEL), FINAL_MODEL);
    let test_metric = fit_and_score(ds, &dev, &split.test, &chosen.selected, cfg, model_seed)?;
    timings.train_ms += ms(final_started.elapsed());

    let metric_name = match cfg.task {
        Task::Clf => MetricName::Accuracy,
        Task::Rank => MetricName::Ndcg10,
    };
    Ok(EvalReport {
        chosen_k: chosen.k_target,
        selection: SelectionResult {
            method: cfg.method.name(),
            solver: match cfg.method {
                Method::Qubo(_) => cfg.solver.to_string(),
                Method::Baseline { .. } => "top-k".to_owned(),
            },
            k_target: chosen.k_target,
            n_actual: chosen.n_actual,
            selected: chosen.selected.clone(),
            energy: chosen.energy,
            wall_ms: timings.builder_ms + timings.solve_ms,
        },
        per_k_trace,
        test_metric,
        metric_name,
        timings,
        qubo_builds,
    })
}

fn check_setup(ds: &Dataset, split: &Split, cfg: &SweepConfig) -> Result<()> {
    match cfg.task {
        Task::Rank if !ds.is_ranking() => {
            return Err(Error::TaskMismatch("ranking task needs query ids".into()))
        }
        Task::Rank if cfg.cv_folds.is_some() => {
            return Err(Error::invalid_arg("cross-validation is only available for classification"))
        }
        Task::Clf if ds.is_ranking() => {
            return Err(Error::TaskMismatch("classification task on ranking data".into()))
        }
        _ => {}
    }
    if split.train.is_empty() || split.test.is_empty() {
        return Err(Error::invalid_arg("split needs non-empty train and test parts"));
    }
    if split.valid.is_empty() && cfg.cv_folds.is_none() {
        return Err(Error::invalid_arg("split has no validation part; use cross-validation"));
    }
    let n = ds.n_samples();
    if [&split.train, &split.valid, &split.test].iter().any(|p| p.iter().any(|&i| i >= n)) {
        return Err(Error::invalid_arg("split indices exceed the dataset"));
    }
    if cfg.penalty_strength.is_nan() || cfg.penalty_strength <= 0.0 {
        return Err(Error::invalid_arg("penalty strength must be positive"));
    }
    if cfg.trees == 0 {
        return Err(Error::invalid_arg("forest needs at least one tree"));
    }
    cfg.solver_config.validate()
}

fn evaluate_k(ds: &Dataset, split: &Split, cfg: &SweepConfig, base: &Base, k: usize) -> Result<KOutcome> {
    let started = Instant::now();
    let (selected, energy) = match base {
        Base::Qubo(q) => {
            let penalized = q.with_k_penalty(k, cfg.penalty_strength)?;
            let solver_cfg = SolverConfig {
                seed: seed::derive(seed::derive(cfg.solver_config.seed, STREAM_SOLVE), k as u64),
                ..cfg.solver_config.clone()
            };
            let set = solve(&penalized, cfg.solver, &solver_cfg)?;
            let best = set.best().ok_or_else(|| Error::invalid_data("solver returned no samples"))?;
            (best.selected(), Some(best.energy))
        }
        Base::Scores(scores) => (select_top_k(scores, k)?, None),
    };
    let solve_time = started.elapsed();

    let started = Instant::now();
    let model_seed = seed::derive(seed::derive(cfg.seed, STREAM_MODEL), k as u64);
    let valid_metric = if selected.is_empty() {
        0.0
    } else if let Some(folds) = cfg.cv_folds {
        cross_validate(ds, split, &selected, cfg, folds, model_seed)?
    } else {
        fit_and_score(ds, &split.train, &split.valid, &selected, cfg, model_seed)?
    };
    let model_time = started.elapsed();

    Ok(KOutcome {
        row: TraceRow {
            k_target: k,
            n_actual: selected.len(),
            valid_metric,
            selected,
            energy,
        },
        solve: solve_time,
        // training dominates fit_and_score; evaluation is folded in
        train: model_time,
        evaluate: Duration::ZERO,
    })
}

fn fit_and_score(
    ds: &Dataset,
    fit_on: &[usize],
    score_on: &[usize],
    selected: &[usize],
    cfg: &SweepConfig,
    model_seed: u64,
) -> Result<f64> {
    match cfg.task {
        Task::Clf => {
            let forest = train_forest(&ds.subset(fit_on), selected, cfg.trees, model_seed)?;
            let held_out = ds.subset(score_on);
            accuracy(&forest.predict(&held_out), held_out.labels())
        }
        Task::Rank => {
            let ranker = train_pointwise_ranker(&ds.subset(fit_on), selected)?;
            Ok(ndcg_at_10(&ranker.ranked_grades(ds, score_on)?))
        }
    }
}

fn cross_validate(
    ds: &Dataset,
    split: &Split,
    selected: &[usize],
    cfg: &SweepConfig,
    folds: usize,
    model_seed: u64,
) -> Result<f64> {
    let dev = split.development();
    let parts = stratified_folds(ds, &dev, folds, seed::derive(cfg.seed, STREAM_FOLDS))?;
    let mut total = 0.0;
    for (f, held) in parts.iter().enumerate() {
        let fit_on: Vec<usize> = parts
            .iter()
            .enumerate()
            .filter(|&(g, _)| g != f)
            .flat_map(|(_, p)| p.iter().copied())
            .collect();
        total += fit_and_score(ds, &fit_on, held, selected, cfg, seed::derive(model_seed, f as u64))?;
    }
    Ok(total / folds as f64)
}
