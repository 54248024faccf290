use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use qubofs_core::baselines::Scorer;
use qubofs_core::builders::{BuildMetadata, Builder, Convention};
use qubofs_core::data::{discretize, load_csv, load_svmlight, split_by_query, split_stratified, LabelColumn};
use qubofs_core::eval::{run_sweep, Method, SweepConfig, Task};
use qubofs_core::seed;
use qubofs_core::solvers::{solve, SampleSetFile, SolverConfig, SolverId};
use qubofs_core::{Dataset, Error, QuboProblem};

use crate::args::{BaselineArgs, BuildQuboArgs, BuilderArgs, DataArgs, Format, SolveArgs, SolverArgs, SweepArgs, TaskArg};

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn stage(stage: &str, err: Error) -> Self {
        let mut e = CliError::from(err);
        e.message = format!("{stage}: {}", e.message);
        e
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::Capacity(_) => EXIT_CAPACITY,
            Error::InvalidArgument(_) => EXIT_USAGE,
            _ => EXIT_DATA,
        };
        CliError {
            code,
            message: err.to_string(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

// component seed streams derived from the single --seed
const SPLIT_STREAM: u64 = 0;
const SOLVER_STREAM: u64 = 1;
const MODEL_STREAM: u64 = 2;

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|source| {
        CliError::from(Error::Io {
            path: path.to_path_buf(),
            source,
        })
    })
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("output serializes");
    s.push('\n');
    s
}

fn run_echo(command: &str, args: &impl Serialize) -> Value {
    json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "args": args,
    })
}

fn load_dataset(args: &DataArgs) -> CliResult<Dataset> {
    let format = match args.format {
        Format::Auto if args.data.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) => Format::Csv,
        Format::Auto => Format::Svmlight,
        f => f,
    };
    let ds = match format {
        Format::Csv => {
            let label = match &args.label_column {
                None => LabelColumn::Last,
                Some(s) => s.parse().map(LabelColumn::Index).unwrap_or_else(|_| LabelColumn::Name(s.clone())),
            };
            load_csv(&args.data, &label)
        }
        _ => {
            if args.label_column.is_some() {
                return Err(CliError::usage("--label-column only applies to CSV input"));
            }
            load_svmlight(&args.data)
        }
    }
    .map_err(|e| CliError::stage("loading data", e))?;
    eprintln!(
        "loaded {}: {} samples, {} features{}",
        args.data.display(),
        ds.n_samples(),
        ds.n_features(),
        if ds.is_ranking() { ", with query ids" } else { "" }
    );
    Ok(if args.normalize { ds.min_max_normalized() } else { ds })
}

fn parse_builder(method: &str, args: &BuilderArgs) -> CliResult<Builder> {
    let builder = match method {
        "miqubo" => Builder::Miqubo { bins: args.bins },
        "corr" => Builder::Correlation {
            convention: args.convention.parse::<Convention>()?,
            use_absolute: args.absolute,
        },
        "boost" => Builder::Boosting { lambda: args.lambda },
        other => {
            return Err(CliError::usage(format!(
                "unknown method {other:?}; valid methods: miqubo, corr, boost"
            )))
        }
    };
    Ok(builder)
}

fn solver_config(args: &SolverArgs, seed: u64) -> CliResult<(SolverId, SolverConfig)> {
    let id: SolverId = args.solver.parse()?;
    let cfg = SolverConfig {
        num_reads: args.num_reads,
        seed,
        sa_sweeps: args.sweeps,
        sa_beta_range: args.beta_min.zip(args.beta_max),
        tabu_tenure: args.tabu_tenure,
        tabu_max_iter: args.tabu_max_iter,
    };
    cfg.validate()?;
    Ok((id, cfg))
}

pub fn build_qubo(args: &BuildQuboArgs) -> CliResult<()> {
    let builder = parse_builder(&args.method, &args.builder)?;
    let ds = load_dataset(&args.data)?;
    let q = builder.build(&ds).map_err(|e| CliError::stage("building qubo", e))?;
    let meta = BuildMetadata {
        builder,
        n_samples: ds.n_samples(),
        n_features: ds.n_features(),
        dataset_fingerprint: ds.fingerprint(),
    };
    let mut json = q.to_json();
    json.push('\n');
    write_file(&args.out, &json)?;
    let mut sidecar_doc = serde_json::to_value(&meta).expect("metadata serializes");
    sidecar_doc["run"] = run_echo("build-qubo", args);
    write_file(&sidecar(&args.out), &pretty(&sidecar_doc))?;
    eprintln!("n = {}, {} nonzero coefficients", q.n(), q.nonzero_count());
    Ok(())
}

pub fn solve_cmd(args: &SolveArgs) -> CliResult<()> {
    let (id, cfg) = solver_config(&args.solver, args.run.seed)?;
    let base = QuboProblem::load(&args.qubo).map_err(|e| CliError::stage("loading qubo", e))?;
    let problem = match args.k {
        Some(k) => base.with_k_penalty(k, args.solver.penalty)?,
        None => base,
    };
    let started = Instant::now();
    let set = solve(&problem, id, &cfg).map_err(|e| CliError::stage("solving", e))?;
    let elapsed = started.elapsed();
    let mut file = SampleSetFile::new(&set, id, &cfg);
    if args.record_timing {
        file.metadata.wall_ms = Some(elapsed.as_secs_f64() * 1e3);
    }
    file.metadata.run = Some(run_echo("solve", args));
    write_file(&args.out, &pretty(&file))?;
    if let Some(best) = set.best() {
        eprintln!(
            "{}: {} distinct samples, best energy {} with {} ones ({:.1} ms)",
            id,
            set.len(),
            best.energy,
            best.selected().len(),
            elapsed.as_secs_f64() * 1e3
        );
    }
    Ok(())
}

fn parse_method(args: &SweepArgs) -> CliResult<Method> {
    match args.method.strip_prefix("baseline:") {
        Some(scorer) => Ok(Method::Baseline {
            scorer: scorer.parse::<Scorer>()?,
            bins: args.builder.bins,
        }),
        None => Ok(Method::Qubo(parse_builder(&args.method, &args.builder)?)),
    }
}

pub fn sweep(args: &SweepArgs) -> CliResult<()> {
    let method = parse_method(args)?;
    let (solver, solver_config) = solver_config(&args.solver, seed::derive(args.run.seed, SOLVER_STREAM))?;
    let task = match args.task {
        TaskArg::Clf => Task::Clf,
        TaskArg::Rank => Task::Rank,
    };
    let ds = load_dataset(&args.data)?;
    let split_seed = seed::derive(args.run.seed, SPLIT_STREAM);
    let split = match task {
        Task::Clf => {
            if args.valid_frac.is_some() {
                return Err(CliError::usage("--valid-frac applies to --task rank; use --test-frac"));
            }
            let train = args.train_frac.unwrap_or(0.56);
            let test = args.test_frac.unwrap_or(0.3);
            if args.cv_folds.is_some() && args.train_frac.is_none() {
                // cross-validation needs no separate validation part
                split_stratified(&ds, 1.0 - test, test, split_seed)
            } else {
                split_stratified(&ds, train, test, split_seed)
            }
        }
        Task::Rank => {
            if args.test_frac.is_some() {
                return Err(CliError::usage("--test-frac applies to --task clf; use --valid-frac"));
            }
            split_by_query(&ds, args.train_frac.unwrap_or(0.6), args.valid_frac.unwrap_or(0.2), split_seed)
        }
    }
    .map_err(|e| CliError::stage("splitting", e))?;

    let cfg = SweepConfig {
        method,
        solver,
        solver_config,
        penalty_strength: args.solver.penalty,
        task,
        trees: args.trees,
        cv_folds: args.cv_folds,
        seed: seed::derive(args.run.seed, MODEL_STREAM),
    };
    let report = run_sweep(&ds, &split, &cfg).map_err(|e| CliError::stage("sweep", e))?;

    let prefix = args.out_prefix.as_os_str();
    let with_ext = |ext: &str| {
        let mut p = prefix.to_owned();
        p.push(ext);
        PathBuf::from(p)
    };
    write_file(&with_ext(".csv"), &report.to_csv())?;
    let doc = json!({
        "run": run_echo("sweep", args),
        "config": cfg,
        "dataset_fingerprint": ds.fingerprint(),
        "split": {
            "train": split.train.len(),
            "valid": split.valid.len(),
            "test": split.test.len(),
        },
        "report": report.to_json(args.timings),
    });
    write_file(&with_ext(".json"), &pretty(&doc))?;
    eprintln!(
        "chosen k = {} ({} features), test {} = {:.4}",
        report.chosen_k, report.selection.n_actual, report.metric_name, report.test_metric
    );
    Ok(())
}

pub fn baseline(args: &BaselineArgs) -> CliResult<()> {
    let scorer: Scorer = args.scorer.parse()?;
    let ds = load_dataset(&args.data)?;
    let view = if scorer.needs_bins() {
        Some(discretize(&ds, args.bins).map_err(|e| CliError::stage("binning", e))?)
    } else {
        None
    };
    let scores = scorer
        .score(&ds, view.as_ref())
        .map_err(|e| CliError::stage("scoring", e))?;
    let mut csv = Vec::new();
    scores
        .write_csv(ds.feature_names(), &mut csv)
        .expect("writing to memory cannot fail");
    write_file(&args.out, &String::from_utf8(csv).expect("csv is utf-8"))?;
    let meta = json!({
        "scorer": scorer,
        "n_samples": ds.n_samples(),
        "n_features": ds.n_features(),
        "dataset_fingerprint": ds.fingerprint(),
        "run": run_echo("baseline", args),
    });
    write_file(&sidecar(&args.out), &pretty(&meta))?;
    eprintln!("scored {} features with {}", ds.n_features(), scorer);
    Ok(())
}
