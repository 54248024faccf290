//! Samplers for QUBO problems behind a common [`Sampler`] interface.
//!
//! Every randomized solver runs `num_reads` independent reads. Read `r`
//! draws from its own generator seeded by `seed::derive(cfg.seed, r)`, so the
//! returned [`SampleSet`] is identical whether reads run on one thread or
//! many.

mod exhaustive;
mod sa;
mod sd;
mod tabu;

pub use exhaustive::{solve_exhaustive, MAX_EXHAUSTIVE_VARS};
pub use sa::{default_beta_range, solve_sa};
pub use sd::solve_sd;
pub use tabu::{solve_tabu, TabuParams};

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::{QuboProblem, Sample, SampleSet};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub num_reads: usize,
    pub seed: u64,
    pub sa_sweeps: usize,
    /// `(beta_min, beta_max)`; derived from the problem when absent.
    pub sa_beta_range: Option<(f64, f64)>,
    pub tabu_tenure: Option<usize>,
    pub tabu_max_iter: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            num_reads: 100,
            seed: 0,
            sa_sweeps: 1000,
            sa_beta_range: None,
            tabu_tenure: None,
            tabu_max_iter: None,
        }
    }
}

impl SolverConfig {
    pub fn with_seed(seed: u64) -> Self {
        SolverConfig {
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_reads == 0 {
            return Err(Error::invalid_arg("num_reads must be at least 1"));
        }
        if self.sa_sweeps == 0 {
            return Err(Error::invalid_arg("sa_sweeps must be at least 1"));
        }
        if let Some((lo, hi)) = self.sa_beta_range {
            if !(lo > 0.0 && lo < hi && hi.is_finite()) {
                return Err(Error::invalid_arg(format!(
                    "beta range ({lo}, {hi}) must satisfy 0 < beta_min < beta_max"
                )));
            }
        }
        if self.tabu_tenure == Some(0) {
            return Err(Error::invalid_arg("tabu_tenure must be positive"));
        }
        if self.tabu_max_iter == Some(0) {
            return Err(Error::invalid_arg("tabu_max_iter must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverId {
    Sa,
    Tabu,
    Sd,
    Exact,
}

impl SolverId {
    pub const ALL: [SolverId; 4] = [SolverId::Sa, SolverId::Tabu, SolverId::Sd, SolverId::Exact];

    pub fn as_str(self) -> &'static str {
        match self {
            SolverId::Sa => "sa",
            SolverId::Tabu => "tabu",
            SolverId::Sd => "sd",
            SolverId::Exact => "exact",
        }
    }
}

impl fmt::Display for SolverId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolverId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SolverId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| {
                let valid: Vec<&str> = SolverId::ALL.iter().map(|id| id.as_str()).collect();
                Error::invalid_arg(format!(
                    "unknown solver {s:?}; valid solvers: {}",
                    valid.join(", ")
                ))
            })
    }
}

/// Anything that can sample low-energy assignments of a QUBO problem.
///
/// Remote annealers would plug in here; only local solvers ship.
pub trait Sampler: Send + Sync {
    fn id(&self) -> &str;
    fn sample(&self, problem: &QuboProblem, cfg: &SolverConfig) -> Result<SampleSet>;
}

struct Builtin(SolverId);

impl Sampler for Builtin {
    fn id(&self) -> &str {
        self.0.as_str()
    }

    fn sample(&self, problem: &QuboProblem, cfg: &SolverConfig) -> Result<SampleSet> {
        match self.0 {
            SolverId::Sa => solve_sa(problem, cfg),
            SolverId::Tabu => solve_tabu(problem, cfg),
            SolverId::Sd => solve_sd(problem, cfg),
            SolverId::Exact => solve_exhaustive(problem),
        }
    }
}

pub fn sampler(id: SolverId) -> Box<dyn Sampler> {
    Box::new(Builtin(id))
}

pub fn solve(problem: &QuboProblem, id: SolverId, cfg: &SolverConfig) -> Result<SampleSet> {
    sampler(id).sample(problem, cfg)
}

/// Runs `read` once per read index with its derived generator, in parallel,
/// and gathers the results in read order.
pub(crate) fn run_reads<F>(problem: &QuboProblem, cfg: &SolverConfig, read: F) -> Result<SampleSet>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Vec<u8> + Sync,
{
    cfg.validate()?;
    let assignments: Vec<Vec<u8>> = (0..cfg.num_reads)
        .into_par_iter()
        .map(|r| read(&mut seed::rng(cfg.seed, r as u64)))
        .collect();
    SampleSet::from_assignments(problem, assignments)
}

pub(crate) fn random_assignment(rng: &mut impl Rng, n: usize) -> Vec<u8> {
    (0..n).map(|_| u8::from(rng.random::<bool>())).collect()
}

/// On-disk sample set: ascending samples plus run metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSetFile {
    pub metadata: SolveMetadata,
    pub samples: Vec<Sample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveMetadata {
    pub solver: SolverId,
    pub config: SolverConfig,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub runner_up_energy: Option<f64>,
    /// Only recorded on request, since it breaks byte-identical reruns.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_ms: Option<f64>,
    /// Caller-supplied run configuration echoed verbatim.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub run: Option<serde_json::Value>,
}

impl SampleSetFile {
    pub fn new(set: &SampleSet, solver: SolverId, config: &SolverConfig) -> Self {
        SampleSetFile {
            metadata: SolveMetadata {
                solver,
                config: config.clone(),
                seed: config.seed,
                runner_up_energy: set.runner_up_energy(),
                wall_ms: None,
                run: None,
            },
            samples: set.samples().to_vec(),
        }
    }
}
