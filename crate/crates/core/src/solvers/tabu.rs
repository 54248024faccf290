use super::{random_assignment, run_reads, SolverConfig};
use crate::error::Result;
use crate::qubo::{Coupling, QuboProblem, SampleSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TabuParams {
    pub tenure: usize,
    pub max_iter: usize,
}

impl TabuParams {
    /// Config overrides, else `tenure = min(20, max(4, n/4))` and
    /// `max_iter = 100 n`. Tenure is capped at `n - 1` so some move is
    /// always allowed.
    pub fn resolve(cfg: &SolverConfig, n: usize) -> Self {
        let tenure = cfg.tabu_tenure.unwrap_or((n / 4).clamp(4, 20));
        TabuParams {
            tenure: tenure.min(n.saturating_sub(1)),
            max_iter: cfg.tabu_max_iter.unwrap_or(100 * n).max(1),
        }
    }
}

/// Single-flip tabu search with aspiration, restarted `num_reads` times.
pub fn solve_tabu(problem: &QuboProblem, cfg: &SolverConfig) -> Result<SampleSet> {
    cfg.validate()?;
    let coupling = problem.coupling();
    let params = TabuParams::resolve(cfg, problem.n());
    run_reads(problem, cfg, |rng| {
        search(&coupling, random_assignment(rng, coupling.n()), params)
    })
}

/// Each iteration takes the best allowed flip, uphill only when nothing
/// improves. A flipped variable stays tabu for `tenure` iterations unless the
/// flip would beat the best energy found so far.
pub(crate) fn search(coupling: &Coupling, start: Vec<u8>, params: TabuParams) -> Vec<u8> {
    let n = coupling.n();
    if n == 0 {
        return start;
    }
    let mut state = coupling.state(start);
    let mut best = state.assignment().to_vec();
    let mut best_energy = state.energy();
    let mut tabu_until = vec![0usize; n];
    for it in 0..params.max_iter {
        let current = state.energy();
        let mut pick: Option<(usize, f64)> = None;
        for i in 0..n {
            let d = state.delta(i);
            let allowed = tabu_until[i] <= it || current + d < best_energy;
            if allowed && pick.is_none_or(|(_, bd)| d < bd) {
                pick = Some((i, d));
            }
        }
        let Some((i, _)) = pick else { break };
        state.flip(i);
        tabu_until[i] = it + 1 + params.tenure;
        if state.energy() < best_energy {
            best_energy = state.energy();
            best.copy_from_slice(state.assignment());
        }
    }
    best
}
