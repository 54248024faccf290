use crate::error::{Error, Result};
use crate::qubo::{QuboProblem, SampleSet};

pub const MAX_EXHAUSTIVE_VARS: usize = 24;

/// Enumerates all `2^n` assignments in Gray-code order and returns every
/// minimizer, with the next energy level recorded as the runner-up.
pub fn solve_exhaustive(problem: &QuboProblem) -> Result<SampleSet> {
    let n = problem.n();
    if n > MAX_EXHAUSTIVE_VARS {
        return Err(Error::Capacity(format!(
            "exhaustive enumeration supports at most {MAX_EXHAUSTIVE_VARS} variables, got {n}"
        )));
    }
    let coupling = problem.coupling();
    let mut state = coupling.state(vec![0; n]);
    let tol = |e: f64| 1e-9 * e.abs().max(1.0);

    let mut min = state.energy();
    let mut runner_up = f64::INFINITY;
    let mut minimizers: Vec<u32> = vec![0];
    let mut code = 0u32;
    for step in 1u64..(1u64 << n) {
        let bit = step.trailing_zeros() as usize;
        state.flip(bit);
        code ^= 1 << bit;
        let e = state.energy();
        if e < min - tol(min) {
            runner_up = runner_up.min(min);
            min = e;
            minimizers.clear();
            minimizers.push(code);
        } else if e <= min + tol(min) {
            minimizers.push(code);
        } else if e < runner_up {
            runner_up = e;
        }
    }
    let assignments = minimizers
        .into_iter()
        .map(|m| (0..n).map(|i| ((m >> i) & 1) as u8).collect());
    let set = SampleSet::from_assignments(problem, assignments)?;
    Ok(set.with_runner_up(runner_up.is_finite().then_some(runner_up)))
}
