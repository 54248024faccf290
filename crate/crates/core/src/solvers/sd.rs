use super::{random_assignment, run_reads, SolverConfig};
use crate::error::Result;
use crate::qubo::{Coupling, QuboProblem, SampleSet};

/// Steepest descent from `num_reads` random starts.
pub fn solve_sd(problem: &QuboProblem, cfg: &SolverConfig) -> Result<SampleSet> {
    cfg.validate()?;
    let coupling = problem.coupling();
    run_reads(problem, cfg, |rng| descend(&coupling, random_assignment(rng, coupling.n())))
}

/// Applies the most negative single flip (lowest index on ties) until none
/// lowers the energy. Local fields are rebuilt from scratch before stopping
/// so accumulated rounding cannot hide a descending move.
pub(crate) fn descend(coupling: &Coupling, start: Vec<u8>) -> Vec<u8> {
    let mut state = coupling.state(start);
    loop {
        loop {
            let (i, d) = (0..state.n())
                .map(|i| (i, state.delta(i)))
                .fold((usize::MAX, 0.0), |best, cur| if cur.1 < best.1 { cur } else { best });
            if i == usize::MAX {
                break;
            }
            state.flip(i);
            debug_assert!(d < 0.0);
        }
        let fresh = coupling.state(state.assignment().to_vec());
        if (0..fresh.n()).all(|i| fresh.delta(i) >= 0.0) {
            return fresh.into_assignment();
        }
        state = fresh;
    }
}

#[cfg(test)]
mod tests {
    use super::super::solve_exhaustive;
    use super::super::test_support::{is_local_minimum, random_problem};
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_variable() {
        let q = QuboProblem::from_rows(&[vec![1.0]]).unwrap();
        let c = q.coupling();
        assert_eq!(descend(&c, vec![1]), vec![0]);
        assert_eq!(descend(&c, vec![0]), vec![0]);
    }

    #[test]
    fn outputs_are_local_minima() {
        for s in 0..10 {
            let q = random_problem(300 + s, 20);
            let cfg = SolverConfig {
                num_reads: 30,
                seed: s,
                ..Default::default()
            };
            for sample in solve_sd(&q, &cfg).unwrap().samples() {
                assert!(is_local_minimum(&q, &sample.assignment));
            }
        }
    }

    #[test]
    fn separable_problem_reaches_optimum_from_any_start() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let diag: Vec<f64> = (0..10)
            .map(|_| {
                let v: f64 = rng.random_range(0.1..2.0);
                if rng.random_bool(0.5) { v } else { -v }
            })
            .collect();
        let mut q = QuboProblem::zeros(10);
        for (i, &d) in diag.iter().enumerate() {
            q.set(i, i, d);
        }
        let exact = solve_exhaustive(&q).unwrap();
        assert_eq!(exact.len(), 1);
        let optimum = &exact.best().unwrap().assignment;
        let c = q.coupling();
        for m in 0u32..1 << 10 {
            let start: Vec<u8> = (0..10).map(|i| ((m >> i) & 1) as u8).collect();
            assert_eq!(&descend(&c, start), optimum);
        }
    }

    #[test]
    fn ties_go_to_lowest_index() {
        // both flips from [0,0] lower the energy by 1; taking x0 blocks x1
        let q = QuboProblem::from_rows(&[vec![-1.0, 5.0], vec![0.0, -1.0]]).unwrap();
        assert_eq!(descend(&q.coupling(), vec![0, 0]), vec![1, 0]);
    }
}
