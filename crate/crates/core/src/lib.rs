//! Filter-style feature selection cast as Quadratic Unconstrained Binary
//! Optimization.
//!
//! The pipeline is:
//!
//! 1. [`data`] loads a [`Dataset`] from CSV or svmlight/LETOR files, bins it
//!    and splits it reproducibly.
//! 2. [`builders`] turns the training data into a [`QuboProblem`] whose
//!    minimizers are good feature subsets (MIQUBO, QUBO-Correlation,
//!    QUBO-Boosting).
//! 3. [`qubo::QuboProblem::with_k_penalty`] steers the number of selected
//!    features toward a target `k`.
//! 4. [`solvers`] samples low-energy assignments (simulated annealing, tabu
//!    search, steepest descent, or exhaustive enumeration).
//! 5. [`eval`] sweeps `k`, trains a random forest or a pointwise ranker on the
//!    selected columns, and reports accuracy or NDCG@10.
//!
//! [`baselines`] provides the linear filter scorers used as comparison points.

pub mod baselines;
pub mod builders;
pub mod data;
mod error;
pub mod eval;
pub mod qubo;
pub mod seed;
pub mod solvers;

pub use data::{Dataset, DiscretizedView, Split};
pub use error::{Error, Result};
pub use qubo::{QuboProblem, Sample, SampleSet};
