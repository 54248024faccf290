//! QUBO formulations of filter feature selection.
//!
//! Each builder maps a training set to a [`QuboProblem`] with one binary
//! variable per feature; a minimizing assignment is the selected subset.
//!
//! * MIQUBO rewards relevance through (conditional) mutual information with
//!   the target: `Q[i][i] = -I(f_i; y)`, `Q[i][j] = -I(f_i; y | f_j)`.
//! * QUBO-Correlation weighs feature-target against feature-feature
//!   Pearson correlation.
//! * QUBO-Boosting does the same with the predictions of one weak learner per
//!   feature, plus a size regularizer `S/F² + λ` on the diagonal.

mod stats;
mod stump;

pub use stats::{conditional_mutual_information, entropy, mutual_information, pearson};
pub use stump::{binary_target, numeric_target, train_stump, BinaryTarget, WeakLearner};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{discretize, Dataset, DiscretizedView};
use crate::error::{Error, Result};
use crate::qubo::QuboProblem;

/// Sign convention for QUBO-Correlation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// `Q[i][i] = r(f_i, y)`, `Q[i][j] = -r(f_i, f_j)` as printed.
    #[default]
    Literal,
    /// `Q[i][i] = -ρ(f_i, y)`, `Q[i][j] = +ρ(f_i, f_j)`: under minimization
    /// this favours relevant features and penalizes redundant pairs.
    RelevanceRedundancy,
}

impl std::str::FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(Convention::Literal),
            "rr" | "relevance-redundancy" => Ok(Convention::RelevanceRedundancy),
            other => Err(Error::invalid_arg(format!(
                "unknown convention {other:?}; expected literal or rr"
            ))),
        }
    }
}

/// A configured QUBO builder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum Builder {
    Miqubo {
        bins: usize,
    },
    Correlation {
        convention: Convention,
        use_absolute: bool,
    },
    Boosting {
        lambda: f64,
    },
}

impl Builder {
    pub fn name(&self) -> &'static str {
        match self {
            Builder::Miqubo { .. } => "miqubo",
            Builder::Correlation { .. } => "corr",
            Builder::Boosting { .. } => "boost",
        }
    }

    pub fn build(&self, ds: &Dataset) -> Result<QuboProblem> {
        match *self {
            Builder::Miqubo { bins } => build_miqubo(ds, &discretize(ds, bins)?),
            Builder::Correlation {
                convention,
                use_absolute,
            } => build_qubo_correlation(ds, convention, use_absolute),
            Builder::Boosting { lambda } => build_qubo_boosting(ds, lambda),
        }
    }
}

/// Sidecar written next to a built QUBO file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildMetadata {
    pub builder: Builder,
    pub n_samples: usize,
    pub n_features: usize,
    pub dataset_fingerprint: String,
}

fn assemble(n: usize, entry: impl Fn(usize, usize) -> Result<f64> + Sync) -> Result<QuboProblem> {
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| (0..n).map(|j| entry(i, j)).collect::<Result<Vec<f64>>>())
        .collect::<Result<_>>()?;
    QuboProblem::from_rows(&rows)
}

/// Every entry is `≤ 0`, so without a size penalty selecting everything is
/// always optimal.
pub fn build_miqubo(ds: &Dataset, view: &DiscretizedView) -> Result<QuboProblem> {
    if view.n_samples() != ds.n_samples() || view.n_features() != ds.n_features() {
        return Err(Error::invalid_arg(format!(
            "discretized view is {}x{}, dataset is {}x{}",
            view.n_samples(),
            view.n_features(),
            ds.n_samples(),
            ds.n_features()
        )));
    }
    let y = ds.label_indices();
    assemble(ds.n_features(), |i, j| {
        let mi = if i == j {
            mutual_information(view.column(i), &y)?
        } else {
            conditional_mutual_information(view.column(i), &y, view.column(j))?
        };
        Ok(-mi)
    })
}

pub fn build_qubo_correlation(ds: &Dataset, convention: Convention, use_absolute: bool) -> Result<QuboProblem> {
    if ds.n_samples() < 2 {
        return Err(Error::invalid_data("correlation needs at least 2 samples"));
    }
    let y = numeric_target(ds)?;
    let rho = |r: f64| if use_absolute { r.abs() } else { r };
    let sign = match convention {
        Convention::Literal => 1.0,
        Convention::RelevanceRedundancy => -1.0,
    };
    assemble(ds.n_features(), |i, j| {
        Ok(if i == j {
            sign * rho(pearson(ds.column(i), &y)?)
        } else {
            -sign * rho(pearson(ds.column(i), ds.column(j))?)
        })
    })
}

pub fn build_qubo_boosting(ds: &Dataset, lambda: f64) -> Result<QuboProblem> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid_arg(format!("lambda must be >= 0, got {lambda}")));
    }
    let target = binary_target(ds)?;
    let predictions: Vec<Vec<f64>> = (0..ds.n_features())
        .into_par_iter()
        .map(|i| stump::train_stump_on(ds, i, &target).predict_column(ds))
        .collect();
    boosting_from_predictions(&predictions, &target.signs, lambda)
}

/// Boosting matrix from per-feature `±1` predictions and `±1` labels.
pub fn boosting_from_predictions(predictions: &[Vec<f64>], y: &[f64], lambda: f64) -> Result<QuboProblem> {
    let f = predictions.len() as f64;
    let s = y.len() as f64;
    let size_term = s / (f * f) + lambda;
    assemble(predictions.len(), |i, j| {
        Ok(if i == j {
            size_term - 2.0 * pearson(&predictions[i], y)?
        } else {
            pearson(&predictions[i], &predictions[j])?
        })
    })
}
