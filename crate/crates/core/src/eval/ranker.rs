use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::data::Dataset;
use crate::error::{Error, Result};

pub const RIDGE: f64 = 1e-6;

/// Pointwise linear ranker fit by ridge regression onto relevance grades.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRanker {
    features: Vec<usize>,
    weights: Vec<f64>,
    intercept: f64,
}

/// Centered normal equations `(XᵀX + ridge·I) w = Xᵀy` for `selected`.
pub fn normal_equations(ds: &Dataset, selected: &[usize]) -> (DMatrix<f64>, DVector<f64>) {
    let n = ds.n_samples();
    let d = selected.len();
    let y_mean = ds.labels().iter().map(|&l| l as f64).sum::<f64>() / n as f64;
    let centered: Vec<Vec<f64>> = selected
        .iter()
        .map(|&j| {
            let col = ds.column(j);
            let m = col.iter().sum::<f64>() / n as f64;
            col.iter().map(|v| v - m).collect()
        })
        .collect();
    let y: Vec<f64> = ds.labels().iter().map(|&l| l as f64 - y_mean).collect();
    let mut a = DMatrix::zeros(d, d);
    let mut b = DVector::zeros(d);
    for p in 0..d {
        for q in p..d {
            let v: f64 = centered[p].iter().zip(&centered[q]).map(|(x, z)| x * z).sum();
            a[(p, q)] = v;
            a[(q, p)] = v;
        }
        a[(p, p)] += RIDGE;
        b[p] = centered[p].iter().zip(&y).map(|(x, t)| x * t).sum();
    }
    (a, b)
}

pub fn train_pointwise_ranker(ds: &Dataset, selected: &[usize]) -> Result<LinearRanker> {
    if selected.is_empty() {
        return Err(Error::invalid_arg("cannot train a ranker on an empty feature selection"));
    }
    if let Some(&bad) = selected.iter().find(|&&j| j >= ds.n_features()) {
        return Err(Error::invalid_arg(format!("feature {bad} out of range")));
    }
    let (a, b) = normal_equations(ds, selected);
    let w = match a.clone().cholesky() {
        Some(ch) => ch.solve(&b),
        None => a
            .lu()
            .solve(&b)
            .ok_or_else(|| Error::invalid_data("ranker normal equations are singular"))?,
    };
    let n = ds.n_samples() as f64;
    let y_mean = ds.labels().iter().map(|&l| l as f64).sum::<f64>() / n;
    let intercept = y_mean
        - selected
            .iter()
            .zip(w.iter())
            .map(|(&j, wj)| wj * ds.column(j).iter().sum::<f64>() / n)
            .sum::<f64>();
    Ok(LinearRanker {
        features: selected.to_vec(),
        weights: w.iter().copied().collect(),
        intercept,
    })
}

impl LinearRanker {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn score(&self, ds: &Dataset, sample: usize) -> f64 {
        self.intercept
            + self
                .features
                .iter()
                .zip(&self.weights)
                .map(|(&j, w)| w * ds.value(sample, j))
                .sum::<f64>()
    }

    /// `samples` reordered by descending score; ties keep input order.
    pub fn rank(&self, ds: &Dataset, samples: &[usize]) -> Vec<usize> {
        let mut scored: Vec<(usize, f64)> = samples.iter().map(|&i| (i, self.score(ds, i))).collect();
        scored.sort_by(|a, b| b.1.total_cmp(&a.1));
        scored.into_iter().map(|(i, _)| i).collect()
    }

    /// Grades of each query among `samples` in ranked order, queries by id.
    pub fn ranked_grades(&self, ds: &Dataset, samples: &[usize]) -> Result<Vec<Vec<i64>>> {
        let qids = ds
            .query_ids()
            .ok_or_else(|| Error::TaskMismatch("ranking evaluation needs query ids".into()))?;
        let mut groups: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for &i in samples {
            groups.entry(qids[i]).or_default().push(i);
        }
        Ok(groups
            .values()
            .map(|docs| self.rank(ds, docs).into_iter().map(|i| ds.labels()[i]).collect())
            .collect())
    }
}
