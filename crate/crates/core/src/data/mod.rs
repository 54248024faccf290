//! Datasets, discretization and reproducible splits.

mod io;
mod split;

pub use io::{load_csv, load_svmlight, read_csv, read_svmlight, write_svmlight, LabelColumn};
pub use split::{split_by_query, split_stratified, stratified_folds, Split};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Dense feature matrix with per-sample labels and optional query groups.
///
/// Features are stored column-major since nearly every consumer works one
/// feature at a time.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n_samples: usize,
    n_features: usize,
    features: Vec<f64>,
    labels: Vec<i64>,
    query_ids: Option<Vec<u64>>,
    feature_names: Option<Vec<String>>,
}

impl Dataset {
    /// Builds a dataset from row-major samples.
    pub fn from_rows(
        rows: &[Vec<f64>],
        labels: Vec<i64>,
        query_ids: Option<Vec<u64>>,
        feature_names: Option<Vec<String>>,
    ) -> Result<Self> {
        let n_features = rows.first().map_or(0, Vec::len);
        let mut columns = vec![Vec::with_capacity(rows.len()); n_features];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_features {
                return Err(Error::invalid_data(format!(
                    "row {i} has {} features, expected {n_features}",
                    row.len()
                )));
            }
            for (col, &v) in columns.iter_mut().zip(row) {
                col.push(v);
            }
        }
        Self::from_columns(columns, labels, query_ids, feature_names)
    }

    /// Builds a dataset from one vector per feature.
    pub fn from_columns(
        columns: Vec<Vec<f64>>,
        labels: Vec<i64>,
        query_ids: Option<Vec<u64>>,
        feature_names: Option<Vec<String>>,
    ) -> Result<Self> {
        let n_samples = labels.len();
        let n_features = columns.len();
        if n_samples == 0 {
            return Err(Error::invalid_data("dataset has no samples"));
        }
        if n_features == 0 {
            return Err(Error::invalid_data("dataset has no features"));
        }
        let mut features = Vec::with_capacity(n_samples * n_features);
        for (j, col) in columns.into_iter().enumerate() {
            if col.len() != n_samples {
                return Err(Error::invalid_data(format!(
                    "feature {j} has {} values, expected {n_samples}",
                    col.len()
                )));
            }
            if let Some(i) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::invalid_data(format!(
                    "non-finite value in sample {i}, feature {j}"
                )));
            }
            features.extend(col);
        }
        if let Some(q) = &query_ids {
            if q.len() != n_samples {
                return Err(Error::DimensionMismatch {
                    expected: n_samples,
                    actual: q.len(),
                });
            }
        }
        if let Some(names) = &feature_names {
            if names.len() != n_features {
                return Err(Error::DimensionMismatch {
                    expected: n_features,
                    actual: names.len(),
                });
            }
        }
        Ok(Dataset {
            n_samples,
            n_features,
            features,
            labels,
            query_ids,
            feature_names,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.features[j * self.n_samples..(j + 1) * self.n_samples]
    }

    pub fn value(&self, sample: usize, feature: usize) -> f64 {
        self.features[feature * self.n_samples + sample]
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    pub fn query_ids(&self) -> Option<&[u64]> {
        self.query_ids.as_deref()
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    /// A dataset with query groups is a ranking dataset.
    pub fn is_ranking(&self) -> bool {
        self.query_ids.is_some()
    }

    /// Distinct labels in ascending order.
    pub fn classes(&self) -> Vec<i64> {
        let mut c = self.labels.clone();
        c.sort_unstable();
        c.dedup();
        c
    }

    /// Labels mapped to dense indices `0..classes().len()`, ascending by label.
    pub fn label_indices(&self) -> Vec<usize> {
        let classes = self.classes();
        self.labels
            .iter()
            .map(|l| classes.binary_search(l).expect("label is a class"))
            .collect()
    }

    /// Samples at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let columns = (0..self.n_features)
            .map(|j| {
                let col = self.column(j);
                indices.iter().map(|&i| col[i]).collect()
            })
            .collect();
        Dataset {
            n_samples: indices.len(),
            n_features: self.n_features,
            features: columns_concat(columns),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            query_ids: self
                .query_ids
                .as_ref()
                .map(|q| indices.iter().map(|&i| q[i]).collect()),
            feature_names: self.feature_names.clone(),
        }
    }

    /// Per-feature min-max scaling to `[0, 1]`; constant features become 0.
    pub fn min_max_normalized(&self) -> Dataset {
        let columns = (0..self.n_features)
            .map(|j| {
                let col = self.column(j);
                let (lo, hi) = col
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                        (lo.min(v), hi.max(v))
                    });
                let range = hi - lo;
                col.iter()
                    .map(|&v| if range > 0.0 { (v - lo) / range } else { 0.0 })
                    .collect()
            })
            .collect();
        Dataset {
            features: columns_concat(columns),
            ..self.clone()
        }
    }

    /// SHA-256 over dimensions, feature bits, labels and query ids.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.n_samples as u64).to_le_bytes());
        h.update((self.n_features as u64).to_le_bytes());
        for v in &self.features {
            h.update(v.to_bits().to_le_bytes());
        }
        for l in &self.labels {
            h.update(l.to_le_bytes());
        }
        if let Some(q) = &self.query_ids {
            for id in q {
                h.update(id.to_le_bytes());
            }
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn columns_concat(columns: Vec<Vec<f64>>) -> Vec<f64> {
    columns.into_iter().flatten().collect()
}

/// Bin indices for every feature, column-major like [`Dataset`].
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedView {
    n_samples: usize,
    bins: Vec<usize>,
    bin_counts: Vec<usize>,
}

impl DiscretizedView {
    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn n_features(&self) -> usize {
        self.bin_counts.len()
    }

    pub fn column(&self, j: usize) -> &[usize] {
        &self.bins[j * self.n_samples..(j + 1) * self.n_samples]
    }

    pub fn bin_counts(&self) -> &[usize] {
        &self.bin_counts
    }
}

pub const DEFAULT_MAX_BINS: usize = 10;

/// Equal-frequency binning with at most `max_bins` bins per feature.
///
/// Features with at most `max_bins` distinct values get one bin per value.
/// Otherwise cut points sit at the `j/max_bins` quantiles of the sorted
/// column; repeated cut points collapse, so heavily tied columns end up with
/// fewer bins.
pub fn discretize(ds: &Dataset, max_bins: usize) -> Result<DiscretizedView> {
    if max_bins < 2 {
        return Err(Error::invalid_arg(format!(
            "max_bins must be at least 2, got {max_bins}"
        )));
    }
    let n = ds.n_samples();
    let mut bins = Vec::with_capacity(n * ds.n_features());
    let mut bin_counts = Vec::with_capacity(ds.n_features());
    for j in 0..ds.n_features() {
        let col = ds.column(j);
        let mut sorted = col.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut distinct = sorted.clone();
        distinct.dedup();

        let cuts: Vec<f64> = if distinct.len() <= max_bins {
            distinct[1..].to_vec()
        } else {
            let mut cuts: Vec<f64> = (1..max_bins).map(|b| sorted[b * n / max_bins]).collect();
            cuts.dedup();
            cuts.retain(|&c| c > sorted[0]);
            cuts
        };
        // bin = number of cut points <= v
        bins.extend(col.iter().map(|&v| cuts.partition_point(|&c| c <= v)));
        bin_counts.push(cuts.len() + 1);
    }
    Ok(DiscretizedView {
        n_samples: n,
        bins,
        bin_counts,
    })
}
