use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Labels reduced to one-vs-rest against the majority class.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryTarget {
    pub positive_class: i64,
    /// Most frequent class other than the positive one.
    pub negative_class: i64,
    /// `+1` for the positive class, `-1` otherwise.
    pub signs: Vec<f64>,
}

/// Majority class (ties to the smaller label) versus the rest.
pub fn binary_target(ds: &Dataset) -> Result<BinaryTarget> {
    let classes = ds.classes();
    if classes.len() < 2 {
        return Err(Error::invalid_data(format!(
            "labels cannot be binarized: only class {:?} present",
            classes
        )));
    }
    let mut counts = vec![0usize; classes.len()];
    for c in ds.label_indices() {
        counts[c] += 1;
    }
    // max_by_key keeps the last maximum, so scan in reverse to favour smaller labels
    let by_count = |skip: Option<usize>| {
        (0..classes.len())
            .rev()
            .filter(|&c| Some(c) != skip)
            .max_by_key(|&c| counts[c])
            .unwrap()
    };
    let pos = by_count(None);
    let neg = by_count(Some(pos));
    let positive_class = classes[pos];
    Ok(BinaryTarget {
        positive_class,
        negative_class: classes[neg],
        signs: ds
            .labels()
            .iter()
            .map(|&l| if l == positive_class { 1.0 } else { -1.0 })
            .collect(),
    })
}

/// Target used for correlations against the label: raw grades / class ids
/// for ranking data and two-class data, one-vs-rest signs for more classes.
pub fn numeric_target(ds: &Dataset) -> Result<Vec<f64>> {
    if ds.is_ranking() || ds.classes().len() <= 2 {
        Ok(ds.labels().iter().map(|&l| l as f64).collect())
    } else {
        Ok(binary_target(ds)?.signs)
    }
}

/// One-feature threshold classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakLearner {
    pub feature_index: usize,
    pub threshold: f64,
    /// `+1` or `-1`.
    pub polarity: i8,
    pub positive_class: i64,
    pub negative_class: i64,
    /// Fraction of training samples misclassified (one-vs-rest).
    pub training_error: f64,
}

impl WeakLearner {
    fn fires(&self, value: f64) -> bool {
        let p = f64::from(self.polarity);
        p * value >= p * self.threshold
    }

    pub fn predict(&self, value: f64) -> i64 {
        if self.fires(value) {
            self.positive_class
        } else {
            self.negative_class
        }
    }

    /// `+1` when predicting the positive class, else `-1`.
    pub fn predict_sign(&self, value: f64) -> f64 {
        if self.fires(value) {
            1.0
        } else {
            -1.0
        }
    }

    pub fn predict_column(&self, ds: &Dataset) -> Vec<f64> {
        ds.column(self.feature_index)
            .iter()
            .map(|&v| self.predict_sign(v))
            .collect()
    }
}

/// Error-minimizing decision stump on feature `i`.
pub fn train_stump(ds: &Dataset, i: usize) -> Result<WeakLearner> {
    let target = binary_target(ds)?;
    Ok(train_stump_on(ds, i, &target))
}

/// Candidates are midpoints between consecutive distinct values with either
/// polarity, plus the trivial "always positive" rule at the minimum value.
/// Ties go to the smaller threshold, then to positive polarity.
pub(crate) fn train_stump_on(ds: &Dataset, i: usize, target: &BinaryTarget) -> WeakLearner {
    let col = ds.column(i);
    let n = col.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| col[a].total_cmp(&col[b]));

    let total_pos = target.signs.iter().filter(|&&s| s > 0.0).count();
    let total_neg = n - total_pos;

    // trivial rule: every sample predicted positive
    let mut best = (total_neg, col[order[0]], 1i8);
    let (mut pos_below, mut neg_below) = (0usize, 0usize);
    for w in 0..n - 1 {
        if target.signs[order[w]] > 0.0 {
            pos_below += 1;
        } else {
            neg_below += 1;
        }
        let (lo, hi) = (col[order[w]], col[order[w + 1]]);
        if lo == hi {
            continue;
        }
        let mid = lo + (hi - lo) / 2.0;
        // +1: positive above the threshold; -1: positive below it
        let err_up = pos_below + (total_neg - neg_below);
        let err_down = neg_below + (total_pos - pos_below);
        for (err, pol) in [(err_up, 1i8), (err_down, -1i8)] {
            if err < best.0 {
                best = (err, mid, pol);
            }
        }
    }
    WeakLearner {
        feature_index: i,
        threshold: best.1,
        polarity: best.2,
        positive_class: target.positive_class,
        negative_class: target.negative_class,
        training_error: best.0 as f64 / n as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ds(col: Vec<f64>, labels: Vec<i64>) -> Dataset {
        Dataset::from_columns(vec![col], labels, None, None).unwrap()
    }

    #[test]
    fn separable_feature() {
        let d = ds(vec![1.0, 2.0, 8.0, 9.0], vec![0, 0, 1, 1]);
        let s = train_stump(&d, 0).unwrap();
        assert_eq!(s.threshold, 5.0);
        assert_eq!(s.training_error, 0.0);
        let preds: Vec<i64> = d.column(0).iter().map(|&v| s.predict(v)).collect();
        assert_eq!(preds, vec![0, 0, 1, 1]);
    }

    #[test]
    fn constant_feature_predicts_majority() {
        let d = ds(vec![4.0; 5], vec![2, 1, 2, 2, 1]);
        let s = train_stump(&d, 0).unwrap();
        assert!(d.column(0).iter().all(|&v| s.predict(v) == 2));
        assert!((s.training_error - 0.4).abs() < 1e-12);
    }

    #[test]
    fn single_class_is_not_binarizable() {
        assert!(train_stump(&ds(vec![1.0, 2.0], vec![3, 3]), 0).is_err());
    }

    #[test]
    fn independent_feature_has_chance_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(1000);
        let labels: Vec<i64> = (0..1000).map(|_| rng.random_range(0..2)).collect();
        let mut shuffled = labels.clone();
        shuffled.shuffle(&mut rng);
        let col = shuffled.iter().map(|&v| v as f64).collect();
        let s = train_stump(&ds(col, labels), 0).unwrap();
        assert!((s.training_error - 0.5).abs() <= 0.05, "{}", s.training_error);
    }

    #[test]
    fn multiclass_binarizes_against_majority() {
        let d = ds(vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0], vec![5, 5, 5, 1, 7, 7]);
        let t = binary_target(&d).unwrap();
        assert_eq!((t.positive_class, t.negative_class), (5, 7));
        assert_eq!(t.signs, vec![1.0, 1.0, 1.0, -1.0, -1.0, -1.0]);
        let s = train_stump(&d, 0).unwrap();
        assert_eq!((s.threshold, s.polarity, s.training_error), (2.5, -1, 0.0));
        assert_eq!(s.predict(4.0), 7);
    }

    #[test]
    fn error_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..20 {
            let n = rng.random_range(2..40);
            let col: Vec<f64> = (0..n).map(|_| f64::from(rng.random_range(0..8))).collect();
            let labels: Vec<i64> = (0..n).map(|_| rng.random_range(0..3)).collect();
            let d = ds(col.clone(), labels);
            let Ok(t) = binary_target(&d) else { continue };
            let s = train_stump_on(&d, 0, &t);
            let errors = |thr: f64, pol: f64| {
                (0..n)
                    .filter(|&k| {
                        let fires = pol * col[k] >= pol * thr;
                        fires != (t.signs[k] > 0.0)
                    })
                    .count()
            };
            let mut vals = col.clone();
            vals.sort_by(f64::total_cmp);
            vals.dedup();
            let mut best = errors(vals[0], 1.0);
            for w in vals.windows(2) {
                let mid = (w[0] + w[1]) / 2.0;
                best = best.min(errors(mid, 1.0)).min(errors(mid, -1.0));
            }
            assert_eq!((s.training_error * n as f64).round() as usize, best);
            assert_eq!(errors(s.threshold, f64::from(s.polarity)), best);
        }
    }
}
