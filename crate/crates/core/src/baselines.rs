//! Linear filter scorers and top-k selection.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::builders::{binary_target, mutual_information, numeric_target, pearson, train_stump};
use crate::data::{Dataset, DiscretizedView};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scorer {
    Anova,
    Chi2,
    Mi,
    Pearson,
    Boosting,
    Variance,
}

impl Scorer {
    pub const ALL: [Scorer; 6] = [
        Scorer::Anova,
        Scorer::Chi2,
        Scorer::Mi,
        Scorer::Pearson,
        Scorer::Boosting,
        Scorer::Variance,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scorer::Anova => "anova",
            Scorer::Chi2 => "chi2",
            Scorer::Mi => "mi",
            Scorer::Pearson => "pearson",
            Scorer::Boosting => "boosting",
            Scorer::Variance => "variance",
        }
    }

    /// Whether the scorer needs a discretized view.
    pub fn needs_bins(self) -> bool {
        matches!(self, Scorer::Chi2 | Scorer::Mi)
    }

    pub fn score(self, ds: &Dataset, view: Option<&DiscretizedView>) -> Result<FeatureScores> {
        let need_view = || view.ok_or_else(|| Error::invalid_arg(format!("{self} scorer needs binned features")));
        match self {
            Scorer::Anova => score_anova_f(ds),
            Scorer::Chi2 => score_chi2(need_view()?, ds),
            Scorer::Mi => score_mi(need_view()?, ds),
            Scorer::Pearson => score_pearson(ds),
            Scorer::Boosting => score_linear_boosting(ds),
            Scorer::Variance => Ok(score_variance(ds)),
        }
    }
}

impl fmt::Display for Scorer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scorer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scorer::ALL.into_iter().find(|m| m.as_str() == s).ok_or_else(|| {
            let valid: Vec<&str> = Scorer::ALL.iter().map(|m| m.as_str()).collect();
            Error::invalid_arg(format!("unknown scorer {s:?}; valid scorers: {}", valid.join(", ")))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureScores {
    pub scores: Vec<f64>,
    pub method: Scorer,
}

impl FeatureScores {
    fn new(method: Scorer, scores: Vec<f64>) -> Self {
        // infinite statistics (zero within-class spread) saturate
        let scores = scores
            .into_iter()
            .map(|s| if s.is_finite() { s } else if s > 0.0 { f64::MAX } else { 0.0 })
            .collect();
        FeatureScores { scores, method }
    }

    /// `feature_index,feature_name,method,score` rows with a header.
    pub fn write_csv(&self, names: Option<&[String]>, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "feature_index,feature_name,method,score")?;
        for (i, s) in self.scores.iter().enumerate() {
            let name = names.and_then(|n| n.get(i)).map_or("", String::as_str);
            writeln!(out, "{i},{},{},{s}", csv_field(name), self.method)?;
        }
        Ok(())
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

fn require_classification(ds: &Dataset, what: &str) -> Result<()> {
    if ds.is_ranking() {
        return Err(Error::TaskMismatch(format!(
            "{what} needs class labels, not ranking data"
        )));
    }
    Ok(())
}

/// One-way ANOVA F statistic per feature.
pub fn score_anova_f(ds: &Dataset) -> Result<FeatureScores> {
    require_classification(ds, "ANOVA F")?;
    let classes = ds.classes();
    if classes.len() < 2 {
        return Err(Error::invalid_data("ANOVA needs at least 2 classes"));
    }
    let k = classes.len();
    let n = ds.n_samples();
    let idx = ds.label_indices();
    let mut sizes = vec![0usize; k];
    for &c in &idx {
        sizes[c] += 1;
    }
    let scores = (0..ds.n_features())
        .map(|j| {
            let col = ds.column(j);
            let mut sums = vec![0.0; k];
            for (&v, &c) in col.iter().zip(&idx) {
                sums[c] += v;
            }
            let means: Vec<f64> = sums.iter().zip(&sizes).map(|(s, &m)| s / m as f64).collect();
            let grand = col.iter().sum::<f64>() / n as f64;
            let between: f64 = means
                .iter()
                .zip(&sizes)
                .map(|(m, &c)| c as f64 * (m - grand).powi(2))
                .sum();
            let within: f64 = col.iter().zip(&idx).map(|(&v, &c)| (v - means[c]).powi(2)).sum();
            let ms_between = between / (k - 1) as f64;
            let ms_within = if n > k { within / (n - k) as f64 } else { 0.0 };
            if ms_between <= 1e-12 * grand.abs().max(1.0).powi(2) {
                0.0
            } else if ms_within == 0.0 {
                f64::INFINITY
            } else {
                ms_between / ms_within
            }
        })
        .collect();
    Ok(FeatureScores::new(Scorer::Anova, scores))
}

/// Chi-square statistic of the bin × class contingency table.
pub fn score_chi2(view: &DiscretizedView, ds: &Dataset) -> Result<FeatureScores> {
    require_classification(ds, "chi-square")?;
    let idx = ds.label_indices();
    let k = ds.classes().len();
    let n = ds.n_samples() as f64;
    let scores = (0..view.n_features())
        .map(|j| {
            let nb = view.bin_counts()[j];
            let mut table = vec![0usize; nb * k];
            let mut rows = vec![0usize; nb];
            let mut cols = vec![0usize; k];
            for (&b, &c) in view.column(j).iter().zip(&idx) {
                table[b * k + c] += 1;
                rows[b] += 1;
                cols[c] += 1;
            }
            let mut chi = 0.0;
            for b in 0..nb {
                for c in 0..k {
                    let expected = rows[b] as f64 * cols[c] as f64 / n;
                    if expected > 0.0 {
                        chi += (table[b * k + c] as f64 - expected).powi(2) / expected;
                    }
                }
            }
            chi
        })
        .collect();
    Ok(FeatureScores::new(Scorer::Chi2, scores))
}

pub fn score_mi(view: &DiscretizedView, ds: &Dataset) -> Result<FeatureScores> {
    let y = ds.label_indices();
    let scores = (0..view.n_features())
        .map(|j| mutual_information(view.column(j), &y))
        .collect::<Result<_>>()?;
    Ok(FeatureScores::new(Scorer::Mi, scores))
}

/// `|r(f_i, y)|`.
pub fn score_pearson(ds: &Dataset) -> Result<FeatureScores> {
    let y = numeric_target(ds)?;
    let scores = (0..ds.n_features())
        .map(|j| pearson(ds.column(j), &y).map(f64::abs))
        .collect::<Result<_>>()?;
    Ok(FeatureScores::new(Scorer::Pearson, scores))
}

/// `|r(h_i, y)|` for a decision stump `h_i` trained on each feature alone.
pub fn score_linear_boosting(ds: &Dataset) -> Result<FeatureScores> {
    let target = binary_target(ds)?;
    let scores = (0..ds.n_features())
        .into_par_iter()
        .map(|j| {
            let h = train_stump(ds, j)?.predict_column(ds);
            pearson(&h, &target.signs).map(f64::abs)
        })
        .collect::<Result<_>>()?;
    Ok(FeatureScores::new(Scorer::Boosting, scores))
}

/// Population variance per feature.
pub fn score_variance(ds: &Dataset) -> FeatureScores {
    let n = ds.n_samples() as f64;
    let scores = (0..ds.n_features())
        .map(|j| {
            let col = ds.column(j);
            let mean = col.iter().sum::<f64>() / n;
            col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n
        })
        .collect();
    FeatureScores::new(Scorer::Variance, scores)
}

/// Indices of the `k` highest scores (lower index wins ties), ascending.
pub fn select_top_k(scores: &FeatureScores, k: usize) -> Result<Vec<usize>> {
    let f = scores.scores.len();
    if k < 1 || k > f {
        return Err(Error::invalid_arg(format!("k = {k} outside 1..={f}")));
    }
    let mut order: Vec<usize> = (0..f).collect();
    order.sort_by(|&a, &b| scores.scores[b].total_cmp(&scores.scores[a]).then(a.cmp(&b)));
    let mut top = order[..k].to_vec();
    top.sort_unstable();
    Ok(top)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::discretize;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ds(cols: Vec<Vec<f64>>, labels: Vec<i64>) -> Dataset {
        Dataset::from_columns(cols, labels, None, None).unwrap()
    }

    #[test]
    fn anova_examples() {
        let d = ds(
            vec![vec![1.0, 2.0, 3.0, 4.0], vec![5.0, 5.0, 9.0, 9.0], vec![7.0; 4]],
            vec![0, 0, 1, 1],
        );
        let s = score_anova_f(&d).unwrap().scores;
        // between MS 4, within MS 0.5
        assert!((s[0] - 8.0).abs() < 1e-12);
        assert_eq!(s[1], f64::MAX);
        assert_eq!(s[2], 0.0);
    }

    #[test]
    fn anova_errors() {
        assert!(score_anova_f(&ds(vec![vec![1.0, 2.0]], vec![0, 0])).is_err());
        let ranking = Dataset::from_columns(vec![vec![1.0, 2.0]], vec![0, 1], Some(vec![1, 1]), None).unwrap();
        assert!(matches!(score_anova_f(&ranking), Err(Error::TaskMismatch(_))));
    }

    #[test]
    fn chi2_examples() {
        // perfect 2x2 predictor, 10 + 10 samples: every cell deviates by 5 from 5
        let labels: Vec<i64> = (0..20).map(|i| i64::from(i >= 10)).collect();
        let perfect: Vec<f64> = labels.iter().map(|&l| l as f64).collect();
        // bins split evenly within each class
        let proportional: Vec<f64> = (0..20).map(|i| f64::from(i % 2)).collect();
        let d = ds(vec![perfect, proportional, vec![1.0; 20]], labels);
        let view = discretize(&d, 10).unwrap();
        let s = score_chi2(&view, &d).unwrap().scores;
        assert!((s[0] - 20.0).abs() < 1e-12);
        assert!(s[1].abs() < 1e-12);
        assert_eq!(s[2], 0.0);
    }

    #[test]
    fn mi_scores_delegate() {
        let d = ds(vec![vec![0.0, 1.0, 0.0, 1.0], vec![0.0, 0.0, 1.0, 1.0]], vec![0, 1, 0, 1]);
        let view = discretize(&d, 10).unwrap();
        let s = score_mi(&view, &d).unwrap().scores;
        assert!((s[0] - std::f64::consts::LN_2).abs() < 1e-12);
        assert_eq!(s[1], 0.0);
    }

    #[test]
    fn pearson_examples() {
        let y: Vec<i64> = vec![0, 1, 0, 1];
        let f: Vec<f64> = y.iter().map(|&v| v as f64).collect();
        let neg: Vec<f64> = f.iter().map(|v| -v).collect();
        // orthogonal to y once both are centered
        let orth = vec![1.0, 1.0, -1.0, -1.0];
        let s = score_pearson(&ds(vec![f, neg, orth], y)).unwrap().scores;
        assert!((s[0] - 1.0).abs() < 1e-12);
        assert!((s[1] - 1.0).abs() < 1e-12);
        assert!(s[2].abs() < 1e-12);
    }

    #[test]
    fn boosting_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let labels: Vec<i64> = (0..1000).map(|_| rng.random_range(0..2)).collect();
        let separating: Vec<f64> = labels.iter().map(|&l| l as f64 * 3.0 + 1.0).collect();
        let mut shuffled: Vec<f64> = labels.iter().map(|&l| l as f64).collect();
        shuffled.shuffle(&mut rng);
        let d = ds(vec![separating, vec![2.0; 1000], shuffled], labels);
        let s = score_linear_boosting(&d).unwrap().scores;
        assert!((s[0] - 1.0).abs() < 1e-12);
        assert_eq!(s[1], 0.0);
        assert!(s[2] <= 0.1, "{}", s[2]);
    }

    #[test]
    fn variance_examples() {
        let d = ds(vec![vec![3.0; 4], vec![0.0, 1.0, 0.0, 1.0], vec![1.0, 2.0, 3.0, 4.0]], vec![0; 4]);
        let s = score_variance(&d).scores;
        assert_eq!(s, vec![0.0, 0.25, 1.25]);
    }

    #[test]
    fn top_k_examples() {
        let sc = |v: Vec<f64>| FeatureScores { scores: v, method: Scorer::Variance };
        assert_eq!(select_top_k(&sc(vec![3.0, 1.0, 2.0]), 2).unwrap(), vec![0, 2]);
        assert_eq!(select_top_k(&sc(vec![1.0; 4]), 2).unwrap(), vec![0, 1]);
        assert_eq!(select_top_k(&sc(vec![1.0, 5.0, 2.0]), 3).unwrap(), vec![0, 1, 2]);
        assert!(select_top_k(&sc(vec![1.0]), 0).is_err());
        assert!(select_top_k(&sc(vec![1.0]), 2).is_err());
    }

    #[test]
    fn scores_csv() {
        let fs = FeatureScores { scores: vec![0.5, 0.0], method: Scorer::Pearson };
        let mut out = Vec::new();
        fs.write_csv(Some(&["a".into(), "b,c".into()]), &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "feature_index,feature_name,method,score\n0,a,pearson,0.5\n1,\"b,c\",pearson,0\n"
        );
    }

    #[test]
    fn unknown_scorer() {
        assert!("lasso".parse::<Scorer>().unwrap_err().to_string().contains("variance"));
    }

    proptest! {
        #[test]
        fn scorers_are_row_order_invariant(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 30;
            let labels: Vec<i64> = (0..n).map(|_| rng.random_range(0..3)).collect();
            let cols: Vec<Vec<f64>> = (0..4)
                .map(|_| (0..n).map(|i| labels[i] as f64 + rng.random_range(-2.0..2.0)).collect())
                .collect();
            prop_assume!(labels.iter().any(|&l| l != labels[0]));
            let d = ds(cols, labels);
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let p = d.subset(&perm);
            let (v1, v2) = (discretize(&d, 5).unwrap(), discretize(&p, 5).unwrap());
            for scorer in Scorer::ALL {
                let a = scorer.score(&d, Some(&v1)).unwrap().scores;
                let b = scorer.score(&p, Some(&v2)).unwrap().scores;
                for (x, y) in a.iter().zip(&b) {
                    prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0), "{scorer}: {x} vs {y}");
                    prop_assert!(*x >= 0.0);
                }
                if matches!(scorer, Scorer::Pearson | Scorer::Boosting) {
                    prop_assert!(a.iter().all(|&s| s <= 1.0));
                }
            }
        }
    }
}
