//! Random forest of unpruned Gini trees on bootstrap resamples.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::seed;

pub const DEFAULT_TREES: usize = 100;

#[derive(Debug, Clone)]
enum Node {
    Leaf(usize),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone)]
struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn predict(&self, ds: &Dataset, sample: usize) -> usize {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf(c) => return c,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if ds.value(sample, feature) <= threshold { left } else { right },
            }
        }
    }
}

/// Majority-vote ensemble; ties resolve to the smaller class label.
#[derive(Debug, Clone)]
pub struct RandomForest {
    trees: Vec<Tree>,
    classes: Vec<i64>,
    features: Vec<usize>,
}

impl RandomForest {
    pub fn features(&self) -> &[usize] {
        &self.features
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    /// Predicts every sample of `ds`, which must share the training columns.
    pub fn predict(&self, ds: &Dataset) -> Vec<i64> {
        (0..ds.n_samples()).map(|i| self.predict_one(ds, i)).collect()
    }

    pub fn predict_one(&self, ds: &Dataset, sample: usize) -> i64 {
        let mut votes = vec![0usize; self.classes.len()];
        for t in &self.trees {
            votes[t.predict(ds, sample)] += 1;
        }
        self.classes[argmax_first(&votes)]
    }
}

fn argmax_first(counts: &[usize]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

/// Trains `trees` trees on bootstrap resamples, considering
/// `⌈√|selected|⌉` candidate features at each split.
pub fn train_forest(ds: &Dataset, selected: &[usize], trees: usize, seed: u64) -> Result<RandomForest> {
    if selected.is_empty() {
        return Err(Error::invalid_arg("cannot train a forest on an empty feature selection"));
    }
    if trees == 0 {
        return Err(Error::invalid_arg("forest needs at least one tree"));
    }
    if ds.is_ranking() {
        return Err(Error::TaskMismatch("forest needs class labels".into()));
    }
    if let Some(&bad) = selected.iter().find(|&&j| j >= ds.n_features()) {
        return Err(Error::invalid_arg(format!("feature {bad} out of range")));
    }
    let classes = ds.classes();
    let y = ds.label_indices();
    let mtry = (selected.len() as f64).sqrt().ceil() as usize;
    let trees = (0..trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = seed::rng(seed, t as u64);
            let n = ds.n_samples();
            let sample: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            grow(ds, &y, classes.len(), selected, mtry, sample, &mut rng)
        })
        .collect();
    Ok(RandomForest {
        trees,
        classes,
        features: selected.to_vec(),
    })
}

fn class_counts(y: &[usize], k: usize, idx: &[usize]) -> Vec<usize> {
    let mut c = vec![0usize; k];
    for &i in idx {
        c[y[i]] += 1;
    }
    c
}

fn gini_sum(counts: &[usize], total: usize) -> f64 {
    // total * gini impurity, so child impurities add directly
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    t - counts.iter().map(|&c| (c * c) as f64).sum::<f64>() / t
}

struct BestSplit {
    score: f64,
    feature: usize,
    threshold: f64,
}

fn grow(
    ds: &Dataset,
    y: &[usize],
    k: usize,
    features: &[usize],
    mtry: usize,
    root: Vec<usize>,
    rng: &mut impl Rng,
) -> Tree {
    let mut nodes = vec![Node::Leaf(0)];
    let mut stack = vec![(0usize, root)];
    let mut order = features.to_vec();
    while let Some((id, idx)) = stack.pop() {
        let counts = class_counts(y, k, &idx);
        let majority = argmax_first(&counts);
        if counts[majority] == idx.len() {
            nodes[id] = Node::Leaf(majority);
            continue;
        }
        order.shuffle(rng);
        let mut best: Option<BestSplit> = None;
        let mut tried = 0;
        let mut pairs: Vec<(f64, usize)> = Vec::with_capacity(idx.len());
        for &f in &order {
            if tried == mtry {
                break;
            }
            pairs.clear();
            pairs.extend(idx.iter().map(|&i| (ds.value(i, f), y[i])));
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            if pairs[0].0 == pairs[pairs.len() - 1].0 {
                continue;
            }
            tried += 1;
            let mut left = vec![0usize; k];
            let mut right = counts.clone();
            for w in 0..pairs.len() - 1 {
                left[pairs[w].1] += 1;
                right[pairs[w].1] -= 1;
                let (lo, hi) = (pairs[w].0, pairs[w + 1].0);
                if lo == hi {
                    continue;
                }
                let score = gini_sum(&left, w + 1) + gini_sum(&right, pairs.len() - w - 1);
                if best.as_ref().is_none_or(|b| score < b.score) {
                    best = Some(BestSplit {
                        score,
                        feature: f,
                        threshold: lo + (hi - lo) / 2.0,
                    });
                }
            }
        }
        let Some(split) = best else {
            nodes[id] = Node::Leaf(majority);
            continue;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = idx
            .into_iter()
            .partition(|&i| ds.value(i, split.feature) <= split.threshold);
        let left = nodes.len();
        nodes.push(Node::Leaf(0));
        nodes.push(Node::Leaf(0));
        nodes[id] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right: left + 1,
        };
        stack.push((left + 1, r));
        stack.push((left, l));
    }
    Tree { nodes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::accuracy;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn two_gaussians(seed: u64, n: usize, noise_features: usize) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let unit = Normal::new(0.0, 1.0).unwrap();
        let labels: Vec<i64> = (0..n).map(|i| (i % 2) as i64).collect();
        let mut cols = Vec::new();
        for _ in 0..2 {
            cols.push(labels.iter().map(|&l| 2.0 * l as f64 + unit.sample(&mut rng)).collect());
        }
        for _ in 0..noise_features {
            cols.push((0..n).map(|_| unit.sample(&mut rng)).collect());
        }
        Dataset::from_columns(cols, labels, None, None).unwrap()
    }

    #[test]
    fn separating_feature_fits_training_data() {
        let ds = Dataset::from_columns(
            vec![vec![0.1, 0.4, 0.35, 0.8, 0.9, 0.7], vec![1.0; 6]],
            vec![0, 0, 0, 1, 1, 1],
            None,
            None,
        )
        .unwrap();
        let f = train_forest(&ds, &[0], 10, 1).unwrap();
        assert_eq!(accuracy(&f.predict(&ds), ds.labels()).unwrap(), 1.0);
    }

    #[test]
    fn constant_feature_predicts_majority() {
        let ds = Dataset::from_columns(vec![vec![2.0; 5]], vec![1, 0, 1, 1, 0], None, None).unwrap();
        let f = train_forest(&ds, &[0], 1, 3).unwrap();
        // a bootstrap might drop the majority; the tree sees only its resample
        let pred = f.predict(&ds);
        assert!(pred.windows(2).all(|w| w[0] == w[1]));
        let big = train_forest(&ds, &[0], 51, 3).unwrap();
        assert!(big.predict(&ds).iter().all(|&p| p == 1));
    }

    #[test]
    fn gaussian_holdout_accuracy() {
        let train = two_gaussians(1, 200, 3);
        let test = two_gaussians(2, 200, 3);
        let f = train_forest(&train, &[0, 1, 2, 3, 4], 50, 9).unwrap();
        let acc = accuracy(&f.predict(&test), test.labels()).unwrap();
        assert!(acc >= 0.9, "{acc}");
    }

    #[test]
    fn deterministic_and_validated() {
        let ds = two_gaussians(4, 60, 1);
        let a = train_forest(&ds, &[0, 2], 15, 5).unwrap().predict(&ds);
        let b = train_forest(&ds, &[0, 2], 15, 5).unwrap().predict(&ds);
        assert_eq!(a, b);
        assert!(train_forest(&ds, &[], 10, 0).is_err());
        assert!(train_forest(&ds, &[7], 10, 0).is_err());
    }
}
