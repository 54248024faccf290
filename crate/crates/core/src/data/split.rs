use std::collections::{BTreeMap, VecDeque};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};
use crate::seed;

/// Disjoint train / validation / test parts.
///
/// Indices always refer to samples, sorted ascending. For ranking data the
/// partition is drawn over queries and every sample follows its query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub valid: Vec<usize>,
    pub test: Vec<usize>,
}

impl Split {
    /// Train and validation parts together, ascending.
    pub fn development(&self) -> Vec<usize> {
        let mut dev: Vec<usize> = self.train.iter().chain(&self.valid).copied().collect();
        dev.sort_unstable();
        dev
    }

    fn sorted(mut self) -> Self {
        self.train.sort_unstable();
        self.valid.sort_unstable();
        self.test.sort_unstable();
        self
    }
}

fn check_frac(name: &str, f: f64) -> Result<()> {
    if f > 0.0 && f < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid_arg(format!("{name} must lie in (0, 1), got {f}")))
    }
}

/// Part sizes for `total` items; a middle part exists only when the two
/// fractions leave room for it.
fn part_sizes(total: usize, first: f64, last: f64) -> Result<[usize; 3]> {
    if first + last > 1.0 + 1e-12 {
        return Err(Error::invalid_arg(format!(
            "fractions sum to {} > 1",
            first + last
        )));
    }
    let three = first + last < 1.0 - 1e-9;
    let parts = if three { 3 } else { 2 };
    if total < parts {
        return Err(Error::invalid_data(format!(
            "{total} items cannot fill {parts} parts"
        )));
    }
    let t = total as f64;
    let mut a = ((t * first).round() as usize).max(1);
    let mut c = ((t * last).round() as usize).max(1);
    let reserve = usize::from(three);
    while a + c + reserve > total {
        if a >= c {
            a -= 1;
        } else {
            c -= 1;
        }
    }
    let b = if three { total - a - c } else { 0 };
    if !three {
        c = total - a;
    }
    Ok([a, b, c])
}

/// Stratified random split into train, validation (the remainder, if any)
/// and test parts.
///
/// Part sizes are `round(S * frac)`. Per-class counts are apportioned so
/// each lies within one sample of the class's proportional share of the part.
pub fn split_stratified(ds: &Dataset, train_frac: f64, test_frac: f64, seed: u64) -> Result<Split> {
    if ds.is_ranking() {
        return Err(Error::TaskMismatch(
            "stratified split expects a classification dataset; use the query split".into(),
        ));
    }
    check_frac("train_frac", train_frac)?;
    check_frac("test_frac", test_frac)?;
    let sizes = part_sizes(ds.n_samples(), train_frac, test_frac)?;
    let parts_requested = sizes.iter().filter(|&&s| s > 0).count();

    let classes = ds.classes();
    let idx = ds.label_indices();
    let mut members = vec![Vec::new(); classes.len()];
    for (i, &c) in idx.iter().enumerate() {
        members[c].push(i);
    }
    for (c, m) in members.iter().enumerate() {
        if m.len() < parts_requested {
            return Err(Error::invalid_data(format!(
                "class {} has {} samples, fewer than the {parts_requested} parts requested",
                classes[c],
                m.len()
            )));
        }
    }

    let class_sizes: Vec<usize> = members.iter().map(Vec::len).collect();
    let counts = apportion(&class_sizes, &sizes);
    let mut rng = seed::rng(seed, 0);
    let mut out: [Vec<usize>; 3] = Default::default();
    for (c, mut m) in members.into_iter().enumerate() {
        m.shuffle(&mut rng);
        let mut it = m.into_iter();
        for (p, part) in out.iter_mut().enumerate() {
            part.extend(it.by_ref().take(counts[c][p]));
        }
    }
    let [train, valid, test] = out;
    Ok(Split { train, valid, test }.sorted())
}

/// Random partition of the queries; each sample follows its query.
pub fn split_by_query(ds: &Dataset, train_frac: f64, valid_frac: f64, seed: u64) -> Result<Split> {
    let qids = ds
        .query_ids()
        .ok_or_else(|| Error::TaskMismatch("query split needs query ids".into()))?;
    check_frac("train_frac", train_frac)?;
    check_frac("valid_frac", valid_frac)?;
    let mut queries = qids.to_vec();
    queries.sort_unstable();
    queries.dedup();
    // The test part takes whatever the other two leave.
    let test_frac = 1.0 - train_frac - valid_frac;
    let [n_train, _, n_valid] = if test_frac > 1e-9 {
        let [a, b, c] = part_sizes(queries.len(), train_frac, valid_frac)?;
        [a, b, c]
    } else {
        // no test part requested: train + valid only
        let [a, _, c] = part_sizes(queries.len(), train_frac, 1.0 - train_frac)?;
        [a, 0, c]
    };

    queries.shuffle(&mut seed::rng(seed, 1));
    let part_of: BTreeMap<u64, usize> = queries
        .iter()
        .enumerate()
        .map(|(pos, &q)| {
            let part = if pos < n_train {
                0
            } else if pos < n_train + n_valid {
                1
            } else {
                2
            };
            (q, part)
        })
        .collect();
    let mut split = Split {
        train: Vec::new(),
        valid: Vec::new(),
        test: Vec::new(),
    };
    for (i, q) in qids.iter().enumerate() {
        match part_of[q] {
            0 => split.train.push(i),
            1 => split.valid.push(i),
            _ => split.test.push(i),
        }
    }
    Ok(split)
}

/// Stratified k-fold partition of `indices` (classification only).
pub fn stratified_folds(ds: &Dataset, indices: &[usize], folds: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if folds < 2 {
        return Err(Error::invalid_arg("need at least 2 folds"));
    }
    if indices.len() < folds {
        return Err(Error::invalid_data(format!(
            "{} samples cannot fill {folds} folds",
            indices.len()
        )));
    }
    let label_idx = ds.label_indices();
    let n_classes = ds.classes().len();
    let mut members = vec![Vec::new(); n_classes];
    for &i in indices {
        members[label_idx[i]].push(i);
    }
    members.retain(|m| !m.is_empty());
    let base = indices.len() / folds;
    let extra = indices.len() % folds;
    let sizes: Vec<usize> = (0..folds).map(|f| base + usize::from(f < extra)).collect();
    let class_sizes: Vec<usize> = members.iter().map(Vec::len).collect();
    let counts = apportion(&class_sizes, &sizes);
    let mut rng = seed::rng(seed, 2);
    let mut out = vec![Vec::new(); folds];
    for (c, mut m) in members.into_iter().enumerate() {
        m.shuffle(&mut rng);
        let mut it = m.into_iter();
        for (f, fold) in out.iter_mut().enumerate() {
            fold.extend(it.by_ref().take(counts[c][f]));
        }
    }
    for fold in &mut out {
        fold.sort_unstable();
    }
    Ok(out)
}

/// Integer matrix rounding: `counts[c][p]` is the floor or ceiling of
/// `rows[c] * cols[p] / total`, with row sums `rows` and column sums `cols`.
///
/// Floors are taken first; the leftover units are routed by max-flow over
/// cells with a nonzero fractional part, which always saturates.
fn apportion(rows: &[usize], cols: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = rows.iter().sum();
    debug_assert_eq!(total, cols.iter().sum::<usize>());
    let (nr, nc) = (rows.len(), cols.len());
    let mut counts = vec![vec![0usize; nc]; nr];
    let mut fractional = vec![vec![false; nc]; nr];
    for r in 0..nr {
        for c in 0..nc {
            let q = rows[r] * cols[c];
            counts[r][c] = q / total;
            fractional[r][c] = !q.is_multiple_of(total);
        }
    }

    // nodes: source, rows, cols, sink
    let source = 0;
    let sink = nr + nc + 1;
    let n = nr + nc + 2;
    let mut cap = vec![vec![0usize; n]; n];
    for r in 0..nr {
        cap[source][1 + r] = rows[r] - counts[r].iter().sum::<usize>();
        for c in 0..nc {
            if fractional[r][c] {
                cap[1 + r][1 + nr + c] = 1;
            }
        }
    }
    for c in 0..nc {
        cap[1 + nr + c][sink] = cols[c] - (0..nr).map(|r| counts[r][c]).sum::<usize>();
    }
    let mut flow = vec![vec![0usize; n]; n];
    loop {
        let mut prev = vec![usize::MAX; n];
        prev[source] = source;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                let residual = cap[u][v] - flow[u][v] + flow[v][u];
                if prev[v] == usize::MAX && residual > 0 {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if prev[sink] == usize::MAX {
            break;
        }
        let mut v = sink;
        while v != source {
            let u = prev[v];
            if flow[v][u] > 0 {
                flow[v][u] -= 1;
            } else {
                flow[u][v] += 1;
            }
            v = u;
        }
    }
    for r in 0..nr {
        for c in 0..nc {
            counts[r][c] += flow[1 + r][1 + nr + c];
        }
    }
    counts
}
