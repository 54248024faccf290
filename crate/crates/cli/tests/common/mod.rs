#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use qubofs_core::data::write_svmlight;
use qubofs_core::Dataset;

pub fn qubofs(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qubofs"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = qubofs(dir, args);
    assert!(
        out.status.success(),
        "qubofs {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

/// Classification set where the label is the sign of the sum of the first
/// `informative` columns; the rest are independent noise.
pub fn planted(seed: u64, samples: usize, informative: usize, noise: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = Normal::new(0.0, 1.0).unwrap();
    let mut cols: Vec<Vec<f64>> = (0..informative + noise)
        .map(|_| (0..samples).map(|_| unit.sample(&mut rng)).collect())
        .collect();
    let labels: Vec<i64> = (0..samples)
        .map(|i| i64::from(cols[..informative].iter().map(|c| c[i]).sum::<f64>() > 0.0))
        .collect();
    for c in &mut cols {
        for v in c.iter_mut() {
            // keep files short and exact to reparse
            *v = (*v * 1e4).round() / 1e4;
        }
    }
    Dataset::from_columns(cols, labels, None, None).unwrap()
}

/// Ranking set: 30 queries of 10 documents, grades driven by column 0.
pub fn ranking(seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = Normal::new(0.0, 1.0).unwrap();
    let n = 300;
    let cols: Vec<Vec<f64>> = (0..6)
        .map(|_| (0..n).map(|_| ((unit.sample(&mut rng) * 1e4_f64).round() / 1e4).abs() + 0.01).collect())
        .collect();
    let grades = cols[0].iter().map(|v: &f64| (v * 1.5).floor().min(3.0) as i64).collect();
    let qids = (0..n as u64).map(|i| i / 10 + 1).collect();
    Dataset::from_columns(cols, grades, Some(qids), None).unwrap()
}

pub fn write_csv(path: &Path, ds: &Dataset) {
    let mut out = String::new();
    let header: Vec<String> = (0..ds.n_features()).map(|j| format!("f{j}")).collect();
    out.push_str(&header.join(","));
    out.push_str(",label\n");
    for i in 0..ds.n_samples() {
        for j in 0..ds.n_features() {
            out.push_str(&format!("{},", ds.value(i, j)));
        }
        out.push_str(&format!("{}\n", ds.labels()[i]));
    }
    fs::write(path, out).unwrap();
}

pub fn write_svm(path: &Path, ds: &Dataset) {
    let mut buf = Vec::new();
    write_svmlight(ds, &mut buf).unwrap();
    fs::write(path, buf).unwrap();
}

pub fn read(path: impl AsRef<Path>) -> Vec<u8> {
    fs::read(path.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", path.as_ref().display()))
}

pub fn json(path: impl AsRef<Path>) -> serde_json::Value {
    serde_json::from_slice(&read(path)).unwrap()
}

pub fn path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}
