//! QUBO problems, energies, and sample sets.
//!
//! Energy of an assignment `x ∈ {0,1}^n` is `offset + Σ_i Σ_j Q[i][j] x_i x_j`
//! over the full (not necessarily symmetric) coefficient matrix.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct QuboProblem {
    n: usize,
    /// Row-major `n × n`.
    coefficients: Vec<f64>,
    offset: f64,
}

impl QuboProblem {
    pub fn new(n: usize, coefficients: Vec<f64>, offset: f64) -> Result<Self> {
        if coefficients.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                actual: coefficients.len(),
            });
        }
        if let Some(p) = coefficients.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid_data(format!(
                "non-finite coefficient at ({}, {})",
                p / n,
                p % n
            )));
        }
        if !offset.is_finite() {
            return Err(Error::invalid_data("non-finite offset"));
        }
        Ok(QuboProblem {
            n,
            coefficients,
            offset,
        })
    }

    pub fn zeros(n: usize) -> Self {
        QuboProblem {
            n,
            coefficients: vec![0.0; n * n],
            offset: 0.0,
        }
    }

    /// From a square row-major matrix given as nested rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: bad.len(),
            });
        }
        Self::new(n, rows.concat(), 0.0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.coefficients[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(value.is_finite(), "coefficient must be finite");
        self.coefficients[i * self.n + j] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.coefficients[i * self.n..(i + 1) * self.n]
    }

    /// Number of nonzero coefficients.
    pub fn nonzero_count(&self) -> usize {
        self.coefficients.iter().filter(|&&v| v != 0.0).count()
    }

    fn check_assignment(&self, x: &[u8]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: x.len(),
            });
        }
        if let Some(v) = x.iter().find(|&&v| v > 1) {
            return Err(Error::invalid_arg(format!("assignment value {v} is not binary")));
        }
        Ok(())
    }

    pub fn energy(&self, x: &[u8]) -> Result<f64> {
        self.check_assignment(x)?;
        Ok(self.energy_unchecked(x))
    }

    pub(crate) fn energy_unchecked(&self, x: &[u8]) -> f64 {
        let ones: Vec<usize> = (0..self.n).filter(|&i| x[i] == 1).collect();
        let mut e = self.offset;
        for &i in &ones {
            let row = self.row(i);
            for &j in &ones {
                e += row[j];
            }
        }
        e
    }

    /// `fields[j] = Q[j][j] + Σ_{k≠j} (Q[j][k] + Q[k][j]) x_k`.
    pub fn local_fields(&self, x: &[u8]) -> Result<Vec<f64>> {
        self.check_assignment(x)?;
        let n = self.n;
        Ok((0..n)
            .map(|j| {
                let mut f = self.get(j, j);
                for k in (0..n).filter(|&k| k != j && x[k] == 1) {
                    f += self.get(j, k) + self.get(k, j);
                }
                f
            })
            .collect())
    }

    /// Energy change from flipping bit `i`, given the current local fields.
    pub fn flip_delta(&self, x: &[u8], local_fields: &[f64], i: usize) -> Result<f64> {
        if i >= self.n {
            return Err(Error::invalid_arg(format!(
                "variable {i} out of range for n = {}",
                self.n
            )));
        }
        if x.len() != self.n || local_fields.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: x.len().min(local_fields.len()),
            });
        }
        Ok(flip_sign(x[i]) * local_fields[i])
    }

    /// Commits a flip of bit `i` and refreshes `local_fields` in O(n).
    pub fn apply_flip(&self, x: &mut [u8], local_fields: &mut [f64], i: usize) {
        let d = flip_sign(x[i]);
        x[i] ^= 1;
        for j in (0..self.n).filter(|&j| j != i) {
            local_fields[j] += d * (self.get(j, i) + self.get(i, j));
        }
    }

    /// Adds `strength · (Σ x_i − k)²`, keeping the constant `strength · k²`
    /// in the offset so energies match the penalized objective exactly.
    pub fn with_k_penalty(&self, k: usize, strength: f64) -> Result<QuboProblem> {
        if k < 1 || k > self.n {
            return Err(Error::invalid_arg(format!(
                "k = {k} outside 1..={}",
                self.n
            )));
        }
        if !(strength > 0.0 && strength.is_finite()) {
            return Err(Error::invalid_arg(format!(
                "penalty strength must be positive, got {strength}"
            )));
        }
        let kf = k as f64;
        let mut out = self.clone();
        for i in 0..self.n {
            out.coefficients[i * self.n + i] += strength * (1.0 - 2.0 * kf);
            for j in i + 1..self.n {
                out.coefficients[i * self.n + j] += 2.0 * strength;
            }
        }
        out.offset += strength * kf * kf;
        Ok(out)
    }

    /// Symmetrized couplings for fast single-flip bookkeeping.
    pub fn coupling(&self) -> Coupling {
        let n = self.n;
        let mut sym = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    sym[i * n + j] = self.get(i, j) + self.get(j, i);
                }
            }
        }
        Coupling {
            n,
            diag: (0..n).map(|i| self.get(i, i)).collect(),
            sym,
            offset: self.offset,
        }
    }

    pub fn to_file(&self) -> QuboFile {
        let mut entries = Vec::new();
        for i in 0..self.n {
            for (j, &v) in self.row(i).iter().enumerate() {
                if v != 0.0 {
                    entries.push((i, j, v));
                }
            }
        }
        QuboFile {
            n: self.n,
            offset: self.offset,
            entries,
        }
    }

    pub fn from_file(file: &QuboFile) -> Result<Self> {
        let n = file.n;
        let mut q = QuboProblem::zeros(n);
        for &(i, j, v) in &file.entries {
            if i >= n || j >= n {
                return Err(Error::invalid_data(format!(
                    "entry ({i}, {j}) out of range for n = {n}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::invalid_data(format!("non-finite entry at ({i}, {j})")));
            }
            q.coefficients[i * n + j] += v;
        }
        if !file.offset.is_finite() {
            return Err(Error::invalid_data("non-finite offset"));
        }
        q.offset = file.offset;
        Ok(q)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("qubo serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }
}

#[inline]
fn flip_sign(bit: u8) -> f64 {
    1.0 - 2.0 * f64::from(bit)
}

/// On-disk QUBO: sparse `[i, j, value]` triples, absent entries are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuboFile {
    pub n: usize,
    pub offset: f64,
    pub entries: Vec<(usize, usize, f64)>,
}

/// Diagonal plus symmetrized off-diagonal couplings (`Q + Qᵀ`, zero
/// diagonal). Shared read-only by every solver read.
#[derive(Debug, Clone)]
pub struct Coupling {
    n: usize,
    diag: Vec<f64>,
    sym: Vec<f64>,
    offset: f64,
}

impl Coupling {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diag(&self, i: usize) -> f64 {
        self.diag[i]
    }

    pub fn sym_row(&self, i: usize) -> &[f64] {
        &self.sym[i * self.n..(i + 1) * self.n]
    }

    /// Per-variable bound on `|ΔE|` for a single flip:
    /// `|Q[i][i]| + Σ_j |Q[i][j] + Q[j][i]|`.
    pub fn flip_bounds(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.diag[i].abs() + self.sym_row(i).iter().map(|v| v.abs()).sum::<f64>())
            .collect()
    }

    pub fn state(&self, x: Vec<u8>) -> FlipState<'_> {
        assert_eq!(x.len(), self.n);
        let mut fields = self.diag.clone();
        let mut energy = self.offset;
        for k in (0..self.n).filter(|&k| x[k] == 1) {
            energy += self.diag[k];
            for (j, f) in fields.iter_mut().enumerate() {
                *f += self.sym[j * self.n + k];
            }
        }
        // pairs counted once each through the symmetrized matrix
        for i in (0..self.n).filter(|&i| x[i] == 1) {
            for j in (i + 1..self.n).filter(|&j| x[j] == 1) {
                energy += self.sym[i * self.n + j];
            }
        }
        FlipState {
            coupling: self,
            x,
            fields,
            energy,
        }
    }
}

/// An assignment together with its local fields and running energy.
#[derive(Debug, Clone)]
pub struct FlipState<'a> {
    coupling: &'a Coupling,
    x: Vec<u8>,
    fields: Vec<f64>,
    energy: f64,
}

impl FlipState<'_> {
    #[inline]
    pub fn delta(&self, i: usize) -> f64 {
        flip_sign(self.x[i]) * self.fields[i]
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        let d = flip_sign(self.x[i]);
        self.energy += d * self.fields[i];
        self.x[i] ^= 1;
        let row = self.coupling.sym_row(i);
        for (f, &s) in self.fields.iter_mut().zip(row) {
            *f += d * s;
        }
    }

    pub fn assignment(&self) -> &[u8] {
        &self.x
    }

    pub fn into_assignment(self) -> Vec<u8> {
        self.x
    }

    /// Running energy; accumulates rounding over many flips.
    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub assignment: Vec<u8>,
    pub energy: f64,
    pub multiplicity: u64,
}

impl Sample {
    /// Indices of the variables set to 1.
    pub fn selected(&self) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| (b == 1).then_some(i))
            .collect()
    }
}

/// Distinct assignments in ascending energy order (ties by assignment).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SampleSet {
    samples: Vec<Sample>,
    runner_up_energy: Option<f64>,
}

impl SampleSet {
    /// Energies are recomputed exactly from `problem`; repeated assignments
    /// are merged with summed multiplicity.
    pub fn from_assignments(
        problem: &QuboProblem,
        assignments: impl IntoIterator<Item = Vec<u8>>,
    ) -> Result<Self> {
        let mut counts: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
        for x in assignments {
            problem.check_assignment(&x)?;
            *counts.entry(x).or_insert(0) += 1;
        }
        let mut samples: Vec<Sample> = counts
            .into_iter()
            .map(|(assignment, multiplicity)| Sample {
                energy: problem.energy_unchecked(&assignment),
                assignment,
                multiplicity,
            })
            .collect();
        samples.sort_by(|a, b| {
            a.energy
                .total_cmp(&b.energy)
                .then_with(|| a.assignment.cmp(&b.assignment))
        });
        Ok(SampleSet {
            samples,
            runner_up_energy: None,
        })
    }

    pub(crate) fn with_runner_up(mut self, energy: Option<f64>) -> Self {
        self.runner_up_energy = energy;
        self
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn best(&self) -> Option<&Sample> {
        self.samples.first()
    }

    pub fn lowest_energy(&self) -> Option<f64> {
        self.best().map(|s| s.energy)
    }

    /// Next energy level above the minimum, when the solver knows it
    /// (exhaustive enumeration only).
    pub fn runner_up_energy(&self) -> Option<f64> {
        self.runner_up_energy
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn total_reads(&self) -> u64 {
        self.samples.iter().map(|s| s.multiplicity).sum()
    }
}
