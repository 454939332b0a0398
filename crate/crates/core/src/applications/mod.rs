//! Multivariate pipelines assembled from block-encodings: PCA, LDA, CCA,
//! discriminant CCA and ordinary least squares. Each one also solves the
//! same problem classically and records the agreement as [`Check`]s.

mod cca;
mod lda;
mod ols;
mod pca;

pub use cca::{cca, cca_encodings, dcca, dcca_encodings, CcaEncodings};
pub use lda::{lda, scatter_within_encoding};
pub use ols::{ols, RegressionResult};
pub use pca::{pca, scatter_total_encoding, PcaResult};

use serde::{Deserialize, Serialize};

use crate::block_encoding::{BlockEncoding, EncodingSummary, MetadataAudit};
use crate::centering::ClassPartition;
use crate::error::{invalid, mismatch, Result};
use crate::linalg::{eigh, max_principal_angle};
use crate::matrix::{embed_into, vec_norm, ComplexMatrix, C64};

/// Tolerance for block-versus-oracle distances of scatter matrices.
pub const SCATTER_TOL: f64 = 1e-7;
/// Tolerance for generalized eigenvalues against the dense pencil oracle.
pub const PENCIL_VALUE_TOL: f64 = 1e-6;
/// Tolerance for the largest principal angle between eigenspaces.
pub const PENCIL_ANGLE_TOL: f64 = 1e-5;
/// Eigenvalues closer than this are reported as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Samples as columns of `x`, with one class label per column.
#[derive(Clone, Debug)]
pub struct LabeledDataset {
    x: ComplexMatrix,
    labels: Vec<usize>,
    label_values: Vec<i64>,
    partition: ClassPartition,
}

impl LabeledDataset {
    /// Classes are numbered by ascending label value.
    pub fn new(x: ComplexMatrix, labels: &[i64]) -> Result<Self> {
        if labels.len() != x.cols() {
            return Err(mismatch(format!(
                "{} labels for {} samples",
                labels.len(),
                x.cols()
            )));
        }
        let (partition, label_values) = ClassPartition::from_labels(labels)?;
        let labels = labels
            .iter()
            .map(|l| label_values.binary_search(l).expect("label present"))
            .collect();
        Ok(Self {
            x,
            labels,
            label_values,
            partition,
        })
    }

    pub fn x(&self) -> &ComplexMatrix {
        &self.x
    }

    /// Class index of every sample.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Original label of every class index.
    pub fn label_values(&self) -> &[i64] {
        &self.label_values
    }

    pub fn partition(&self) -> &ClassPartition {
        &self.partition
    }

    pub fn features(&self) -> usize {
        self.x.rows()
    }

    pub fn samples(&self) -> usize {
        self.x.cols()
    }

    pub fn classes(&self) -> usize {
        self.partition.classes()
    }

    /// Columns of class `k`, in sample order.
    pub fn class_data(&self, k: usize) -> ComplexMatrix {
        let cols: Vec<Vec<C64>> = (0..self.samples())
            .filter(|&i| self.labels[i] == k)
            .map(|i| self.x.column(i))
            .collect();
        ComplexMatrix::from_columns(&cols).expect("class is nonempty")
    }

    /// Samples rearranged into the padded class layout of the partition:
    /// class `k` fills slot `k` from its start, remaining columns are zero.
    pub fn slot_layout(&self) -> ComplexMatrix {
        let slots = self.partition.occupied_slots();
        let mut out = ComplexMatrix::zeros(self.features(), self.partition.padded_dim());
        let mut next = 0;
        for k in 0..self.classes() {
            for i in (0..self.samples()).filter(|&i| self.labels[i] == k) {
                out.set_column(slots[next], &self.x.column(i));
                next += 1;
            }
        }
        out
    }
}

/// Top eigenpairs, largest first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<C64>>,
    pub d: usize,
    /// Index pairs `(j, j + 1)` whose values agree within the degeneracy
    /// tolerance.
    pub degenerate_pairs: Vec<(usize, usize)>,
    /// Declared error bound inherited from the encodings.
    pub error_bound: f64,
}

impl EigenResult {
    fn flag_degeneracies(&mut self) {
        self.degenerate_pairs = self
            .values
            .windows(2)
            .enumerate()
            .filter(|(_, w)| (w[0] - w[1]).abs() <= DEGENERACY_TOL * w[0].abs().max(1.0))
            .map(|(j, _)| (j, j + 1))
            .collect();
    }

    /// Keeps the listed coordinates of every vector.
    fn restrict(&mut self, coords: &[usize]) {
        for v in &mut self.vectors {
            *v = coords.iter().map(|&i| v[i]).collect();
        }
    }
}

/// One measured agreement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: &str, measured: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            measured,
            tolerance,
            pass: measured <= tolerance,
        }
    }

    pub fn flag(name: &str, ok: bool) -> Self {
        Self {
            name: name.to_string(),
            measured: if ok { 0.0 } else { 1.0 },
            tolerance: 0.0,
            pass: ok,
        }
    }
}

/// Result of a pipeline together with what was built to get it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineOutcome<R> {
    pub result: R,
    pub encodings: Vec<EncodingSummary>,
    pub checks: Vec<Check>,
    pub audit: MetadataAudit,
}

impl<R> PipelineOutcome<R> {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass) && self.audit.is_clean()
    }

    fn new(result: R, built: &[(&str, &BlockEncoding)], checks: Vec<Check>) -> Self {
        let mut audit = MetadataAudit::default();
        for (_, be) in built {
            audit.merge(be.provenance().audit());
        }
        let mut checks = checks;
        checks.push(Check::flag("composition metadata", audit.is_clean()));
        Self {
            result,
            encodings: built.iter().map(|(l, be)| be.summary(l)).collect(),
            checks,
            audit,
        }
    }
}

/// Rotates `v` so its first non-negligible entry is real and positive.
pub fn fix_sign(v: &mut [C64]) {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-10 * scale).copied() {
        let phase = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= phase;
        }
    }
}

/// Solves `A v = λ B v` for Hermitian `A` and positive semidefinite `B`
/// by whitening with `B^{+1/2}`; only directions in the range of `B` are
/// returned. Vectors are unit norm with [`fix_sign`] applied.
pub fn solve_pencil(a: &ComplexMatrix, b: &ComplexMatrix, d: usize) -> Result<EigenResult> {
    if a.shape() != b.shape() || !a.is_square() {
        return Err(mismatch("pencil matrices must be square and equally sized"));
    }
    let scale = a.max_abs().max(b.max_abs()).max(1.0);
    let eb = eigh(b, 1e-8 * scale)?;
    let top = eb.values.first().copied().unwrap_or(0.0);
    if top <= 1e-12 * scale {
        return Err(invalid("B is numerically zero"));
    }
    let n = a.rows();
    let keep: Vec<usize> = (0..n).filter(|&k| eb.values[k] > 1e-9 * top).collect();
    // Columns V_r Λ_r^{-1/2} map the whitened range back to the original space.
    let map = ComplexMatrix::from_fn(n, keep.len(), |r, c| {
        eb.vectors[(r, keep[c])] / eb.values[keep[c]].sqrt()
    });
    let m = map.adjoint().matmul(a)?.matmul(&map)?.hermitian_part();
    let em = eigh(&m, f64::INFINITY)?;
    let mut values = Vec::new();
    let mut vectors = Vec::new();
    for (j, &lambda) in em.values.iter().enumerate().take(d) {
        let mut v = map.mat_vec(&em.vector(j));
        let norm = vec_norm(&v);
        v.iter_mut().for_each(|z| *z /= norm);
        fix_sign(&mut v);
        values.push(lambda);
        vectors.push(v);
    }
    if d == 0 || values.len() < d {
        return Err(invalid(format!(
            "requested {d} eigenpairs but the pencil has rank {}",
            keep.len()
        )));
    }
    let mut out = EigenResult {
        values,
        vectors,
        d,
        degenerate_pairs: vec![],
        error_bound: 0.0,
    };
    out.flag_degeneracies();
    Ok(out)
}

/// Top-`d` pairs of the pencil formed by the operators two encodings
/// represent (their `alpha`-scaled blocks).
pub fn generalized_eig(
    a_be: &BlockEncoding,
    b_be: &BlockEncoding,
    d: usize,
) -> Result<EigenResult> {
    if a_be.system_qubits() != b_be.system_qubits() {
        return Err(mismatch("pencil encodings act on different system sizes"));
    }
    let mut r = solve_pencil(&a_be.scaled_block(), &b_be.scaled_block(), d)?;
    r.error_bound = a_be.epsilon() + b_be.epsilon();
    Ok(r)
}

/// Largest eigenvalue gap and principal angle between `result` and the
/// pencil `(a_ref, b_ref)` solved by the dense oracle. Eigenvectors are
/// compared cluster by cluster.
pub(crate) fn compare_to_oracle(
    result: &EigenResult,
    a_ref: &ComplexMatrix,
    b_ref: &ComplexMatrix,
) -> Result<(f64, f64)> {
    let oracle = crate::reference::pencil_eigenvalues(a_ref, b_ref)?;
    let value_gap = result
        .values
        .iter()
        .zip(&oracle)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let mut angle: f64 = 0.0;
    let mut start = 0;
    while start < result.values.len() {
        let close = |v: f64| {
            (v - result.values[start]).abs()
                <= PENCIL_VALUE_TOL * result.values[start].abs().max(1.0)
        };
        let mut end = start + 1;
        while end < result.values.len() && close(result.values[end]) {
            end += 1;
        }
        let lambda = result.values[start..end].iter().sum::<f64>() / (end - start) as f64;
        let multiplicity = oracle
            .iter()
            .filter(|&&v| close(v))
            .count()
            .max(end - start);
        let reference = crate::reference::pencil_eigenvectors(a_ref, b_ref, lambda, multiplicity)?;
        angle = angle.max(max_principal_angle(&result.vectors[start..end], &reference));
        start = end;
    }
    Ok((value_gap, angle))
}

/// `x` zero-padded to a `dim x dim` matrix, `dim` a power of two of at
/// least 2 covering both sides.
pub(crate) fn pad_square(x: &ComplexMatrix, at_least: usize) -> ComplexMatrix {
    let dim = x
        .rows()
        .max(x.cols())
        .max(at_least)
        .next_power_of_two()
        .max(2);
    embed_into(x, dim)
}
