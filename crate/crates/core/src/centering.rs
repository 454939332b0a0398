//! Encodings of centering matrices, all-ones blocks and the class
//! similarity matrix.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::block_encoding::{
    block_diagonal, identity_encoding, linear_combination, make_state_prep_pair,
    make_state_prep_pair_on, pad_ancillas, rescale, BlockEncoding, PhaseConvention,
};
use crate::circuit::Circuit;
use crate::error::{invalid, mismatch, Result};
use crate::matrix::{
    cap_qubits, check_cap, kron_power, log2_ceil, log2_exact, ComplexMatrix, C64, ONE,
};

/// Dimension of a centering matrix, a power of two.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CenteringSpec {
    n: usize,
    log_n: usize,
}

impl CenteringSpec {
    pub fn new(n: usize) -> Result<Self> {
        match log2_exact(n) {
            Some(log_n) if log_n >= 1 => Ok(Self { n, log_n }),
            _ => Err(invalid(format!(
                "centering dimension {n} is not a power of two >= 2"
            ))),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn log_n(&self) -> usize {
        self.log_n
    }
}

/// Class sizes `n_1, ..., n_c` of a labeled sample set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassPartition {
    sizes: Vec<usize>,
}

impl ClassPartition {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(invalid("a partition needs at least one class"));
        }
        if sizes.contains(&0) {
            return Err(invalid("every class needs at least one sample"));
        }
        Ok(Self { sizes })
    }

    /// Partition induced by integer labels, classes in ascending label
    /// order. Also returns the distinct labels.
    pub fn from_labels(labels: &[i64]) -> Result<(Self, Vec<i64>)> {
        let mut counts = BTreeMap::new();
        for &l in labels {
            *counts.entry(l).or_insert(0usize) += 1;
        }
        let keys = counts.keys().copied().collect();
        Ok((Self::new(counts.into_values().collect())?, keys))
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn classes(&self) -> usize {
        self.sizes.len()
    }

    pub fn total(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Largest class size.
    pub fn max_size(&self) -> usize {
        self.sizes.iter().copied().max().unwrap_or(0)
    }

    /// Slot width in the padded class layout: the largest class size
    /// rounded up to a power of two, at least 2.
    pub fn slot_size(&self) -> usize {
        self.max_size().next_power_of_two().max(2)
    }

    /// Number of class slots in the padded layout, a power of two.
    pub fn slot_count(&self) -> usize {
        self.classes().next_power_of_two()
    }

    /// Side length of the padded class layout.
    pub fn padded_dim(&self) -> usize {
        self.slot_size() * self.slot_count()
    }

    /// Positions of the real samples in the padded layout, class by class.
    pub fn occupied_slots(&self) -> Vec<usize> {
        let w = self.slot_size();
        self.sizes
            .iter()
            .enumerate()
            .flat_map(|(k, &n)| (0..n).map(move |i| k * w + i))
            .collect()
    }

    /// `diag(e e^T, ..., e e^T)` on the compact sample ordering.
    pub fn similarity_matrix(&self) -> ComplexMatrix {
        let n = self.total();
        let mut class_of = Vec::with_capacity(n);
        for (k, &s) in self.sizes.iter().enumerate() {
            class_of.extend(std::iter::repeat_n(k, s));
        }
        ComplexMatrix::from_fn(n, n, |r, c| {
            if class_of[r] == class_of[c] {
                ONE
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }
}

/// `R = 2|0><0| - I` on `log_n` qubits, as a diagonal matrix.
fn reflection(log_n: usize) -> ComplexMatrix {
    let mut d = vec![-ONE; 1 << log_n];
    d[0] = ONE;
    ComplexMatrix::diagonal(&d)
}

fn uc_circuit(log_n: usize) -> Result<Circuit> {
    let targets: Vec<usize> = (0..log_n).collect();
    let mut c = Circuit::new(log_n);
    for &q in &targets {
        c.gate(ComplexMatrix::hadamard(), &[q])?;
    }
    c.gate(reflection(log_n), &targets)?;
    for &q in &targets {
        c.gate(ComplexMatrix::hadamard(), &[q])?;
    }
    Ok(c)
}

/// `U_c = H^{⊗k} (2|0><0| - I) H^{⊗k} = (2/n) e e^T - I`.
pub fn build_uc(log_n: usize) -> Result<ComplexMatrix> {
    if log_n == 0 {
        return Err(invalid("U_c needs at least one qubit"));
    }
    check_cap(log_n, cap_qubits())?;
    let h = kron_power(&ComplexMatrix::hadamard(), log_n)?;
    h.matmul(&reflection(log_n))?.matmul(&h)
}

/// `(1, 1, 0)`-encoding of `C = I - (1/n) e e^T` as `(I - U_c) / 2`.
pub fn centering_encoding(n: usize) -> Result<BlockEncoding> {
    let spec = CenteringSpec::new(n)?;
    check_cap(spec.log_n + 1, cap_qubits())?;
    let uc = BlockEncoding::from_circuit(uc_circuit(spec.log_n)?, 1.0, 0, 0.0, "U_c")?;
    let pair = make_state_prep_pair(
        &[C64::new(0.5, 0.0), C64::new(-0.5, 0.0)],
        PhaseConvention::FoldIntoSelect,
    )?;
    linear_combination(&pair, &[identity_encoding(spec.log_n)?, uc], 1.0)
}

/// `(1, 1, 0)`-encoding of the projector `P = D - (1/m) 1 1^T`, where `D`
/// is diagonal with ones on the `m` positions selected by `mask`. Built as
/// the reflection-type unitary `[[P, I - P], [I - P, -P]]`.
///
/// On the selected positions `P` centers; elsewhere it is zero, so padding
/// never leaks into a centered result.
pub fn masked_centering_encoding(mask: &[bool]) -> Result<BlockEncoding> {
    let dim = mask.len();
    let s = match log2_exact(dim) {
        Some(s) if s >= 1 => s,
        _ => {
            return Err(mismatch(format!(
                "mask length {dim} is not a power of two >= 2"
            )))
        }
    };
    check_cap(s + 1, cap_qubits())?;
    let p = masked_centering_matrix(mask);
    let q = &ComplexMatrix::identity(dim) - &p;
    let u = ComplexMatrix::from_fn(2 * dim, 2 * dim, |r, c| match (r < dim, c < dim) {
        (true, true) => p[(r, c)],
        (false, false) => -p[(r - dim, c - dim)],
        (true, false) => q[(r, c - dim)],
        (false, true) => q[(r - dim, c)],
    });
    let mut circuit = Circuit::new(s + 1);
    let targets: Vec<usize> = (0..=s).collect();
    circuit.gate(u, &targets)?;
    BlockEncoding::from_circuit(circuit, 1.0, 1, 0.0, "masked centering")
}

/// Dense `D - (1/m) 1 1^T` for a mask.
pub fn masked_centering_matrix(mask: &[bool]) -> ComplexMatrix {
    let m = mask.iter().filter(|&&b| b).count().max(1) as f64;
    ComplexMatrix::from_fn(mask.len(), mask.len(), |r, c| {
        if !(mask[r] && mask[c]) {
            C64::new(0.0, 0.0)
        } else if r == c {
            C64::new(1.0 - 1.0 / m, 0.0)
        } else {
            C64::new(-1.0 / m, 0.0)
        }
    })
}

/// Centering of the first `active` coordinates inside a `dim`-dimensional
/// register. Uses the reflection construction when `active == dim`.
pub fn padded_centering_encoding(active: usize, dim: usize) -> Result<BlockEncoding> {
    if active == 0 || active > dim {
        return Err(invalid(format!(
            "cannot center {active} of {dim} coordinates"
        )));
    }
    if active == dim && dim >= 2 {
        return centering_encoding(dim);
    }
    let mask: Vec<bool> = (0..dim).map(|i| i < active).collect();
    masked_centering_encoding(&mask)
}

/// Permutation matrix shifting the first `n` coordinates cyclically by `t`
/// and fixing the rest.
fn partial_shift(n: usize, dim: usize, t: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |r, c| {
        let hit = if c < n { r == (c + t) % n } else { r == c };
        if hit {
            ONE
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

fn ones_block_on(n: usize, dim: usize, prep_qubits: usize) -> Result<BlockEncoding> {
    let s = log2_exact(dim)
        .filter(|&s| s >= 1)
        .ok_or_else(|| mismatch("block dimension must be a power of two >= 2"))?;
    if n == 0 || n > dim {
        return Err(invalid(format!(
            "cannot place a {n}-block in dimension {dim}"
        )));
    }
    check_cap(s + prep_qubits, cap_qubits())?;
    let targets: Vec<usize> = (0..s).collect();
    let terms = (0..n)
        .map(|t| {
            let mut c = Circuit::new(s);
            if t > 0 {
                c.gate(partial_shift(n, dim, t), &targets)?;
            }
            BlockEncoding::from_circuit(c, 1.0, 0, 0.0, "shift")
        })
        .collect::<Result<Vec<_>>>()?;
    let pair =
        make_state_prep_pair_on(&vec![ONE; n], prep_qubits, PhaseConvention::FoldIntoSelect)?;
    linear_combination(&pair, &terms, 1.0)
}

/// `(n, log n, 0)`-encoding of the `n x n` all-ones matrix as the uniform
/// sum of the `n` cyclic shifts.
pub fn ones_matrix_encoding(n: usize) -> Result<BlockEncoding> {
    CenteringSpec::new(n)?;
    ones_block_on(n, n, log2_ceil(n))
}

/// All-ones block of size `n` in the top-left corner of a `dim`-register,
/// via partial cyclic shifts. The block is `ones(n) ⊕ n I`; masked
/// centering removes the second summand.
pub fn ones_block_encoding(n: usize, dim: usize) -> Result<BlockEncoding> {
    ones_block_on(n, dim, log2_ceil(n).max(1))
}

/// Encoding of `E = diag(e e^T, ...)` in the padded class layout: class `k`
/// occupies slot `k` of width [`ClassPartition::slot_size`]. Blocks of
/// smaller classes are rescaled so one `alpha = max_k n_k` certifies all.
pub fn similarity_encoding(partition: &ClassPartition) -> Result<BlockEncoding> {
    let w = partition.slot_size();
    let b = log2_ceil(partition.max_size()).max(1);
    let top = partition.max_size() as f64;
    let blocks = partition
        .sizes()
        .iter()
        .map(|&n| {
            let e = ones_block_on(n, w, b)?;
            if e.alpha() < top {
                rescale(&e, top)
            } else {
                Ok(e)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let a = blocks
        .iter()
        .map(BlockEncoding::ancillas)
        .max()
        .unwrap_or(0);
    let blocks = blocks
        .iter()
        .map(|e| pad_ancillas(e, a - e.ancillas()))
        .collect::<Result<Vec<_>>>()?;
    if blocks.len() == 1 {
        return Ok(blocks.into_iter().next().unwrap());
    }
    block_diagonal(&blocks)
}

/// One centering encoding per class: `C^{(k)}` at dimension `n_k` when that
/// is a power of two, otherwise a masked centering padded to the next one.
pub fn per_class_centering(partition: &ClassPartition) -> Result<Vec<BlockEncoding>> {
    partition
        .sizes()
        .iter()
        .map(|&n| padded_centering_encoding(n, n.next_power_of_two().max(2)))
        .collect()
}

/// Dense `I - (1/n) e e^T`.
pub fn centering_matrix(n: usize) -> ComplexMatrix {
    masked_centering_matrix(&vec![true; n])
}
