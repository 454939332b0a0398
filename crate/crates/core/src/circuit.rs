//! Gate-list representation of unitaries with a statevector simulator.
//!
//! Qubit `0` is the most significant bit of a basis index, so in a register
//! of `n` qubits, qubit `q` sits at bit position `n - 1 - q`. Ancillas are
//! always placed on the lowest qubit numbers, which makes `|0..0>_anc ⊗ |j>`
//! the basis index `j`.

use std::sync::Arc;

use crate::error::{invalid, mismatch, Result};
use crate::matrix::{check_cap, ComplexMatrix, C64, ONE, ZERO};

#[derive(Clone, Debug)]
pub enum Op {
    /// Dense gate; `targets[0]` is the most significant qubit of the gate's
    /// own index. An empty target list applies a scalar phase.
    Gate {
        matrix: Arc<ComplexMatrix>,
        targets: Vec<usize>,
    },
    Swap(usize, usize),
    /// Applies `branches[j]` on the subspace where the control register
    /// (`controls[0]` most significant) holds `j`; identity for values with
    /// no branch.
    Select {
        controls: Vec<usize>,
        branches: Vec<Circuit>,
    },
}

#[derive(Clone, Debug)]
pub struct Circuit {
    qubits: usize,
    ops: Vec<Op>,
}

impl Circuit {
    pub fn new(qubits: usize) -> Self {
        Self {
            qubits,
            ops: Vec::new(),
        }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    /// Number of primitive gates and swaps, counting inside selects.
    pub fn gate_count(&self) -> usize {
        self.ops
            .iter()
            .map(|op| match op {
                Op::Gate { .. } | Op::Swap(..) => 1,
                Op::Select { branches, .. } => branches.iter().map(Circuit::gate_count).sum(),
            })
            .sum()
    }

    fn check_targets(&self, targets: &[usize]) -> Result<()> {
        for (i, &t) in targets.iter().enumerate() {
            if t >= self.qubits {
                return Err(invalid(format!(
                    "qubit {t} out of range for {} qubits",
                    self.qubits
                )));
            }
            if targets[..i].contains(&t) {
                return Err(invalid(format!("qubit {t} repeated in target list")));
            }
        }
        Ok(())
    }

    pub fn gate(&mut self, matrix: ComplexMatrix, targets: &[usize]) -> Result<&mut Self> {
        self.gate_shared(Arc::new(matrix), targets)
    }

    pub fn gate_shared(
        &mut self,
        matrix: Arc<ComplexMatrix>,
        targets: &[usize],
    ) -> Result<&mut Self> {
        self.check_targets(targets)?;
        let dim = 1usize << targets.len();
        if matrix.shape() != (dim, dim) {
            return Err(mismatch(format!(
                "{}x{} gate on {} qubits",
                matrix.rows(),
                matrix.cols(),
                targets.len()
            )));
        }
        self.ops.push(Op::Gate {
            matrix,
            targets: targets.to_vec(),
        });
        Ok(self)
    }

    pub fn swap(&mut self, a: usize, b: usize) -> Result<&mut Self> {
        self.check_targets(&[a, b])?;
        self.ops.push(Op::Swap(a, b));
        Ok(self)
    }

    pub fn select(&mut self, controls: &[usize], branches: Vec<Circuit>) -> Result<&mut Self> {
        self.check_targets(controls)?;
        if branches.len() > 1usize << controls.len() {
            return Err(invalid(format!(
                "{} branches cannot be addressed by {} control qubits",
                branches.len(),
                controls.len()
            )));
        }
        if branches.iter().any(|b| b.qubits != self.qubits) {
            return Err(mismatch("select branches must span the parent register"));
        }
        self.ops.push(Op::Select {
            controls: controls.to_vec(),
            branches,
        });
        Ok(self)
    }

    /// Appends `other`, mapping its qubit `q` onto `mapping[q]` here.
    pub fn append_mapped(&mut self, other: &Circuit, mapping: &[usize]) -> Result<&mut Self> {
        if mapping.len() != other.qubits {
            return Err(mismatch("qubit mapping must cover the appended circuit"));
        }
        self.check_targets(mapping)?;
        let mapped = other.remapped(mapping, self.qubits);
        self.ops.extend(mapped.ops);
        Ok(self)
    }

    /// Same circuit on a register of `qubits`, with qubit `q` moved to
    /// `mapping[q]`. The mapping must be injective and in range.
    pub fn remapped(&self, mapping: &[usize], qubits: usize) -> Circuit {
        let ops = self
            .ops
            .iter()
            .map(|op| match op {
                Op::Gate { matrix, targets } => Op::Gate {
                    matrix: Arc::clone(matrix),
                    targets: targets.iter().map(|&t| mapping[t]).collect(),
                },
                Op::Swap(a, b) => Op::Swap(mapping[*a], mapping[*b]),
                Op::Select { controls, branches } => Op::Select {
                    controls: controls.iter().map(|&c| mapping[c]).collect(),
                    branches: branches
                        .iter()
                        .map(|b| b.remapped(mapping, qubits))
                        .collect(),
                },
            })
            .collect();
        Circuit { qubits, ops }
    }

    /// Circuit for the adjoint unitary.
    pub fn adjoint(&self) -> Circuit {
        let ops = self
            .ops
            .iter()
            .rev()
            .map(|op| match op {
                Op::Gate { matrix, targets } => Op::Gate {
                    matrix: Arc::new(matrix.adjoint()),
                    targets: targets.clone(),
                },
                Op::Swap(a, b) => Op::Swap(*a, *b),
                Op::Select { controls, branches } => Op::Select {
                    controls: controls.clone(),
                    branches: branches.iter().map(Circuit::adjoint).collect(),
                },
            })
            .collect();
        Circuit {
            qubits: self.qubits,
            ops,
        }
    }

    fn bit(&self, q: usize) -> usize {
        1 << (self.qubits - 1 - q)
    }

    /// Applies the circuit to a statevector in place.
    pub fn apply(&self, state: &mut [C64]) {
        assert_eq!(state.len(), self.dim(), "statevector length mismatch");
        self.apply_restricted(state, 0, 0);
    }

    /// Applies the circuit only on basis states with `idx & mask == value`.
    fn apply_restricted(&self, state: &mut [C64], mask: usize, value: usize) {
        let full = self.dim() - 1;
        for op in &self.ops {
            match op {
                Op::Gate { matrix, targets } => {
                    let k = targets.len();
                    let offsets: Vec<usize> = (0..1usize << k)
                        .map(|l| {
                            targets
                                .iter()
                                .enumerate()
                                .filter(|(t, _)| (l >> (k - 1 - t)) & 1 == 1)
                                .map(|(_, &q)| self.bit(q))
                                .sum()
                        })
                        .collect();
                    let tmask: usize = targets.iter().map(|&q| self.bit(q)).sum();
                    let free = full & !(tmask | mask);
                    let m = matrix.as_slice();
                    let d = offsets.len();
                    let mut buf = vec![ZERO; d];
                    for_each_submask(free, |s| {
                        let base = s | value;
                        for (b, &o) in buf.iter_mut().zip(&offsets) {
                            *b = state[base | o];
                        }
                        for (r, &o) in offsets.iter().enumerate() {
                            let row = &m[r * d..(r + 1) * d];
                            state[base | o] = row.iter().zip(&buf).map(|(a, b)| a * b).sum();
                        }
                    });
                }
                Op::Swap(a, b) => {
                    let (ba, bb) = (self.bit(*a), self.bit(*b));
                    let free = full & !(ba | bb | mask);
                    for_each_submask(free, |s| {
                        let base = s | value;
                        state.swap(base | ba, base | bb);
                    });
                }
                Op::Select { controls, branches } => {
                    let k = controls.len();
                    let cmask: usize = controls.iter().map(|&q| self.bit(q)).sum();
                    debug_assert_eq!(cmask & mask, 0, "nested select reuses a control");
                    for (j, branch) in branches.iter().enumerate() {
                        let jbits: usize = controls
                            .iter()
                            .enumerate()
                            .filter(|(t, _)| (j >> (k - 1 - t)) & 1 == 1)
                            .map(|(_, &q)| self.bit(q))
                            .sum();
                        branch.apply_restricted(state, mask | cmask, value | jbits);
                    }
                }
            }
        }
    }

    /// `U |j>`.
    pub fn column(&self, j: usize) -> Vec<C64> {
        let mut state = vec![ZERO; self.dim()];
        state[j] = ONE;
        self.apply(&mut state);
        state
    }

    /// Dense unitary, refusing registers wider than `cap` qubits.
    pub fn to_matrix(&self, cap: usize) -> Result<ComplexMatrix> {
        check_cap(self.qubits, cap)?;
        let dim = self.dim();
        let mut out = ComplexMatrix::zeros(dim, dim);
        for j in 0..dim {
            out.set_column(j, &self.column(j));
        }
        Ok(out)
    }
}

/// Calls `f` on every submask of `mask`, in increasing order.
fn for_each_submask(mask: usize, mut f: impl FnMut(usize)) {
    let mut s = 0usize;
    loop {
        f(s);
        if s == mask {
            break;
        }
        s = s.wrapping_sub(mask) & mask;
    }
}

/// Single-qubit rotation `[[r, -sqrt(1-r^2)], [sqrt(1-r^2), r]]`, whose
/// `<0|.|0>` entry is `r`.
pub(crate) fn amplitude_rotation(r: f64) -> ComplexMatrix {
    let s = (1.0 - r * r).max(0.0).sqrt();
    ComplexMatrix::from_real_rows(&[[r, -s], [s, r]])
}
