//! Block-encoding of a stored data matrix through two state preparations.
//!
//! Registers are ordered `[ancilla][system]`, both `s` qubits wide for a
//! `2^s x 2^s` matrix `X`.
//!
//! * `U_M |0>|i> = |x~_i>|i>` where `x~_i` has amplitudes `conj(x_ij)/‖x_i‖`.
//! * `U_N |0>|j> = |j> ⊗ Σ_k (‖x_k‖/‖X‖_F) |k>`, a register swap followed
//!   by preparation of the row-norm state on the system register.
//!
//! Then `<0,i| U_M† U_N |0,j> = x_ij / ‖X‖_F`, so `U_M† U_N` is an
//! `(‖X‖_F, s, 0)`-encoding of `X` itself.

use crate::block_encoding::{BlockEncoding, CompositionKind};
use crate::circuit::Circuit;
use crate::error::{invalid, mismatch, Result};
use crate::matrix::{check_cap, log2_exact, ComplexMatrix, C64, ONE, ZERO};

/// Binary trees of squared magnitudes, one per row plus one over the row
/// norms. `levels[0]` holds the root and the last level the leaves.
#[derive(Clone, Debug)]
pub struct NormTree {
    row_trees: Vec<Vec<Vec<f64>>>,
    norm_tree: Vec<Vec<f64>>,
    rows: Vec<Vec<C64>>,
}

fn sum_tree(leaves: Vec<f64>) -> Vec<Vec<f64>> {
    let mut level = leaves;
    level.resize(level.len().next_power_of_two(), 0.0);
    let mut levels = vec![level];
    while levels[0].len() > 1 {
        let up: Vec<f64> = levels[0].chunks(2).map(|p| p[0] + p[1]).collect();
        levels.insert(0, up);
    }
    levels
}

impl NormTree {
    pub fn rows(&self) -> &[Vec<C64>] {
        &self.rows
    }

    /// Tree levels for row `i`, root first.
    pub fn row_tree(&self, i: usize) -> &[Vec<f64>] {
        &self.row_trees[i]
    }

    /// Tree over `‖x_i‖^2`, root first.
    pub fn norm_tree(&self) -> &[Vec<f64>] {
        &self.norm_tree
    }

    pub fn row_norms(&self) -> Vec<f64> {
        self.row_trees.iter().map(|t| t[0][0].sqrt()).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.norm_tree[0][0].sqrt()
    }
}

/// Builds the norm trees of a nonzero matrix. Rows and row counts are
/// zero-padded to powers of two at the leaves.
pub fn build_norm_tree(x: &ComplexMatrix) -> Result<NormTree> {
    let rows: Vec<Vec<C64>> = (0..x.rows()).map(|r| x.row(r).to_vec()).collect();
    let row_trees: Vec<Vec<Vec<f64>>> = rows
        .iter()
        .map(|r| sum_tree(r.iter().map(|z| z.norm_sqr()).collect()))
        .collect();
    let norm_tree = sum_tree(row_trees.iter().map(|t| t[0][0]).collect());
    if norm_tree[0][0] == 0.0 {
        return Err(invalid("cannot encode the all-zero matrix"));
    }
    Ok(NormTree {
        row_trees,
        norm_tree,
        rows,
    })
}

fn ry(theta: f64) -> ComplexMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    ComplexMatrix::from_real_rows(&[[c, -s], [s, c]])
}

/// Circuit on `log2(len)` qubits mapping `|0>` to `amplitudes / ‖amplitudes‖`.
///
/// One layer of multiplexed `R_y` rotations per tree level, then a diagonal
/// phase. A zero vector yields the identity.
pub fn state_preparation(amplitudes: &[C64]) -> Result<Circuit> {
    let q = log2_exact(amplitudes.len())
        .ok_or_else(|| mismatch("amplitude count must be a power of two"))?;
    let tree = sum_tree(amplitudes.iter().map(|z| z.norm_sqr()).collect());
    let mut circuit = Circuit::new(q);
    for level in 0..q {
        let rotation = |node: usize| {
            let parent = tree[level][node];
            let left = tree[level + 1][2 * node];
            if parent == 0.0 {
                0.0
            } else {
                2.0 * (left / parent).clamp(0.0, 1.0).sqrt().acos()
            }
        };
        if level == 0 {
            circuit.gate(ry(rotation(0)), &[0])?;
        } else {
            let branches = (0..1usize << level)
                .map(|node| {
                    let mut b = Circuit::new(q);
                    b.gate(ry(rotation(node)), &[level]).expect("valid target");
                    b
                })
                .collect();
            let controls: Vec<usize> = (0..level).collect();
            circuit.select(&controls, branches)?;
        }
    }
    if amplitudes.iter().any(|z| z.im != 0.0 || z.re < 0.0) {
        let phases: Vec<C64> = amplitudes
            .iter()
            .map(|z| if z.norm() == 0.0 { ONE } else { z / z.norm() })
            .collect();
        let targets: Vec<usize> = (0..q).collect();
        circuit.gate(ComplexMatrix::diagonal(&phases), &targets)?;
    }
    Ok(circuit)
}

/// The two state-preparation unitaries `(U_M, U_N)` for a square
/// power-of-two matrix, each on `2 s` qubits.
pub fn data_unitaries(x: &ComplexMatrix, cap: usize) -> Result<(Circuit, Circuit)> {
    let s = square_qubits(x)?;
    check_cap(2 * s, cap)?;
    let tree = build_norm_tree(x)?;
    let norms = tree.row_norms();
    let f = tree.frobenius_norm();

    let anc: Vec<usize> = (0..s).collect();
    let sys: Vec<usize> = (s..2 * s).collect();
    let mut branches = Vec::with_capacity(x.rows());
    for (i, row) in tree.rows().iter().enumerate() {
        let prep: Vec<C64> = if norms[i] == 0.0 {
            let mut e = vec![ZERO; row.len()];
            e[0] = ONE;
            e
        } else {
            row.iter().map(|z| z.conj() / norms[i]).collect()
        };
        let mut b = Circuit::new(2 * s);
        b.append_mapped(&state_preparation(&prep)?, &anc)?;
        branches.push(b);
    }
    let mut u_m = Circuit::new(2 * s);
    u_m.select(&sys, branches)?;

    let nu: Vec<C64> = norms.iter().map(|&n| C64::new(n / f, 0.0)).collect();
    let mut u_n = Circuit::new(2 * s);
    for k in 0..s {
        u_n.swap(k, s + k)?;
    }
    u_n.append_mapped(&state_preparation(&nu)?, &sys)?;
    Ok((u_m, u_n))
}

fn square_qubits(x: &ComplexMatrix) -> Result<usize> {
    if !x.is_square() {
        return Err(mismatch("data matrix must be square; embed it first"));
    }
    match log2_exact(x.rows()) {
        Some(s) if s >= 1 => Ok(s),
        _ => Err(mismatch(format!(
            "data matrix dimension {} is not a power of two of at least 2; embed it first",
            x.rows()
        ))),
    }
}

/// `(‖X‖_F, s, 0)`-encoding of a square `2^s x 2^s` matrix.
pub fn matrix_encoding(x: &ComplexMatrix) -> Result<BlockEncoding> {
    let cap = crate::matrix::cap_qubits();
    let (u_m, mut u_n) = data_unitaries(x, cap)?;
    let s = square_qubits(x)?;
    let all: Vec<usize> = (0..2 * s).collect();
    u_n.append_mapped(&u_m.adjoint(), &all)?;
    let f = build_norm_tree(x)?.frobenius_norm();
    BlockEncoding::composite(
        u_n,
        f,
        s,
        0.0,
        cap,
        CompositionKind::Leaf("data".into()),
        &[],
    )
}

/// `[[0, X], [X†, 0]]`, extension qubit most significant. Rectangular
/// inputs give an `(r + c) x (r + c)` result.
pub fn hermitian_extension(x: &ComplexMatrix) -> ComplexMatrix {
    let (r, c) = x.shape();
    ComplexMatrix::from_fn(r + c, r + c, |i, j| match (i < r, j < r) {
        (true, false) => x[(i, j - r)],
        (false, true) => x[(j, i - r)].conj(),
        _ => ZERO,
    })
}

/// Encoding of `[[0, M], [M†, 0]]` from an encoding of `M`, with one extra
/// system qubit placed most significant.
pub fn hermitian_dilation(be: &BlockEncoding) -> Result<BlockEncoding> {
    let (a, s) = (be.ancillas(), be.system_qubits());
    let total = a + 1 + s;
    check_cap(total, be.cap())?;
    let map: Vec<usize> = (0..a).chain(a + 1..total).collect();
    let forward = be.circuit().remapped(&map, total);
    let backward = be.circuit().adjoint().remapped(&map, total);
    let mut circuit = Circuit::new(total);
    circuit.gate(ComplexMatrix::pauli_x(), &[a])?;
    circuit.select(&[a], vec![forward, backward])?;
    BlockEncoding::composite(
        circuit,
        be.alpha(),
        a,
        2.0 * be.epsilon(),
        be.cap(),
        CompositionKind::Dilation,
        &[be],
    )
}
