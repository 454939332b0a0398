//! Block-encodings and their algebra.
//!
//! A [`BlockEncoding`] is an `(alpha, a, epsilon)` certificate for a unitary
//! `U` on `s + a` qubits whose top-left `2^s x 2^s` block, scaled by
//! `alpha`, approximates a target operator to within `epsilon` in spectral
//! norm. Ancillas occupy the most significant qubits, so the `|0..0>`
//! ancilla block is a leading submatrix of `U`.
//!
//! Unitaries are held as [`Circuit`]s and only materialized on request;
//! extracting the block costs `2^s` statevector simulations.
//!
//! Every composition records a [`Provenance`] node with its inputs so the
//! bookkeeping laws (alphas multiply, ancillas add, error bounds combine)
//! can be re-checked after the fact with [`Provenance::audit`].

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::circuit::{amplitude_rotation, Circuit};
use crate::error::{invalid, mismatch, Error, Result};
use crate::linalg::spectral_norm;
use crate::matrix::{
    cap_qubits, check_cap, kron_power, log2_ceil, log2_exact, unitarity_deviation,
    unitary_completion, ComplexMatrix, C64, ONE, UNITARY_TOL, ZERO,
};

/// How a composition node was produced.
#[derive(Clone, Debug, PartialEq)]
pub enum CompositionKind {
    Leaf(String),
    Product,
    Lcu {
        alpha_in: f64,
        beta: f64,
        prep_qubits: usize,
        epsilon_y: f64,
    },
    Rescale,
    Adjoint,
    Dilation,
    BlockDiagonal,
    Lift {
        qubits: usize,
    },
    PadAncillas {
        qubits: usize,
    },
}

/// Metadata of one encoding plus the nodes it was built from.
#[derive(Clone, Debug)]
pub struct Provenance {
    pub kind: CompositionKind,
    pub alpha: f64,
    pub ancillas: usize,
    pub epsilon: f64,
    pub system_qubits: usize,
    pub children: Vec<Arc<Provenance>>,
}

/// Outcome of re-checking the composition laws over a provenance tree.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetadataAudit {
    pub products: usize,
    pub lcus: usize,
    pub other: usize,
    pub violations: Vec<String>,
}

impl MetadataAudit {
    pub fn compositions(&self) -> usize {
        self.products + self.lcus
    }

    pub fn merge(&mut self, other: MetadataAudit) {
        self.products += other.products;
        self.lcus += other.lcus;
        self.other += other.other;
        self.violations.extend(other.violations);
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

impl Provenance {
    /// Walks the tree and re-derives every node's `(alpha, a, epsilon)` from
    /// its children. Product and LCU laws are checked with exact equality.
    pub fn audit(&self) -> MetadataAudit {
        let mut out = MetadataAudit::default();
        self.audit_into(&mut out);
        out
    }

    fn audit_into(&self, out: &mut MetadataAudit) {
        for c in &self.children {
            c.audit_into(out);
        }
        let mut fail = |what: &str| out.violations.push(format!("{:?}: {what}", self.kind));
        match &self.kind {
            CompositionKind::Leaf(_) => {}
            CompositionKind::Product => {
                let (u, v) = (&self.children[0], &self.children[1]);
                if self.alpha != u.alpha * v.alpha {
                    fail("alpha != alpha_u * alpha_v");
                }
                if self.ancillas != u.ancillas + v.ancillas {
                    fail("ancillas != a_u + a_v");
                }
                if self.epsilon != u.alpha * v.epsilon + v.alpha * u.epsilon {
                    fail("epsilon != alpha_u * eps_v + alpha_v * eps_u");
                }
            }
            CompositionKind::Lcu {
                alpha_in,
                beta,
                prep_qubits,
                epsilon_y,
            } => {
                let a_in = self.children[0].ancillas;
                let max_eps = self.children.iter().map(|c| c.epsilon).fold(0.0, f64::max);
                if self.alpha != alpha_in * beta {
                    fail("alpha != alpha_in * beta");
                }
                if self.children.iter().any(|c| c.ancillas != a_in) {
                    fail("heterogeneous ancilla counts");
                }
                if self.ancillas != a_in + prep_qubits {
                    fail("ancillas != a_in + b");
                }
                if self.epsilon != alpha_in * epsilon_y + alpha_in * beta * max_eps {
                    fail("epsilon != alpha * eps_y + alpha * beta * eps_A");
                }
            }
            CompositionKind::Rescale => {
                let c = &self.children[0];
                if self.alpha < c.alpha
                    || self.ancillas != c.ancillas + 1
                    || self.epsilon != c.epsilon
                {
                    fail("rescale must raise alpha, add one ancilla, keep epsilon");
                }
            }
            CompositionKind::Adjoint | CompositionKind::Lift { .. } => {
                let c = &self.children[0];
                if self.alpha != c.alpha || self.ancillas != c.ancillas || self.epsilon != c.epsilon
                {
                    fail("metadata must be inherited unchanged");
                }
            }
            CompositionKind::PadAncillas { qubits } => {
                let c = &self.children[0];
                if self.alpha != c.alpha
                    || self.ancillas != c.ancillas + qubits
                    || self.epsilon != c.epsilon
                {
                    fail("padding adds idle ancillas only");
                }
            }
            CompositionKind::Dilation => {
                let c = &self.children[0];
                if self.alpha != c.alpha
                    || self.ancillas != c.ancillas
                    || self.epsilon != 2.0 * c.epsilon
                {
                    fail("dilation keeps alpha and a, doubles epsilon");
                }
            }
            CompositionKind::BlockDiagonal => {
                let c = &self.children[0];
                let max_eps = self.children.iter().map(|c| c.epsilon).fold(0.0, f64::max);
                if self.alpha != c.alpha || self.ancillas != c.ancillas || self.epsilon != max_eps {
                    fail("block-diagonal keeps alpha and a, takes max epsilon");
                }
            }
        }
        match self.kind {
            CompositionKind::Product => out.products += 1,
            CompositionKind::Lcu { .. } => out.lcus += 1,
            CompositionKind::Leaf(_) => {}
            _ => out.other += 1,
        }
    }
}

/// Serializable `(alpha, a, epsilon)` summary of an encoding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncodingSummary {
    pub label: String,
    pub alpha: f64,
    pub ancillas: usize,
    pub epsilon: f64,
    pub system_qubits: usize,
}

/// Result of checking an encoding against a target operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub alpha: f64,
    pub ancillas: usize,
    pub epsilon_declared: f64,
    pub distance_measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct BlockEncoding {
    circuit: Arc<Circuit>,
    alpha: f64,
    ancillas: usize,
    epsilon: f64,
    system_qubits: usize,
    cap: usize,
    provenance: Arc<Provenance>,
}

impl BlockEncoding {
    /// Wraps an explicit unitary, checking dimension and unitarity.
    pub fn new(unitary: ComplexMatrix, alpha: f64, ancillas: usize, epsilon: f64) -> Result<Self> {
        let qubits = log2_exact(unitary.rows())
            .filter(|_| unitary.is_square())
            .ok_or_else(|| {
                mismatch("encoding unitary must be square with power-of-two dimension")
            })?;
        if qubits <= ancillas {
            return Err(invalid("encoding needs at least one system qubit"));
        }
        let deviation = unitarity_deviation(&unitary)?;
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        let mut circuit = Circuit::new(qubits);
        let targets: Vec<usize> = (0..qubits).collect();
        circuit.gate(unitary, &targets)?;
        Self::from_circuit(circuit, alpha, ancillas, epsilon, "unitary")
    }

    /// Wraps a circuit assembled from unitary gates. Unitarity is not
    /// re-checked.
    pub(crate) fn from_circuit(
        circuit: Circuit,
        alpha: f64,
        ancillas: usize,
        epsilon: f64,
        label: &str,
    ) -> Result<Self> {
        let prov = Provenance {
            kind: CompositionKind::Leaf(label.to_string()),
            alpha,
            ancillas,
            epsilon,
            system_qubits: 0,
            children: vec![],
        };
        Self::assemble(circuit, alpha, ancillas, epsilon, cap_qubits(), prov)
    }

    /// Composite node built outside this module.
    pub(crate) fn composite(
        circuit: Circuit,
        alpha: f64,
        ancillas: usize,
        epsilon: f64,
        cap: usize,
        kind: CompositionKind,
        children: &[&Self],
    ) -> Result<Self> {
        let prov = Provenance {
            kind,
            alpha,
            ancillas,
            epsilon,
            system_qubits: 0,
            children: children.iter().map(|c| Arc::clone(&c.provenance)).collect(),
        };
        Self::assemble(circuit, alpha, ancillas, epsilon, cap, prov)
    }

    fn assemble(
        circuit: Circuit,
        alpha: f64,
        ancillas: usize,
        epsilon: f64,
        cap: usize,
        mut provenance: Provenance,
    ) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid(format!("alpha must be positive, got {alpha}")));
        }
        if epsilon.is_nan() || epsilon < 0.0 {
            return Err(invalid(format!(
                "epsilon must be nonnegative, got {epsilon}"
            )));
        }
        check_cap(circuit.qubits(), cap)?;
        if circuit.qubits() <= ancillas {
            return Err(invalid("encoding needs at least one system qubit"));
        }
        let system_qubits = circuit.qubits() - ancillas;
        provenance.system_qubits = system_qubits;
        Ok(Self {
            circuit: Arc::new(circuit),
            alpha,
            ancillas,
            epsilon,
            system_qubits,
            cap,
            provenance: Arc::new(provenance),
        })
    }

    fn node(
        &self,
        kind: CompositionKind,
        alpha: f64,
        ancillas: usize,
        epsilon: f64,
        children: &[&Self],
    ) -> Provenance {
        Provenance {
            kind,
            alpha,
            ancillas,
            epsilon,
            system_qubits: 0,
            children: children.iter().map(|c| Arc::clone(&c.provenance)).collect(),
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn ancillas(&self) -> usize {
        self.ancillas
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn system_qubits(&self) -> usize {
        self.system_qubits
    }

    pub fn total_qubits(&self) -> usize {
        self.circuit.qubits()
    }

    /// Side length of the encoded block.
    pub fn system_dim(&self) -> usize {
        1 << self.system_qubits
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Same encoding with a different qubit cap for later compositions.
    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn summary(&self, label: &str) -> EncodingSummary {
        EncodingSummary {
            label: label.to_string(),
            alpha: self.alpha,
            ancillas: self.ancillas,
            epsilon: self.epsilon,
            system_qubits: self.system_qubits,
        }
    }

    /// Dense unitary, within the cap.
    pub fn unitary(&self) -> Result<ComplexMatrix> {
        self.circuit.to_matrix(self.cap)
    }

    /// `(<0|^a ⊗ I) U (|0>^a ⊗ I)`, without the `alpha` factor.
    pub fn extract_block(&self) -> ComplexMatrix {
        let n = self.system_dim();
        let mut block = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            let col = self.circuit.column(j);
            block.set_column(j, &col[..n]);
        }
        block
    }

    /// `alpha * extract_block()`, the operator the encoding approximates.
    pub fn scaled_block(&self) -> ComplexMatrix {
        self.extract_block().scale(self.alpha)
    }

    /// Encoding of the adjoint operator through the adjoint circuit.
    pub fn adjoint(&self) -> Self {
        let prov = self.node(
            CompositionKind::Adjoint,
            self.alpha,
            self.ancillas,
            self.epsilon,
            &[self],
        );
        let mut out = self.clone();
        out.circuit = Arc::new(self.circuit.adjoint());
        let mut prov = prov;
        prov.system_qubits = self.system_qubits;
        out.provenance = Arc::new(prov);
        out
    }
}

/// The `(1, 0, 0)` encoding of a unitary by itself.
pub fn trivial_encoding(u: &ComplexMatrix) -> Result<BlockEncoding> {
    BlockEncoding::new(u.clone(), 1.0, 0, 0.0)
}

/// `(1, 0, 0)` encoding of the identity on `qubits` qubits.
pub fn identity_encoding(qubits: usize) -> Result<BlockEncoding> {
    BlockEncoding::from_circuit(Circuit::new(qubits), 1.0, 0, 0.0, "identity")
}

/// Spectral-norm distance between `target` and `alpha * block`.
pub fn verify(be: &BlockEncoding, target: &ComplexMatrix, tol: f64) -> Result<VerificationReport> {
    let n = be.system_dim();
    if target.shape() != (n, n) {
        return Err(mismatch(format!(
            "target is {}x{} but the encoding acts on {n}x{n}",
            target.rows(),
            target.cols()
        )));
    }
    let distance = spectral_norm(&(target - &be.scaled_block()));
    Ok(VerificationReport {
        alpha: be.alpha,
        ancillas: be.ancillas,
        epsilon_declared: be.epsilon,
        distance_measured: distance,
        tolerance: tol,
        pass: distance <= be.epsilon.max(tol),
    })
}

/// Encoding of `AB` from encodings of `A` (`u`) and `B` (`v`).
///
/// The unitary is `(I_b ⊗ U)(I_a ⊗ V)` with register order
/// `[v ancillas][u ancillas][system]`.
pub fn product(u: &BlockEncoding, v: &BlockEncoding) -> Result<BlockEncoding> {
    if u.system_qubits != v.system_qubits {
        return Err(mismatch(format!(
            "product of encodings on {} and {} system qubits",
            u.system_qubits, v.system_qubits
        )));
    }
    let (a, b, s) = (u.ancillas, v.ancillas, u.system_qubits);
    let total = a + b + s;
    let cap = u.cap.max(v.cap);
    check_cap(total, cap)?;

    let v_map: Vec<usize> = (0..b).chain(a + b..total).collect();
    let u_map: Vec<usize> = (b..total).collect();
    let mut circuit = Circuit::new(total);
    circuit.append_mapped(&v.circuit, &v_map)?;
    circuit.append_mapped(&u.circuit, &u_map)?;

    let alpha = u.alpha * v.alpha;
    let epsilon = u.alpha * v.epsilon + v.alpha * u.epsilon;
    let prov = u.node(CompositionKind::Product, alpha, a + b, epsilon, &[u, v]);
    BlockEncoding::assemble(circuit, alpha, a + b, epsilon, cap, prov)
}

/// Chained product `e_0 e_1 ... e_k`, grouped from the right.
pub fn product_chain(encodings: &[&BlockEncoding]) -> Result<BlockEncoding> {
    let (last, rest) = encodings
        .split_last()
        .ok_or_else(|| invalid("empty product chain"))?;
    let mut acc = (*last).clone();
    for e in rest.iter().rev() {
        acc = product(e, &acc)?;
    }
    Ok(acc)
}

/// Same operator certified with a larger `alpha`: one extra ancilla carries
/// an amplitude rotation that shrinks the block by `alpha / new_alpha`.
pub fn rescale(be: &BlockEncoding, new_alpha: f64) -> Result<BlockEncoding> {
    if new_alpha.is_nan() || new_alpha < be.alpha {
        return Err(invalid(format!(
            "cannot rescale alpha {} down to {new_alpha}",
            be.alpha
        )));
    }
    let total = be.total_qubits() + 1;
    check_cap(total, be.cap)?;
    let mut circuit = Circuit::new(total);
    circuit.gate(amplitude_rotation(be.alpha / new_alpha), &[0])?;
    let map: Vec<usize> = (1..total).collect();
    circuit.append_mapped(&be.circuit, &map)?;
    let prov = be.node(
        CompositionKind::Rescale,
        new_alpha,
        be.ancillas + 1,
        be.epsilon,
        &[be],
    );
    BlockEncoding::assemble(
        circuit,
        new_alpha,
        be.ancillas + 1,
        be.epsilon,
        be.cap,
        prov,
    )
}

/// Encoding of `I_{2^qubits} ⊗ A`: new system qubits are prepended (most
/// significant) and left untouched.
pub fn lift(be: &BlockEncoding, qubits: usize) -> Result<BlockEncoding> {
    if qubits == 0 {
        return Ok(be.clone());
    }
    let (a, s) = (be.ancillas, be.system_qubits);
    let total = a + qubits + s;
    check_cap(total, be.cap)?;
    let map: Vec<usize> = (0..a).chain(a + qubits..total).collect();
    let mut circuit = Circuit::new(total);
    circuit.append_mapped(&be.circuit, &map)?;
    let prov = be.node(
        CompositionKind::Lift { qubits },
        be.alpha,
        a,
        be.epsilon,
        &[be],
    );
    BlockEncoding::assemble(circuit, be.alpha, a, be.epsilon, be.cap, prov)
}

/// Same encoding with `qubits` idle ancillas prepended.
pub fn pad_ancillas(be: &BlockEncoding, qubits: usize) -> Result<BlockEncoding> {
    if qubits == 0 {
        return Ok(be.clone());
    }
    let total = be.total_qubits() + qubits;
    check_cap(total, be.cap)?;
    let map: Vec<usize> = (qubits..total).collect();
    let mut circuit = Circuit::new(total);
    circuit.append_mapped(&be.circuit, &map)?;
    let a = be.ancillas + qubits;
    let prov = be.node(
        CompositionKind::PadAncillas { qubits },
        be.alpha,
        a,
        be.epsilon,
        &[be],
    );
    BlockEncoding::assemble(circuit, be.alpha, a, be.epsilon, be.cap, prov)
}

/// Encoding whose block is identically zero (Pauli-X on the first ancilla).
pub fn zero_encoding(system_qubits: usize, ancillas: usize, alpha: f64) -> Result<BlockEncoding> {
    if ancillas == 0 {
        return Err(invalid("a zero block needs at least one ancilla"));
    }
    let mut circuit = Circuit::new(system_qubits + ancillas);
    circuit.gate(ComplexMatrix::pauli_x(), &[0])?;
    BlockEncoding::from_circuit(circuit, alpha, ancillas, 0.0, "zero")
}

/// `Σ_k |k><k| ⊗ U_k`: the class register becomes the most significant
/// system qubits. All inputs must share `alpha`, ancillas and system size.
/// Missing slots up to the next power of two are filled with zero blocks.
pub fn block_diagonal(blocks: &[BlockEncoding]) -> Result<BlockEncoding> {
    let first = blocks
        .first()
        .ok_or_else(|| invalid("no blocks to combine"))?;
    let (a, s, alpha) = (first.ancillas, first.system_qubits, first.alpha);
    for b in blocks {
        if b.ancillas != a || b.system_qubits != s {
            return Err(mismatch(
                "block-diagonal inputs must share ancilla and system sizes",
            ));
        }
        if (b.alpha - alpha).abs() > 1e-12 * alpha {
            return Err(invalid(
                "block-diagonal inputs must share alpha; rescale first",
            ));
        }
    }
    let m = log2_ceil(blocks.len()).max(1);
    let total = a + m + s;
    let cap = blocks.iter().map(|b| b.cap).max().unwrap_or(first.cap);
    check_cap(total, cap)?;
    let map: Vec<usize> = (0..a).chain(a + m..total).collect();
    let mut branches: Vec<Circuit> = blocks
        .iter()
        .map(|b| b.circuit.remapped(&map, total))
        .collect();
    if blocks.len() < 1 << m {
        let zero = zero_encoding(s, a, alpha)?;
        let zc = zero.circuit.remapped(&map, total);
        branches.resize(1 << m, zc);
    }
    let controls: Vec<usize> = (a..a + m).collect();
    let mut circuit = Circuit::new(total);
    circuit.select(&controls, branches)?;
    let epsilon = blocks.iter().map(|b| b.epsilon).fold(0.0, f64::max);
    let refs: Vec<&BlockEncoding> = blocks.iter().collect();
    let prov = first.node(CompositionKind::BlockDiagonal, alpha, a, epsilon, &refs);
    BlockEncoding::assemble(circuit, alpha, a, epsilon, cap, prov)
}

/// Where the phases of complex LCU coefficients go.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseConvention {
    /// `P_L = P_R` prepare `sqrt(|y_j| / beta)`; the phase `e^{iθ_j}` of
    /// `y_j` multiplies the j-th select term instead.
    FoldIntoSelect,
    /// `P_R` carries the phases: `d_j = e^{iθ_j} c_j`.
    AsymmetricPair,
}

/// A state-preparation pair for coefficients `y`.
///
/// With `phi_j` the select phase of term `j`, the pair satisfies
/// `Σ_j |beta * conj(c_j) * d_j * phi_j - y_j| <= epsilon_y` and
/// `conj(c_j) d_j = 0` for `j` past the coefficient count, where
/// `c = P_L|0>`, `d = P_R|0>`.
#[derive(Clone, Debug)]
pub struct StatePrepPair {
    pub p_left: ComplexMatrix,
    pub p_right: ComplexMatrix,
    pub coefficients: Vec<C64>,
    pub select_phases: Vec<C64>,
    pub beta: f64,
    pub prep_qubits: usize,
    pub epsilon_y: f64,
}

impl StatePrepPair {
    /// Measured left-hand side of the defining inequality, plus the total
    /// weight leaking into unused slots.
    pub fn definition_residual(&self) -> f64 {
        let c = self.p_left.column(0);
        let d = self.p_right.column(0);
        let m = self.coefficients.len();
        let used: f64 = (0..m)
            .map(|j| {
                (c[j].conj() * d[j] * self.select_phases[j] * self.beta - self.coefficients[j])
                    .norm()
            })
            .sum();
        let leak: f64 = (m..c.len()).map(|j| (c[j].conj() * d[j]).norm()).sum();
        used + leak
    }
}

fn prep_unitary(amplitudes: &[C64], prep_qubits: usize) -> Result<ComplexMatrix> {
    let dim = 1usize << prep_qubits;
    let first = amplitudes[0];
    let uniform = amplitudes.len() == dim
        && amplitudes.iter().all(|&z| (z - first).norm() < 1e-15)
        && first.im == 0.0;
    if uniform {
        return kron_power(&ComplexMatrix::hadamard(), prep_qubits);
    }
    let mut col = amplitudes.to_vec();
    col.resize(dim, ZERO);
    unitary_completion(&[col], dim)
}

/// Builds a pair for `y` on the minimal register (`b = ceil(log2 m)`, at
/// least one qubit). Uniform coefficients of power-of-two length give
/// `P_L = P_R = H^{⊗b}`.
pub fn make_state_prep_pair(y: &[C64], convention: PhaseConvention) -> Result<StatePrepPair> {
    let b = log2_ceil(y.len()).max(1);
    make_state_prep_pair_on(y, b, convention)
}

/// As [`make_state_prep_pair`] on a register of `prep_qubits` qubits.
pub fn make_state_prep_pair_on(
    y: &[C64],
    prep_qubits: usize,
    convention: PhaseConvention,
) -> Result<StatePrepPair> {
    if y.is_empty() || y.iter().all(|z| z.norm() == 0.0) {
        return Err(invalid(
            "state-preparation coefficients must not all be zero",
        ));
    }
    if y.len() > 1 << prep_qubits {
        return Err(invalid(format!(
            "{} coefficients do not fit in {prep_qubits} qubits",
            y.len()
        )));
    }
    let beta: f64 = y.iter().map(|z| z.norm()).sum();
    let mags: Vec<C64> = y
        .iter()
        .map(|z| C64::new((z.norm() / beta).sqrt(), 0.0))
        .collect();
    let phases: Vec<C64> = y
        .iter()
        .map(|z| if z.norm() == 0.0 { ONE } else { z / z.norm() })
        .collect();
    let p_left = prep_unitary(&mags, prep_qubits)?;
    let (p_right, select_phases) = match convention {
        PhaseConvention::FoldIntoSelect => (p_left.clone(), phases),
        PhaseConvention::AsymmetricPair => {
            let d: Vec<C64> = mags.iter().zip(&phases).map(|(m, p)| m * p).collect();
            (prep_unitary(&d, prep_qubits)?, vec![ONE; y.len()])
        }
    };
    Ok(StatePrepPair {
        p_left,
        p_right,
        coefficients: y.to_vec(),
        select_phases,
        beta,
        prep_qubits,
        epsilon_y: 0.0,
    })
}

/// Encoding of `Σ_j y_j A_j` from a state-preparation pair for `y` and
/// encodings of the `A_j`, all sharing `common_alpha`, ancilla count and
/// system size.
///
/// Unitary: `(P_L† ⊗ I) W (P_R ⊗ I)` with
/// `W = Σ_j |j><j| ⊗ φ_j U_j + (I - Σ_j |j><j|) ⊗ I`, prep register most
/// significant.
pub fn linear_combination(
    pair: &StatePrepPair,
    encodings: &[BlockEncoding],
    common_alpha: f64,
) -> Result<BlockEncoding> {
    for e in encodings {
        if (e.alpha - common_alpha).abs() > 1e-12 * common_alpha {
            return Err(invalid(format!(
                "LCU term has alpha {} but the common alpha is {common_alpha}",
                e.alpha
            )));
        }
    }
    lcu(pair, encodings, common_alpha)
}

fn lcu(pair: &StatePrepPair, encodings: &[BlockEncoding], alpha_in: f64) -> Result<BlockEncoding> {
    let first = encodings.first().ok_or_else(|| invalid("no LCU terms"))?;
    if encodings.len() != pair.coefficients.len() {
        return Err(mismatch(format!(
            "{} terms for {} coefficients",
            encodings.len(),
            pair.coefficients.len()
        )));
    }
    let (a, s) = (first.ancillas, first.system_qubits);
    if encodings.iter().any(|e| e.ancillas != a) {
        return Err(invalid("LCU terms must share the ancilla count"));
    }
    if encodings.iter().any(|e| e.system_qubits != s) {
        return Err(mismatch("LCU terms must share the system size"));
    }
    let b = pair.prep_qubits;
    let total = b + a + s;
    let cap = encodings.iter().map(|e| e.cap).max().unwrap_or(first.cap);
    check_cap(total, cap)?;

    let map: Vec<usize> = (b..total).collect();
    let branches: Vec<Circuit> = encodings
        .iter()
        .zip(&pair.select_phases)
        .map(|(e, &phase)| {
            let mut br = e.circuit.remapped(&map, total);
            if phase != ONE {
                br.gate(ComplexMatrix::diagonal(&[phase]), &[])
                    .expect("scalar phase");
            }
            br
        })
        .collect();
    let prep: Vec<usize> = (0..b).collect();
    let mut circuit = Circuit::new(total);
    circuit.gate(pair.p_right.clone(), &prep)?;
    circuit.select(&prep, branches)?;
    circuit.gate(pair.p_left.adjoint(), &prep)?;

    let alpha = alpha_in * pair.beta;
    let max_eps = encodings.iter().map(|e| e.epsilon).fold(0.0, f64::max);
    let epsilon = alpha_in * pair.epsilon_y + alpha_in * pair.beta * max_eps;
    let kind = CompositionKind::Lcu {
        alpha_in,
        beta: pair.beta,
        prep_qubits: b,
        epsilon_y: pair.epsilon_y,
    };
    let refs: Vec<&BlockEncoding> = encodings.iter().collect();
    let prov = first.node(kind, alpha, a + b, epsilon, &refs);
    BlockEncoding::assemble(circuit, alpha, a + b, epsilon, cap, prov)
}

/// Encoding of `Σ_j y_j A_j` for terms with differing alphas: coefficients
/// are rescaled to `y_j alpha_j / max_k alpha_k` and the terms combined
/// under the common alpha `max_k alpha_k`. Terms with fewer ancillas get
/// idle ones.
pub fn combine(y: &[C64], encodings: &[BlockEncoding]) -> Result<BlockEncoding> {
    if y.len() != encodings.len() {
        return Err(mismatch("one coefficient per term is required"));
    }
    let a_max = encodings.iter().map(|e| e.ancillas).max().unwrap_or(0);
    let encodings = encodings
        .iter()
        .map(|e| pad_ancillas(e, a_max - e.ancillas))
        .collect::<Result<Vec<_>>>()?;
    let encodings = &encodings[..];
    let common = encodings.iter().map(|e| e.alpha).fold(0.0, f64::max);
    let scaled: Vec<C64> = y
        .iter()
        .zip(encodings)
        .map(|(&yj, e)| yj * (e.alpha / common))
        .collect();
    let pair = make_state_prep_pair(&scaled, PhaseConvention::FoldIntoSelect)?;
    lcu(&pair, encodings, common)
}
