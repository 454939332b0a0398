//! Eigenvalue extraction from Hermitian block-encodings: exact evolution,
//! the qubitization walk, and phase estimation simulated by its exact
//! output distribution.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::block_encoding::{BlockEncoding, CompositionKind};
use crate::circuit::Circuit;
use crate::error::{invalid, mismatch, Error, Result};
use crate::linalg::{eigenvalues, eigh, expm_hermitian};
use crate::matrix::{unitarity_deviation, vec_norm, ComplexMatrix, C64, ONE, ZERO};

/// Default phase-register width.
pub const DEFAULT_T_BITS: usize = 8;

const HERMITIAN_TOL: f64 = 1e-8;

/// How eigenphases are mapped back to eigenvalues after evolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseWindow {
    /// Spectrum in `[0, alpha]`: phase `φ ∈ [0, 1)` maps to `κ α φ`.
    NonNegative,
    /// Spectrum in `[-alpha, alpha]`: signed phase `φ ∈ [-1/2, 1/2)` maps to
    /// `2 κ α φ`.
    Symmetric,
}

impl PhaseWindow {
    /// Margin `κ = 1 + 2^{1-t}` that keeps `|λ| = α` away from the wrap
    /// point.
    pub fn margin(t_bits: usize) -> f64 {
        1.0 + 2f64.powi(1 - t_bits as i32)
    }

    /// Evolution time for an encoding with the given alpha.
    pub fn evolution_time(self, alpha: f64, t_bits: usize) -> f64 {
        let k = Self::margin(t_bits);
        match self {
            PhaseWindow::NonNegative => 2.0 * PI / (k * alpha),
            PhaseWindow::Symmetric => PI / (k * alpha),
        }
    }

    pub fn eigenvalue(self, phase: f64, alpha: f64, t_bits: usize) -> f64 {
        let k = Self::margin(t_bits);
        match self {
            PhaseWindow::NonNegative => k * alpha * phase,
            PhaseWindow::Symmetric => {
                let signed = if phase >= 0.5 { phase - 1.0 } else { phase };
                2.0 * k * alpha * signed
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EstimationMethod {
    ExactEvolution(PhaseWindow),
    QubitizationWalk,
}

/// Exact output distribution of phase estimation and its argmax.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QpeOutcome {
    pub phase: f64,
    pub bits: usize,
    pub probability: f64,
    pub distribution: Vec<f64>,
}

impl QpeOutcome {
    /// Draws one phase from the distribution.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut u: f64 = rng.random();
        for (m, &p) in self.distribution.iter().enumerate() {
            if u < p {
                return m as f64 / self.distribution.len() as f64;
            }
            u -= p;
        }
        self.phase
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseEstimate {
    pub phase: f64,
    pub bits: usize,
    pub eigenvalue: f64,
    pub method: EstimationMethod,
    pub probability: f64,
}

fn hermitian_block(be: &BlockEncoding) -> Result<ComplexMatrix> {
    let block = be.scaled_block();
    let dev = block.hermitian_deviation().unwrap_or(f64::INFINITY);
    if dev > HERMITIAN_TOL * be.alpha().max(1.0) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    Ok(block)
}

/// An encoding of the same operator whose unitary is Hermitian.
///
/// If `U` is already Hermitian it is returned as is. Otherwise one ancilla
/// `q` is prepended and `(H_q ⊗ I)(|0><1| ⊗ U + |1><0| ⊗ U†)(H_q ⊗ I)` is
/// used, whose block is `(A + A†)/2α = A/α` for Hermitian `A`.
pub fn hermitian_unitary_encoding(be: &BlockEncoding) -> Result<BlockEncoding> {
    hermitian_block(be)?;
    let u = be.unitary()?;
    if u.hermitian_deviation().unwrap_or(f64::INFINITY) <= 1e-12 {
        return Ok(be.clone());
    }
    let total = be.total_qubits() + 1;
    let map: Vec<usize> = (1..total).collect();
    let forward = be.circuit().remapped(&map, total);
    let backward = be.circuit().adjoint().remapped(&map, total);
    let mut c = Circuit::new(total);
    c.gate(ComplexMatrix::hadamard(), &[0])?;
    c.gate(ComplexMatrix::pauli_x(), &[0])?;
    c.select(&[0], vec![forward, backward])?;
    c.gate(ComplexMatrix::hadamard(), &[0])?;
    BlockEncoding::composite(
        c,
        be.alpha(),
        be.ancillas() + 1,
        be.epsilon(),
        be.cap(),
        CompositionKind::PadAncillas { qubits: 1 },
        &[be],
    )
}

/// `W = (2Π₀ - I) U` for a Hermitian-unitary encoding of `A` (see
/// [`hermitian_unitary_encoding`]), where `Π₀` projects the ancillas onto
/// `|0...0>`.
pub fn walk_operator(be: &BlockEncoding) -> Result<ComplexMatrix> {
    let herm = hermitian_unitary_encoding(be)?;
    let mut w = herm.unitary()?;
    let keep = herm.system_dim();
    for r in keep..w.rows() {
        for c in 0..w.cols() {
            w[(r, c)] = -w[(r, c)];
        }
    }
    Ok(w)
}

/// Report of matching walk eigenvalues against `e^{±i arccos(λ/α)}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkSpectrumCheck {
    pub matched: usize,
    pub max_pair_error: f64,
    pub max_remainder_error: f64,
}

impl WalkSpectrumCheck {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_pair_error <= tol && self.max_remainder_error <= tol
    }
}

/// Removes `e^{±iθ_j}`, `cos θ_j = λ_j/α`, from the walk spectrum for every
/// eigenvalue `λ_j` of the encoded operator; whatever remains should be
/// `±1`.
pub fn check_walk_spectrum(be: &BlockEncoding) -> Result<WalkSpectrumCheck> {
    let block = hermitian_block(be)?;
    let lambdas = eigh(&block, HERMITIAN_TOL * be.alpha().max(1.0))?.values;
    let mut mu = eigenvalues(&walk_operator(be)?)?;
    let mut take = |target: C64| -> f64 {
        let (i, d) = mu
            .iter()
            .enumerate()
            .map(|(i, z)| (i, (z - target).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("walk spectrum exhausted");
        mu.swap_remove(i);
        d
    };
    let mut max_pair: f64 = 0.0;
    for &l in &lambdas {
        let x = (l / be.alpha()).clamp(-1.0, 1.0);
        let theta = x.acos();
        max_pair = max_pair.max(take(C64::from_polar(1.0, theta)));
        if x.abs() < 1.0 - 1e-12 {
            max_pair = max_pair.max(take(C64::from_polar(1.0, -theta)));
        }
    }
    let rest = mu
        .iter()
        .map(|z| (z - ONE).norm().min((z + ONE).norm()))
        .fold(0.0, f64::max);
    Ok(WalkSpectrumCheck {
        matched: lambdas.len(),
        max_pair_error: max_pair,
        max_remainder_error: rest,
    })
}

/// `exp(i t α B)` where `B` is the extracted block.
pub fn exact_evolution(be: &BlockEncoding, t: f64) -> Result<ComplexMatrix> {
    let block = hermitian_block(be)?;
    expm_hermitian(&block, t, HERMITIAN_TOL * be.alpha().max(1.0))
}

/// Phase estimation with a `t_bits` register on `state`, computed exactly:
/// `P(m) = ‖T^{-1} Σ_x e^{-2πi x m / T} U^x ψ‖²`.
pub fn phase_estimation(u: &ComplexMatrix, state: &[C64], t_bits: usize) -> Result<QpeOutcome> {
    if t_bits == 0 || t_bits > 16 {
        return Err(invalid(format!(
            "phase register of {t_bits} bits is out of range"
        )));
    }
    if u.rows() != state.len() {
        return Err(mismatch("state length does not match the unitary"));
    }
    let deviation = unitarity_deviation(u)?;
    if deviation > 1e-9 {
        return Err(Error::NotUnitary { deviation });
    }
    let norm = vec_norm(state);
    if (norm - 1.0).abs() > 1e-9 {
        return Err(invalid(format!("state has norm {norm}, expected 1")));
    }

    let t = 1usize << t_bits;
    let mut powers = vec![u.clone()];
    for j in 1..t_bits {
        let p = &powers[j - 1];
        powers.push(p.matmul(p)?);
    }
    let mut psi: Vec<Vec<C64>> = Vec::with_capacity(t);
    psi.push(state.to_vec());
    for x in 1..t {
        let j = usize::BITS as usize - 1 - x.leading_zeros() as usize;
        let prev = &psi[x - (1 << j)];
        psi.push(powers[j].mat_vec(prev));
    }

    let twiddle: Vec<C64> = (0..t)
        .map(|k| C64::from_polar(1.0, -2.0 * PI * k as f64 / t as f64))
        .collect();
    let dim = state.len();
    let distribution: Vec<f64> = (0..t)
        .map(|m| {
            let mut acc = vec![ZERO; dim];
            for (x, v) in psi.iter().enumerate() {
                let w = twiddle[(x * m) % t];
                for (a, b) in acc.iter_mut().zip(v) {
                    *a += w * b;
                }
            }
            acc.iter().map(|z| z.norm_sqr()).sum::<f64>() / (t * t) as f64
        })
        .collect();
    let (best, &probability) = distribution
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty distribution");
    Ok(QpeOutcome {
        phase: best as f64 / t as f64,
        bits: t_bits,
        probability,
        distribution,
    })
}

/// Estimates the eigenvalue of the encoded operator associated with
/// `state` (a vector on the system register).
pub fn estimate_eigenvalue(
    be: &BlockEncoding,
    state: &[C64],
    t_bits: usize,
    method: EstimationMethod,
) -> Result<PhaseEstimate> {
    let alpha = be.alpha();
    let (outcome, eigenvalue) = match method {
        EstimationMethod::ExactEvolution(window) => {
            let u = exact_evolution(be, window.evolution_time(alpha, t_bits))?;
            let o = phase_estimation(&u, state, t_bits)?;
            let l = window.eigenvalue(o.phase, alpha, t_bits);
            (o, l)
        }
        EstimationMethod::QubitizationWalk => {
            let w = walk_operator(be)?;
            if state.len() != be.system_dim() {
                return Err(mismatch("state length does not match the system register"));
            }
            let mut lifted = vec![ZERO; w.rows()];
            lifted[..state.len()].copy_from_slice(state);
            let o = phase_estimation(&w, &lifted, t_bits)?;
            let l = alpha * (2.0 * PI * o.phase).cos();
            (o, l)
        }
    };
    Ok(PhaseEstimate {
        phase: outcome.phase,
        bits: outcome.bits,
        eigenvalue: eigenvalue.clamp(-alpha, alpha),
        method,
        probability: outcome.probability,
    })
}
