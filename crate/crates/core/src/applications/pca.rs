use serde::{Deserialize, Serialize};

use super::{pad_square, Check, EigenResult, PipelineOutcome, SCATTER_TOL};
use crate::block_encoding::{product, BlockEncoding};
use crate::centering::padded_centering_encoding;
use crate::data_encoding::matrix_encoding;
use crate::error::{invalid, Result};
use crate::linalg::{eigh, spectral_norm};
use crate::reference;
use crate::spectral::{estimate_eigenvalue, EstimationMethod, PhaseEstimate, PhaseWindow};

/// `(‖X‖_F², ·, 0)`-encoding of `S_t = X C X†` for features-by-samples
/// data `x`. The block is `S_t` padded with zeros to a power of two.
pub fn scatter_total_encoding(x: &crate::matrix::ComplexMatrix) -> Result<BlockEncoding> {
    let xp = pad_square(x, 2);
    let data = matrix_encoding(&xp)?;
    let c = padded_centering_encoding(x.cols(), xp.rows())?;
    product(&data, &product(&c, &data.adjoint())?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcaResult {
    /// Phase-estimated eigenvalues with the classical eigenvectors that
    /// seeded them.
    pub eigen: EigenResult,
    /// Eigenvalues of the extracted block from a dense eigensolver.
    pub classical_values: Vec<f64>,
    pub estimates: Vec<PhaseEstimate>,
}

/// Top-`d` principal components of features-by-samples data.
///
/// Eigenvector candidates come from a dense eigensolver on the encoded
/// `S_t`; each eigenvalue is then read out by phase estimation of
/// `exp(i t S_t)` with a `t_bits`-bit register.
pub fn pca(
    x: &crate::matrix::ComplexMatrix,
    d: usize,
    t_bits: usize,
) -> Result<PipelineOutcome<PcaResult>> {
    let p = x.rows();
    if d == 0 || d > p {
        return Err(invalid(format!(
            "cannot extract {d} components from {p} features"
        )));
    }
    let st = scatter_total_encoding(x)?;
    let block = st.scaled_block();
    let dense = eigh(&block, 1e-8 * st.alpha())?;

    let method = EstimationMethod::ExactEvolution(PhaseWindow::NonNegative);
    let mut estimates = Vec::with_capacity(d);
    let mut vectors = Vec::with_capacity(d);
    for j in 0..d {
        let v = dense.vector(j);
        estimates.push(estimate_eigenvalue(&st, &v, t_bits, method)?);
        let mut head = v[..p].to_vec();
        super::fix_sign(&mut head);
        vectors.push(head);
    }
    let mut eigen = EigenResult {
        values: estimates.iter().map(|e| e.eigenvalue).collect(),
        vectors,
        d,
        degenerate_pairs: vec![],
        error_bound: st.epsilon(),
    };
    eigen.flag_degeneracies();
    let classical_values = dense.values[..d].to_vec();

    let oracle = reference::scatter_total(x);
    let oracle_values = eigh(&oracle, 1e-8 * oracle.max_abs().max(1.0))?.values;
    let block_gap = spectral_norm(&(&block.submatrix(0, 0, p, p) - &oracle));
    let qpe_gap = eigen
        .values
        .iter()
        .zip(&oracle_values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let resolution = st.alpha() * 2f64.powi(-(t_bits as i32));
    let checks = vec![
        Check::new("S_t block vs outer-product oracle", block_gap, SCATTER_TOL),
        Check::new(
            "phase-estimated eigenvalues vs dense eigensolver",
            qpe_gap,
            resolution,
        ),
    ];
    Ok(PipelineOutcome::new(
        PcaResult {
            eigen,
            classical_values,
            estimates,
        },
        &[("S_t", &st)],
        checks,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ComplexMatrix;

    #[test]
    fn identity_data_gives_centering() {
        let be = scatter_total_encoding(&ComplexMatrix::identity(4)).unwrap();
        let want = crate::centering::centering_matrix(4);
        assert!(be.scaled_block().max_abs_diff(&want).unwrap() < 1e-13);
        assert!((be.alpha() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_centered_columns() {
        // Rows are centered and orthogonal, so S_t is diagonal with the
        // squared row norms.
        let x = ComplexMatrix::from_real_rows(&[[1.0, -1.0, 1.0, -1.0], [2.0, 2.0, -2.0, -2.0]]);
        let out = pca(&x, 2, 8).unwrap();
        assert!(out.passed(), "{:?}", out.checks);
        let want = [16.0, 4.0];
        for (got, w) in out.result.eigen.values.iter().zip(want) {
            assert!((got - w).abs() <= 20.0 / 256.0, "{got} vs {w}");
        }
    }

    #[test]
    fn rejects_bad_component_count() {
        let x = ComplexMatrix::identity(2);
        assert!(pca(&x, 0, 8).is_err());
        assert!(pca(&x, 3, 8).is_err());
    }
}
