use serde::{Deserialize, Serialize};

use super::{pad_square, Check, PipelineOutcome};
use crate::block_encoding::product;
use crate::centering::{centering_matrix, padded_centering_encoding};
use crate::data_encoding::matrix_encoding;
use crate::error::{mismatch, Result};
use crate::linalg::{eigh, pinv};
use crate::matrix::{vec_norm, ComplexMatrix, C64, ZERO};

/// Tolerance between the two coefficient routes.
pub const OLS_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    /// Coefficients from the pseudo-inverse of the encoded `C X`.
    pub beta_hat: Vec<f64>,
    /// Coefficients from `(X^T C X)^+ X^T C y`.
    pub beta_closed_form: Vec<f64>,
    /// `‖C X β̂ - y‖`.
    pub residual_norm: f64,
    /// Numerical rank of `C X`.
    pub rank: usize,
    pub rank_deficient: bool,
}

fn real_parts(v: &[C64]) -> Vec<f64> {
    v.iter().map(|z| z.re).collect()
}

/// `(X^T C X)^+ X^T C y` with an eigenvalue-thresholded pseudo-inverse.
fn closed_form(x: &ComplexMatrix, y: &[C64]) -> Result<Vec<C64>> {
    let cx = centering_matrix(x.rows()).matmul(x)?;
    let gram = x.adjoint().matmul(&cx)?;
    let eig = eigh(&gram, 1e-8 * gram.max_abs().max(1.0))?;
    let top = eig.values.first().copied().unwrap_or(0.0).max(0.0);
    let rhs = cx.adjoint().mat_vec(y);
    let p = x.cols();
    let mut beta = vec![ZERO; p];
    for (k, &l) in eig.values.iter().enumerate() {
        if l > 1e-10 * top && l > 0.0 {
            let v = eig.vector(k);
            let coef = crate::matrix::inner(&v, &rhs) / l;
            for (b, vi) in beta.iter_mut().zip(&v) {
                *b += coef * vi;
            }
        }
    }
    Ok(beta)
}

/// Ordinary least squares on the centered design: minimizes
/// `‖C X β - y‖` for an observations-by-features `x`.
///
/// The coefficients are computed from a block-encoding of `A = C X`
/// (`√C = C` since `C` is a projector) by pseudo-inverting the encoded
/// block, and cross-checked against the closed form.
pub fn ols(x: &ComplexMatrix, y: &[f64]) -> Result<PipelineOutcome<RegressionResult>> {
    let (n, p) = x.shape();
    if y.len() != n {
        return Err(mismatch(format!(
            "{} responses for {n} observations",
            y.len()
        )));
    }
    let yc: Vec<C64> = y.iter().map(|&v| C64::new(v, 0.0)).collect();
    let xp = pad_square(x, 2);
    let a_enc = product(
        &padded_centering_encoding(n, xp.rows())?,
        &matrix_encoding(&xp)?,
    )?;
    let a = a_enc.scaled_block().submatrix(0, 0, n, p);
    let (a_pinv, rank) = pinv(&a, 1e-5);
    let beta = a_pinv.mat_vec(&yc);
    let beta_cf = closed_form(x, &yc)?;

    let cx = centering_matrix(n).matmul(x)?;
    let fitted = cx.mat_vec(&beta);
    let residual: Vec<C64> = fitted.iter().zip(&yc).map(|(f, t)| f - t).collect();
    let gap = beta
        .iter()
        .zip(&beta_cf)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let block_gap = a.max_abs_diff(&cx)?;
    let checks = vec![
        Check::new("C X block vs dense product", block_gap, 1e-9),
        Check::new("encoded route vs closed form", gap, OLS_TOL),
    ];
    let result = RegressionResult {
        beta_hat: real_parts(&beta),
        beta_closed_form: real_parts(&beta_cf),
        residual_norm: vec_norm(&residual),
        rank,
        rank_deficient: rank < p,
    };
    Ok(PipelineOutcome::new(result, &[("CX", &a_enc)], checks))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_fit_has_zero_residual() {
        let x = ComplexMatrix::from_real_rows(&[[1.0, 0.0], [2.0, 1.0], [3.0, 0.0], [4.0, 2.0]]);
        let beta = [0.5, -1.5];
        let cx = centering_matrix(4).matmul(&x).unwrap();
        let y: Vec<f64> = (0..4)
            .map(|r| cx[(r, 0)].re * beta[0] + cx[(r, 1)].re * beta[1])
            .collect();
        let out = ols(&x, &y).unwrap();
        assert!(out.passed(), "{:?}", out.checks);
        assert!(out.result.residual_norm < 1e-10);
        assert!((out.result.beta_hat[0] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn constant_response_gives_zero_coefficients() {
        let x = ComplexMatrix::from_real_rows(&[[1.0, 3.0], [2.0, -1.0], [0.0, 1.0], [5.0, 2.0]]);
        let out = ols(&x, &[1.0; 4]).unwrap();
        assert!(out.result.beta_hat.iter().all(|b| b.abs() < 1e-12));
    }

    #[test]
    fn rank_deficient_design() {
        // Second column is a shifted copy of the first; the third is constant.
        let x = ComplexMatrix::from_real_rows(&[
            [1.0, 3.0, 7.0],
            [2.0, 4.0, 7.0],
            [0.0, 2.0, 7.0],
            [5.0, 7.0, 7.0],
        ]);
        let out = ols(&x, &[1.0, -2.0, 0.5, 3.0]).unwrap();
        assert!(out.passed(), "{:?}", out.checks);
        assert_eq!(out.result.rank, 1);
        assert!(out.result.rank_deficient);
    }
}
