use super::{compare_to_oracle, Check, EigenResult, LabeledDataset, PipelineOutcome};
use super::{PENCIL_ANGLE_TOL, PENCIL_VALUE_TOL, SCATTER_TOL};
use crate::block_encoding::{
    block_diagonal, lift, pad_ancillas, product, product_chain, rescale, BlockEncoding,
};
use crate::centering::{centering_encoding, masked_centering_encoding, similarity_encoding};
use crate::data_encoding::{hermitian_dilation, hermitian_extension, matrix_encoding};
use crate::error::{mismatch, Result};
use crate::linalg::spectral_norm;
use crate::matrix::{embed_into, ComplexMatrix, ZERO};
use crate::reference;

/// The two sides of a CCA-type pencil `H_x w = λ H_y w`.
#[derive(Clone, Debug)]
pub struct CcaEncodings {
    /// Encoding of the off-diagonal cross term before dilation.
    pub cross: BlockEncoding,
    pub h_x: BlockEncoding,
    pub h_y: BlockEncoding,
    /// Square dimension the data were padded to.
    pub dim: usize,
}

fn padded_dim(rows: &[usize], cols: usize) -> usize {
    rows.iter()
        .copied()
        .chain([cols, 2])
        .max()
        .unwrap()
        .next_power_of_two()
}

/// `|0><0| ⊗ X C X† + |1><1| ⊗ Y C Y†` under a common alpha.
fn h_y(x: &BlockEncoding, y: &BlockEncoding, c: &BlockEncoding) -> Result<BlockEncoding> {
    let q = product(x, &product(c, &x.adjoint())?)?;
    let p = product(y, &product(c, &y.adjoint())?)?;
    let top = q.alpha().max(p.alpha());
    let lift_to = |e: BlockEncoding| {
        if e.alpha() < top {
            rescale(&e, top)
        } else {
            Ok(e)
        }
    };
    let (q, p) = (lift_to(q)?, lift_to(p)?);
    let a = q.ancillas().max(p.ancillas());
    block_diagonal(&[
        pad_ancillas(&q, a - q.ancillas())?,
        pad_ancillas(&p, a - p.ancillas())?,
    ])
}

fn check_samples(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<()> {
    if x.cols() != y.cols() {
        return Err(mismatch(format!(
            "x has {} samples but y has {}",
            x.cols(),
            y.cols()
        )));
    }
    Ok(())
}

/// Builds `H_x` (dilated `X C Y†`) and `H_y` for features-by-samples data.
pub fn cca_encodings(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<CcaEncodings> {
    check_samples(x, y)?;
    let n = x.cols();
    let dim = padded_dim(&[x.rows(), y.rows()], n);
    let ex = matrix_encoding(&embed_into(x, dim))?;
    let ey = matrix_encoding(&embed_into(y, dim))?;
    let c = crate::centering::padded_centering_encoding(n, dim)?;
    let cross = product_chain(&[&ex, &c, &ey.adjoint()])?;
    Ok(CcaEncodings {
        h_x: hermitian_dilation(&cross)?,
        h_y: h_y(&ex, &ey, &c)?,
        cross,
        dim,
    })
}

/// Coordinates of `(w_x, w_y)` inside a dilated `2 dim` vector.
fn stacked_coords(p: usize, q: usize, dim: usize) -> Vec<usize> {
    (0..p).chain(dim..dim + q).collect()
}

/// Dense `[[0, K], [K†, 0]]` and `diag(S_xx, S_yy)`.
fn reference_pencil(
    k: &ComplexMatrix,
    x: &ComplexMatrix,
    y: &ComplexMatrix,
) -> (ComplexMatrix, ComplexMatrix) {
    let (p, q) = (x.rows(), y.rows());
    let (sxx, syy) = (reference::scatter_total(x), reference::scatter_total(y));
    let b = ComplexMatrix::from_fn(p + q, p + q, |r, c| match (r < p, c < p) {
        (true, true) => sxx[(r, c)],
        (false, false) => syy[(r - p, c - p)],
        _ => ZERO,
    });
    (hermitian_extension(k), b)
}

fn finish(
    enc: &CcaEncodings,
    x: &ComplexMatrix,
    y: &ComplexMatrix,
    cross_ref: &ComplexMatrix,
    d: usize,
    cross_tol: f64,
    mut checks: Vec<Check>,
) -> Result<PipelineOutcome<EigenResult>> {
    let (p, q) = (x.rows(), y.rows());
    let mut result = super::generalized_eig(&enc.h_x, &enc.h_y, d)?;
    result.restrict(&stacked_coords(p, q, enc.dim));

    let cross_blk = enc.cross.scaled_block().submatrix(0, 0, p, q);
    let hx = enc.h_x.scaled_block();
    let diag_zero = hx
        .submatrix(0, 0, enc.dim, enc.dim)
        .max_abs()
        .max(hx.submatrix(enc.dim, enc.dim, enc.dim, enc.dim).max_abs());
    let (a_ref, b_ref) = reference_pencil(cross_ref, x, y);
    let hy_blk = enc.h_y.scaled_block();
    let coords = stacked_coords(p, q, enc.dim);
    let hy_sub = ComplexMatrix::from_fn(p + q, p + q, |r, c| hy_blk[(coords[r], coords[c])]);
    let (value_gap, angle) = compare_to_oracle(&result, &a_ref, &b_ref)?;
    checks.extend([
        Check::new(
            "cross block vs dense oracle",
            spectral_norm(&(&cross_blk - cross_ref)),
            cross_tol,
        ),
        Check::new(
            "H_x Hermitian",
            hx.hermitian_deviation().unwrap_or(f64::INFINITY),
            1e-10 * enc.h_x.alpha(),
        ),
        Check::new(
            "H_x diagonal blocks vanish",
            diag_zero,
            1e-10 * enc.h_x.alpha(),
        ),
        Check::new(
            "H_y block vs oracle",
            spectral_norm(&(&hy_sub - &b_ref)),
            SCATTER_TOL,
        ),
        Check::new(
            "eigenvalues vs dense pencil oracle",
            value_gap,
            PENCIL_VALUE_TOL,
        ),
        Check::new("eigenspace principal angle", angle, PENCIL_ANGLE_TOL),
    ]);
    Ok(PipelineOutcome::new(
        result,
        &[("XCY^T", &enc.cross), ("H_x", &enc.h_x), ("H_y", &enc.h_y)],
        checks,
    ))
}

/// Canonical correlation analysis of two views sharing their samples
/// (columns). Returned vectors are `(w_x, w_y)` stacked and normalized
/// together; values are the nonnegative branch of the `±` pairs.
pub fn cca(x: &ComplexMatrix, y: &ComplexMatrix, d: usize) -> Result<PipelineOutcome<EigenResult>> {
    let enc = cca_encodings(x, y)?;
    let cross_ref =
        reference::centered_columns(x).matmul(&reference::centered_columns(y).adjoint())?;
    finish(&enc, x, y, &cross_ref, d, SCATTER_TOL, vec![])
}

/// Builds `H_d` (dilated `X C E C Y†`) and `H_y` in the padded class-slot
/// layout of the shared partition.
pub fn dcca_encodings(ds_x: &LabeledDataset, ds_y: &LabeledDataset) -> Result<CcaEncodings> {
    if ds_x.labels() != ds_y.labels() || ds_x.partition() != ds_y.partition() {
        return Err(mismatch("both views must share sample labels"));
    }
    let part = ds_x.partition();
    let slots = part.padded_dim();
    let dim = padded_dim(&[ds_x.features(), ds_y.features()], slots);
    let ex = matrix_encoding(&embed_into(&ds_x.slot_layout(), dim))?;
    let ey = matrix_encoding(&embed_into(&ds_y.slot_layout(), dim))?;
    let occupied = part.occupied_slots();
    let c = if occupied.len() == dim {
        centering_encoding(dim)?
    } else {
        let mut mask = vec![false; dim];
        occupied.iter().for_each(|&i| mask[i] = true);
        masked_centering_encoding(&mask)?
    };
    let e = similarity_encoding(part)?;
    let e = lift(&e, (dim / slots).trailing_zeros() as usize)?;
    let cross = product_chain(&[&ex, &c, &e, &c, &ey.adjoint()])?;
    Ok(CcaEncodings {
        h_x: hermitian_dilation(&cross)?,
        h_y: h_y(&ex, &ey, &c)?,
        cross,
        dim,
    })
}

/// Discriminant CCA: the pencil `H_d w = λ H_y w` whose cross term weights
/// sample pairs by shared class membership.
pub fn dcca(
    ds_x: &LabeledDataset,
    ds_y: &LabeledDataset,
    d: usize,
) -> Result<PipelineOutcome<EigenResult>> {
    let enc = dcca_encodings(ds_x, ds_y)?;
    let cross_ref = reference::dcca_cross(ds_x.x(), ds_y.x(), ds_x.labels())?;
    let fx = ds_x.x().frobenius_norm();
    let fy = ds_y.x().frobenius_norm();
    let declared = ds_x.partition().max_size() as f64 * fx * fy;
    let checks = vec![Check::new(
        "declared alpha vs n~ |X|_F |Y|_F (relative)",
        (enc.cross.alpha() - declared).abs() / declared,
        1e-12,
    )];
    finish(&enc, ds_x.x(), ds_y.x(), &cross_ref, d, 1e-6, checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(p: usize, n: usize, seed: u64) -> ComplexMatrix {
        let mut s = seed;
        ComplexMatrix::from_fn(p, n, |_, _| {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            crate::matrix::C64::new(((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5, 0.0)
        })
    }

    #[test]
    fn self_correlation_is_one() {
        let x = data(2, 8, 3);
        let out = cca(&x, &x, 1).unwrap();
        assert!(out.passed(), "{:?}", out.checks);
        assert!((out.result.values[0] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn independent_views_match_oracle() {
        let out = cca(&data(3, 8, 5), &data(3, 8, 9), 2).unwrap();
        assert!(out.passed(), "{:?}", out.checks);
        assert!(out.result.values[0] <= 1.0 + 1e-9);
    }

    #[test]
    fn single_class_cross_term_vanishes() {
        let labels = [0i64; 4];
        let dx = LabeledDataset::new(data(2, 4, 1), &labels).unwrap();
        let dy = LabeledDataset::new(data(2, 4, 2), &labels).unwrap();
        let enc = dcca_encodings(&dx, &dy).unwrap();
        assert!(enc.h_x.scaled_block().max_abs() <= 1e-12 * enc.h_x.alpha());
    }

    #[test]
    fn two_class_dcca_matches_oracle() {
        let labels = [0i64, 1, 0, 1, 1, 0, 0, 1];
        let x = data(3, 8, 11);
        let dx = LabeledDataset::new(x.clone(), &labels).unwrap();
        let out = dcca(&dx, &dx, 1).unwrap();
        assert!(out.passed(), "{:?}", out.checks);
    }
}
