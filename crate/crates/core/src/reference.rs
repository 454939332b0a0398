//! Dense classical solvers used to cross-check the encoded pipelines.
//!
//! Nothing here touches block-encodings: scatter matrices are summed from
//! per-sample outer products and pencils are solved through `pinv(B) A`.

use crate::error::{mismatch, Result};
use crate::linalg::{eigenvalues, pinv};
use crate::matrix::{ComplexMatrix, C64, ZERO};

fn outer_add(acc: &mut ComplexMatrix, u: &[C64], v: &[C64], weight: f64) {
    for (r, ur) in u.iter().enumerate() {
        for (c, vc) in v.iter().enumerate() {
            acc[(r, c)] += ur * vc.conj() * weight;
        }
    }
}

fn mean_of(x: &ComplexMatrix, cols: &[usize]) -> Vec<C64> {
    (0..x.rows())
        .map(|r| cols.iter().map(|&c| x[(r, c)]).sum::<C64>() / cols.len() as f64)
        .collect()
}

fn class_columns(labels: &[usize], classes: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); classes];
    for (i, &l) in labels.iter().enumerate() {
        out[l].push(i);
    }
    out
}

/// `Σ_i (x_i - v)(x_i - v)†` over the columns of `x`.
pub fn scatter_total(x: &ComplexMatrix) -> ComplexMatrix {
    let all: Vec<usize> = (0..x.cols()).collect();
    let v = mean_of(x, &all);
    let mut s = ComplexMatrix::zeros(x.rows(), x.rows());
    for i in all {
        let d: Vec<C64> = x.column(i).iter().zip(&v).map(|(a, b)| a - b).collect();
        outer_add(&mut s, &d, &d, 1.0);
    }
    s
}

/// Per-class means `v_k`.
pub fn class_means(x: &ComplexMatrix, labels: &[usize], classes: usize) -> Vec<Vec<C64>> {
    class_columns(labels, classes)
        .iter()
        .map(|cols| mean_of(x, cols))
        .collect()
}

/// `Σ_k Σ_{i in k} (x_i - v_k)(x_i - v_k)†`.
pub fn scatter_within(x: &ComplexMatrix, labels: &[usize], classes: usize) -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(x.rows(), x.rows());
    for cols in class_columns(labels, classes) {
        let vk = mean_of(x, &cols);
        for i in cols {
            let d: Vec<C64> = x.column(i).iter().zip(&vk).map(|(a, b)| a - b).collect();
            outer_add(&mut s, &d, &d, 1.0);
        }
    }
    s
}

/// `Σ_k n_k (v_k - v)(v_k - v)†`.
pub fn scatter_between(x: &ComplexMatrix, labels: &[usize], classes: usize) -> ComplexMatrix {
    let all: Vec<usize> = (0..x.cols()).collect();
    let v = mean_of(x, &all);
    let mut s = ComplexMatrix::zeros(x.rows(), x.rows());
    for cols in class_columns(labels, classes) {
        let d: Vec<C64> = mean_of(x, &cols)
            .iter()
            .zip(&v)
            .map(|(a, b)| a - b)
            .collect();
        outer_add(&mut s, &d, &d, cols.len() as f64);
    }
    s
}

/// Columns of `x` centered by the global mean.
pub fn centered_columns(x: &ComplexMatrix) -> ComplexMatrix {
    let all: Vec<usize> = (0..x.cols()).collect();
    let v = mean_of(x, &all);
    ComplexMatrix::from_fn(x.rows(), x.cols(), |r, c| x[(r, c)] - v[r])
}

/// `X_c E Y_c†` with `E_ij = 1` when samples `i`, `j` share a class.
pub fn dcca_cross(x: &ComplexMatrix, y: &ComplexMatrix, labels: &[usize]) -> Result<ComplexMatrix> {
    if x.cols() != y.cols() || x.cols() != labels.len() {
        return Err(mismatch("x, y and labels must cover the same samples"));
    }
    let (xc, yc) = (centered_columns(x), centered_columns(y));
    let n = labels.len();
    let e = ComplexMatrix::from_fn(n, n, |i, j| {
        if labels[i] == labels[j] {
            C64::new(1.0, 0.0)
        } else {
            ZERO
        }
    });
    xc.matmul(&e)?.matmul(&yc.adjoint())
}

/// Real parts of the eigenvalues of `pinv(B) A`, descending.
pub fn pencil_eigenvalues(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Vec<f64>> {
    let (bp, _) = pinv(b, 1e-10);
    let mut ev: Vec<f64> = eigenvalues(&bp.matmul(a)?)?.iter().map(|z| z.re).collect();
    ev.sort_by(|p, q| q.total_cmp(p));
    Ok(ev)
}

/// A basis of the eigenspace of `pinv(B) A` for eigenvalue `lambda`: the
/// `count` right singular vectors of `pinv(B) A - lambda I` with the
/// smallest singular values.
pub fn pencil_eigenvectors(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    lambda: f64,
    count: usize,
) -> Result<Vec<Vec<C64>>> {
    let (bp, _) = pinv(b, 1e-10);
    let m = bp.matmul(a)?;
    let shifted = &m - &ComplexMatrix::identity(m.rows()).scale(lambda);
    let svd = crate::linalg::svd(&shifted);
    let n = svd.s.len();
    Ok((n - count.min(n)..n)
        .rev()
        .map(|k| svd.v.column(k))
        .collect())
}

/// `(X† C X)^+ X† C y` for an `n x p` design, through the normal
/// equations. Returns the coefficients and the numerical rank.
pub fn ols_normal_equations(x: &ComplexMatrix, y: &[C64]) -> Result<(Vec<C64>, usize)> {
    if x.rows() != y.len() {
        return Err(mismatch("one response per observation is required"));
    }
    let xc = ComplexMatrix::from_fn(x.rows(), x.cols(), |r, c| {
        x[(r, c)] - (0..x.rows()).map(|i| x[(i, c)]).sum::<C64>() / x.rows() as f64
    });
    let gram = xc.adjoint().matmul(&xc)?;
    let (gp, rank) = pinv(&gram, 1e-10);
    let ybar = y.iter().sum::<C64>() / y.len() as f64;
    let yc: Vec<C64> = y.iter().map(|v| v - ybar).collect();
    Ok((gp.mat_vec(&xc.adjoint().mat_vec(&yc)), rank))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scatter_identity_holds() {
        let x = ComplexMatrix::from_fn(3, 6, |r, c| {
            C64::new(((r * 7 + c * 3) % 5) as f64 - 2.0, 0.0)
        });
        let labels = [0, 1, 0, 1, 1, 0];
        let st = scatter_total(&x);
        let sum = &scatter_within(&x, &labels, 2) + &scatter_between(&x, &labels, 2);
        assert!(st.max_abs_diff(&sum).unwrap() < 1e-12);
    }

    #[test]
    fn pencil_with_identity_is_plain_eigenproblem() {
        let a = ComplexMatrix::from_real_rows(&[[2.0, 1.0], [1.0, 2.0]]);
        let ev = pencil_eigenvalues(&a, &ComplexMatrix::identity(2)).unwrap();
        assert!((ev[0] - 3.0).abs() < 1e-12 && (ev[1] - 1.0).abs() < 1e-12);
        let v = pencil_eigenvectors(&a, &ComplexMatrix::identity(2), 3.0, 1).unwrap();
        assert!((v[0][0].norm() - v[0][1].norm()).abs() < 1e-12);
    }
}
