//! Dense decompositions, backed by nalgebra.

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};
use crate::matrix::{inner, vec_norm, ComplexMatrix, C64};

pub(crate) fn to_na(m: &ComplexMatrix) -> DMatrix<C64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues in descending order.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, j: usize) -> Vec<C64> {
        self.vectors.column(j)
    }
}

/// Eigendecomposition of the Hermitian part of `m`.
///
/// Fails with [`Error::NotHermitian`] when `m` deviates from its adjoint by
/// more than `tol` in any entry.
pub fn eigh(m: &ComplexMatrix, tol: f64) -> Result<HermitianEigen> {
    let dev = m
        .hermitian_deviation()
        .ok_or_else(|| invalid("eigendecomposition needs a square matrix"))?;
    if dev > tol {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let scale = m.max_abs();
    let scale = if scale > 0.0 && scale.is_finite() {
        scale
    } else {
        1.0
    };
    let mut eig = (to_na(&m.hermitian_part()) * C64::new(1.0 / scale, 0.0))
        .try_symmetric_eigen(f64::EPSILON, MAX_SWEEPS)
        .ok_or_else(|| {
            Error::VerificationFailed("Hermitian eigensolver did not converge".into())
        })?;
    eig.eigenvalues *= scale;
    let mut order: Vec<usize> = (0..m.rows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors =
        ComplexMatrix::from_fn(m.rows(), m.rows(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

const MAX_SWEEPS: usize = 10_000;
const MAX_JACOBI_SWEEPS: usize = 100;

/// Thin singular value decomposition `A = U diag(s) V†`, values
/// descending. `u` is `m x k` and `v` is `n x k` with `k = min(m, n)`;
/// columns of `u` paired with a zero singular value are zero.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub s: Vec<f64>,
    pub v: ComplexMatrix,
}

/// One-sided (Hestenes) Jacobi SVD.
///
/// Used instead of nalgebra's bidiagonal routine, which on some complex
/// inputs with a near-zero singular value returns a factorization that does
/// not reproduce the matrix.
pub fn svd(m: &ComplexMatrix) -> Svd {
    if m.rows() < m.cols() {
        let t = svd(&m.adjoint());
        return Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        };
    }
    let (rows, n) = m.shape();
    // Column-major working copies.
    let mut a: Vec<Vec<C64>> = (0..n).map(|c| m.column(c)).collect();
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|c| {
            (0..n)
                .map(|r| {
                    if r == c {
                        C64::new(1.0, 0.0)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                })
                .collect()
        })
        .collect();
    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = a[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = a[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma = inner(&a[p], &a[q]);
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = c * t;
                for cols in [&mut a, &mut v] {
                    let (lo, hi) = cols.split_at_mut(q);
                    for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                        let w = *y * phase;
                        let xp = *x * c - w * sn;
                        *y = *x * sn + w * c;
                        *x = xp;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<(f64, usize)> = a.iter().map(|col| vec_norm(col)).zip(0..).collect();
    order.sort_by(|x, y| y.0.total_cmp(&x.0));
    let mut u = ComplexMatrix::zeros(rows, n);
    let mut vm = ComplexMatrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (k, &(sigma, j)) in order.iter().enumerate() {
        s.push(sigma);
        if sigma > 0.0 {
            u.set_column(k, &a[j].iter().map(|z| z / sigma).collect::<Vec<_>>());
        }
        vm.set_column(k, &v[j]);
    }
    Svd { u, s, v: vm }
}

/// Singular values in descending order.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    svd(m).s
}

/// Operator 2-norm.
pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Moore-Penrose pseudo-inverse via SVD. Singular values at or below
/// `rel_tol * sigma_max` are treated as zero. Returns the inverse and the
/// numerical rank.
pub fn pinv(m: &ComplexMatrix, rel_tol: f64) -> (ComplexMatrix, usize) {
    let Svd { u, s, v } = svd(m);
    let cutoff = rel_tol * s.first().copied().unwrap_or(0.0);
    let mut out = ComplexMatrix::zeros(m.cols(), m.rows());
    let mut rank = 0;
    for (k, &sk) in s.iter().enumerate() {
        if sk > cutoff && sk > 0.0 {
            rank += 1;
            for r in 0..m.cols() {
                let vr = v[(r, k)] / sk;
                for c in 0..m.rows() {
                    out[(r, c)] += vr * u[(c, k)].conj();
                }
            }
        }
    }
    (out, rank)
}

/// Applies `f` to the eigenvalues of a Hermitian matrix:
/// `V diag(f(λ)) V†`.
pub fn hermitian_function(
    h: &ComplexMatrix,
    tol: f64,
    f: impl Fn(f64) -> C64,
) -> Result<ComplexMatrix> {
    let eig = eigh(h, tol)?;
    let n = h.rows();
    let v = &eig.vectors;
    let fl: Vec<C64> = eig.values.iter().map(|&l| f(l)).collect();
    Ok(ComplexMatrix::from_fn(n, n, |r, c| {
        (0..n).map(|k| v[(r, k)] * fl[k] * v[(c, k)].conj()).sum()
    }))
}

/// `exp(i t H)` for Hermitian `H`.
pub fn expm_hermitian(h: &ComplexMatrix, t: f64, tol: f64) -> Result<ComplexMatrix> {
    hermitian_function(h, tol, |l| C64::new(0.0, l * t).exp())
}

/// Eigenvalues of a general square matrix through the complex Schur form.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<C64>> {
    if !m.is_square() {
        return Err(invalid("eigenvalues need a square matrix"));
    }
    // Schur iteration can cycle on repeated eigenvalues; rotating the
    // spectrum by a phase changes the shifts without changing the answer.
    for theta in [0.0, 0.3, 1.1, 2.0, 2.9] {
        let phase = C64::from_polar(1.0, theta);
        if let Some(schur) = (to_na(m) * phase).try_schur(f64::EPSILON, MAX_SWEEPS) {
            let t = schur.unpack().1;
            return Ok((0..m.rows()).map(|i| t[(i, i)] * phase.conj()).collect());
        }
    }
    Err(Error::VerificationFailed(
        "Schur iteration did not converge".into(),
    ))
}

/// Orthonormal basis of the span of `vectors` (two-pass Gram-Schmidt),
/// dropping directions whose residual norm falls below `tol`.
pub fn orthonormal_basis(vectors: &[Vec<C64>], tol: f64) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let proj = inner(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= proj * qi;
                }
            }
        }
        let n = vec_norm(&w);
        if n > tol {
            basis.push(w.iter().map(|z| z / n).collect());
        }
    }
    basis
}

/// Largest angle between a vector of span(`a`) and span(`b`), in radians:
/// the largest principal angle when the spans have equal dimension, and a
/// containment measure when span(`a`) is smaller. Computed as
/// `asin ‖(I - Q_b Q_b†) Q_a‖` for accuracy at small angles; a larger
/// span(`a`) gives `π/2`.
pub fn max_principal_angle(a: &[Vec<C64>], b: &[Vec<C64>]) -> f64 {
    let qa = orthonormal_basis(a, 1e-10);
    let qb = orthonormal_basis(b, 1e-10);
    if qa.len() > qb.len() {
        return std::f64::consts::FRAC_PI_2;
    }
    if qa.is_empty() {
        return 0.0;
    }
    let cols: Vec<Vec<C64>> = qa
        .iter()
        .map(|v| {
            let mut r = v.clone();
            for q in &qb {
                let proj = inner(q, &r);
                for (ri, qi) in r.iter_mut().zip(q) {
                    *ri -= proj * qi;
                }
            }
            r
        })
        .collect();
    let m = ComplexMatrix::from_columns(&cols).expect("equal-length columns");
    spectral_norm(&m).min(1.0).asin()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigh_sorts_descending() {
        let m =
            ComplexMatrix::from_real_rows(&[[1.0, 0.0, 0.0], [0.0, 3.0, 0.0], [0.0, 0.0, -2.0]]);
        let e = eigh(&m, 1e-12).unwrap();
        assert_eq!(e.values, vec![3.0, 1.0, -2.0]);
        assert!((e.vector(0)[1].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        assert!(matches!(eigh(&m, 1e-8), Err(Error::NotHermitian { .. })));
    }

    fn lcg(seed: u64, rows: usize, cols: usize) -> ComplexMatrix {
        let mut s = seed;
        let mut next = move || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        ComplexMatrix::from_fn(rows, cols, |_, _| C64::new(next(), next()))
    }

    fn reconstruct(f: &Svd) -> ComplexMatrix {
        let k = f.s.len();
        ComplexMatrix::from_fn(f.u.rows(), f.v.rows(), |r, c| {
            (0..k)
                .map(|j| f.u[(r, j)] * f.s[j] * f.v[(c, j)].conj())
                .sum()
        })
    }

    #[test]
    fn svd_reconstructs_rank_deficient_complex() {
        for (seed, (m, n)) in [(1, (8, 4)), (2, (4, 8)), (3, (6, 6))] {
            let mut a = lcg(seed, m, n);
            // Duplicate a column (or row) to force a zero singular value.
            if m >= n {
                let c0 = a.column(0);
                a.set_column(n - 1, &c0);
            } else {
                a = a.adjoint();
                let c0 = a.column(0);
                a.set_column(m - 1, &c0);
                a = a.adjoint();
            }
            let f = svd(&a);
            assert!(reconstruct(&f).max_abs_diff(&a).unwrap() < 1e-13);
            assert!(f.s.windows(2).all(|w| w[0] >= w[1]));
            assert!(*f.s.last().unwrap() < 1e-13);
            let vv = f.v.adjoint().matmul(&f.v).unwrap();
            assert!(
                vv.max_abs_diff(&ComplexMatrix::identity(f.s.len()))
                    .unwrap()
                    < 1e-13
            );
        }
    }

    #[test]
    fn eigh_residual_with_degenerate_spectrum() {
        // Q diag(3, 3, 1, 1, 1, 0) Q† for a unitary Q from a QR-like sweep.
        let q = svd(&lcg(9, 6, 6)).u;
        let d = [3.0, 3.0, 1.0, 1.0, 1.0, 0.0];
        let h = ComplexMatrix::from_fn(6, 6, |r, c| {
            (0..6).map(|k| q[(r, k)] * d[k] * q[(c, k)].conj()).sum()
        });
        let e = eigh(&h, 1e-12).unwrap();
        for (k, want) in d.iter().enumerate() {
            assert!((e.values[k] - want).abs() < 1e-13);
            let v = e.vector(k);
            let hv = h.mat_vec(&v);
            let res: f64 = hv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - b * e.values[k]).norm_sqr())
                .sum();
            assert!(res.sqrt() < 1e-13);
        }
    }

    #[test]
    fn pinv_of_rank_one() {
        let m = ComplexMatrix::from_real_rows(&[[1.0, 1.0], [1.0, 1.0]]);
        let (p, rank) = pinv(&m, 1e-10);
        assert_eq!(rank, 1);
        let expect = ComplexMatrix::from_real_rows(&[[0.25, 0.25], [0.25, 0.25]]);
        assert!(p.max_abs_diff(&expect).unwrap() < 1e-14);
    }

    #[test]
    fn expm_of_diagonal() {
        let h = ComplexMatrix::from_real_rows(&[[1.0, 0.0], [0.0, -1.0]]);
        let u = expm_hermitian(&h, std::f64::consts::PI, 1e-12).unwrap();
        assert!(
            u.max_abs_diff(&ComplexMatrix::identity(2).scale(-1.0))
                .unwrap()
                < 1e-14
        );
    }

    #[test]
    fn schur_eigenvalues_of_rotation() {
        let r = ComplexMatrix::from_real_rows(&[[0.0, -1.0], [1.0, 0.0]]);
        let mut ev = eigenvalues(&r).unwrap();
        ev.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((ev[0] - C64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((ev[1] - C64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn principal_angle_of_rotated_planes() {
        let e = |i: usize| {
            let mut v = vec![C64::new(0.0, 0.0); 3];
            v[i] = C64::new(1.0, 0.0);
            v
        };
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let tilted = vec![C64::new(0.0, 0.0), C64::new(c, 0.0), C64::new(s, 0.0)];
        assert!((max_principal_angle(&[e(0), e(1)], &[e(0), tilted]) - 0.3).abs() < 1e-12);
        assert!(max_principal_angle(&[e(0), e(1)], &[e(1), e(0)]) < 1e-12);
        assert!(max_principal_angle(&[e(0)], &[e(0), e(1)]) < 1e-12);
        assert_eq!(
            max_principal_angle(&[e(0), e(1)], &[e(0)]),
            std::f64::consts::FRAC_PI_2
        );
    }
}
