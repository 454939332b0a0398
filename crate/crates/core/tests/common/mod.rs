//! Independent oracles for the integration and acceptance tests.
//!
//! Everything here works on real `nalgebra` matrices built from scratch
//! (explicit means, outer products, Cholesky whitening, QR) and never calls
//! the crate's own linear algebra.

#![allow(dead_code)]

use std::sync::Arc;

use blocklab::block_encoding::{CompositionKind, Provenance};
use blocklab::matrix::{ComplexMatrix, C64};
use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

pub type Real = DMatrix<f64>;

/// Real part of a matrix that must be real.
pub fn real(m: &ComplexMatrix) -> Real {
    let (r, c) = m.shape();
    DMatrix::from_fn(r, c, |i, j| {
        let z = m[(i, j)];
        assert!(
            z.im.abs() < 1e-12,
            "expected a real matrix, entry ({i},{j}) = {z}"
        );
        z.re
    })
}

pub fn complex(m: &Real) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| C64::new(m[(i, j)], 0.0))
}

/// Frobenius norm of `a - b`; an upper bound on the spectral distance.
pub fn fro_dist(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    let (r, c) = a.shape();
    let mut s = 0.0;
    for i in 0..r {
        for j in 0..c {
            s += (a[(i, j)] - b[(i, j)]).norm_sqr();
        }
    }
    s.sqrt()
}

/// `I - J/n`.
pub fn centering(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| {
        C64::new(if i == j { 1.0 } else { 0.0 } - 1.0 / n as f64, 0.0)
    })
}

pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!(a.cols(), b.rows());
    ComplexMatrix::from_fn(a.rows(), b.cols(), |i, j| {
        (0..a.cols()).map(|k| a[(i, k)] * b[(k, j)]).sum()
    })
}

/// Entrywise centering: `cx` removes column means, `xc` row means, `cxc`
/// both plus the grand mean.
pub fn center_entrywise(x: &ComplexMatrix, mode: &str) -> ComplexMatrix {
    let (r, c) = x.shape();
    let col_mean: Vec<C64> = (0..c)
        .map(|j| (0..r).map(|i| x[(i, j)]).sum::<C64>() / r as f64)
        .collect();
    let row_mean: Vec<C64> = (0..r)
        .map(|i| (0..c).map(|j| x[(i, j)]).sum::<C64>() / c as f64)
        .collect();
    let grand: C64 = row_mean.iter().sum::<C64>() / r as f64;
    ComplexMatrix::from_fn(r, c, |i, j| match mode {
        "cx" => x[(i, j)] - col_mean[j],
        "xc" => x[(i, j)] - row_mean[i],
        "cxc" => x[(i, j)] - col_mean[j] - row_mean[i] + grand,
        _ => unreachable!(),
    })
}

/// Samples are columns of `x`. Returns `Σ (x_i - m)(x_i - m)^T` over the
/// listed columns with `m` their mean.
fn scatter_of(x: &Real, cols: &[usize]) -> Real {
    let p = x.nrows();
    let mut mean = DVector::zeros(p);
    for &c in cols {
        mean += x.column(c);
    }
    mean /= cols.len() as f64;
    let mut s = DMatrix::zeros(p, p);
    for &c in cols {
        let d = x.column(c) - &mean;
        s += &d * d.transpose();
    }
    s
}

pub fn scatter_total(x: &Real) -> Real {
    scatter_of(x, &(0..x.ncols()).collect::<Vec<_>>())
}

fn groups(labels: &[i64]) -> Vec<Vec<usize>> {
    let mut keys: Vec<i64> = labels.to_vec();
    keys.sort();
    keys.dedup();
    keys.iter()
        .map(|k| {
            labels
                .iter()
                .enumerate()
                .filter(|(_, l)| *l == k)
                .map(|(i, _)| i)
                .collect()
        })
        .collect()
}

pub fn scatter_within(x: &Real, labels: &[i64]) -> Real {
    let p = x.nrows();
    groups(labels)
        .iter()
        .fold(DMatrix::zeros(p, p), |acc, g| acc + scatter_of(x, g))
}

pub fn scatter_between(x: &Real, labels: &[i64]) -> Real {
    let n = x.ncols() as f64;
    let total = x.column_sum() / n;
    let p = x.nrows();
    let mut s = DMatrix::zeros(p, p);
    for g in groups(labels) {
        let mut m = DVector::zeros(p);
        for &c in &g {
            m += x.column(c);
        }
        m /= g.len() as f64;
        let d = m - &total;
        s += (&d * d.transpose()) * g.len() as f64;
    }
    s
}

pub fn centered(x: &Real) -> Real {
    let mean = x.column_sum() / x.ncols() as f64;
    let mut out = x.clone();
    for mut col in out.column_iter_mut() {
        col -= &mean;
    }
    out
}

/// `X_c E Y_c^T`, `E_ij = [label_i == label_j]`.
pub fn dcca_cross(x: &Real, y: &Real, labels: &[i64]) -> Real {
    let n = labels.len();
    let e = DMatrix::from_fn(n, n, |i, j| if labels[i] == labels[j] { 1.0 } else { 0.0 });
    centered(x) * e * centered(y).transpose()
}

/// `[[0, K], [K^T, 0]]` and `diag(S_x, S_y)`.
pub fn cca_pencil(k: &Real, sx: &Real, sy: &Real) -> (Real, Real) {
    let (p, q) = (sx.nrows(), sy.nrows());
    let mut a = DMatrix::zeros(p + q, p + q);
    a.view_mut((0, p), (p, q)).copy_from(k);
    a.view_mut((p, 0), (q, p)).copy_from(&k.transpose());
    let mut b = DMatrix::zeros(p + q, p + q);
    b.view_mut((0, 0), (p, p)).copy_from(sx);
    b.view_mut((p, p), (q, q)).copy_from(sy);
    (a, b)
}

/// Eigenpairs of the definite pencil `A w = λ B w` (B positive definite)
/// by Cholesky whitening, values descending. Vectors are unit norm.
pub fn definite_pencil(a: &Real, b: &Real) -> (Vec<f64>, Vec<DVector<f64>>) {
    let l = Cholesky::new(b.clone())
        .expect("B must be positive definite")
        .l();
    let li = l
        .clone()
        .try_inverse()
        .expect("triangular factor is invertible");
    let m = &li * a * li.transpose();
    let m = (&m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| {
            let w = li.transpose() * eig.eigenvectors.column(i);
            let n = w.norm();
            w / n
        })
        .collect();
    (values, vectors)
}

/// Largest angle between a returned vector and the oracle eigenspace of
/// the cluster of oracle values within `cluster_tol` of its own value.
pub fn eigenspace_angle(
    values: &[f64],
    vectors: &[Vec<C64>],
    oracle_values: &[f64],
    oracle_vectors: &[DVector<f64>],
    cluster_tol: f64,
) -> f64 {
    let mut worst: f64 = 0.0;
    for (lam, v) in values.iter().zip(vectors) {
        let span: Vec<&DVector<f64>> = oracle_values
            .iter()
            .zip(oracle_vectors)
            .filter(|(o, _)| (*o - lam).abs() <= cluster_tol * lam.abs().max(1.0))
            .map(|(_, w)| w)
            .collect();
        if span.is_empty() {
            return std::f64::consts::FRAC_PI_2;
        }
        let basis = DMatrix::from_columns(&span.iter().map(|w| (*w).clone()).collect::<Vec<_>>());
        let q = basis.qr().q();
        for z in v {
            assert!(z.im.abs() < 1e-9, "real pencil gave a complex vector");
        }
        let vr = DVector::from_iterator(v.len(), v.iter().map(|z| z.re));
        let inside = &q * (q.transpose() * &vr);
        let ratio = ((&vr - inside).norm() / vr.norm()).min(1.0);
        worst = worst.max(ratio.asin());
    }
    worst
}

/// Minimum-norm least squares for a design whose only dependency (if any)
/// is its last column repeating the first up to a constant shift. After
/// centering, the two columns coincide and the minimum-norm solution splits
/// their joint coefficient evenly.
pub fn ols_oracle(x: &Real, y: &[f64], deficient: bool) -> Vec<f64> {
    let n = x.nrows();
    let xc = centered(&x.transpose()).transpose();
    let ybar = y.iter().sum::<f64>() / n as f64;
    let yc = DVector::from_iterator(n, y.iter().map(|v| v - ybar));
    let p = x.ncols();
    let used = if deficient { p - 1 } else { p };
    let a = xc.columns(0, used).into_owned();
    let qr = a.qr();
    let rhs = qr.q().transpose() * &yc;
    let beta = qr
        .r()
        .solve_upper_triangular(&rhs)
        .expect("reduced design has full rank");
    let mut out: Vec<f64> = beta.iter().copied().collect();
    if deficient {
        out[0] /= 2.0;
        out.push(out[0]);
    }
    out
}

/// Deviation of `U†U` from the identity.
pub fn unitarity(u: &ComplexMatrix) -> f64 {
    let n = u.rows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let g: C64 = (0..n).map(|k| u[(k, i)].conj() * u[(k, j)]).sum();
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - want).norm());
        }
    }
    worst
}

/// Counts and checks product and LCU nodes of a provenance tree with the
/// composition laws restated here: products multiply alphas and add
/// ancillas; an LCU multiplies `alpha_in` by the coefficient norm and adds
/// the prepare register.
#[derive(Default, Debug)]
pub struct LawCheck {
    pub products: usize,
    pub lcus: usize,
    pub violations: usize,
}

impl LawCheck {
    pub fn visit(&mut self, node: &Provenance) {
        for c in &node.children {
            self.visit(c);
        }
        let kids: &[Arc<Provenance>] = &node.children;
        match &node.kind {
            CompositionKind::Product => {
                self.products += 1;
                let (u, v) = (&kids[0], &kids[1]);
                if node.alpha != u.alpha * v.alpha || node.ancillas != u.ancillas + v.ancillas {
                    self.violations += 1;
                }
            }
            CompositionKind::Lcu {
                alpha_in,
                beta,
                prep_qubits,
                ..
            } => {
                self.lcus += 1;
                let a_in = kids[0].ancillas;
                let same_alpha = kids.iter().all(|k| k.alpha <= *alpha_in);
                if node.alpha != alpha_in * beta
                    || node.ancillas != a_in + prep_qubits
                    || !same_alpha
                {
                    self.violations += 1;
                }
            }
            _ => {}
        }
    }
}
