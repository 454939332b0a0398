//! Dense complex matrices.
//!
//! [`ComplexMatrix`] is a row-major array of `Complex64` and is the common
//! currency of the crate: data matrices, gate unitaries and extracted blocks
//! are all stored this way. Decompositions live in [`crate::linalg`].

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{invalid, mismatch, Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Default ceiling on the total number of qubits of any simulated operator.
pub const DEFAULT_CAP_QUBITS: usize = 14;

/// Environment variable overriding [`DEFAULT_CAP_QUBITS`].
pub const CAP_ENV_VAR: &str = "BLOCKLAB_CAP_QUBITS";

/// Default unitarity tolerance.
pub const UNITARY_TOL: f64 = 1e-10;

/// Default block verification tolerance.
pub const BLOCK_TOL: f64 = 1e-9;

/// The qubit cap in effect: `BLOCKLAB_CAP_QUBITS` if set and parseable,
/// otherwise [`DEFAULT_CAP_QUBITS`].
pub fn cap_qubits() -> usize {
    std::env::var(CAP_ENV_VAR)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_CAP_QUBITS)
}

pub(crate) fn check_cap(qubits: usize, cap: usize) -> Result<()> {
    if qubits > cap {
        Err(Error::CapExceeded { qubits, cap })
    } else {
        Ok(())
    }
}

/// `Some(k)` when `n == 2^k`.
pub fn log2_exact(n: usize) -> Option<usize> {
    if n.is_power_of_two() {
        Some(n.trailing_zeros() as usize)
    } else {
        None
    }
}

/// Smallest `k` with `2^k >= n` (0 for `n <= 1`).
pub fn log2_ceil(n: usize) -> usize {
    n.max(1).next_power_of_two().trailing_zeros() as usize
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, checking shape and finiteness.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(invalid("matrix dimensions must be positive"));
        }
        if data.len() != rows * cols {
            return Err(mismatch(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid("matrix entries must be finite"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Builds a matrix from nested real rows. Panics on ragged input; meant
    /// for literals in examples and tests.
    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let cols = rows[0].as_ref().len();
        let data: Vec<f64> = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.as_ref().len(), cols, "ragged rows");
                r.as_ref().iter().copied()
            })
            .collect();
        Self::from_real(rows.len(), cols, &data).expect("valid literal matrix")
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in entries.iter().enumerate() {
            m.data[i * n + i] = z;
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(mismatch("columns of unequal length"));
        }
        let mut data = vec![ZERO; rows * cols];
        for (c, col) in columns.iter().enumerate() {
            for (r, &z) in col.iter().enumerate() {
                data[r * cols + c] = z;
            }
        }
        Self::from_vec(rows, cols, data)
    }

    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_real_rows(&[[h, h], [h, -h]])
    }

    pub fn pauli_x() -> Self {
        Self::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows)
            .map(|r| self.data[r * self.cols + c])
            .collect()
    }

    pub fn set_column(&mut self, c: usize, values: &[C64]) {
        assert_eq!(values.len(), self.rows);
        for (r, &z) in values.iter().enumerate() {
            self.data[r * self.cols + c] = z;
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    /// Top-left `rows x cols` submatrix starting at `(r0, c0)`.
    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols);
        Self::from_fn(rows, cols, |r, c| self[(r0 + r, c0 + c)])
    }

    /// Whether every imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(mismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = vec![ZERO; self.rows * rhs.cols];
        for r in 0..self.rows {
            let out_row = &mut out[r * rhs.cols..(r + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(Self {
            rows: self.rows,
            cols: rhs.cols,
            data: out,
        })
    }

    pub fn mat_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise magnitude of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.shape() != other.shape() {
            return Err(mismatch(format!(
                "shapes {:?} and {:?} differ",
                self.shape(),
                other.shape()
            )));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest entry of `|A - A†|`; `None` for non-square matrices.
    pub fn hermitian_deviation(&self) -> Option<f64> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut dev: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                dev = dev.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        Some(dev)
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |r, c| {
            (self[(r, c)] + self[(c, r)].conj()) * 0.5
        })
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in add");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in sub");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("shape mismatch in mul")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(r) {
                if z.im == 0.0 {
                    write!(f, "{:>10.4} ", z.re)?;
                } else {
                    write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
                }
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product under the default qubit cap.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    kron_capped(a, b, cap_qubits())
}

/// Kronecker product; fails when either result dimension exceeds `2^cap`.
pub fn kron_capped(a: &ComplexMatrix, b: &ComplexMatrix, cap: usize) -> Result<ComplexMatrix> {
    let rows = a.rows.checked_mul(b.rows);
    let cols = a.cols.checked_mul(b.cols);
    let (rows, cols) = match (rows, cols) {
        (Some(r), Some(c)) => (r, c),
        _ => {
            return Err(Error::CapExceeded {
                qubits: usize::MAX,
                cap,
            })
        }
    };
    check_cap(log2_ceil(rows.max(cols)), cap)?;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let s = a[(ar, ac)];
            if s == ZERO {
                continue;
            }
            for br in 0..b.rows {
                let dst = (ar * b.rows + br) * cols + ac * b.cols;
                let src = b.row(br);
                for (o, &z) in out.data[dst..dst + b.cols].iter_mut().zip(src) {
                    *o = s * z;
                }
            }
        }
    }
    Ok(out)
}

/// `m^{⊗k}`; the 1x1 identity for `k = 0`.
pub fn kron_power(m: &ComplexMatrix, k: usize) -> Result<ComplexMatrix> {
    let mut out = ComplexMatrix::identity(1);
    for _ in 0..k {
        out = kron(&out, m)?;
    }
    Ok(out)
}

/// Pads `a` with zeros into the top-left corner of a `2^s x 2^s` matrix,
/// where `2^s` is the smallest power of two covering both dimensions.
/// Power-of-two square inputs are returned unchanged.
pub fn embed_power_of_two(a: &ComplexMatrix) -> ComplexMatrix {
    let dim = a.rows.max(a.cols).next_power_of_two();
    embed_into(a, dim)
}

/// Zero-pads `a` into the top-left corner of a `dim x dim` matrix.
pub fn embed_into(a: &ComplexMatrix, dim: usize) -> ComplexMatrix {
    assert!(
        dim >= a.rows && dim >= a.cols,
        "embedding dimension too small"
    );
    if a.rows == dim && a.cols == dim {
        return a.clone();
    }
    let mut out = ComplexMatrix::zeros(dim, dim);
    for r in 0..a.rows {
        out.data[r * dim..r * dim + a.cols].copy_from_slice(a.row(r));
    }
    out
}

/// Largest entry of `|U†U - I|`. Errors on non-square input.
pub fn unitarity_deviation(u: &ComplexMatrix) -> Result<f64> {
    if !u.is_square() {
        return Err(mismatch(format!(
            "unitarity check needs a square matrix, got {}x{}",
            u.rows, u.cols
        )));
    }
    let g = u.adjoint().matmul(u)?;
    g.max_abs_diff(&ComplexMatrix::identity(u.rows))
}

/// True iff `max |U†U - I| <= tol`.
pub fn is_unitary(u: &ComplexMatrix, tol: f64) -> Result<bool> {
    Ok(unitarity_deviation(u)? <= tol)
}

/// `<a, b>`, conjugate-linear in `a`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Completes orthonormal `prescribed` columns to a `dimension x dimension`
/// unitary whose first columns are exactly the prescribed ones.
///
/// The remaining columns come from modified Gram-Schmidt (two passes) over
/// the canonical basis `e_0, e_1, ...`, taken in order. A candidate is kept
/// once its residual clears a threshold; the threshold is lowered in stages
/// so the result is fully deterministic.
pub fn unitary_completion(prescribed: &[Vec<C64>], dimension: usize) -> Result<ComplexMatrix> {
    if dimension == 0 {
        return Err(invalid("completion dimension must be positive"));
    }
    if prescribed.len() > dimension {
        return Err(invalid(format!(
            "{} prescribed columns do not fit in dimension {dimension}",
            prescribed.len()
        )));
    }
    if let Some(bad) = prescribed.iter().find(|c| c.len() != dimension) {
        return Err(mismatch(format!(
            "prescribed column of length {} in dimension {dimension}",
            bad.len()
        )));
    }
    let mut deviation: f64 = 0.0;
    for (i, a) in prescribed.iter().enumerate() {
        for (j, b) in prescribed.iter().enumerate().skip(i) {
            let g = inner(a, b);
            let expect = if i == j { ONE } else { ZERO };
            deviation = deviation.max((g - expect).norm());
        }
    }
    if deviation > 1e-10 {
        return Err(Error::NotOrthonormal { deviation });
    }

    let mut basis: Vec<Vec<C64>> = prescribed.to_vec();
    let mut used = vec![false; dimension];
    for threshold in [0.5, 0.1, 1e-3, 1e-6] {
        for cand in 0..dimension {
            if basis.len() == dimension {
                break;
            }
            if used[cand] {
                continue;
            }
            let mut v = vec![ZERO; dimension];
            v[cand] = ONE;
            for _ in 0..2 {
                for b in &basis {
                    let proj = inner(b, &v);
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi -= proj * bi;
                    }
                }
            }
            let norm = vec_norm(&v);
            if norm >= threshold {
                v.iter_mut().for_each(|z| *z /= norm);
                basis.push(v);
                used[cand] = true;
            }
        }
    }
    if basis.len() != dimension {
        return Err(invalid("unitary completion did not span the space"));
    }
    ComplexMatrix::from_columns(&basis)
}
