//! Classical mean centering and its block-encoded counterparts `CX`, `XC`
//! and `CXC`.
//!
//! Storage convention: entry `(r, c)` of a data matrix is component `r` of
//! sample `c`, so samples are columns.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::block_encoding::{product, BlockEncoding};
use crate::centering::{centering_encoding, centering_matrix, padded_centering_encoding};
use crate::data_encoding::matrix_encoding;
use crate::error::{Error, Result};
use crate::matrix::{embed_into, ComplexMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CenteringMode {
    /// `C X`: every column sums to zero.
    Cx,
    /// `X C`: every row sums to zero.
    Xc,
    /// `C X C`.
    Cxc,
}

impl CenteringMode {
    pub const ALL: [CenteringMode; 3] = [CenteringMode::Cx, CenteringMode::Xc, CenteringMode::Cxc];
}

impl fmt::Display for CenteringMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CenteringMode::Cx => "cx",
            CenteringMode::Xc => "xc",
            CenteringMode::Cxc => "cxc",
        })
    }
}

impl FromStr for CenteringMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cx" => Ok(CenteringMode::Cx),
            "xc" => Ok(CenteringMode::Xc),
            "cxc" => Ok(CenteringMode::Cxc),
            other => Err(Error::Parse(format!("unknown centering mode {other:?}"))),
        }
    }
}

/// Per-sample means `u`, per-component means `v` and the grand mean.
#[derive(Clone, Debug, PartialEq)]
pub struct MeanVectors {
    pub u: Vec<C64>,
    pub v: Vec<C64>,
    pub xbar: C64,
}

pub fn mean_vectors(x: &ComplexMatrix) -> MeanVectors {
    let (r, c) = x.shape();
    let u = (0..c)
        .map(|j| (0..r).map(|i| x[(i, j)]).sum::<C64>() / r as f64)
        .collect();
    let v = (0..r)
        .map(|i| x.row(i).iter().sum::<C64>() / c as f64)
        .collect();
    let xbar = x.as_slice().iter().sum::<C64>() / (r * c) as f64;
    MeanVectors { u, v, xbar }
}

/// Subtracts means entrywise, then cross-checks against the product with
/// the centering matrix.
pub fn classical_center(x: &ComplexMatrix, mode: CenteringMode) -> Result<ComplexMatrix> {
    let MeanVectors { u, v, xbar } = mean_vectors(x);
    let (r, c) = x.shape();
    let out = ComplexMatrix::from_fn(r, c, |i, j| match mode {
        CenteringMode::Cx => x[(i, j)] - u[j],
        CenteringMode::Xc => x[(i, j)] - v[i],
        CenteringMode::Cxc => x[(i, j)] - u[j] - v[i] + xbar,
    });
    let via_product = match mode {
        CenteringMode::Cx => centering_matrix(r).matmul(x)?,
        CenteringMode::Xc => x.matmul(&centering_matrix(c))?,
        CenteringMode::Cxc => centering_matrix(r)
            .matmul(x)?
            .matmul(&centering_matrix(c))?,
    };
    let gap = out.max_abs_diff(&via_product)?;
    if gap > 1e-12 * x.max_abs().max(1.0) {
        return Err(Error::VerificationFailed(format!(
            "entrywise centering and the centering-matrix product differ by {gap:e}"
        )));
    }
    Ok(out)
}

/// Side length used to embed `x` for encoding.
pub fn padded_dim(x: &ComplexMatrix) -> usize {
    x.rows().max(x.cols()).next_power_of_two().max(2)
}

/// `x` zero-padded to [`padded_dim`].
pub fn padded(x: &ComplexMatrix) -> ComplexMatrix {
    embed_into(x, padded_dim(x))
}

/// Classical result the encoding reproduces: centering of the padded
/// matrix, with the centering matrix of the padded dimension.
pub fn padded_oracle(x: &ComplexMatrix, mode: CenteringMode) -> Result<ComplexMatrix> {
    classical_center(&padded(x), mode)
}

/// `(‖X‖_F, a_X + k, 0)`-encoding of the centered matrix, `k` the number of
/// centering factors. Non-power-of-two inputs are zero-padded first.
pub fn mc_encoding(x: &ComplexMatrix, mode: CenteringMode) -> Result<BlockEncoding> {
    let xp = padded(x);
    let data = matrix_encoding(&xp)?;
    let c = centering_encoding(xp.rows())?;
    match mode {
        CenteringMode::Cx => product(&c, &data),
        CenteringMode::Xc => product(&data, &c),
        CenteringMode::Cxc => product(&c, &product(&data, &c)?),
    }
}

/// Like [`mc_encoding`], but each centering factor acts only on the
/// occupied rows or columns, so the top-left `r x c` block of the result
/// is exactly `classical_center(x, mode)` for any shape.
pub fn mc_encoding_exact(x: &ComplexMatrix, mode: CenteringMode) -> Result<BlockEncoding> {
    let xp = padded(x);
    let dim = xp.rows();
    let data = matrix_encoding(&xp)?;
    let left = || padded_centering_encoding(x.rows(), dim);
    let right = || padded_centering_encoding(x.cols(), dim);
    match mode {
        CenteringMode::Cx => product(&left()?, &data),
        CenteringMode::Xc => product(&data, &right()?),
        CenteringMode::Cxc => product(&left()?, &product(&data, &right()?)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[[1.0, 2.0], [3.0, 4.0]])
    }

    #[test]
    fn classical_modes() {
        let cx = classical_center(&x(), CenteringMode::Cx).unwrap();
        assert_eq!(
            cx,
            ComplexMatrix::from_real_rows(&[[-1.0, -1.0], [1.0, 1.0]])
        );
        let xc = classical_center(&x(), CenteringMode::Xc).unwrap();
        assert_eq!(
            xc,
            ComplexMatrix::from_real_rows(&[[-0.5, 0.5], [-0.5, 0.5]])
        );
        let cxc = classical_center(&x(), CenteringMode::Cxc).unwrap();
        assert!(cxc.max_abs() < 1e-15);
    }

    #[test]
    fn means() {
        let m = mean_vectors(&x());
        assert_eq!(m.u, vec![C64::new(2.0, 0.0), C64::new(3.0, 0.0)]);
        assert_eq!(m.v, vec![C64::new(1.5, 0.0), C64::new(3.5, 0.0)]);
        assert_eq!(m.xbar, C64::new(2.5, 0.0));
    }

    #[test]
    fn encoded_modes_match_oracle() {
        for mode in CenteringMode::ALL {
            let be = mc_encoding(&x(), mode).unwrap();
            assert!((be.alpha() - 30f64.sqrt()).abs() < 1e-14);
            let want = classical_center(&x(), mode).unwrap();
            assert!(
                be.scaled_block().max_abs_diff(&want).unwrap() < 1e-12,
                "{mode}"
            );
        }
        assert_eq!(mc_encoding(&x(), CenteringMode::Cxc).unwrap().ancillas(), 3);
    }

    #[test]
    fn mode_round_trip() {
        for mode in CenteringMode::ALL {
            assert_eq!(mode.to_string().parse::<CenteringMode>().unwrap(), mode);
        }
        assert!("cc".parse::<CenteringMode>().is_err());
    }

    #[test]
    fn exact_variant_on_odd_shape() {
        let x = ComplexMatrix::from_real_rows(&[[1.0, 2.0, 4.0], [3.0, 5.0, -1.0]]);
        for mode in CenteringMode::ALL {
            let blk = mc_encoding_exact(&x, mode)
                .unwrap()
                .scaled_block()
                .submatrix(0, 0, 2, 3);
            let want = classical_center(&x, mode).unwrap();
            assert!(blk.max_abs_diff(&want).unwrap() < 1e-12, "{mode}");
        }
    }
}
