use super::{compare_to_oracle, pad_square, Check, EigenResult, LabeledDataset, PipelineOutcome};
use super::{PENCIL_ANGLE_TOL, PENCIL_VALUE_TOL, SCATTER_TOL};
use crate::applications::pca::scatter_total_encoding;
use crate::block_encoding::{
    linear_combination, make_state_prep_pair, pad_ancillas, product, rescale, BlockEncoding,
    PhaseConvention,
};
use crate::centering::padded_centering_encoding;
use crate::data_encoding::matrix_encoding;
use crate::error::Result;
use crate::linalg::spectral_norm;
use crate::matrix::{embed_into, ONE};
use crate::reference;

/// Encoding of `S_w = Σ_k X^{(k)} C^{(k)} X^{(k)†}`.
///
/// Each class's data is zero-padded to the same square dimension as the
/// full data set, its product is rescaled to `f = max_k ‖X^{(k)}‖_F²`, and
/// the terms are summed by a uniform LCU, giving `alpha = c f`.
pub fn scatter_within_encoding(ds: &LabeledDataset) -> Result<BlockEncoding> {
    let dim = pad_square(ds.x(), 2).rows();
    let terms = (0..ds.classes())
        .map(|k| {
            let xk = embed_into(&ds.class_data(k), dim);
            let data = matrix_encoding(&xk)?;
            let c = padded_centering_encoding(ds.partition().sizes()[k], dim)?;
            product(&data, &product(&c, &data.adjoint())?)
        })
        .collect::<Result<Vec<_>>>()?;
    let f = terms.iter().map(BlockEncoding::alpha).fold(0.0, f64::max);
    let terms = terms
        .iter()
        .map(|t| {
            if t.alpha() < f {
                rescale(t, f)
            } else {
                Ok(t.clone())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let a = terms.iter().map(BlockEncoding::ancillas).max().unwrap_or(0);
    let terms = terms
        .iter()
        .map(|t| pad_ancillas(t, a - t.ancillas()))
        .collect::<Result<Vec<_>>>()?;
    let pair = make_state_prep_pair(&vec![ONE; terms.len()], PhaseConvention::FoldIntoSelect)?;
    linear_combination(&pair, &terms, f)
}

/// Top-`d` discriminant directions: the pencil `S_t v = λ S_w v`.
pub fn lda(ds: &LabeledDataset, d: usize) -> Result<PipelineOutcome<EigenResult>> {
    let p = ds.features();
    let st = scatter_total_encoding(ds.x())?;
    let sw = scatter_within_encoding(ds)?;
    let mut result = super::generalized_eig(&st, &sw, d)?;
    result.restrict(&(0..p).collect::<Vec<_>>());

    let (c, labels) = (ds.classes(), ds.labels());
    let st_ref = reference::scatter_total(ds.x());
    let sw_ref = reference::scatter_within(ds.x(), labels, c);
    let sb_ref = reference::scatter_between(ds.x(), labels, c);
    let st_blk = st.scaled_block().submatrix(0, 0, p, p);
    let sw_blk = sw.scaled_block().submatrix(0, 0, p, p);
    let sb_gap = spectral_norm(&(&(&st_blk - &sw_blk) - &sb_ref));
    let (value_gap, angle) = compare_to_oracle(&result, &st_ref, &sw_ref)?;
    let checks = vec![
        Check::new(
            "S_t block vs outer-product oracle",
            spectral_norm(&(&st_blk - &st_ref)),
            SCATTER_TOL,
        ),
        Check::new(
            "S_w block vs outer-product oracle",
            spectral_norm(&(&sw_blk - &sw_ref)),
            SCATTER_TOL,
        ),
        Check::new("S_t - S_w vs direct S_b", sb_gap, SCATTER_TOL),
        Check::new(
            "eigenvalues vs dense pencil oracle",
            value_gap,
            PENCIL_VALUE_TOL,
        ),
        Check::new("eigenspace principal angle", angle, PENCIL_ANGLE_TOL),
    ];
    Ok(PipelineOutcome::new(
        result,
        &[("S_t", &st), ("S_w", &sw)],
        checks,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ComplexMatrix;

    fn clusters() -> LabeledDataset {
        let x = ComplexMatrix::from_real_rows(&[
            [0.0, 0.2, -0.1, 0.1, 5.0, 5.2, 4.9, 5.1],
            [1.0, 0.7, 1.2, 0.9, 1.1, 0.8, 1.0, 1.3],
            [0.3, -0.2, 0.1, 0.0, 0.2, 0.1, -0.3, 0.4],
            [2.0, 2.1, 1.8, 2.2, 1.9, 2.3, 2.0, 1.7],
        ]);
        LabeledDataset::new(x, &[0, 0, 0, 0, 1, 1, 1, 1]).unwrap()
    }

    #[test]
    fn within_scatter_matches_oracle() {
        let ds = clusters();
        let sw = scatter_within_encoding(&ds).unwrap();
        let want = reference::scatter_within(ds.x(), ds.labels(), 2);
        assert!(spectral_norm(&(&sw.scaled_block().submatrix(0, 0, 4, 4) - &want)) < 1e-9);
        assert!(sw.provenance().audit().is_clean());
    }

    #[test]
    fn top_direction_separates_clusters() {
        let ds = clusters();
        let out = lda(&ds, 1).unwrap();
        assert!(out.passed(), "{:?}", out.checks);
        let w = &out.result.vectors[0];
        let proj: Vec<f64> = (0..8)
            .map(|i| {
                ds.x()
                    .column(i)
                    .iter()
                    .zip(w)
                    .map(|(a, b)| (a * b.conj()).re)
                    .sum()
            })
            .collect();
        let (lo, hi) = (
            proj[..4].iter().cloned().fold(f64::MIN, f64::max),
            proj[4..].iter().cloned().fold(f64::MAX, f64::min),
        );
        let (lo2, hi2) = (
            proj[..4].iter().cloned().fold(f64::MAX, f64::min),
            proj[4..].iter().cloned().fold(f64::MIN, f64::max),
        );
        assert!(lo < hi || hi2 < lo2);
    }

    #[test]
    fn identical_classes_have_no_signal() {
        let x = ComplexMatrix::from_real_rows(&[[1.0, 2.0, 1.0, 2.0], [0.0, 1.0, 0.0, 1.0]]);
        let ds = LabeledDataset::new(x, &[0, 0, 1, 1]).unwrap();
        let sb = reference::scatter_between(ds.x(), ds.labels(), 2);
        assert!(sb.max_abs() < 1e-15);
    }
}
