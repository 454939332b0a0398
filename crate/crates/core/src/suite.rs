//! The verification battery behind `blocklab suite`.
//!
//! Every criterion draws its inputs from a ChaCha stream seeded by the
//! suite seed and the criterion number, so results are reproducible and
//! independent of evaluation order.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::applications::{
    cca, dcca, dcca_encodings, lda, ols, pca, scatter_total_encoding, scatter_within_encoding,
    LabeledDataset,
};
use crate::block_encoding::{BlockEncoding, MetadataAudit};
use crate::centering::{
    build_uc, centering_encoding, centering_matrix, masked_centering_encoding,
    ones_matrix_encoding, per_class_centering, ClassPartition,
};
use crate::data_encoding::{data_unitaries, hermitian_dilation, matrix_encoding};
use crate::datasets;
use crate::error::Result;
use crate::linalg::{eigh, spectral_norm};
use crate::matrix::{cap_qubits, unitarity_deviation, ComplexMatrix, C64, ONE};
use crate::mc::{classical_center, mc_encoding, CenteringMode};
use crate::reference;
use crate::spectral::check_walk_spectrum;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: String,
    pub name: String,
    pub pass: bool,
    pub instances: usize,
    pub measured: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub criteria: Vec<CriterionResult>,
    pub compositions: usize,
    pub passed: bool,
}

/// Wall-clock milliseconds per criterion, kept apart from the report so
/// the report stays deterministic.
pub type Timings = Vec<(String, f64)>;

struct Battery {
    seed: u64,
    audit: MetadataAudit,
    results: Vec<CriterionResult>,
    timings: Timings,
}

fn max(acc: &mut f64, v: f64) {
    if v.is_nan() || v > *acc {
        *acc = v;
    }
}

impl Battery {
    fn rng(&self, criterion: u64) -> rand_chacha::ChaCha8Rng {
        datasets::rng(self.seed.wrapping_mul(1_000_003).wrapping_add(criterion))
    }

    fn track(&mut self, be: &BlockEncoding) {
        self.audit.merge(be.provenance().audit());
    }

    #[allow(clippy::too_many_arguments)]
    fn record(
        &mut self,
        id: &str,
        name: &str,
        start: Instant,
        instances: usize,
        measured: f64,
        tolerance: f64,
        extra: bool,
    ) {
        self.timings
            .push((id.to_string(), start.elapsed().as_secs_f64() * 1e3));
        self.results.push(CriterionResult {
            id: id.to_string(),
            name: name.to_string(),
            pass: extra && measured <= tolerance,
            instances,
            measured,
            tolerance,
        });
    }

    fn ac1(&mut self) -> Result<()> {
        let t = Instant::now();
        let mut worst = 0.0;
        for n in [2, 4, 8, 16] {
            let be = centering_encoding(n)?;
            max(
                &mut worst,
                spectral_norm(&(&centering_matrix(n) - &be.scaled_block())),
            );
            let meta_ok = be.alpha() == 1.0 && be.ancillas() == 1 && be.epsilon() == 0.0;
            if !meta_ok {
                worst = f64::INFINITY;
            }
            self.track(&be);
        }
        self.record(
            "AC1",
            "centering encoding exactness",
            t,
            4,
            worst,
            1e-12,
            true,
        );
        Ok(())
    }

    fn ac2(&mut self) -> Result<()> {
        let t = Instant::now();
        let mut worst = 0.0;
        for k in 1..=4 {
            let n = 1usize << k;
            let u = build_uc(k)?;
            let closed = ComplexMatrix::from_fn(n, n, |r, c| {
                C64::new(2.0 / n as f64 - if r == c { 1.0 } else { 0.0 }, 0.0)
            });
            max(&mut worst, u.max_abs_diff(&closed)?);
            max(
                &mut worst,
                u.matmul(&u)?.max_abs_diff(&ComplexMatrix::identity(n))?,
            );
        }
        self.record(
            "AC2",
            "U_c closed form and involution",
            t,
            4,
            worst,
            1e-12,
            true,
        );
        Ok(())
    }

    fn ac3(&mut self) -> Result<()> {
        let t = Instant::now();
        let mut rng = self.rng(3);
        let (mut enc_gap, mut oracle_gap) = (0.0, 0.0);
        for i in 0..200 {
            let n = [2, 4, 8, 16][i % 4];
            let x = if i % 2 == 0 {
                datasets::random_real(&mut rng, n, n)
            } else {
                datasets::random_complex(&mut rng, n, n)
            };
            let c = centering_matrix(n);
            for mode in CenteringMode::ALL {
                let classical = classical_center(&x, mode)?;
                let product = match mode {
                    CenteringMode::Cx => c.matmul(&x)?,
                    CenteringMode::Xc => x.matmul(&c)?,
                    CenteringMode::Cxc => c.matmul(&x)?.matmul(&c)?,
                };
                max(&mut oracle_gap, classical.max_abs_diff(&product)?);
                let be = mc_encoding(&x, mode)?;
                max(
                    &mut enc_gap,
                    spectral_norm(&(&be.scaled_block() - &classical)),
                );
                self.track(&be);
            }
        }
        let ok = oracle_gap <= 1e-12;
        self.record(
            "AC3",
            "mean-centering pipeline vs classical centering",
            t,
            200,
            enc_gap,
            1e-8,
            ok,
        );
        Ok(())
    }

    fn ac5(&mut self) -> Result<()> {
        let t = Instant::now();
        let mut rng = self.rng(5);
        let (mut block_gap, mut alpha_gap, mut unitary_gap) = (0.0, 0.0, 0.0);
        for i in 0..50 {
            let n = [2, 4, 8][i % 3];
            let x = datasets::random_complex(&mut rng, n, n);
            let be = matrix_encoding(&x)?;
            max(&mut alpha_gap, (be.alpha() - x.frobenius_norm()).abs());
            max(&mut block_gap, spectral_norm(&(&be.scaled_block() - &x)));
            let (u_m, u_n) = data_unitaries(&x, cap_qubits())?;
            max(
                &mut unitary_gap,
                unitarity_deviation(&u_m.to_matrix(cap_qubits())?)?,
            );
            max(
                &mut unitary_gap,
                unitarity_deviation(&u_n.to_matrix(cap_qubits())?)?,
            );
            self.track(&be);
        }
        let ok = alpha_gap <= 1e-12 && unitary_gap <= 1e-10;
        self.record("AC5", "data-matrix encoding", t, 50, block_gap, 1e-9, ok);
        Ok(())
    }

    fn ac6(&mut self) -> Result<()> {
        let t = Instant::now();
        let mut rng = self.rng(6);
        let mut worst = 0.0;
        for i in 0..50 {
            let c = if i % 2 == 0 { 2 } else { 4 };
            let labels = datasets::balanced_labels(&mut rng, 8, c);
            let x = datasets::labeled_data(&mut rng, 4, &labels, 1.0);
            let ds = LabeledDataset::new(x.clone(), &labels)?;
            let st = scatter_total_encoding(&x)?;
            let sw = scatter_within_encoding(&ds)?;
            let st_blk = st.scaled_block().submatrix(0, 0, 4, 4);
            let sw_blk = sw.scaled_block().submatrix(0, 0, 4, 4);
            let xcx = x.matmul(&centering_matrix(8))?.matmul(&x.adjoint())?;
            let sb = reference::scatter_between(&x, ds.labels(), c);
            max(&mut worst, spectral_norm(&(&st_blk - &xcx)));
            max(&mut worst, spectral_norm(&(&st_blk - &(&sb + &sw_blk))));
            self.track(&st);
            self.track(&sw);
        }
        self.record("AC6", "scatter identities", t, 50, worst, 1e-7, true);
        Ok(())
    }

    fn ac7(&mut self) -> Result<()> {
        let t = Instant::now();
        let mut rng = self.rng(7);
        let mut walk_gap = 0.0;
        let mut walks: Vec<BlockEncoding> = vec![
            centering_encoding(2)?,
            centering_encoding(4)?,
            centering_encoding(8)?,
            ones_matrix_encoding(4)?,
        ];
        for n in [2, 2, 4, 4] {
            walks.push(hermitian_dilation(&matrix_encoding(
                &datasets::random_complex(&mut rng, n, n),
            )?)?);
        }
        walks.push(scatter_total_encoding(&datasets::random_real(
            &mut rng, 2, 2,
        ))?);
        walks.push(scatter_total_encoding(&datasets::random_real(
            &mut rng, 4, 4,
        ))?);
        for be in &walks {
            let chk = check_walk_spectrum(be)?;
            max(
                &mut walk_gap,
                chk.max_pair_error.max(chk.max_remainder_error),
            );
        }
        let mut pca_ok = true;
        let mut pca_ratio = 0.0;
        for _ in 0..20 {
            let x = datasets::random_real(&mut rng, 8, 8);
            let out = pca(&x, 2, 8)?;
            pca_ok &= out.passed();
            let check = &out.checks[1];
            max(&mut pca_ratio, check.measured / check.tolerance);
            self.audit.merge(out.audit);
        }
        let instances = walks.len() + 20;
        self.record(
            "AC7",
            "walk eigenphases and phase-estimated PCA",
            t,
            instances,
            walk_gap,
            1e-8,
            pca_ok && pca_ratio <= 1.0,
        );
        Ok(())
    }

    fn ac8(&mut self) -> Result<()> {
        let t = Instant::now();
        let mut rng = self.rng(8);
        let mut all_pass = true;
        let (mut value_gap, mut angle) = (0.0f64, 0.0f64);
        let mut absorb = |checks: &[crate::applications::Check],
                          audit: MetadataAudit,
                          pass: bool,
                          me: &mut Self| {
            all_pass &= pass;
            for c in checks {
                if c.name.starts_with("eigenvalues") {
                    value_gap = value_gap.max(c.measured);
                }
                if c.name.starts_with("eigenspace") {
                    angle = angle.max(c.measured);
                }
            }
            me.audit.merge(audit);
        };
        for i in 0..50 {
            let c = if i % 2 == 0 { 2 } else { 4 };
            let labels = datasets::balanced_labels(&mut rng, 8, c);
            let x = datasets::labeled_data(&mut rng, 4, &labels, 1.0);
            let out = lda(&LabeledDataset::new(x, &labels)?, 2)?;
            let pass = out.passed();
            absorb(&out.checks, out.audit, pass, self);
        }
        for _ in 0..50 {
            let x = datasets::random_real(&mut rng, 4, 8);
            let y = datasets::random_real(&mut rng, 4, 8);
            let out = cca(&x, &y, 2)?;
            let pass = out.passed();
            absorb(&out.checks, out.audit, pass, self);
        }
        for i in 0..50 {
            let c = if i % 2 == 0 { 2 } else { 4 };
            let labels = datasets::balanced_labels(&mut rng, 8, c);
            let x = datasets::labeled_data(&mut rng, 4, &labels, 1.0);
            let y = datasets::labeled_data(&mut rng, 4, &labels, 1.0);
            let out = dcca(
                &LabeledDataset::new(x, &labels)?,
                &LabeledDataset::new(y, &labels)?,
                c.min(3) - 1,
            )?;
            let pass = out.passed();
            absorb(&out.checks, out.audit, pass, self);
        }
        let labels = [0i64; 4];
        let dx = LabeledDataset::new(datasets::random_real(&mut rng, 2, 4), &labels)?;
        let dy = LabeledDataset::new(datasets::random_real(&mut rng, 2, 4), &labels)?;
        let enc = dcca_encodings(&dx, &dy)?;
        let hd = enc.h_x.scaled_block().max_abs();
        self.track(&enc.h_x);
        let ok = all_pass && angle <= 1e-5 && hd <= 1e-12;
        self.record(
            "AC8",
            "LDA, CCA and DCCA pencils vs dense oracle",
            t,
            151,
            value_gap,
            1e-6,
            ok,
        );
        Ok(())
    }

    fn ac9(&mut self) -> Result<()> {
        let t = Instant::now();
        let mut rng = self.rng(9);
        let (mut gap, mut deficient, mut all_pass) = (0.0, 0, true);
        for i in 0..50 {
            let x = datasets::design(&mut rng, 8, 4, i % 5 == 0);
            let y = datasets::random_vector(&mut rng, 8);
            let out = ols(&x, &y)?;
            all_pass &= out.passed();
            deficient += out.result.rank_deficient as usize;
            let d = out
                .result
                .beta_hat
                .iter()
                .zip(&out.result.beta_closed_form)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            max(&mut gap, d);
            self.audit.merge(out.audit);
        }
        self.record(
            "AC9",
            "least squares through the encoded design",
            t,
            50,
            gap,
            1e-8,
            all_pass && deficient >= 5,
        );
        Ok(())
    }

    fn ac10(&mut self) -> Result<()> {
        let t = Instant::now();
        let mut blocks: Vec<(ComplexMatrix, Vec<bool>)> = Vec::new();
        for n in [2, 4, 8, 16] {
            blocks.push((centering_encoding(n)?.scaled_block(), vec![true; n]));
        }
        for sizes in [vec![1, 3], vec![2, 2], vec![3, 5], vec![6, 1, 4]] {
            let part = ClassPartition::new(sizes.clone())?;
            for (be, &n) in per_class_centering(&part)?.iter().zip(&sizes) {
                let dim = be.system_dim();
                blocks.push((be.scaled_block(), (0..dim).map(|i| i < n).collect()));
            }
        }
        let mask = vec![true, false, true, true, false, true, false, true];
        blocks.push((masked_centering_encoding(&mask)?.scaled_block(), mask));
        let mut worst = 0.0;
        for (p, mask) in &blocks {
            max(&mut worst, p.matmul(p)?.max_abs_diff(p)?);
            max(&mut worst, p.max_abs_diff(&p.transpose())?);
            let e: Vec<C64> = mask
                .iter()
                .map(|&b| if b { ONE } else { C64::new(0.0, 0.0) })
                .collect();
            max(
                &mut worst,
                p.mat_vec(&e).iter().map(|z| z.norm()).fold(0.0, f64::max),
            );
            let m = mask.iter().filter(|&&b| b).count();
            let ev = eigh(p, 1e-12)?.values;
            for (k, l) in ev.iter().enumerate() {
                let want = if k + 1 < m { 1.0 } else { 0.0 };
                max(&mut worst, (l - want).abs());
            }
        }
        self.record(
            "AC10",
            "centering projector properties",
            t,
            blocks.len(),
            worst,
            1e-10,
            true,
        );
        Ok(())
    }

    fn ac4(&mut self) {
        let t = Instant::now();
        let count = self.audit.compositions();
        let violations = self.audit.violations.len();
        self.record(
            "AC4",
            "composition metadata laws",
            t,
            count,
            violations as f64,
            0.0,
            count >= 500,
        );
    }
}

/// Runs every criterion. Returns the report and per-criterion timings.
pub fn run_suite(seed: u64) -> Result<(SuiteReport, Timings)> {
    let mut b = Battery {
        seed,
        audit: MetadataAudit::default(),
        results: vec![],
        timings: vec![],
    };
    b.ac1()?;
    b.ac2()?;
    b.ac3()?;
    b.ac5()?;
    b.ac6()?;
    b.ac7()?;
    b.ac8()?;
    b.ac9()?;
    b.ac10()?;
    b.ac4();
    let order = |id: &str| id[2..].parse::<usize>().unwrap_or(0);
    b.results.sort_by_key(|r| order(&r.id));
    b.timings.sort_by_key(|(id, _)| order(id));
    let passed = b.results.iter().all(|r| r.pass);
    Ok((
        SuiteReport {
            seed,
            criteria: b.results,
            compositions: b.audit.compositions(),
            passed,
        },
        b.timings,
    ))
}
