//! Acceptance battery: one PASS/FAIL line per criterion.
//!
//! Every criterion is measured here against the oracles in `common`, not
//! through the crate's own `suite` module; only AC11 drives the binary.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use blocklab::applications::{
    cca, cca_encodings, dcca, dcca_encodings, lda, ols, pca, scatter_total_encoding,
    scatter_within_encoding, LabeledDataset,
};
use blocklab::block_encoding::BlockEncoding;
use blocklab::centering::{
    build_uc, centering_encoding, masked_centering_encoding, ones_matrix_encoding,
    per_class_centering, ClassPartition,
};
use blocklab::data_encoding::{data_unitaries, hermitian_dilation, matrix_encoding};
use blocklab::datasets;
use blocklab::matrix::{cap_qubits, ComplexMatrix, C64};
use blocklab::mc::{classical_center, mc_encoding, CenteringMode};
use blocklab::spectral::walk_operator;
use common::*;
use nalgebra::{DMatrix, SymmetricEigen};

struct Outcome {
    pass: bool,
    measured: f64,
    tolerance: f64,
    instances: usize,
    note: String,
}

struct Battery {
    laws: LawCheck,
    failures: usize,
}

impl Battery {
    fn run(
        &mut self,
        id: &str,
        name: &str,
        budget: Duration,
        f: impl FnOnce(&mut Self) -> Outcome,
    ) {
        let t = Instant::now();
        let out = f(self);
        let took = t.elapsed();
        let pass = out.pass && took <= budget;
        if !pass {
            self.failures += 1;
        }
        println!(
            "{id:<5} {}  {name:<48} measured {:>10.3e}  tol {:>8.1e}  n={:<4} {:>7.2}s{}",
            if pass { "PASS" } else { "FAIL" },
            out.measured,
            out.tolerance,
            out.instances,
            took.as_secs_f64(),
            if out.note.is_empty() {
                String::new()
            } else {
                format!("  ({})", out.note)
            }
        );
    }

    fn track(&mut self, be: &BlockEncoding) {
        self.laws.visit(be.provenance());
    }
}

fn outcome(measured: f64, tolerance: f64, instances: usize, extra: bool, note: String) -> Outcome {
    Outcome {
        pass: extra && measured <= tolerance,
        measured,
        tolerance,
        instances,
        note,
    }
}

/// Eigenvalues of a Hermitian matrix through its real symmetric embedding
/// `[[Re, -Im], [Im, Re]]`, which doubles every eigenvalue; one copy of
/// each is returned, ascending.
fn hermitian_eigenvalues(h: &ComplexMatrix) -> Vec<f64> {
    let n = h.rows();
    let emb = DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let z = h[(r % n, c % n)];
        match (r < n, c < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let mut ev: Vec<f64> = SymmetricEigen::new(emb)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev.into_iter().step_by(2).collect()
}

fn mode_name(m: CenteringMode) -> &'static str {
    match m {
        CenteringMode::Cx => "cx",
        CenteringMode::Xc => "xc",
        CenteringMode::Cxc => "cxc",
    }
}

fn ac1(b: &mut Battery) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut meta = true;
    for n in [2, 4, 8, 16] {
        let be = centering_encoding(n).unwrap();
        worst = worst.max(fro_dist(&be.scaled_block(), &centering(n)));
        meta &= be.alpha() == 1.0 && be.ancillas() == 1 && be.epsilon() == 0.0;
        b.track(&be);
    }
    outcome(
        worst,
        1e-12,
        4,
        meta,
        if meta {
            String::new()
        } else {
            "metadata is not (1, 1, 0)".into()
        },
    )
}

fn ac2(_: &mut Battery) -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 1..=4 {
        let n = 1usize << k;
        let u = build_uc(k).unwrap();
        let want = ComplexMatrix::from_fn(n, n, |i, j| {
            C64::new(2.0 / n as f64 - if i == j { 1.0 } else { 0.0 }, 0.0)
        });
        worst = worst.max(u.max_abs_diff(&want).unwrap());
        worst = worst.max(
            matmul(&u, &u)
                .max_abs_diff(&ComplexMatrix::identity(n))
                .unwrap(),
        );
    }
    outcome(
        worst,
        1e-12,
        4,
        true,
        "closed form (2/n)ee^T - I and U_c^2 = I".into(),
    )
}

fn ac3(b: &mut Battery) -> Outcome {
    let mut rng = datasets::rng(0xAC03);
    let (mut enc, mut oracles) = (0.0f64, 0.0f64);
    for i in 0..200 {
        let n = [2, 4, 8, 16][i % 4];
        let x = if i % 2 == 0 {
            datasets::random_real(&mut rng, n, n)
        } else {
            datasets::random_complex(&mut rng, n, n)
        };
        let c = centering(n);
        for mode in CenteringMode::ALL {
            let entrywise = center_entrywise(&x, mode_name(mode));
            let product = match mode {
                CenteringMode::Cx => matmul(&c, &x),
                CenteringMode::Xc => matmul(&x, &c),
                CenteringMode::Cxc => matmul(&matmul(&c, &x), &c),
            };
            oracles = oracles.max(entrywise.max_abs_diff(&product).unwrap());
            oracles = oracles.max(
                classical_center(&x, mode)
                    .unwrap()
                    .max_abs_diff(&entrywise)
                    .unwrap(),
            );
            let be = mc_encoding(&x, mode).unwrap();
            enc = enc.max(fro_dist(&be.scaled_block(), &entrywise));
            b.track(&be);
        }
    }
    let ok = oracles <= 1e-12;
    outcome(
        enc,
        1e-8,
        200,
        ok,
        format!("entrywise vs C-product oracle {oracles:.1e}"),
    )
}

fn ac5(b: &mut Battery) -> Outcome {
    let mut rng = datasets::rng(0xAC05);
    let (mut block, mut alpha, mut unitary) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..50 {
        let n = [2, 4, 8][i % 3];
        let x = datasets::random_complex(&mut rng, n, n);
        let fro = fro_dist(&x, &ComplexMatrix::zeros(n, n));
        let be = matrix_encoding(&x).unwrap();
        alpha = alpha.max((be.alpha() - fro).abs());
        block = block.max(fro_dist(&be.scaled_block(), &x));
        let (u_m, u_n) = data_unitaries(&x, cap_qubits()).unwrap();
        unitary = unitary.max(unitarity(&u_m.to_matrix(cap_qubits()).unwrap()));
        unitary = unitary.max(unitarity(&u_n.to_matrix(cap_qubits()).unwrap()));
        b.track(&be);
    }
    let ok = alpha <= 1e-12 && unitary <= 1e-10;
    outcome(
        block,
        1e-9,
        50,
        ok,
        format!("alpha gap {alpha:.1e}, unitarity {unitary:.1e}"),
    )
}

fn ac6(b: &mut Battery) -> Outcome {
    let mut rng = datasets::rng(0xAC06);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let c = if i % 2 == 0 { 2 } else { 4 };
        let labels = datasets::balanced_labels(&mut rng, 8, c);
        let x = datasets::labeled_data(&mut rng, 4, &labels, 1.0);
        let ds = LabeledDataset::new(x.clone(), &labels).unwrap();
        let st = scatter_total_encoding(&x).unwrap();
        let sw = scatter_within_encoding(&ds).unwrap();
        let st_blk = st.scaled_block().submatrix(0, 0, 4, 4);
        let sw_blk = sw.scaled_block().submatrix(0, 0, 4, 4);
        let xcx = matmul(&matmul(&x, &centering(8)), &x.adjoint());
        let xr = real(&x);
        let sb = complex(&scatter_between(&xr, &labels));
        let sw_ref = complex(&scatter_within(&xr, &labels));
        worst = worst.max(fro_dist(&st_blk, &xcx));
        worst = worst.max(fro_dist(&st_blk, &(&sb + &sw_blk)));
        worst = worst.max(fro_dist(&sw_blk, &sw_ref));
        b.track(&st);
        b.track(&sw);
    }
    outcome(worst, 1e-7, 50, true, String::new())
}

/// Largest error between the real parts of the walk eigenvalues and the
/// predicted `λ_j / α` pairs, with every unmatched value required to be ±1.
fn walk_error(be: &BlockEncoding) -> f64 {
    let w = walk_operator(be).unwrap();
    let herm = ComplexMatrix::from_fn(w.rows(), w.cols(), |r, c| {
        (w[(r, c)] + w[(c, r)].conj()) * 0.5
    });
    let mut cosines = hermitian_eigenvalues(&herm);
    let expected: Vec<f64> = hermitian_eigenvalues(&be.scaled_block())
        .iter()
        .map(|l| l / be.alpha())
        .filter(|c| c.abs() < 1.0 - 1e-9)
        .collect();
    let mut worst: f64 = 0.0;
    for c in expected.iter().flat_map(|c| [*c, *c]) {
        let (k, err) = cosines
            .iter()
            .enumerate()
            .map(|(k, v)| (k, (v - c).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        worst = worst.max(err);
        cosines.remove(k);
    }
    for v in cosines {
        worst = worst.max((v.abs() - 1.0).abs());
    }
    worst
}

fn ac7(b: &mut Battery) -> Outcome {
    let mut rng = datasets::rng(0xAC07);
    let mut walks = vec![
        centering_encoding(2).unwrap(),
        centering_encoding(4).unwrap(),
        centering_encoding(8).unwrap(),
        ones_matrix_encoding(4).unwrap(),
    ];
    for n in [2, 2, 4, 4] {
        walks.push(
            hermitian_dilation(
                &matrix_encoding(&datasets::random_complex(&mut rng, n, n)).unwrap(),
            )
            .unwrap(),
        );
    }
    walks.push(scatter_total_encoding(&datasets::random_real(&mut rng, 2, 2)).unwrap());
    walks.push(scatter_total_encoding(&datasets::random_real(&mut rng, 4, 4)).unwrap());
    let mut walk: f64 = 0.0;
    for be in &walks {
        assert!(be.total_qubits() <= 10);
        walk = walk.max(walk_error(be));
    }
    let mut worst_ratio: f64 = 0.0;
    for _ in 0..20 {
        let x = datasets::random_real(&mut rng, 8, 8);
        let xr = real(&x);
        let bound = xr.norm_squared() * 2f64.powi(-8);
        let mut oracle: Vec<f64> = SymmetricEigen::new(scatter_total(&xr))
            .eigenvalues
            .iter()
            .copied()
            .collect();
        oracle.sort_by(|a, b| b.total_cmp(a));
        let out = pca(&x, 2, 8).unwrap();
        for (got, want) in out.result.eigen.values.iter().zip(&oracle) {
            worst_ratio = worst_ratio.max((got - want).abs() / bound);
        }
        b.track(&scatter_total_encoding(&x).unwrap());
    }
    let ok = worst_ratio <= 1.0;
    let note = format!("PCA error / (|X|_F^2 2^-8) = {worst_ratio:.3}");
    outcome(walk, 1e-8, walks.len() + 20, ok, note)
}

fn ac8(b: &mut Battery) -> Outcome {
    let mut rng = datasets::rng(0xAC08);
    let (mut values, mut angle) = (0.0f64, 0.0f64);
    let mut compare = |got_v: &[f64], got_w: &[Vec<C64>], a: &DMatrix<f64>, bm: &DMatrix<f64>| {
        let (ov, ow) = definite_pencil(a, bm);
        for (g, o) in got_v.iter().zip(&ov) {
            values = values.max((g - o).abs());
        }
        angle = angle.max(eigenspace_angle(got_v, got_w, &ov, &ow, 1e-6));
    };
    for i in 0..50 {
        let c = if i % 2 == 0 { 2 } else { 4 };
        let labels = datasets::balanced_labels(&mut rng, 8, c);
        let x = datasets::labeled_data(&mut rng, 4, &labels, 1.0);
        let xr = real(&x);
        let ds = LabeledDataset::new(x.clone(), &labels).unwrap();
        let out = lda(&ds, 2).unwrap();
        compare(
            &out.result.values,
            &out.result.vectors,
            &scatter_total(&xr),
            &scatter_within(&xr, &labels),
        );
        b.track(&scatter_total_encoding(&x).unwrap());
        b.track(&scatter_within_encoding(&ds).unwrap());
    }
    for _ in 0..50 {
        let x = datasets::random_real(&mut rng, 4, 8);
        let y = datasets::random_real(&mut rng, 4, 8);
        let (xr, yr) = (real(&x), real(&y));
        let k = centered(&xr) * centered(&yr).transpose();
        let (a, bm) = cca_pencil(&k, &scatter_total(&xr), &scatter_total(&yr));
        let out = cca(&x, &y, 2).unwrap();
        compare(&out.result.values, &out.result.vectors, &a, &bm);
        let enc = cca_encodings(&x, &y).unwrap();
        b.track(&enc.h_x);
        b.track(&enc.h_y);
    }
    for i in 0..50 {
        let c = if i % 2 == 0 { 2 } else { 4 };
        let labels = datasets::balanced_labels(&mut rng, 8, c);
        let x = datasets::labeled_data(&mut rng, 4, &labels, 1.0);
        let y = datasets::labeled_data(&mut rng, 4, &labels, 1.0);
        let (xr, yr) = (real(&x), real(&y));
        let (a, bm) = cca_pencil(
            &dcca_cross(&xr, &yr, &labels),
            &scatter_total(&xr),
            &scatter_total(&yr),
        );
        let (dx, dy) = (
            LabeledDataset::new(x, &labels).unwrap(),
            LabeledDataset::new(y, &labels).unwrap(),
        );
        let out = dcca(&dx, &dy, c - 1 - usize::from(c == 4)).unwrap();
        compare(&out.result.values, &out.result.vectors, &a, &bm);
        let enc = dcca_encodings(&dx, &dy).unwrap();
        b.track(&enc.h_x);
    }
    let single = [0i64; 4];
    let dx = LabeledDataset::new(datasets::random_real(&mut rng, 2, 4), &single).unwrap();
    let dy = LabeledDataset::new(datasets::random_real(&mut rng, 2, 4), &single).unwrap();
    let hd = dcca_encodings(&dx, &dy)
        .unwrap()
        .h_x
        .scaled_block()
        .max_abs();
    let ok = angle <= 1e-5 && hd <= 1e-12;
    let note = format!("max angle {angle:.1e}, single-class |H_d| {hd:.1e}");
    outcome(values, 1e-6, 151, ok, note)
}

fn ac9(b: &mut Battery) -> Outcome {
    let mut rng = datasets::rng(0xAC09);
    let (mut gap, mut deficient, mut flags) = (0.0f64, 0, true);
    for i in 0..50 {
        let is_def = i % 5 == 0;
        let x = datasets::design(&mut rng, 8, 4, is_def);
        let y = datasets::random_vector(&mut rng, 8);
        let out = ols(&x, &y).unwrap();
        let want = ols_oracle(&real(&x), &y, is_def);
        for (g, w) in out.result.beta_hat.iter().zip(&want) {
            gap = gap.max((g - w).abs());
        }
        deficient += usize::from(is_def);
        flags &= out.result.rank_deficient == is_def;
        let xp = blocklab::matrix::embed_into(&x, 8);
        b.track(
            &blocklab::block_encoding::product(
                &blocklab::centering::padded_centering_encoding(8, 8).unwrap(),
                &matrix_encoding(&xp).unwrap(),
            )
            .unwrap(),
        );
    }
    let ok = deficient >= 5 && flags;
    outcome(
        gap,
        1e-8,
        50,
        ok,
        format!("{deficient} rank-deficient designs"),
    )
}

fn ac10(_: &mut Battery) -> Outcome {
    let mut blocks: Vec<(ComplexMatrix, Vec<bool>)> = Vec::new();
    for n in [2, 4, 8, 16] {
        blocks.push((centering_encoding(n).unwrap().scaled_block(), vec![true; n]));
    }
    for sizes in [
        vec![1, 3],
        vec![2, 2],
        vec![3, 5],
        vec![6, 1, 4],
        vec![2, 2, 2, 2],
    ] {
        let part = ClassPartition::new(sizes.clone()).unwrap();
        for (be, &n) in per_class_centering(&part).unwrap().iter().zip(&sizes) {
            let dim = be.system_dim();
            blocks.push((be.scaled_block(), (0..dim).map(|i| i < n).collect()));
        }
    }
    for mask in [
        vec![true, false, true, true, false, true, false, true],
        vec![false, true, true, false],
    ] {
        blocks.push((
            masked_centering_encoding(&mask).unwrap().scaled_block(),
            mask,
        ));
    }
    let mut worst: f64 = 0.0;
    for (p, mask) in &blocks {
        let pr = real(p);
        worst = worst.max((&pr * &pr - &pr).abs().max());
        worst = worst.max((&pr - pr.transpose()).abs().max());
        let e = nalgebra::DVector::from_iterator(
            mask.len(),
            mask.iter().map(|&m| f64::from(u8::from(m))),
        );
        worst = worst.max((&pr * e).abs().max());
        let m = mask.iter().filter(|&&b| b).count();
        let mut ev: Vec<f64> = SymmetricEigen::new(pr.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        for (k, l) in ev.iter().enumerate() {
            worst = worst.max((l - if k + 1 < m { 1.0 } else { 0.0 }).abs());
        }
    }
    outcome(
        worst,
        1e-10,
        blocks.len(),
        true,
        "P^2 = P, P = P^T, Pe = 0, spectrum {0, 1^(m-1)}".into(),
    )
}

fn ac11(_: &mut Battery) -> Outcome {
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_blocklab"))
            .args(["suite", "--seed", "42"])
            .output()
            .expect("binary runs");
        let mut doc: serde_json::Value =
            serde_json::from_slice(&out.stdout).expect("suite prints JSON");
        doc.as_object_mut().unwrap().remove("timestamp");
        (out.status.code(), serde_json::to_string(&doc).unwrap())
    };
    let (first, second) = (run(), run());
    let same = first.1 == second.1;
    let ok = same && first.0 == Some(0) && second.0 == Some(0);
    let note = format!(
        "exit codes {:?}/{:?}, identical = {same}",
        first.0, second.0
    );
    outcome(if ok { 0.0 } else { 1.0 }, 0.0, 2, ok, note)
}

fn main() {
    let mut b = Battery {
        laws: LawCheck::default(),
        failures: 0,
    };
    let s = Duration::from_secs;
    b.run("AC1", "centering encoding exactness", s(1), ac1);
    b.run("AC2", "U_c identity", s(1), ac2);
    b.run("AC3", "mean-centering pipeline", s(30), ac3);
    b.run("AC5", "data-matrix encoding", s(10), ac5);
    b.run("AC6", "scatter identities", s(20), ac6);
    b.run("AC7", "qubitization walk and QPE", s(60), ac7);
    b.run("AC8", "LDA / CCA / DCCA pencils", s(60), ac8);
    b.run("AC9", "OLS through the encoded design", s(10), ac9);
    b.run("AC10", "centering projector properties", s(1), ac10);
    b.run("AC4", "composition bookkeeping", s(1), |b| {
        let count = b.laws.products + b.laws.lcus;
        let note = format!("{} products, {} LCUs", b.laws.products, b.laws.lcus);
        outcome(b.laws.violations as f64, 0.0, count, count >= 500, note)
    });
    b.run("AC11", "CLI determinism", s(120), ac11);
    if b.failures > 0 {
        println!("{} criteria failed", b.failures);
        std::process::exit(1);
    }
}
