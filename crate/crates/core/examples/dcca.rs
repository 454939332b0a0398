//! Discriminant CCA: cross-covariance weighted by shared class membership.

use blocklab::applications::{dcca, dcca_encodings, LabeledDataset};
use blocklab::datasets;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = datasets::rng(17);
    let labels = datasets::balanced_labels(&mut rng, 8, 4);
    let x = LabeledDataset::new(datasets::labeled_data(&mut rng, 4, &labels, 1.0), &labels)?;
    let y = LabeledDataset::new(datasets::labeled_data(&mut rng, 4, &labels, 1.0), &labels)?;
    let enc = dcca_encodings(&x, &y)?;
    println!(
        "H_d: alpha={:.3} qubits={}",
        enc.h_x.alpha(),
        enc.h_x.total_qubits()
    );
    let out = dcca(&x, &y, 2)?;
    println!("values: {:.5?}", out.result.values);
    println!("pass: {}", out.passed());

    // One class: the class-weighted cross term vanishes.
    let one = [0i64; 4];
    let x1 = LabeledDataset::new(datasets::random_real(&mut rng, 2, 4), &one)?;
    let y1 = LabeledDataset::new(datasets::random_real(&mut rng, 2, 4), &one)?;
    println!(
        "single class |H_d|: {:.1e}",
        dcca_encodings(&x1, &y1)?.h_x.scaled_block().max_abs()
    );
    Ok(())
}
