//! Unequal class sizes need more qubits than the default cap allows, so
//! this binary raises the cap before anything is built.

mod common;

use blocklab::applications::{dcca, dcca_encodings, LabeledDataset};
use blocklab::centering::{similarity_encoding, ClassPartition};
use blocklab::datasets;
use common::*;

#[test]
fn dcca_with_classes_of_two_and_four() {
    std::env::set_var("BLOCKLAB_CAP_QUBITS", "16");
    let labels = [0i64, 1, 1, 0, 1, 1];
    let mut rng = datasets::rng(7);
    let x = datasets::labeled_data(&mut rng, 2, &labels, 1.5);
    let y = datasets::labeled_data(&mut rng, 2, &labels, 1.5);
    let (xr, yr) = (real(&x), real(&y));

    let dx = LabeledDataset::new(x, &labels).unwrap();
    let dy = LabeledDataset::new(y, &labels).unwrap();
    let enc = dcca_encodings(&dx, &dy).unwrap();
    let cross = dcca_cross(&xr, &yr, &labels);
    let got = real(&enc.cross.scaled_block().submatrix(0, 0, 2, 2));
    assert!(
        (got - &cross).norm() <= 1e-9 * cross.norm(),
        "cross-covariance mismatch"
    );

    let (a, b) = cca_pencil(&cross, &scatter_total(&xr), &scatter_total(&yr));
    let (ov, ow) = definite_pencil(&a, &b);
    let out = dcca(&dx, &dy, 1).unwrap();
    assert!(
        (out.result.values[0] - ov[0]).abs() <= 1e-6,
        "{:?} vs {:?}",
        out.result.values,
        ov
    );
    assert!(eigenspace_angle(&out.result.values, &out.result.vectors, &ov, &ow, 1e-6) <= 1e-5);
}

#[test]
fn similarity_slots_for_uneven_partition() {
    std::env::set_var("BLOCKLAB_CAP_QUBITS", "16");
    let part = ClassPartition::new(vec![2, 4]).unwrap();
    let be = similarity_encoding(&part).unwrap();
    let got = be.scaled_block();
    let want = part.similarity_matrix();
    let slots = part.occupied_slots();
    for (a, &i) in slots.iter().enumerate() {
        for (b, &j) in slots.iter().enumerate() {
            assert!(
                (got[(i, j)] - want[(a, b)]).norm() < 1e-10,
                "E mismatch at ({i},{j})"
            );
        }
    }
}
