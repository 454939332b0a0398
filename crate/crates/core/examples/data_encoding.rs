//! Encoding an arbitrary complex matrix through two state-preparation
//! unitaries; alpha is the Frobenius norm.

use blocklab::data_encoding::{build_norm_tree, data_unitaries, matrix_encoding};
use blocklab::datasets;
use blocklab::matrix::{cap_qubits, unitarity_deviation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = datasets::rng(1);
    let x = datasets::random_complex(&mut rng, 4, 4);
    let tree = build_norm_tree(&x)?;
    println!("row norms: {:.4?}", tree.row_norms());

    let be = matrix_encoding(&x)?;
    println!("alpha={:.6} |X|_F={:.6}", be.alpha(), x.frobenius_norm());
    println!("block error: {:.2e}", be.scaled_block().max_abs_diff(&x)?);

    let (u_m, u_n) = data_unitaries(&x, cap_qubits())?;
    println!(
        "U_M unitarity: {:.1e}",
        unitarity_deviation(&u_m.to_matrix(cap_qubits())?)?
    );
    println!(
        "U_N unitarity: {:.1e}",
        unitarity_deviation(&u_n.to_matrix(cap_qubits())?)?
    );
    Ok(())
}
