//! Centering a data matrix from the left, the right, or both sides.

use blocklab::matrix::ComplexMatrix;
use blocklab::mc::{classical_center, mc_encoding_exact, CenteringMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let x = ComplexMatrix::from_real_rows(&[[1.0, 4.0, 2.0], [2.0, 5.0, 0.0], [6.0, 0.0, 1.0]]);
    for mode in CenteringMode::ALL {
        let be = mc_encoding_exact(&x, mode)?;
        let got = be.scaled_block().submatrix(0, 0, x.rows(), x.cols());
        let gap = got.max_abs_diff(&classical_center(&x, mode)?)?;
        println!(
            "{mode}: alpha={:.4} ancillas={} gap={gap:.1e}",
            be.alpha(),
            be.ancillas()
        );
        for r in 0..got.rows() {
            let row: Vec<String> = got.row(r).iter().map(|z| format!("{:+.4}", z.re)).collect();
            println!("  {}", row.join(" "));
        }
    }
    Ok(())
}
