//! The centering matrix `C = I - J/n` as a one-ancilla block encoding.

use blocklab::block_encoding::verify;
use blocklab::centering::{build_uc, centering_encoding, centering_matrix};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for n in [2, 4, 8, 16] {
        let be = centering_encoding(n)?;
        let rep = verify(&be, &centering_matrix(n), 1e-12)?;
        println!(
            "n={n:<2} alpha={} ancillas={} qubits={} error={:.2e} pass={}",
            be.alpha(),
            be.ancillas(),
            be.total_qubits(),
            rep.distance_measured,
            rep.pass
        );
    }
    // U_c for two qubits: diagonal -1/2, off-diagonal +1/2.
    let u = build_uc(2)?;
    for r in 0..4 {
        let row: Vec<String> = u.row(r).iter().map(|z| format!("{:+.2}", z.re)).collect();
        println!("{}", row.join(" "));
    }
    Ok(())
}
