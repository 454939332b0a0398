//! Qubitization walk: each eigenvalue λ of the encoded operator shows up
//! as the pair e^{±iθ} with cos θ = λ/α.

use blocklab::applications::scatter_total_encoding;
use blocklab::centering::centering_encoding;
use blocklab::datasets;
use blocklab::spectral::check_walk_spectrum;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = datasets::rng(3);
    let encs = [
        ("C (n=8)", centering_encoding(8)?),
        (
            "S_t (4x4)",
            scatter_total_encoding(&datasets::random_real(&mut rng, 4, 4))?,
        ),
    ];
    for (name, be) in &encs {
        let chk = check_walk_spectrum(be)?;
        println!(
            "{name}: qubits={} matched={} pair error={:.1e} remainder error={:.1e}",
            be.total_qubits(),
            chk.matched,
            chk.max_pair_error,
            chk.max_remainder_error
        );
    }
    Ok(())
}
