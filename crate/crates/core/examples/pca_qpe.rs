//! Principal components with eigenvalues read out by phase estimation.

use blocklab::applications::pca;
use blocklab::datasets;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = datasets::rng(5);
    let x = datasets::random_real(&mut rng, 4, 8);
    for t_bits in [4, 6, 8, 10] {
        let out = pca(&x, 2, t_bits)?;
        let r = &out.result;
        println!(
            "t={t_bits:<2} estimated {:>8.4?}  dense {:>8.4?}  pass={}",
            r.eigen.values,
            &r.classical_values[..2],
            out.passed()
        );
    }
    Ok(())
}
