//! Canonical correlations between two views of the same samples.

use blocklab::applications::cca;
use blocklab::datasets;
use blocklab::matrix::ComplexMatrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = datasets::rng(13);
    let x = datasets::random_real(&mut rng, 3, 8);
    let noise = datasets::random_real(&mut rng, 3, 8);
    // y shares its first row with x, so the top correlation is near 1.
    let y = ComplexMatrix::from_fn(3, 8, |r, c| {
        if r == 0 {
            x[(0, c)] + noise[(0, c)] * 0.05
        } else {
            noise[(r, c)]
        }
    });
    let out = cca(&x, &y, 2)?;
    println!("correlations: {:.4?}", out.result.values);
    println!("all checks pass: {}", out.passed());
    Ok(())
}
