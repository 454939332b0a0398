//! Least squares on the centered design, including a rank-deficient one.

use blocklab::applications::ols;
use blocklab::datasets;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = datasets::rng(19);
    for deficient in [false, true] {
        let x = datasets::design(&mut rng, 8, 4, deficient);
        let y = datasets::random_vector(&mut rng, 8);
        let r = ols(&x, &y)?.result;
        println!("rank {} (deficient: {})", r.rank, r.rank_deficient);
        println!("  encoded     {:+.5?}", r.beta_hat);
        println!("  closed form {:+.5?}", r.beta_closed_form);
        println!("  residual    {:.5}", r.residual_norm);
    }
    Ok(())
}
