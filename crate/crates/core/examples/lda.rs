//! Linear discriminant directions from the encoded total and within-class
//! scatters.

use blocklab::applications::{lda, LabeledDataset};
use blocklab::datasets;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = datasets::rng(11);
    let labels = datasets::balanced_labels(&mut rng, 8, 2);
    let x = datasets::labeled_data(&mut rng, 4, &labels, 2.0);
    let ds = LabeledDataset::new(x, &labels)?;
    let out = lda(&ds, 1)?;
    println!("labels: {labels:?}");
    println!("value: {:.6?}", out.result.values);
    println!(
        "direction: {:.4?}",
        out.result.vectors[0]
            .iter()
            .map(|z| z.re)
            .collect::<Vec<_>>()
    );
    for c in &out.checks {
        println!(
            "  {:<40} {:.2e} <= {:.0e} {}",
            c.name, c.measured, c.tolerance, c.pass
        );
    }
    Ok(())
}
