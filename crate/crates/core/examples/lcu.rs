//! Linear combinations and products of block encodings, and the metadata
//! they carry.

use blocklab::block_encoding::{
    combine, linear_combination, make_state_prep_pair, product, PhaseConvention,
};
use blocklab::centering::{centering_encoding, ones_matrix_encoding};
use blocklab::matrix::C64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let c = centering_encoding(4)?;
    let y = [C64::new(0.5, 0.0), C64::new(0.0, -1.5)];
    let pair = make_state_prep_pair(&y, PhaseConvention::FoldIntoSelect)?;
    let sum = linear_combination(&pair, &[c.clone(), c.clone()], 1.0)?;
    println!(
        "(0.5 - 1.5i) C: alpha={} ancillas={}",
        sum.alpha(),
        sum.ancillas()
    );

    // Terms with different alphas are rescaled first.
    let j = ones_matrix_encoding(4)?;
    let mixed = combine(&[C64::new(1.0, 0.0), C64::new(0.25, 0.0)], &[c.clone(), j])?;
    println!(
        "C + J/4 = I: alpha={} ancillas={}",
        mixed.alpha(),
        mixed.ancillas()
    );
    println!(
        "row 0: {:?}",
        mixed
            .scaled_block()
            .row(0)
            .iter()
            .map(|z| (z.re * 1e6).round() / 1e6)
            .collect::<Vec<_>>()
    );

    let cc = product(&c, &c)?;
    println!(
        "C*C: alpha={} ancillas={} gap to C {:.1e}",
        cc.alpha(),
        cc.ancillas(),
        cc.scaled_block().max_abs_diff(&c.scaled_block())?
    );
    let audit = cc.provenance().audit();
    println!(
        "audit: {} compositions, clean={}",
        audit.compositions(),
        audit.is_clean()
    );
    Ok(())
}
