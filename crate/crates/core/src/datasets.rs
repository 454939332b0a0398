//! Seeded random inputs for examples, the verification suite and tests.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::{ComplexMatrix, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries uniform in `[-1, 1)`.
pub fn random_real(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), 0.0)
    })
}

/// Real and imaginary parts uniform in `[-1, 1)`.
pub fn random_complex(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// `n` labels split as evenly as possible over `classes`, shuffled.
pub fn balanced_labels(rng: &mut impl Rng, n: usize, classes: usize) -> Vec<i64> {
    let mut labels: Vec<i64> = (0..n).map(|i| (i % classes) as i64).collect();
    labels.shuffle(rng);
    labels
}

/// Features-by-samples data whose class means are shifted apart by
/// `separation` along random directions.
pub fn labeled_data(
    rng: &mut impl Rng,
    features: usize,
    labels: &[i64],
    separation: f64,
) -> ComplexMatrix {
    let classes = labels.iter().copied().max().unwrap_or(0) as usize + 1;
    let centers = random_real(rng, features, classes).scale(separation);
    let noise = random_real(rng, features, labels.len());
    ComplexMatrix::from_fn(features, labels.len(), |r, c| {
        noise[(r, c)] + centers[(r, labels[c] as usize)]
    })
}

/// Observations-by-features design with a linear dependency: the last
/// column repeats the first (shifted by a constant, which centering
/// removes) when `deficient` is set.
pub fn design(rng: &mut impl Rng, n: usize, p: usize, deficient: bool) -> ComplexMatrix {
    let mut x = random_real(rng, n, p);
    if deficient && p >= 2 {
        let shift = rng.random_range(-1.0..1.0);
        for r in 0..n {
            x[(r, p - 1)] = x[(r, 0)] + C64::new(shift, 0.0);
        }
    }
    x
}

pub fn random_vector(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}
