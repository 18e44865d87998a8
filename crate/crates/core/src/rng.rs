use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{ComplexMatrix, C64};

pub type TrialRng = ChaCha8Rng;

/// Independent deterministic stream `stream` of the generator seeded with `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `rows x cols` matrix of i.i.d. standard complex Gaussians times `scale`.
pub(crate) fn gaussian_matrix<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    scale: f64,
    rng: &mut R,
) -> ComplexMatrix {
    let data: Vec<C64> = (0..rows * cols)
        .map(|_| complex_gaussian(rng) * scale)
        .collect();
    ComplexMatrix::new(rows, cols, data).expect("gaussian entries are finite")
}
