//! The two-class synthetic problem: class 1 is a mixture of two tight
//! Gaussians, class 2 a single Gaussian sitting between them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::Result;
use crate::kernel::DataMatrix;
use crate::kfda::{Class, LabeledDataset};

/// Standard deviation of every component.
pub const COMPONENT_SD: f64 = 0.1;

/// Component centers of class 1.
pub const CLASS_ONE_CENTERS: [[f64; 2]; 2] = [[-0.5, -0.2], [0.5, 0.0]];

/// Center of class 2.
pub const CLASS_TWO_CENTER: [f64; 2] = [0.0, 0.0];

/// `n_g` points per component: `2·n_g` labelled [`Class::One`] followed by
/// `n_g` labelled [`Class::Two`]. Deterministic in `seed`.
pub fn generate_two_class(n_g: usize, seed: u64) -> Result<LabeledDataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, COMPONENT_SD).expect("positive standard deviation");
    let components = [
        (CLASS_ONE_CENTERS[0], Class::One),
        (CLASS_ONE_CENTERS[1], Class::One),
        (CLASS_TWO_CENTER, Class::Two),
    ];
    let mut values = Vec::with_capacity(3 * n_g * 2);
    let mut labels = Vec::with_capacity(3 * n_g);
    for (center, class) in components {
        for _ in 0..n_g {
            values.push(center[0] + noise.sample(&mut rng));
            values.push(center[1] + noise.sample(&mut rng));
            labels.push(class);
        }
    }
    LabeledDataset::new(DataMatrix::from_row_major(3 * n_g, 2, values)?, labels)
}
