//! Small numeric helpers shared by the Monte Carlo code.

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent seed from a master seed and a path of indices,
/// e.g. `(n_g, repetition, stream)`.
pub fn seed_stream(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix(master), |acc, &p| mix(acc ^ mix(p)))
}

/// Sample mean and its standard error (`s / √m`, `m - 1` denominator).
/// A single value has standard error 0.
pub fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let m = values.len();
    if m == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / m as f64;
    if m == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m as f64 - 1.0);
    (mean, (var / m as f64).sqrt())
}

/// Sample mean and standard deviation (`m - 1` denominator).
pub fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let (mean, se) = mean_and_std_error(values);
    (mean, se * (values.len() as f64).sqrt())
}
