//! Shrinkage coefficient and regularized kernel, computed from the centered
//! kernel matrix alone.
//!
//! With `S` the feature-space sample covariance and `T = (Tr(S)/p) I`, the
//! MSE-optimal mixing weight of `(1-λ) S + λ T` is estimated by
//!
//! ```text
//! λ̂ = clamp((V̂(S) - V̂(T)) / ‖T - S‖²_F, 0, 1)
//! ```
//!
//! and each of the three ingredients is a closed form in `K`. Nothing in this
//! module forms `Φ`, `S`, `T` or the centering matrix `H`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feature::{sample_covariance, FeatureMatrix};
use crate::kernel::{center_gram, gram_matrix, sym_eigendecompose, KernelMatrix, KernelSpec};

/// Ingredient values in `(-NUMERICAL_FLOOR, 0)` are rounding noise and read as 0.
pub const NUMERICAL_FLOOR: f64 = 1e-12;

/// Relative size of `‖T - S‖²` below which the denominator counts as zero.
pub const DEGENERATE_DENOMINATOR: f64 = 1e-14;

/// Dimension `p` of the feature space.
///
/// Explicit feature maps have a known `p`. For implicit kernels such as the
/// RBF the caller picks one; [`FeatureDim::Observations`] uses `p = n`, the
/// largest dimension the training data can span.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "policy", content = "p", rename_all = "snake_case")]
pub enum FeatureDim {
    Finite(usize),
    Observations,
}

impl FeatureDim {
    pub fn resolve(&self, n: usize) -> Result<usize> {
        match *self {
            FeatureDim::Finite(0) => Err(Error::UnresolvedFeatureDim(
                "finite feature dimension must be at least 1".into(),
            )),
            FeatureDim::Finite(p) => Ok(p),
            FeatureDim::Observations if n == 0 => Err(Error::UnresolvedFeatureDim(
                "p = n requested for an empty kernel".into(),
            )),
            FeatureDim::Observations => Ok(n),
        }
    }
}

/// `λ̂` together with the quantities it was built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShrinkageEstimate {
    pub lambda_hat: f64,
    /// `V̂(S)`
    pub v_s: f64,
    /// `V̂(T)`
    pub v_t: f64,
    /// `‖T - S‖²_F`
    pub dist_ts: f64,
    /// `(V̂(S) - V̂(T)) / ‖T - S‖²_F` before clipping; 0 when degenerate.
    pub raw_ratio: f64,
    pub p_used: usize,
    /// Set when `‖T - S‖²` vanished, i.e. `S` is already a multiple of `I`.
    pub degenerate: bool,
}

fn require_three(n: usize) -> Result<()> {
    if n < 3 {
        Err(Error::InsufficientObservations(n))
    } else {
        Ok(())
    }
}

fn floor(v: f64) -> f64 {
    if v < 0.0 && v > -NUMERICAL_FLOOR {
        0.0
    } else {
        v
    }
}

fn diag_norm_squared(k: &DMatrix<f64>) -> f64 {
    k.diagonal().norm_squared()
}

/// `V̂(S) = n/((n-1)²(n-2)) · (‖diag(K)‖² - ‖K‖²_F / n)`
pub fn v_hat_s(k: &KernelMatrix) -> Result<f64> {
    let n = k.n();
    require_three(n)?;
    let nf = n as f64;
    let inner = diag_norm_squared(k.values()) - k.values().norm_squared() / nf;
    Ok(nf / ((nf - 1.0).powi(2) * (nf - 2.0)) * inner)
}

/// `V̂(T) = n/(p(n-1)²(n-2)) · ‖diag(K) - (Tr(K)/n) e‖²`
pub fn v_hat_t(k: &KernelMatrix, p: FeatureDim) -> Result<f64> {
    let n = k.n();
    require_three(n)?;
    let p = p.resolve(n)? as f64;
    let nf = n as f64;
    let mean_diag = k.trace() / nf;
    let spread: f64 = k
        .values()
        .diagonal()
        .iter()
        .map(|d| (d - mean_diag).powi(2))
        .sum();
    Ok(nf / (p * (nf - 1.0).powi(2) * (nf - 2.0)) * spread)
}

/// `‖T - S‖²_F = (‖K‖²_F - Tr²(K)/p) / (n-1)²`
pub fn dist_ts(k: &KernelMatrix, p: FeatureDim) -> Result<f64> {
    let n = k.n();
    if n < 2 {
        return Err(Error::CenteringTooSmall(n));
    }
    let p = p.resolve(n)? as f64;
    let nm1 = n as f64 - 1.0;
    Ok((k.values().norm_squared() - k.trace().powi(2) / p) / (nm1 * nm1))
}

/// Clipped estimate `max(min(ratio, 1), 0)`.
///
/// When `‖T - S‖²` is at most `1e-14 · ‖K‖²_F/(n-1)²` the estimator does not
/// depend on `λ`; the result is `λ̂ = 0` with `degenerate` set.
pub fn lambda_hat(k: &KernelMatrix, p: FeatureDim) -> Result<ShrinkageEstimate> {
    let n = k.n();
    require_three(n)?;
    let p_used = p.resolve(n)?;
    let nm1 = n as f64 - 1.0;
    Ok(ShrinkageEstimate::from_ingredients(
        v_hat_s(k)?,
        v_hat_t(k, p)?,
        dist_ts(k, p)?,
        k.values().norm_squared() / (nm1 * nm1),
        p_used,
    ))
}

impl ShrinkageEstimate {
    /// Floors, degenerate-denominator test and clipping applied to already
    /// computed ingredients. `scale` is `‖K‖²_F/(n-1)²`, the reference size for
    /// the degenerate test.
    pub fn from_ingredients(v_s: f64, v_t: f64, dist_ts: f64, scale: f64, p_used: usize) -> Self {
        let (v_s, v_t, dist_ts) = (floor(v_s), floor(v_t), floor(dist_ts));
        if dist_ts <= DEGENERATE_DENOMINATOR * scale {
            return Self {
                lambda_hat: 0.0,
                v_s,
                v_t,
                dist_ts,
                raw_ratio: 0.0,
                p_used,
                degenerate: true,
            };
        }
        let raw_ratio = (v_s - v_t) / dist_ts;
        Self {
            lambda_hat: raw_ratio.clamp(0.0, 1.0),
            v_s,
            v_t,
            dist_ts,
            raw_ratio,
            p_used,
            degenerate: false,
        }
    }
}

/// `K̂(λ) = (1-λ) K + λ (Tr(K)/p) I`.
///
/// The diagonal shift breaks centering, so the result is its own type rather
/// than a [`KernelMatrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizedKernel {
    values: DMatrix<f64>,
    pub lambda: f64,
    /// `λ · Tr(K)/p`, the floor under every eigenvalue.
    pub shift: f64,
}

impl RegularizedKernel {
    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.values
    }
}

pub fn regularize_kernel(k: &KernelMatrix, lambda: f64, p: FeatureDim) -> Result<RegularizedKernel> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::LambdaOutOfRange(lambda));
    }
    let n = k.n();
    let p = p.resolve(n)? as f64;
    let shift = lambda * k.trace() / p;
    let mut values = k.values() * (1.0 - lambda);
    for i in 0..n {
        values[(i, i)] += shift;
    }
    Ok(RegularizedKernel {
        values,
        lambda,
        shift,
    })
}

/// Spectra of `K = HΦᵀΦH` and `S = ΦHΦᵀ/(n-1)` in the small-sample regime.
#[derive(Debug, Clone, Serialize)]
pub struct EigenRelationReport {
    /// `κ_1 ≥ … ≥ κ_n`
    pub kappa: Vec<f64>,
    /// Leading `n` eigenvalues of `S`.
    pub delta: Vec<f64>,
    /// Largest `|κ_i - (n-1)δ_i| / κ_i` over the nonzero `κ_i`, `i < n`.
    pub max_relative_error: f64,
    /// Largest `|κ_i - (n-1)δ_i|` over the numerically zero pairs, `i < n`.
    pub max_zero_pair_error: f64,
    /// `|κ_n|`
    pub trailing_kappa: f64,
    pub kernel_norm: f64,
    pub holds: bool,
}

/// Checks `κ_i = (n-1) δ_i` for `i = 1..n-1` and `κ_n = 0`.
pub fn eigen_relation_check(phi: &FeatureMatrix) -> Result<EigenRelationReport> {
    let (p, n) = (phi.p(), phi.n());
    if n >= p {
        return Err(Error::NotSmallSample { n, p });
    }
    let k = center_gram(&gram_matrix(&phi.as_data()?, &KernelSpec::Linear)?)?;
    let s = sample_covariance(phi)?;
    let kappa: Vec<f64> = sym_eigendecompose(k.values())?.eigenvalues.iter().copied().collect();
    let delta: Vec<f64> = sym_eigendecompose(s.values())?
        .eigenvalues
        .iter()
        .take(n)
        .copied()
        .collect();
    let kernel_norm = k.frobenius_norm();
    let zero_tol = 1e-8 * kernel_norm;
    let scale = n as f64 - 1.0;
    let mut max_relative_error = 0.0f64;
    let mut max_zero_pair_error = 0.0f64;
    for i in 0..n - 1 {
        let diff = (kappa[i] - scale * delta[i]).abs();
        if kappa[i].abs() > zero_tol {
            max_relative_error = max_relative_error.max(diff / kappa[i].abs());
        } else {
            max_zero_pair_error = max_zero_pair_error.max(diff);
        }
    }
    let trailing_kappa = kappa[n - 1].abs();
    let holds =
        max_relative_error <= 1e-8 && max_zero_pair_error <= zero_tol && trailing_kappa <= zero_tol;
    Ok(EigenRelationReport {
        kappa,
        delta,
        max_relative_error,
        max_zero_pair_error,
        trailing_kappa,
        kernel_norm,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feature::{dist_ts_direct, lambda_hat_direct, v_hat_s_direct, v_hat_t_direct};
    use crate::kernel::DataMatrix;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_phi(p: usize, n: usize, seed: u64) -> FeatureMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        FeatureMatrix::new(DMatrix::from_fn(p, n, |_, _| rng.random_range(-1.0..1.0))).unwrap()
    }

    fn linear_kernel(phi: &FeatureMatrix) -> KernelMatrix {
        center_gram(&gram_matrix(&phi.as_data().unwrap(), &KernelSpec::Linear).unwrap()).unwrap()
    }

    #[test]
    fn zero_kernel_has_zero_ingredients() {
        let k = KernelMatrix::try_new(DMatrix::zeros(5, 5)).unwrap();
        assert_eq!(v_hat_s(&k).unwrap(), 0.0);
        assert_eq!(v_hat_t(&k, FeatureDim::Finite(3)).unwrap(), 0.0);
        assert_eq!(dist_ts(&k, FeatureDim::Finite(3)).unwrap(), 0.0);
        let est = lambda_hat(&k, FeatureDim::Finite(3)).unwrap();
        assert!(est.degenerate);
        assert_eq!(est.lambda_hat, 0.0);
    }

    #[test]
    fn too_few_observations() {
        let k = linear_kernel(&random_phi(3, 2, 1));
        assert!(matches!(v_hat_s(&k), Err(Error::InsufficientObservations(2))));
        assert!(v_hat_t(&k, FeatureDim::Finite(3)).is_err());
        assert!(lambda_hat(&k, FeatureDim::Finite(3)).is_err());
    }

    #[test]
    fn unresolvable_feature_dim() {
        let k = linear_kernel(&random_phi(3, 5, 1));
        assert!(matches!(
            v_hat_t(&k, FeatureDim::Finite(0)),
            Err(Error::UnresolvedFeatureDim(_))
        ));
        assert!(dist_ts(&k, FeatureDim::Finite(0)).is_err());
        assert_eq!(FeatureDim::Observations.resolve(7).unwrap(), 7);
    }

    #[test]
    fn ingredients_match_feature_space() {
        let phi = random_phi(4, 6, 2);
        let k = linear_kernel(&phi);
        let p = FeatureDim::Finite(4);
        assert_relative_eq!(v_hat_s(&k).unwrap(), v_hat_s_direct(&phi).unwrap(), max_relative = 1e-10);
        assert_relative_eq!(v_hat_t(&k, p).unwrap(), v_hat_t_direct(&phi).unwrap(), max_relative = 1e-10);
        assert_relative_eq!(dist_ts(&k, p).unwrap(), dist_ts_direct(&phi).unwrap(), max_relative = 1e-10);
        assert_relative_eq!(
            lambda_hat(&k, p).unwrap().lambda_hat,
            lambda_hat_direct(&phi).unwrap(),
            max_relative = 1e-10
        );
    }

    #[test]
    fn constant_diagonal_gives_zero_v_t() {
        // Centered kernel of the four points ±e_1, ±e_2 has a constant diagonal.
        let data = DataMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]).unwrap();
        let k = center_gram(&gram_matrix(&data, &KernelSpec::Linear).unwrap()).unwrap();
        assert_eq!(v_hat_t(&k, FeatureDim::Finite(2)).unwrap(), 0.0);
    }

    #[test]
    fn doubling_p_halves_v_t() {
        let k = linear_kernel(&random_phi(4, 6, 3));
        let a = v_hat_t(&k, FeatureDim::Finite(4)).unwrap();
        let b = v_hat_t(&k, FeatureDim::Finite(8)).unwrap();
        assert_eq!(b, a / 2.0);
    }

    #[test]
    fn dist_ts_is_quadratic_in_scale() {
        let k = linear_kernel(&random_phi(4, 6, 4));
        let p = FeatureDim::Finite(4);
        assert_relative_eq!(
            dist_ts(&k.scaled(3.0).unwrap(), p).unwrap(),
            9.0 * dist_ts(&k, p).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn lower_clip() {
        // For a PSD centered K and p >= 1 the kernel-form numerator is never
        // negative, so the lower clip is exercised on raw ingredients.
        let est = ShrinkageEstimate::from_ingredients(1.0, 3.0, 4.0, 1.0, 5);
        assert_eq!(est.raw_ratio, -0.5);
        assert_eq!(est.lambda_hat, 0.0);
        assert!(!est.degenerate);
    }

    #[test]
    fn numerator_is_non_negative_for_psd_kernels() {
        for seed in 0..50 {
            let k = linear_kernel(&random_phi(3, 7, 100 + seed));
            for p in 1..6 {
                let p = FeatureDim::Finite(p);
                assert!(v_hat_s(&k).unwrap() >= v_hat_t(&k, p).unwrap() * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn small_floor_and_degenerate_denominator() {
        let est = ShrinkageEstimate::from_ingredients(-1e-13, 0.0, 2.0, 1.0, 3);
        assert_eq!(est.v_s, 0.0);
        let est = ShrinkageEstimate::from_ingredients(1.0, 0.5, 1e-16, 1.0, 3);
        assert!(est.degenerate);
        assert_eq!(est.lambda_hat, 0.0);
    }

    #[test]
    fn upper_clip() {
        // Three points in a huge feature space: p dwarfs n, the ratio explodes.
        let phi = random_phi(3, 3, 5);
        let k = linear_kernel(&phi);
        let est = lambda_hat(&k, FeatureDim::Finite(3)).unwrap();
        assert!(est.raw_ratio > 1.0, "{est:?}");
        assert_eq!(est.lambda_hat, 1.0);
    }

    #[test]
    fn regularize_endpoints() {
        let k = linear_kernel(&random_phi(6, 5, 6));
        let p = FeatureDim::Finite(6);
        assert_eq!(regularize_kernel(&k, 0.0, p).unwrap().values(), k.values());
        let full = regularize_kernel(&k, 1.0, p).unwrap();
        let expected = DMatrix::<f64>::identity(5, 5) * (k.trace() / 6.0);
        assert!((full.values() - expected).norm() < 1e-14);
        assert!(matches!(
            regularize_kernel(&k, 1.01, p),
            Err(Error::LambdaOutOfRange(_))
        ));
        assert!(regularize_kernel(&k, -0.01, p).is_err());
    }

    #[test]
    fn regularize_shifts_every_eigenvalue() {
        let k = linear_kernel(&random_phi(8, 6, 7));
        let lambda = 0.37;
        let r = regularize_kernel(&k, lambda, FeatureDim::Finite(8)).unwrap();
        let before = sym_eigendecompose(k.values()).unwrap();
        let after = sym_eigendecompose(r.values()).unwrap();
        let shift = lambda * k.trace() / 8.0;
        for i in 0..6 {
            assert_relative_eq!(
                after.eigenvalues[i],
                (1.0 - lambda) * before.eigenvalues[i] + shift,
                epsilon = 1e-8
            );
        }
        assert!(after.min_eigenvalue() >= r.shift - 1e-8 * k.frobenius_norm());
    }

    #[test]
    fn eigen_relation_small_sample() {
        let r = eigen_relation_check(&random_phi(10, 5, 8)).unwrap();
        assert!(r.holds, "{r:?}");
        for i in 0..4 {
            assert_relative_eq!(r.kappa[i] / r.delta[i], 4.0, max_relative = 1e-8);
        }
        assert!(r.trailing_kappa <= 1e-8 * r.kernel_norm);
    }

    #[test]
    fn eigen_relation_with_repeated_column() {
        let mut m = random_phi(10, 6, 9).values().clone();
        let c = m.column(0).clone_owned();
        m.set_column(3, &c);
        let r = eigen_relation_check(&FeatureMatrix::new(m).unwrap()).unwrap();
        assert!(r.holds, "{r:?}");
    }

    #[test]
    fn eigen_relation_requires_small_sample() {
        assert!(matches!(
            eigen_relation_check(&random_phi(4, 4, 10)),
            Err(Error::NotSmallSample { n: 4, p: 4 })
        ));
    }
}
