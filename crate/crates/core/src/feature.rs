//! Explicit feature-space computations.
//!
//! Everything here works on the `p × n` design matrix `Φ` and the `p × p`
//! covariance matrices built from it. None of it is needed to regularize a
//! kernel matrix; it exists so that every kernel-domain quantity in
//! [`crate::shrinkage`] has an independently computed counterpart.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{sym_eigendecompose, DataMatrix};
use crate::stats::{mean_and_std_error, seed_stream};

/// Design matrix `Φ`; column `i` is `φ(x_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    values: DMatrix<f64>,
}

impl FeatureMatrix {
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(Error::Empty("feature matrix"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("feature matrix"));
        }
        Ok(Self { values })
    }

    /// Identity feature map: `φ(x) = x`, so the Linear kernel of `data`
    /// equals `ΦᵀΦ`.
    pub fn linear(data: &DataMatrix) -> Result<Self> {
        Self::new(data.to_matrix().transpose())
    }

    /// Monomial expansion of `(xᵀy + c)²`: squares, `√2`-weighted cross
    /// terms, `√(2c)`-weighted linear terms and the constant `c`.
    pub fn polynomial_degree2(data: &DataMatrix, offset: f64) -> Result<Self> {
        let q = data.q();
        let p = q + q * (q - 1) / 2 + q + 1;
        let mut values = DMatrix::zeros(p, data.n());
        let s2 = 2f64.sqrt();
        let sc = (2.0 * offset).sqrt();
        for (col, x) in data.rows().enumerate() {
            let mut r = 0;
            for &xi in x {
                values[(r, col)] = xi * xi;
                r += 1;
            }
            for i in 0..q {
                for j in (i + 1)..q {
                    values[(r, col)] = s2 * x[i] * x[j];
                    r += 1;
                }
            }
            for &xi in x {
                values[(r, col)] = sc * xi;
                r += 1;
            }
            values[(r, col)] = offset;
        }
        Self::new(values)
    }

    pub fn p(&self) -> usize {
        self.values.nrows()
    }

    pub fn n(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    /// `φ̂ = (1/n) Σ φ_i`
    pub fn mean(&self) -> DVector<f64> {
        self.values.column_mean()
    }

    /// `Φ` with `φ̂` subtracted from every column.
    pub fn centered(&self) -> DMatrix<f64> {
        let mean = self.mean();
        let mut c = self.values.clone();
        for mut col in c.column_iter_mut() {
            col -= &mean;
        }
        c
    }

    /// Inputs whose Linear kernel reproduces `ΦᵀΦ`.
    pub fn as_data(&self) -> Result<DataMatrix> {
        DataMatrix::from_matrix(&self.values.transpose())
    }
}

/// Symmetric `p × p` matrix in feature space (`S`, `T`, `Σ`, `Σ̂(λ)`).
#[derive(Debug, Clone, PartialEq)]
pub struct CovMatrix {
    values: DMatrix<f64>,
}

impl CovMatrix {
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = values.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(Error::Empty("covariance matrix"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("covariance matrix"));
        }
        let t = values.transpose();
        let asym = (&values - &t).amax();
        if asym > 1e-10 * values.norm() {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self {
            values: (values + t) * 0.5,
        })
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_row_slice(entries)))
    }

    pub fn p(&self) -> usize {
        self.values.nrows()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn trace(&self) -> f64 {
        self.values.trace()
    }
}

/// `S = (1/(n-1)) Φ H Φᵀ`
pub fn sample_covariance(phi: &FeatureMatrix) -> Result<CovMatrix> {
    let n = phi.n();
    if n < 2 {
        return Err(Error::CenteringTooSmall(n));
    }
    let c = phi.centered();
    CovMatrix::new(&c * c.transpose() / (n as f64 - 1.0))
}

/// `T = (Tr(S)/p) I`
pub fn target(s: &CovMatrix) -> CovMatrix {
    let p = s.p();
    CovMatrix {
        values: DMatrix::identity(p, p) * (s.trace() / p as f64),
    }
}

/// `Σ̂(λ) = (1-λ) S + λ T`
pub fn shrink_covariance(s: &CovMatrix, lambda: f64) -> Result<CovMatrix> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::LambdaOutOfRange(lambda));
    }
    let t = target(s);
    Ok(CovMatrix {
        values: s.values() * (1.0 - lambda) + t.values() * lambda,
    })
}

/// Per-observation outer products `S_i = (φ_i - φ̂)(φ_i - φ̂)ᵀ`.
fn per_observation_scatter(phi: &FeatureMatrix) -> Vec<DMatrix<f64>> {
    let c = phi.centered();
    c.column_iter().map(|d| d * d.transpose()).collect()
}

fn require_three(n: usize) -> Result<()> {
    if n < 3 {
        Err(Error::InsufficientObservations(n))
    } else {
        Ok(())
    }
}

/// `n/((n-1)²(n-2)) Σ_i ‖S_i - ((n-1)/n) S‖²_F`, summed matrix by matrix.
pub fn v_hat_s_direct(phi: &FeatureMatrix) -> Result<f64> {
    let n = phi.n();
    require_three(n)?;
    let nf = n as f64;
    let s = sample_covariance(phi)?;
    let shift = s.values() * ((nf - 1.0) / nf);
    let sum: f64 = per_observation_scatter(phi)
        .iter()
        .map(|si| (si - &shift).norm_squared())
        .sum();
    Ok(nf / ((nf - 1.0).powi(2) * (nf - 2.0)) * sum)
}

/// `n/(p(n-1)²(n-2)) Σ_i Tr²(S_i - ((n-1)/n) S)`.
///
/// The shift is `((n-1)/n) S`, the same one used by [`v_hat_s_direct`]; with
/// it the sum equals `‖diag(K) - (1/n)Tr(K) e‖²`.
pub fn v_hat_t_direct(phi: &FeatureMatrix) -> Result<f64> {
    let n = phi.n();
    require_three(n)?;
    let nf = n as f64;
    let p = phi.p() as f64;
    let s = sample_covariance(phi)?;
    let shift = s.values() * ((nf - 1.0) / nf);
    let sum: f64 = per_observation_scatter(phi)
        .iter()
        .map(|si| (si - &shift).trace().powi(2))
        .sum();
    Ok(nf / (p * (nf - 1.0).powi(2) * (nf - 2.0)) * sum)
}

/// `‖T - S‖²_F` from explicit `S` and `T`.
pub fn dist_ts_direct(phi: &FeatureMatrix) -> Result<f64> {
    let s = sample_covariance(phi)?;
    let t = target(&s);
    Ok((t.values() - s.values()).norm_squared())
}

/// Clipped shrinkage coefficient evaluated entirely in feature space.
/// A zero denominator gives 0.
pub fn lambda_hat_direct(phi: &FeatureMatrix) -> Result<f64> {
    let num = v_hat_s_direct(phi)? - v_hat_t_direct(phi)?;
    let den = dist_ts_direct(phi)?;
    if den <= 0.0 {
        return Ok(0.0);
    }
    Ok((num / den).clamp(0.0, 1.0))
}

/// Known population covariance `Σ` with its eigenvalues `ζ_1 ≥ … ≥ ζ_p`.
#[derive(Debug, Clone)]
pub struct SyntheticModel {
    pub sigma_true: CovMatrix,
    pub zeta: DVector<f64>,
    pub zeta_bar: f64,
    /// `V Λ^{1/2}`, so that `Σ = L Lᵀ`.
    sqrt_factor: DMatrix<f64>,
}

impl SyntheticModel {
    pub fn new(sigma_true: CovMatrix) -> Result<Self> {
        let eig = sym_eigendecompose(sigma_true.values())?;
        let min = eig.min_eigenvalue();
        if min < -1e-8 * sigma_true.values().norm() {
            return Err(Error::NotPsd(min));
        }
        let p = sigma_true.p();
        let sqrt_factor = DMatrix::from_fn(p, p, |i, j| {
            eig.eigenvectors[(i, j)] * eig.eigenvalues[j].max(0.0).sqrt()
        });
        let zeta_bar = sigma_true.trace() / p as f64;
        Ok(Self {
            sigma_true,
            zeta: eig.eigenvalues,
            zeta_bar,
            sqrt_factor,
        })
    }

    pub fn p(&self) -> usize {
        self.sigma_true.p()
    }

    /// `Σ_i (ζ_i - ζ̄)²`
    pub fn eigenvalue_dispersion(&self) -> f64 {
        self.zeta.iter().map(|z| (z - self.zeta_bar).powi(2)).sum()
    }
}

/// Draws `n` feature vectors from a population with known covariance.
pub trait FeatureSampler: Sync {
    fn model(&self) -> &SyntheticModel;
    fn sample(&self, n: usize, rng: &mut ChaCha8Rng) -> FeatureMatrix;
}

/// Zero-mean Gaussian `N(0, Σ)`.
#[derive(Debug, Clone)]
pub struct GaussianSampler {
    model: SyntheticModel,
}

impl GaussianSampler {
    pub fn new(model: SyntheticModel) -> Self {
        Self { model }
    }
}

impl FeatureSampler for GaussianSampler {
    fn model(&self) -> &SyntheticModel {
        &self.model
    }

    fn sample(&self, n: usize, rng: &mut ChaCha8Rng) -> FeatureMatrix {
        let p = self.model.p();
        let z = DMatrix::from_fn(p, n, |_, _| StandardNormal.sample(rng));
        FeatureMatrix {
            values: &self.model.sqrt_factor * z,
        }
    }
}

/// Monte Carlo estimate of the oracle coefficient `λ_O`.
#[derive(Debug, Clone, Serialize)]
pub struct OracleLambda {
    /// `(V(S) - V(T)) / E‖T - S‖²`, unclipped.
    pub estimate: f64,
    /// Delta-method standard error of the ratio.
    pub std_error: f64,
    pub v_s: f64,
    pub v_t: f64,
    pub expected_dist_ts: f64,
    /// Mean of the clipped feature-space `λ̂` over the same draws.
    pub mean_lambda_hat: f64,
    pub lambda_hat_std_error: f64,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
}

struct OracleDraw {
    err_s: f64,
    err_t: f64,
    dist: f64,
    lambda_hat: f64,
}

/// Averages `‖S - Σ‖²`, `‖T - E{T}‖²` and `‖T - S‖²` over `trials` samples of
/// size `n` and forms their ratio.
pub fn oracle_lambda(
    sampler: &impl FeatureSampler,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<OracleLambda> {
    if trials < 1000 {
        return Err(Error::InvalidConfig(format!(
            "oracle_lambda needs at least 1000 trials, got {trials}"
        )));
    }
    require_three(n)?;
    let model = sampler.model();
    let p = model.p();
    let expected_t = DMatrix::<f64>::identity(p, p) * model.zeta_bar;
    let draws: Vec<OracleDraw> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed_stream(seed, &[t as u64]));
            let phi = sampler.sample(n, &mut rng);
            let s = sample_covariance(&phi)?;
            let tm = target(&s);
            Ok(OracleDraw {
                err_s: (s.values() - model.sigma_true.values()).norm_squared(),
                err_t: (tm.values() - &expected_t).norm_squared(),
                dist: (tm.values() - s.values()).norm_squared(),
                lambda_hat: lambda_hat_direct(&phi)?,
            })
        })
        .collect::<Result<_>>()?;

    let m = trials as f64;
    let v_s = draws.iter().map(|d| d.err_s).sum::<f64>() / m;
    let v_t = draws.iter().map(|d| d.err_t).sum::<f64>() / m;
    let den = draws.iter().map(|d| d.dist).sum::<f64>() / m;
    if den <= 0.0 {
        return Err(Error::DegenerateDenominator(
            "E‖T - S‖² is zero; S is always a multiple of I".into(),
        ));
    }
    let estimate = (v_s - v_t) / den;
    let residuals: Vec<f64> = draws
        .iter()
        .map(|d| (d.err_s - d.err_t) - estimate * d.dist)
        .collect();
    let (_, resid_se) = mean_and_std_error(&residuals);
    let lambdas: Vec<f64> = draws.iter().map(|d| d.lambda_hat).collect();
    let (mean_lambda_hat, lambda_hat_std_error) = mean_and_std_error(&lambdas);
    Ok(OracleLambda {
        estimate,
        std_error: resid_se / den,
        v_s,
        v_t,
        expected_dist_ts: den,
        mean_lambda_hat,
        lambda_hat_std_error,
        n,
        trials,
        seed,
    })
}

/// Both sides of `‖E{T} - Σ‖²_F = Σ_i (ζ_i - ζ̄)²`.
#[derive(Debug, Clone, Serialize)]
pub struct BiasDispersionReport {
    pub squared_bias: f64,
    pub dispersion: f64,
    pub relative_error: f64,
    pub holds: bool,
}

/// Squared bias of `T` uses `E{T} = (Tr(Σ)/p) I`; the dispersion side uses
/// the eigenvalues of `Σ`.
pub fn bias_dispersion_check(model: &SyntheticModel) -> BiasDispersionReport {
    let p = model.p();
    let expected_t = DMatrix::<f64>::identity(p, p) * (model.sigma_true.trace() / p as f64);
    let squared_bias = (expected_t - model.sigma_true.values()).norm_squared();
    let dispersion = model.eigenvalue_dispersion();
    let scale = squared_bias.abs().max(dispersion.abs());
    let relative_error = if scale == 0.0 {
        0.0
    } else {
        (squared_bias - dispersion).abs() / scale
    };
    BiasDispersionReport {
        squared_bias,
        dispersion,
        relative_error,
        holds: relative_error <= 1e-10 || (squared_bias - dispersion).abs() <= 1e-14,
    }
}

/// Monte Carlo check of `E‖S - ζ̄I‖² = V(S) + Σ(ζ_i - ζ̄)²`.
#[derive(Debug, Clone, Serialize)]
pub struct ExcessDispersionReport {
    /// Simulated `E‖S - ζ̄I‖²`.
    pub sample_dispersion: f64,
    /// Simulated `V(S)`.
    pub v_s: f64,
    pub population_dispersion: f64,
    /// Mean of the per-draw gap `‖S - ζ̄I‖² - ‖S - Σ‖² - Σ(ζ_i - ζ̄)²`.
    pub gap_mean: f64,
    pub gap_std_error: f64,
    pub trials: usize,
    pub seed: u64,
}

pub fn excess_dispersion_check(
    sampler: &impl FeatureSampler,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<ExcessDispersionReport> {
    let model = sampler.model();
    let p = model.p();
    let center = DMatrix::<f64>::identity(p, p) * model.zeta_bar;
    let dispersion = model.eigenvalue_dispersion();
    let draws: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed_stream(seed, &[t as u64]));
            let s = sample_covariance(&sampler.sample(n, &mut rng))?;
            Ok((
                (s.values() - &center).norm_squared(),
                (s.values() - model.sigma_true.values()).norm_squared(),
            ))
        })
        .collect::<Result<_>>()?;
    let gaps: Vec<f64> = draws.iter().map(|(a, b)| a - b - dispersion).collect();
    let (gap_mean, gap_std_error) = mean_and_std_error(&gaps);
    let m = trials as f64;
    Ok(ExcessDispersionReport {
        sample_dispersion: draws.iter().map(|d| d.0).sum::<f64>() / m,
        v_s: draws.iter().map(|d| d.1).sum::<f64>() / m,
        population_dispersion: dispersion,
        gap_mean,
        gap_std_error,
        trials,
        seed,
    })
}

/// Monte Carlo comparison of `V̂(S)`, `V̂(T)` with the simulated `V(S)`, `V(T)`.
#[derive(Debug, Clone, Serialize)]
pub struct UnbiasednessReport {
    pub v_s_simulated: f64,
    pub v_s_estimated: f64,
    /// Standard error of the per-draw difference `V̂(S) - ‖S - Σ‖²`.
    pub v_s_diff_std_error: f64,
    pub v_t_simulated: f64,
    pub v_t_estimated: f64,
    pub v_t_diff_std_error: f64,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
}

impl UnbiasednessReport {
    /// Both estimator means lie within `k` standard errors of the simulated truth.
    pub fn within(&self, k: f64) -> bool {
        (self.v_s_estimated - self.v_s_simulated).abs() <= k * self.v_s_diff_std_error
            && (self.v_t_estimated - self.v_t_simulated).abs() <= k * self.v_t_diff_std_error
    }
}

/// Runs `trials` draws; `estimator` maps each draw to `(V̂(S), V̂(T))`.
pub fn unbiasedness_check<F>(
    sampler: &impl FeatureSampler,
    n: usize,
    trials: usize,
    seed: u64,
    estimator: F,
) -> Result<UnbiasednessReport>
where
    F: Fn(&FeatureMatrix) -> Result<(f64, f64)> + Sync,
{
    require_three(n)?;
    let model = sampler.model();
    let p = model.p();
    let expected_t = DMatrix::<f64>::identity(p, p) * model.zeta_bar;
    let draws: Vec<[f64; 4]> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed_stream(seed, &[t as u64]));
            let phi = sampler.sample(n, &mut rng);
            let s = sample_covariance(&phi)?;
            let err_s = (s.values() - model.sigma_true.values()).norm_squared();
            let err_t = (target(&s).values() - &expected_t).norm_squared();
            let (vs, vt) = estimator(&phi)?;
            Ok([err_s, vs, err_t, vt])
        })
        .collect::<Result<_>>()?;
    let col = |k: usize| draws.iter().map(|d| d[k]).collect::<Vec<_>>();
    let diff = |a: usize, b: usize| draws.iter().map(|d| d[a] - d[b]).collect::<Vec<_>>();
    let (v_s_simulated, _) = mean_and_std_error(&col(0));
    let (v_s_estimated, _) = mean_and_std_error(&col(1));
    let (_, v_s_diff_std_error) = mean_and_std_error(&diff(1, 0));
    let (v_t_simulated, _) = mean_and_std_error(&col(2));
    let (v_t_estimated, _) = mean_and_std_error(&col(3));
    let (_, v_t_diff_std_error) = mean_and_std_error(&diff(3, 2));
    Ok(UnbiasednessReport {
        v_s_simulated,
        v_s_estimated,
        v_s_diff_std_error,
        v_t_simulated,
        v_t_estimated,
        v_t_diff_std_error,
        n,
        trials,
        seed,
    })
}

/// Direct feature-space estimators, for use with [`unbiasedness_check`].
pub fn direct_estimators(phi: &FeatureMatrix) -> Result<(f64, f64)> {
    Ok((v_hat_s_direct(phi)?, v_hat_t_direct(phi)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;

    fn random_phi(p: usize, n: usize, seed: u64) -> FeatureMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        FeatureMatrix::new(DMatrix::from_fn(p, n, |_, _| rng.random_range(-1.0..1.0))).unwrap()
    }

    #[test]
    fn identical_columns_have_zero_covariance() {
        let phi = FeatureMatrix::new(DMatrix::from_fn(3, 4, |i, _| i as f64 + 0.5)).unwrap();
        assert_eq!(sample_covariance(&phi).unwrap().values().norm(), 0.0);
        assert_eq!(v_hat_s_direct(&phi).unwrap(), 0.0);
        assert_eq!(v_hat_t_direct(&phi).unwrap(), 0.0);
    }

    #[test]
    fn scalar_sample_variance() {
        let phi = FeatureMatrix::new(DMatrix::from_row_slice(1, 3, &[1.0, 2.0, 3.0])).unwrap();
        assert_relative_eq!(sample_covariance(&phi).unwrap().values()[(0, 0)], 1.0);
    }

    #[test]
    fn sample_covariance_needs_two_columns() {
        let phi = random_phi(2, 1, 0);
        assert!(sample_covariance(&phi).is_err());
    }

    #[test]
    fn sample_covariance_ignores_constant_shift() {
        let phi = random_phi(4, 7, 1);
        let shift = DVector::from_vec(vec![3.0, -2.0, 0.5, 10.0]);
        let mut moved = phi.values().clone();
        for mut c in moved.column_iter_mut() {
            c += &shift;
        }
        let a = sample_covariance(&phi).unwrap();
        let b = sample_covariance(&FeatureMatrix::new(moved).unwrap()).unwrap();
        assert!((a.values() - b.values()).norm() <= 1e-12 * a.values().norm());
    }

    #[test]
    fn target_examples() {
        let eye = CovMatrix::new(DMatrix::identity(3, 3)).unwrap();
        assert_eq!(target(&eye).values(), &DMatrix::<f64>::identity(3, 3));
        let s = CovMatrix::diagonal(&[3.0, 1.0]).unwrap();
        assert_eq!(target(&s).values(), &(DMatrix::<f64>::identity(2, 2) * 2.0));
        let s = sample_covariance(&random_phi(5, 8, 2)).unwrap();
        assert_relative_eq!(
            target(&s).values().norm_squared(),
            s.trace().powi(2) / 5.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn shrink_covariance_endpoints_and_spectrum() {
        let s = sample_covariance(&random_phi(4, 9, 3)).unwrap();
        assert_eq!(shrink_covariance(&s, 0.0).unwrap().values(), s.values());
        let t = target(&s);
        assert!((shrink_covariance(&s, 1.0).unwrap().values() - t.values()).norm() < 1e-15);
        assert!(shrink_covariance(&s, 1.5).is_err());
        assert!(shrink_covariance(&s, -0.1).is_err());

        let lambda = 0.3;
        let shrunk = sym_eigendecompose(shrink_covariance(&s, lambda).unwrap().values()).unwrap();
        let orig = sym_eigendecompose(s.values()).unwrap();
        let mean = s.trace() / 4.0;
        for i in 0..4 {
            assert_relative_eq!(
                shrunk.eigenvalues[i],
                (1.0 - lambda) * orig.eigenvalues[i] + lambda * mean,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn eigenvalue_mean_is_trace_over_p() {
        let s = sample_covariance(&random_phi(6, 10, 4)).unwrap();
        let eig = sym_eigendecompose(s.values()).unwrap();
        assert_relative_eq!(eig.eigenvalues.mean(), s.trace() / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn v_hat_s_direct_is_quartic_in_scale() {
        let phi = random_phi(4, 6, 5);
        let scaled = FeatureMatrix::new(phi.values() * 3.0).unwrap();
        assert_relative_eq!(
            v_hat_s_direct(&scaled).unwrap(),
            81.0 * v_hat_s_direct(&phi).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn v_hat_t_direct_vanishes_for_equidistant_columns() {
        // Columns at ±e_1, ±e_2: every column is at distance 1 from the mean.
        let phi = FeatureMatrix::new(DMatrix::from_column_slice(
            2,
            4,
            &[1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, -1.0],
        ))
        .unwrap();
        assert!(v_hat_t_direct(&phi).unwrap().abs() < 1e-15);
        assert!(v_hat_s_direct(&phi).unwrap() > 0.0);
    }

    #[test]
    fn direct_estimators_need_three_columns() {
        let phi = random_phi(3, 2, 6);
        assert!(matches!(
            v_hat_s_direct(&phi),
            Err(Error::InsufficientObservations(2))
        ));
        assert!(v_hat_t_direct(&phi).is_err());
    }

    #[test]
    fn bias_dispersion_examples() {
        let eye = SyntheticModel::new(CovMatrix::new(DMatrix::identity(4, 4)).unwrap()).unwrap();
        let r = bias_dispersion_check(&eye);
        assert_eq!(r.squared_bias, 0.0);
        assert_eq!(r.dispersion, 0.0);
        assert!(r.holds);

        let two = SyntheticModel::new(CovMatrix::diagonal(&[3.0, 1.0]).unwrap()).unwrap();
        let r = bias_dispersion_check(&two);
        assert_relative_eq!(r.squared_bias, 2.0, max_relative = 1e-14);
        assert_relative_eq!(r.dispersion, 2.0, max_relative = 1e-14);
        assert!(r.holds);
    }

    #[test]
    fn bias_dispersion_holds_for_random_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = DMatrix::from_fn(6, 6, |_, _| rng.random_range(-1.0..1.0));
        let sigma = CovMatrix::new(&a * a.transpose()).unwrap();
        let r = bias_dispersion_check(&SyntheticModel::new(sigma).unwrap());
        assert!(r.relative_error <= 1e-10, "{r:?}");
    }

    #[test]
    fn sampler_reproduces_covariance() {
        let model = SyntheticModel::new(CovMatrix::diagonal(&[1.0, 4.0]).unwrap()).unwrap();
        let sampler = GaussianSampler::new(model);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let s = sample_covariance(&sampler.sample(200_000, &mut rng)).unwrap();
        assert!((s.values()[(0, 0)] - 1.0).abs() < 0.02);
        assert!((s.values()[(1, 1)] - 4.0).abs() < 0.08);
        assert!(s.values()[(0, 1)].abs() < 0.03);
    }

    #[test]
    fn oracle_rejects_too_few_trials() {
        let model = SyntheticModel::new(CovMatrix::diagonal(&[1.0, 2.0]).unwrap()).unwrap();
        assert!(oracle_lambda(&GaussianSampler::new(model), 10, 999, 0).is_err());
    }

    #[test]
    fn oracle_for_identity_is_near_one() {
        let model = SyntheticModel::new(CovMatrix::new(DMatrix::identity(5, 5)).unwrap()).unwrap();
        let o = oracle_lambda(&GaussianSampler::new(model), 10, 20_000, 42).unwrap();
        assert!(o.v_t <= o.v_s);
        assert!(o.estimate >= 0.9, "{o:?}");
    }

    #[test]
    fn oracle_for_spread_spectrum_is_interior() {
        let model =
            SyntheticModel::new(CovMatrix::diagonal(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap()).unwrap();
        let o = oracle_lambda(&GaussianSampler::new(model), 10, 20_000, 43).unwrap();
        assert!(o.estimate > 0.0 && o.estimate < 1.0, "{o:?}");
    }

    #[test]
    fn excess_dispersion_matches_v_s() {
        let model =
            SyntheticModel::new(CovMatrix::diagonal(&[1.0, 2.0, 3.0]).unwrap()).unwrap();
        let r = excess_dispersion_check(&GaussianSampler::new(model), 8, 20_000, 44).unwrap();
        assert!(r.gap_mean.abs() <= 3.0 * r.gap_std_error, "{r:?}");
        assert!(r.sample_dispersion > r.population_dispersion);
    }
}
