//! Two-class kernel Fisher discriminant in dual form.
//!
//! With Gram matrix `G` over all training points and `G_c` its columns for
//! class `c`, the class mean vectors are `m_c = G_c 1 / n_c` and the
//! within-class scatter is `N = Σ_c G_c (I - 11ᵀ/n_c) G_cᵀ`. The direction
//! solves `N_reg α = m_1 - m_2`, where `N_reg` is either the additive ridge
//! `N + λI` or the shrinkage form `(1-λ̂) N + λ̂ (Tr(N)/p) I` with `λ̂`
//! estimated from the pooled centered kernel.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{
    center_gram, cross_gram, gram_matrix, sym_eigendecompose, DataMatrix, KernelSpec,
};
use crate::shrinkage::{lambda_hat, FeatureDim, ShrinkageEstimate};

/// The ridge used by the baseline discriminant.
pub const DEFAULT_FIXED_RIDGE: f64 = 1e-3;

/// Relative residual `‖N_reg α - b‖ / ‖b‖` accepted from the Cholesky solve.
pub const SOLVE_RESIDUAL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Class {
    One,
    Two,
}

impl Class {
    pub fn as_u8(self) -> u8 {
        match self {
            Class::One => 1,
            Class::Two => 2,
        }
    }

    pub fn from_u8(v: u8) -> Result<Self> {
        match v {
            1 => Ok(Class::One),
            2 => Ok(Class::Two),
            other => Err(Error::InvalidDataset(format!("label {other} is not 1 or 2"))),
        }
    }
}

/// How the within-class scatter is regularized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegularizerSpec {
    /// `N + λI`
    FixedRidge { lambda: f64 },
    /// `(1-λ̂) N + λ̂ (Tr(N)/p) I`
    Shrinkage { p: FeatureDim },
}

impl RegularizerSpec {
    pub fn fixed_ridge(lambda: f64) -> Result<Self> {
        let spec = RegularizerSpec::FixedRidge { lambda };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            RegularizerSpec::FixedRidge { lambda } if !(lambda > 0.0 && lambda.is_finite()) => {
                Err(Error::InvalidConfig(format!(
                    "fixed ridge must be positive, got {lambda}"
                )))
            }
            _ => Ok(()),
        }
    }

    fn name(&self) -> String {
        match self {
            RegularizerSpec::FixedRidge { lambda } => format!("fixed ridge (lambda = {lambda})"),
            RegularizerSpec::Shrinkage { p } => format!("shrinkage ({p:?})"),
        }
    }
}

/// Observations with a class label each; both classes present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    data: DataMatrix,
    labels: Vec<Class>,
}

impl LabeledDataset {
    pub fn new(data: DataMatrix, labels: Vec<Class>) -> Result<Self> {
        if labels.len() != data.n() {
            return Err(Error::DimensionMismatch {
                expected: data.n(),
                got: labels.len(),
            });
        }
        let ds = Self { data, labels };
        let (a, b) = ds.counts();
        if a == 0 || b == 0 {
            return Err(Error::InvalidDataset(format!(
                "both classes must be present (counts {a}, {b})"
            )));
        }
        Ok(ds)
    }

    pub fn data(&self) -> &DataMatrix {
        &self.data
    }

    pub fn labels(&self) -> &[Class] {
        &self.labels
    }

    pub fn counts(&self) -> (usize, usize) {
        let one = self.labels.iter().filter(|&&c| c == Class::One).count();
        (one, self.labels.len() - one)
    }

    pub fn indices_of(&self, class: Class) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == class)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Trained discriminant. `score(x) = Σ_i α_i k(x_i, x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KfdaModel {
    pub alpha: DVector<f64>,
    pub threshold: f64,
    pub train_data: DataMatrix,
    pub labels: Vec<Class>,
    pub kernel: KernelSpec,
    pub regularizer: RegularizerSpec,
    /// Ridge for [`RegularizerSpec::FixedRidge`], `λ̂` for shrinkage.
    pub lambda_used: f64,
    /// Mean training score of class 1 and class 2.
    pub class_means_projected: (f64, f64),
    pub shrinkage: Option<ShrinkageEstimate>,
    /// The Cholesky solve failed its residual check and an eigenvalue-based
    /// pseudo-solve was used instead.
    pub pseudo_solve: bool,
}

pub fn train(ds: &LabeledDataset, kernel: KernelSpec, reg: RegularizerSpec) -> Result<KfdaModel> {
    kernel.validate()?;
    reg.validate()?;
    let n = ds.data().n();
    let min_n = match reg {
        RegularizerSpec::Shrinkage { .. } => 3,
        RegularizerSpec::FixedRidge { .. } => 2,
    };
    if n < min_n {
        return Err(Error::InsufficientObservations(n));
    }

    let gram = gram_matrix(ds.data(), &kernel)?;
    let g = gram.values();
    let mut means = Vec::with_capacity(2);
    let mut scatter = DMatrix::<f64>::zeros(n, n);
    for class in [Class::One, Class::Two] {
        let idx = ds.indices_of(class);
        let gc = g.select_columns(&idx);
        let mean = gc.column_mean();
        let mut centered = gc;
        for mut col in centered.column_iter_mut() {
            col -= &mean;
        }
        scatter += &centered * centered.transpose();
        means.push(mean);
    }
    let rhs = &means[0] - &means[1];
    if rhs.amax() == 0.0 {
        return Err(Error::InvalidDataset(
            "class mean vectors coincide in feature space".into(),
        ));
    }

    let (regularized, lambda_used, shrinkage) = match reg {
        RegularizerSpec::FixedRidge { lambda } => {
            let mut m = scatter;
            for i in 0..n {
                m[(i, i)] += lambda;
            }
            (m, lambda, None)
        }
        RegularizerSpec::Shrinkage { p } => {
            let est = lambda_hat(&center_gram(&gram)?, p)?;
            let p_eff = p.resolve(n)? as f64;
            let lam = est.lambda_hat;
            let shift = lam * scatter.trace() / p_eff;
            let mut m = scatter * (1.0 - lam);
            for i in 0..n {
                m[(i, i)] += shift;
            }
            (m, lam, Some(est))
        }
    };

    let (alpha, pseudo_solve) = solve_spd(&regularized, &rhs, &reg)?;
    let mu1 = alpha.dot(&means[0]);
    let mu2 = alpha.dot(&means[1]);
    if !(mu1.is_finite() && mu2.is_finite()) || mu1 == mu2 {
        return Err(Error::SingularScatter {
            regularizer: reg.name(),
        });
    }
    Ok(KfdaModel {
        alpha,
        threshold: 0.5 * (mu1 + mu2),
        train_data: ds.data().clone(),
        labels: ds.labels().to_vec(),
        kernel,
        regularizer: reg,
        lambda_used,
        class_means_projected: (mu1, mu2),
        shrinkage,
        pseudo_solve,
    })
}

/// Cholesky solve with a residual check, falling back to a pseudo-solve on
/// the eigenvalues above `1e-12 · λ_max`.
fn solve_spd(
    m: &DMatrix<f64>,
    b: &DVector<f64>,
    reg: &RegularizerSpec,
) -> Result<(DVector<f64>, bool)> {
    let b_norm = b.norm();
    if let Some(chol) = m.clone().cholesky() {
        let x = chol.solve(b);
        if x.iter().all(|v| v.is_finite())
            && (m * &x - b).norm() <= SOLVE_RESIDUAL_TOLERANCE * b_norm
        {
            return Ok((x, false));
        }
    }
    let singular = || Error::SingularScatter {
        regularizer: reg.name(),
    };
    let eig = sym_eigendecompose(m).map_err(|_| singular())?;
    let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    if top <= 0.0 {
        return Err(singular());
    }
    let cutoff = 1e-12 * top;
    let coeffs = eig.eigenvectors.transpose() * b;
    let mut x = DVector::zeros(b.len());
    for (j, &ev) in eig.eigenvalues.iter().enumerate() {
        if ev > cutoff {
            x += eig.eigenvectors.column(j) * (coeffs[j] / ev);
        }
    }
    if x.amax() == 0.0 || x.iter().any(|v| !v.is_finite()) {
        return Err(singular());
    }
    Ok((x, true))
}

impl KfdaModel {
    /// The label assigned to scores above the threshold.
    fn upper_class(&self) -> Class {
        if self.class_means_projected.0 > self.class_means_projected.1 {
            Class::One
        } else {
            Class::Two
        }
    }

    pub fn classify_score(&self, score: f64) -> Class {
        let upper = self.upper_class();
        if score > self.threshold {
            upper
        } else if upper == Class::One {
            Class::Two
        } else {
            Class::One
        }
    }
}

pub fn project(model: &KfdaModel, points: &DataMatrix) -> Result<DVector<f64>> {
    let c = cross_gram(points, &model.train_data, &model.kernel)?;
    Ok(c * &model.alpha)
}

pub fn classify(model: &KfdaModel, points: &DataMatrix) -> Result<Vec<Class>> {
    Ok(project(model, points)?
        .iter()
        .map(|&s| model.classify_score(s))
        .collect())
}

/// Fraction of `ds` assigned to the wrong class.
pub fn misclassification_rate(model: &KfdaModel, ds: &LabeledDataset) -> Result<f64> {
    let predicted = classify(model, ds.data())?;
    let wrong = predicted
        .iter()
        .zip(ds.labels())
        .filter(|(p, l)| p != l)
        .count();
    Ok(wrong as f64 / ds.labels().len() as f64)
}
