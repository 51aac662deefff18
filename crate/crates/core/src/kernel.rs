//! Kernel functions, Gram matrices, centering and symmetric eigendecomposition.
//!
//! A [`RawGram`] holds the uncentered inner products `k(x_i, x_j)`. Centering
//! with `H = I - 11ᵀ/n` turns it into a [`KernelMatrix`], the object whose
//! shrinkage coefficient the [`crate::shrinkage`] module estimates.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for PSD and centering checks, scaled by `‖K‖_F`.
pub const PSD_TOLERANCE: f64 = 1e-8;

/// Observations stored row-major: row `i` is `x_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataMatrix {
    n: usize,
    q: usize,
    values: Vec<f64>,
}

impl DataMatrix {
    pub fn from_row_major(n: usize, q: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty("data matrix has no observations"));
        }
        if q == 0 {
            return Err(Error::Empty("data matrix has zero input dimension"));
        }
        if values.len() != n * q {
            return Err(Error::DimensionMismatch {
                expected: n * q,
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("data matrix"));
        }
        Ok(Self { n, q, values })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let q = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut values = Vec::with_capacity(rows.len() * q);
        for row in rows {
            let row = row.as_ref();
            if row.len() != q {
                return Err(Error::DimensionMismatch {
                    expected: q,
                    got: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::from_row_major(rows.len(), q, values)
    }

    /// Builds from an `n × q` matrix.
    pub fn from_matrix(m: &DMatrix<f64>) -> Result<Self> {
        let (n, q) = m.shape();
        let values = (0..n)
            .flat_map(|i| (0..q).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)])
            .collect();
        Self::from_row_major(n, q, values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.q..(i + 1) * self.q]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.q)
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.q, &self.values)
    }

    /// Stacks `other` below `self`.
    pub fn concat(&self, other: &DataMatrix) -> Result<Self> {
        if self.q != other.q {
            return Err(Error::DimensionMismatch {
                expected: self.q,
                got: other.q,
            });
        }
        let mut values = self.values.clone();
        values.extend_from_slice(&other.values);
        Self::from_row_major(self.n + other.n, self.q, values)
    }

    /// Keeps the rows at `indices`, in order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(indices.len() * self.q);
        for &i in indices {
            values.extend_from_slice(self.row(i));
        }
        Self::from_row_major(indices.len(), self.q, values)
    }

    /// Multiplies every entry by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::from_row_major(
            self.n,
            self.q,
            self.values.iter().map(|v| v * c).collect(),
        )
    }
}

/// Kernel function `k(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    /// `exp(-‖x - y‖² / (2σ²))`
    Rbf { sigma2: f64 },
    /// `xᵀy`
    Linear,
    /// `(xᵀy + offset)^degree`
    Polynomial { degree: u32, offset: f64 },
}

impl KernelSpec {
    pub fn rbf(sigma2: f64) -> Result<Self> {
        let spec = KernelSpec::Rbf { sigma2 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn polynomial(degree: u32, offset: f64) -> Result<Self> {
        let spec = KernelSpec::Polynomial { degree, offset };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Rbf { sigma2 } if !(sigma2 > 0.0 && sigma2.is_finite()) => Err(
                Error::InvalidKernel(format!("RBF sigma2 must be positive, got {sigma2}")),
            ),
            KernelSpec::Polynomial { degree: 0, .. } => Err(Error::InvalidKernel(
                "polynomial degree must be at least 1".into(),
            )),
            KernelSpec::Polynomial { offset, .. } if !(offset >= 0.0 && offset.is_finite()) => {
                Err(Error::InvalidKernel(format!(
                    "polynomial offset must be non-negative, got {offset}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Evaluates without checking lengths; callers guarantee `x.len() == y.len()`.
    pub(crate) fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            KernelSpec::Rbf { sigma2 } => {
                let d2: f64 = x
                    .iter()
                    .zip(y)
                    .map(|(a, b)| {
                        let d = a - b;
                        d * d
                    })
                    .sum();
                (-d2.max(0.0) / (2.0 * sigma2)).exp()
            }
            KernelSpec::Linear => dot(x, y),
            KernelSpec::Polynomial { degree, offset } => {
                (dot(x, y) + offset).powi(degree as i32)
            }
        }
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn kernel_eval(x: &[f64], y: &[f64], spec: &KernelSpec) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    spec.validate()?;
    Ok(spec.eval_unchecked(x, y))
}

/// Uncentered Gram matrix `G[i][j] = k(x_i, x_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RawGram {
    values: DMatrix<f64>,
}

impl RawGram {
    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.values
    }
}

/// Each unordered pair is evaluated once and mirrored, so the result is
/// exactly symmetric.
pub fn gram_matrix(data: &DataMatrix, spec: &KernelSpec) -> Result<RawGram> {
    spec.validate()?;
    let n = data.n();
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        let xi = data.row(i);
        for j in i..n {
            let v = spec.eval_unchecked(xi, data.row(j));
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(RawGram { values: g })
}

/// Rectangular kernel matrix `C[i][j] = k(a_i, b_j)`.
pub fn cross_gram(a: &DataMatrix, b: &DataMatrix, spec: &KernelSpec) -> Result<DMatrix<f64>> {
    if a.q() != b.q() {
        return Err(Error::DimensionMismatch {
            expected: a.q(),
            got: b.q(),
        });
    }
    spec.validate()?;
    Ok(DMatrix::from_fn(a.n(), b.n(), |i, j| {
        spec.eval_unchecked(a.row(i), b.row(j))
    }))
}

/// Centered, symmetric, positive semidefinite kernel matrix `K = HΦᵀΦH`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    values: DMatrix<f64>,
}

impl KernelMatrix {
    /// Validates an externally produced centered kernel matrix.
    ///
    /// Asymmetry below `1e-10·‖K‖_F` is averaged away; row sums and negative
    /// eigenvalues must stay within `1e-8·‖K‖_F`.
    pub fn try_new(values: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = values.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(Error::Empty("kernel matrix"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("kernel matrix"));
        }
        let norm = values.norm();
        let asym = max_asymmetry(&values);
        if asym > 1e-10 * norm {
            return Err(Error::NotSymmetric(asym));
        }
        let values = symmetrize(values);
        let max_row_sum = values
            .row_iter()
            .map(|r| r.sum().abs())
            .fold(0.0, f64::max);
        if max_row_sum > PSD_TOLERANCE * norm {
            return Err(Error::NotCentered(max_row_sum));
        }
        let min_eig = SymmetricEigen::new(values.clone()).eigenvalues.min();
        if min_eig < -PSD_TOLERANCE * norm {
            return Err(Error::NotPsd(min_eig));
        }
        Ok(Self { values })
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.values
    }

    pub fn trace(&self) -> f64 {
        self.values.trace()
    }

    /// `‖K‖_F`
    pub fn frobenius_norm(&self) -> f64 {
        self.values.norm()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::try_new(&self.values * c)
    }
}

fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

pub(crate) fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    let t = m.transpose();
    (m + t) * 0.5
}

/// `K = H·G·H` with `H = I - 11ᵀ/n`, re-symmetrized as `(K + Kᵀ)/2`.
pub fn center_gram(raw: &RawGram) -> Result<KernelMatrix> {
    let n = raw.n();
    if n < 2 {
        return Err(Error::CenteringTooSmall(n));
    }
    KernelMatrix::try_new(double_center(raw.values()))
}

/// `H·M·H` without forming `H`: subtract row and column means, add back the
/// grand mean.
pub(crate) fn double_center(g: &DMatrix<f64>) -> DMatrix<f64> {
    let n = g.nrows();
    let nf = n as f64;
    let row_means: Vec<f64> = g.row_iter().map(|r| r.sum() / nf).collect();
    let col_means: Vec<f64> = g.column_iter().map(|c| c.sum() / nf).collect();
    let grand = row_means.iter().sum::<f64>() / nf;
    let k = DMatrix::from_fn(n, n, |i, j| g[(i, j)] - row_means[i] - col_means[j] + grand);
    symmetrize(k)
}

/// Eigenvalues in descending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigSystem {
    pub eigenvalues: DVector<f64>,
    /// Column `j` pairs with `eigenvalues[j]`.
    pub eigenvectors: DMatrix<f64>,
}

impl EigSystem {
    /// `VΛVᵀ`
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let scaled = DMatrix::from_fn(
            self.eigenvectors.nrows(),
            self.eigenvectors.ncols(),
            |i, j| self.eigenvectors[(i, j)] * self.eigenvalues[j],
        );
        scaled * self.eigenvectors.transpose()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub fn sym_eigendecompose(m: &DMatrix<f64>) -> Result<EigSystem> {
    let (rows, cols) = m.shape();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("eigendecomposition input"));
    }
    let asym = max_asymmetry(m);
    if asym > 1e-10 * m.norm().max(f64::MIN_POSITIVE) {
        return Err(Error::NotSymmetric(asym));
    }
    let eig = SymmetricEigen::new(symmetrize(m.clone()));
    let mut order: Vec<usize> = (0..rows).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = DVector::from_iterator(rows, order.iter().map(|&i| eig.eigenvalues[i]));
    let eigenvectors =
        DMatrix::from_fn(rows, rows, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(EigSystem {
        eigenvalues,
        eigenvectors,
    })
}
