//! Regularization of kernel matrices by MSE-optimal shrinkage of the implied
//! feature-space covariance, estimated from the kernel matrix alone.
//!
//! - [`kernel`]: kernel functions, Gram matrices, centering, eigendecomposition.
//! - [`shrinkage`]: `V̂(S)`, `V̂(T)`, `‖T - S‖²`, the clipped coefficient `λ̂`
//!   and the regularized kernel, all in kernel form.
//! - [`feature`]: the same quantities computed explicitly in feature space,
//!   plus Monte Carlo oracles with a known population covariance.
//! - [`kfda`]: two-class kernel Fisher discriminant with a fixed ridge or
//!   shrinkage regularization of the within-class scatter.
//! - [`experiments`]: the synthetic two-class benchmark, paired t-tests,
//!   sweeps and decision-boundary grids.
//!
//! ```
//! use kshrink::{center_gram, gram_matrix, lambda_hat, regularize_kernel, DataMatrix, FeatureDim, KernelSpec};
//!
//! let data = DataMatrix::from_rows(&[[0.0, 0.1], [0.4, -0.2], [-0.3, 0.5], [0.2, 0.2]])?;
//! let k = center_gram(&gram_matrix(&data, &KernelSpec::rbf(0.1)?)?)?;
//! let est = lambda_hat(&k, FeatureDim::Observations)?;
//! assert!((0.0..=1.0).contains(&est.lambda_hat));
//! let reg = regularize_kernel(&k, est.lambda_hat, FeatureDim::Observations)?;
//! assert_eq!(reg.values().nrows(), 4);
//! # Ok::<(), kshrink::Error>(())
//! ```

pub mod error;
pub mod experiments;
pub mod feature;
pub mod kernel;
pub mod kfda;
pub mod shrinkage;
pub mod stats;

pub use error::{Error, Result};
pub use kernel::{center_gram, gram_matrix, DataMatrix, KernelMatrix, KernelSpec};
pub use kfda::{classify, project, train, Class, KfdaModel, LabeledDataset, RegularizerSpec};
pub use shrinkage::{lambda_hat, regularize_kernel, FeatureDim, ShrinkageEstimate};
