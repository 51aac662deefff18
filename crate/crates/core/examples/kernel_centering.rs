//! Builds an RBF Gram matrix, centers it, and shows the centered kernel's
//! basic invariants.
//!
//! ```bash
//! cargo run -p kshrink --example kernel_centering
//! ```

use kshrink::kernel::{center_gram, gram_matrix, sym_eigendecompose, DataMatrix, KernelSpec};

fn main() -> kshrink::Result<()> {
    let data = DataMatrix::from_rows(&[
        [0.0, 0.0],
        [0.3, -0.1],
        [-0.5, 0.2],
        [0.4, 0.4],
        [0.1, -0.6],
    ])?;
    let raw = gram_matrix(&data, &KernelSpec::rbf(0.1)?)?;
    println!("raw Gram matrix:{}", raw.values());

    let k = center_gram(&raw)?;
    println!("centered:{}", k.values());

    let row_sums = k.values().column_sum();
    println!("max |row sum|      = {:.3e}", row_sums.amax());
    println!("trace              = {:.6}", k.trace());
    println!("Frobenius norm     = {:.6}", k.frobenius_norm());

    let eig = sym_eigendecompose(k.values())?;
    println!("eigenvalues        = {:.6}", eig.eigenvalues.transpose());
    println!("smallest is ~0 since the centering removes the constant direction");
    Ok(())
}
