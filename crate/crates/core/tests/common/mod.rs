//! Reference computations shared by the integration tests. Nothing here calls
//! into the library's own numerics.

#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// `ln Γ(k/2)` for a positive integer `k`, from `Γ(1/2) = √π`, `Γ(1) = 1` and
/// `Γ(x + 1) = x Γ(x)`.
fn ln_gamma_half(k: u32) -> f64 {
    let (mut x, mut acc) = if k.is_multiple_of(2) {
        (1.0, 0.0)
    } else {
        (0.5, 0.5 * std::f64::consts::PI.ln())
    };
    while x < k as f64 / 2.0 {
        acc += x.ln();
        x += 1.0;
    }
    acc
}

fn t_density(x: f64, dof: u32) -> f64 {
    let nu = dof as f64;
    let ln_c = ln_gamma_half(dof + 1) - ln_gamma_half(dof) - 0.5 * (nu * std::f64::consts::PI).ln();
    (ln_c - 0.5 * (nu + 1.0) * (1.0 + x * x / nu).ln()).exp()
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        left + right + (left + right - whole) / 15.0
    } else {
        adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
}

/// Two-sided Student-t tail probability by adaptive Simpson quadrature of the
/// density over `[0, |t|]`.
pub fn t_two_sided_quadrature(t: f64, dof: u32) -> f64 {
    let f = |x: f64| t_density(x, dof);
    let b = t.abs();
    if b == 0.0 {
        return 1.0;
    }
    let (fa, fm, fb) = (f(0.0), f(b / 2.0), f(b));
    let whole = simpson(0.0, b, fa, fm, fb);
    let half_mass = adaptive(&f, 0.0, b, fa, fm, fb, whole, 1e-13, 50);
    (1.0 - 2.0 * half_mass).max(0.0)
}

/// `t = mean(d) / (sd(d)/√m)` with the `m - 1` denominator.
pub fn paired_t(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let m = d.len() as f64;
    let mean = d.iter().sum::<f64>() / m;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    mean / (var.sqrt() / m.sqrt())
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// `AAᵀ` with `A` having `rank` Gaussian columns, plus a random diagonal jitter.
pub fn random_psd(p: usize, rank: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let a = gaussian_matrix(p, rank, rng);
    let mut s = &a * a.transpose();
    if rng.random_bool(0.5) {
        for i in 0..p {
            s[(i, i)] += rng.random_range(0.0..2.0);
        }
    }
    (&s + s.transpose()) * 0.5
}

/// `I - 11ᵀ/n`.
pub fn centering(n: usize) -> DMatrix<f64> {
    DMatrix::identity(n, n) - DMatrix::from_element(n, n, 1.0 / n as f64)
}
