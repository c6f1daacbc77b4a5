//! Structure-exploiting linear algebra: sparse symmetric storage, Sturm
//! bisection for symmetric tridiagonal matrices, skyline LDL^T factorization
//! for quasi-one-dimensional sparsity, and Lanczos with full
//! reorthogonalization. Dense fallbacks are delegated to nalgebra.

pub mod dense;
pub mod lanczos;
pub mod skyline;
pub mod sparse;
pub mod tridiag;

pub use lanczos::{lambda_min_estimate, shift_invert_smallest};
pub use skyline::SkylineLdlt;
pub use sparse::SparseSym;
pub use tridiag::SymTridiag;

/// Abstract symmetric operator on `R^n`.
pub trait LinOp {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scale(alpha: f64, x: &mut [f64]) {
    for xi in x.iter_mut() {
        *xi *= alpha;
    }
}

/// SplitMix64 step; the basis of all deterministic pseudo-random starts.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Deterministic unit vector; identical across runs and thread counts.
pub fn deterministic_unit_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut state = seed ^ 0x6a09e667f3bcc909;
    let mut v: Vec<f64> = (0..n)
        .map(|_| {
            let u = splitmix64(&mut state);
            // uniform in (-1, 1), never exactly zero
            (u >> 11) as f64 / (1u64 << 52) as f64 * 2.0 - 1.0 + 1e-12
        })
        .collect();
    let nrm = norm2(&v);
    scale(1.0 / nrm, &mut v);
    v
}
