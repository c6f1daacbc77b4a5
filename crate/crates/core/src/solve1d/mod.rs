//! Solvers for the one-dimensional models: discrete eigenpairs of assembled
//! forms, generalized solutions shot through measure atoms, renormalized
//! transfer matrices with their growth rates, and Shnol-type spectral scans.

pub(crate) mod prop;

pub mod integrate;
pub mod shnol;
pub mod transfer;

pub use integrate::{integrate_solution, GeneralizedSolution};
pub use shnol::{interval_symmetric_difference, shnol_scan, SpectrumReport};
pub use transfer::{growth_rate, transfer_matrix, Transfer};

use nalgebra::DMatrix;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::forms::DiscreteForm;
use crate::linalg::dense::sym_eigen_sorted;
use crate::linalg::{axpy, dot, norm2, scale, shift_invert_smallest, SymTridiag};

/// A generalized eigenpair `(K + diag p) u = lambda M u` of a discrete form,
/// normalized to `(u, u)_m = 1`. The residual is the 2-norm defect of the
/// mass-symmetrized pencil.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub lambda: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

/// The `k` smallest eigenpairs, ascending. Path-coupled forms go through
/// Sturm bisection plus inverse iteration; branched forms through
/// shift-inverted Lanczos with deflation. Nearly equal eigenvalues (within
/// `eig_cluster_rel` of the spectral width) are re-orthogonalized and
/// Rayleigh-Ritz rotated so each returned pair is an eigenpair of the
/// cluster's invariant subspace, not an arbitrary mix.
pub fn eig_smallest(form: &DiscreteForm, k: usize, tol: &Tolerances) -> Result<Vec<EigenPair>> {
    let n = form.dim();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("cannot extract {k} eigenpairs from dimension {n}")));
    }
    let sym = form.symmetrized();
    let (glo, ghi) = sym.gershgorin();
    let floor_scale = glo.abs().max(ghi.abs()).max(1.0);
    let raw: Vec<(f64, Vec<f64>)> = match sym.to_tridiagonal() {
        Some(t) => tridiag_pairs(&t, k, tol)?,
        None => shift_invert_smallest(&sym, k, 23)?,
    };
    let mut pairs = Vec::with_capacity(k);
    for (idx, (rho, v)) in raw.into_iter().enumerate() {
        let mut y = vec![0.0; n];
        sym.matvec(&v, &mut y);
        for (yi, vi) in y.iter_mut().zip(&v) {
            *yi -= rho * vi;
        }
        let residual = norm2(&y);
        // The floor is the rounding noise of applying the operator itself.
        let allowed =
            (tol.eig_residual * (1.0 + rho.abs())).max(100.0 * f64::EPSILON * floor_scale);
        if residual > allowed {
            return Err(Error::numerical(format!(
                "eigenpair {idx} residual {residual:.3e} exceeds {allowed:.3e}"
            )));
        }
        let vector: Vec<f64> = v.iter().zip(form.mass()).map(|(vi, m)| vi / m.sqrt()).collect();
        pairs.push(EigenPair { lambda: rho, vector, residual });
    }
    Ok(pairs)
}

/// Number of eigenvalues `<= x`, by Sturm counting on path-coupled forms and
/// a dense decomposition on moderate branched ones.
pub fn count_eigenvalues_below(form: &DiscreteForm, x: f64) -> Result<usize> {
    let sym = form.symmetrized();
    if let Some(t) = sym.to_tridiagonal() {
        return Ok(t.count_below(x));
    }
    if sym.dim() > 4096 {
        return Err(Error::invalid(
            "eigenvalue counting needs a path-coupled or moderate-size form",
        ));
    }
    let (vals, _) = sym_eigen_sorted(sym.to_dense());
    Ok(vals.iter().filter(|&&v| v <= x).count())
}

fn tridiag_pairs(t: &SymTridiag, k: usize, tol: &Tolerances) -> Result<Vec<(f64, Vec<f64>)>> {
    let n = t.dim();
    let (glo, ghi) = t.gershgorin();
    let width = (ghi - glo).max(f64::MIN_POSITIVE);
    let lams: Vec<f64> = (0..k).map(|i| t.eigenvalue(i)).collect();
    let mut out: Vec<(f64, Vec<f64>)> = Vec::with_capacity(k);
    let mut i = 0;
    while i < k {
        let mut j = i + 1;
        while j < k && lams[j] - lams[j - 1] <= tol.eig_cluster_rel * width {
            j += 1;
        }
        let mut vecs: Vec<Vec<f64>> = Vec::with_capacity(j - i);
        for idx in i..j {
            let mut chosen = None;
            for attempt in 0..8u64 {
                let seed = 11 + idx as u64 + 7919 * attempt;
                let Ok((_, mut v)) = t.eigenpair_near(lams[idx], seed) else { continue };
                for w in &vecs {
                    let c = dot(w, &v);
                    axpy(-c, w, &mut v);
                }
                let nrm = norm2(&v);
                if nrm > 0.05 || (attempt == 7 && nrm > 0.0) {
                    scale(1.0 / nrm, &mut v);
                    chosen = Some(v);
                    break;
                }
            }
            vecs.push(chosen.ok_or_else(|| {
                Error::numerical("inverse iteration could not span an eigenvalue cluster")
            })?);
        }
        if j - i == 1 {
            let v = vecs.pop().unwrap();
            out.push((t.quadratic(&v), v));
        } else {
            // Rayleigh-Ritz on the cluster span: rotated vectors are
            // eigenpairs of the invariant subspace, so their residuals see
            // the subspace error rather than the in-cluster spread.
            let sz = j - i;
            let tv: Vec<Vec<f64>> = vecs
                .iter()
                .map(|v| {
                    let mut y = vec![0.0; n];
                    t.matvec(v, &mut y);
                    y
                })
                .collect();
            let block = DMatrix::from_fn(sz, sz, |r, c| {
                0.5 * (dot(&vecs[r], &tv[c]) + dot(&vecs[c], &tv[r]))
            });
            let (mus, q) = sym_eigen_sorted(block);
            for a in 0..sz {
                let mut v = vec![0.0; n];
                for (c, w) in vecs.iter().enumerate() {
                    axpy(q[(c, a)], w, &mut v);
                }
                let nrm = norm2(&v);
                scale(1.0 / nrm, &mut v);
                out.push((mus[a], v));
            }
        }
        i = j;
    }
    Ok(out)
}
