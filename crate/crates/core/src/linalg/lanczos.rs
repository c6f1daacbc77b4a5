use super::skyline::SkylineLdlt;
use super::sparse::SparseSym;
use super::tridiag::SymTridiag;
use super::{deterministic_unit_vector, dot, norm2, LinOp};
use crate::error::{Error, Result};

/// Orthogonalize `v` against each row of `basis` (classical Gram-Schmidt,
/// applied twice; twice is enough for working-precision orthogonality).
fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(v, q);
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= c * qi;
            }
        }
    }
}

/// Lanczos tridiagonalization with full reorthogonalization. Returns the
/// recurrence coefficients and the orthonormal basis; stops early on
/// breakdown (invariant subspace).
fn tridiagonalize(
    op: &dyn LinOp,
    v0: Vec<f64>,
    max_iter: usize,
    deflate: &[Vec<f64>],
) -> (Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
    let n = op.dim();
    let mut alphas = Vec::new();
    let mut betas = Vec::new();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut v = v0;
    orthogonalize(&mut v, deflate);
    let nrm = norm2(&v);
    if nrm == 0.0 {
        return (alphas, betas, basis);
    }
    for x in v.iter_mut() {
        *x /= nrm;
    }
    let mut w = vec![0.0; n];
    for _ in 0..max_iter.min(n) {
        op.apply(&v, &mut w);
        let alpha = dot(&v, &w);
        alphas.push(alpha);
        basis.push(v.clone());
        // w <- w - alpha v - beta v_prev, then full reorthogonalization.
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi -= alpha * vi;
        }
        orthogonalize(&mut w, &basis);
        orthogonalize(&mut w, deflate);
        let beta = norm2(&w);
        let scale = alphas.iter().fold(0.0f64, |m, a| m.max(a.abs())).max(1.0);
        if beta <= 1e-14 * scale || !beta.is_finite() {
            break;
        }
        betas.push(beta);
        v.clear();
        v.extend(w.iter().map(|x| x / beta));
    }
    if betas.len() >= alphas.len() && !alphas.is_empty() {
        betas.truncate(alphas.len() - 1);
    }
    (alphas, betas, basis)
}

/// Lower Ritz estimate of the smallest eigenvalue of a symmetric operator.
/// The returned value subtracts the Ritz residual, so it usually sits at or
/// below the true bottom of the spectrum; callers needing a guaranteed bound
/// should fall back to Gershgorin.
pub fn lambda_min_estimate(op: &dyn LinOp, iters: usize, seed: u64) -> f64 {
    let n = op.dim();
    if n == 0 {
        return 0.0;
    }
    let v0 = deterministic_unit_vector(n, seed);
    let (alphas, betas, _) = tridiagonalize(op, v0, iters.max(2), &[]);
    if alphas.is_empty() {
        return 0.0;
    }
    if alphas.len() == 1 {
        return alphas[0];
    }
    let t = SymTridiag::new(alphas.clone(), betas.clone());
    let theta = t.eigenvalue(0);
    let m = alphas.len();
    let resid = match t.eigenpair_near(theta, seed ^ 0x9e37) {
        Ok((_, y)) => betas.get(m - 1).copied().unwrap_or(0.0).abs() * y[m - 1].abs(),
        Err(_) => 0.0,
    };
    theta - resid
}

struct ShiftedInverse<'a> {
    ldlt: &'a SkylineLdlt,
}

impl LinOp for ShiftedInverse<'_> {
    fn dim(&self) -> usize {
        self.ldlt.dim()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.ldlt.solve(x, y);
    }
}

/// Smallest `k` eigenpairs of a symmetric sparse matrix by shift-invert
/// Lanczos with deflation. The shift sits strictly below the Gershgorin
/// lower bound, so the factorization is always positive definite. Repeated
/// eigenvalues are recovered one copy per deflation round. Eigenvectors are
/// unit vectors; eigenvalues are Rayleigh quotients of the assembled Ritz
/// vectors. Residual acceptance is the caller's job.
pub fn shift_invert_smallest(a: &SparseSym, k: usize, seed: u64) -> Result<Vec<(f64, Vec<f64>)>> {
    let n = a.dim();
    let k = k.min(n);
    if k == 0 {
        return Ok(Vec::new());
    }
    let (glo, ghi) = a.gershgorin();
    let span = (ghi - glo).max(ghi.abs()).max(glo.abs()).max(1e-300);
    let sigma = glo - 1e-6 * span;
    let ldlt = SkylineLdlt::factor(a, sigma)?;
    let inv = ShiftedInverse { ldlt: &ldlt };
    let max_iter = 200.min(n);
    let mut found: Vec<(f64, Vec<f64>)> = Vec::new();
    for idx in 0..k {
        let deflate: Vec<Vec<f64>> = found.iter().map(|(_, v)| v.clone()).collect();
        let v0 = deterministic_unit_vector(n, seed.wrapping_add(idx as u64));
        let (alphas, betas, basis) = tridiagonalize(&inv, v0, max_iter, &deflate);
        if alphas.is_empty() {
            return Err(Error::numerical("Krylov space exhausted before convergence"));
        }
        let m = alphas.len();
        let t = SymTridiag::new(alphas, betas);
        // Largest Ritz value of the inverse corresponds to the smallest
        // remaining eigenvalue of `a`.
        let theta = t.eigenvalue(m - 1);
        if !(theta > 0.0) {
            return Err(Error::numerical("shift-invert produced a nonpositive Ritz value"));
        }
        let y = if m == 1 {
            vec![1.0]
        } else {
            t.eigenpair_near(theta, seed ^ 0x5bd1).map(|(_, y)| y)?
        };
        let mut u = vec![0.0; n];
        for (c, q) in y.iter().zip(&basis) {
            for (ui, qi) in u.iter_mut().zip(q) {
                *ui += c * qi;
            }
        }
        orthogonalize(&mut u, &deflate);
        let nrm = norm2(&u);
        if nrm == 0.0 || !nrm.is_finite() {
            return Err(Error::numerical("degenerate Ritz vector"));
        }
        for x in u.iter_mut() {
            *x /= nrm;
        }
        let mut au = vec![0.0; n];
        a.matvec(&u, &mut au);
        let rho = dot(&u, &au);
        found.push((rho, u));
    }
    found.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_laplacian(n: usize) -> SparseSym {
        let diag = vec![2.0; n];
        let off: Vec<(usize, usize, f64)> = (0..n - 1).map(|i| (i, i + 1, -1.0)).collect();
        SparseSym::from_parts(diag, &off).unwrap()
    }

    #[test]
    fn shift_invert_matches_closed_form_laplacian() {
        let n = 120;
        let a = path_laplacian(n);
        let pairs = shift_invert_smallest(&a, 5, 1).unwrap();
        for (j, (lam, v)) in pairs.iter().enumerate() {
            let exact =
                2.0 - 2.0 * (((j + 1) as f64) * std::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert!((lam - exact).abs() < 1e-10, "j = {j}: {lam} vs {exact}");
            let mut av = vec![0.0; n];
            a.matvec(v, &mut av);
            let res: f64 =
                av.iter().zip(v).map(|(p, q)| (p - lam * q) * (p - lam * q)).sum::<f64>().sqrt();
            assert!(res < 1e-9, "residual {res}");
        }
    }

    #[test]
    fn shift_invert_recovers_multiplicity() {
        // Two decoupled identical chains: every eigenvalue is doubled.
        let n = 30;
        let mut diag = vec![2.0; 2 * n];
        let mut off = Vec::new();
        for i in 0..n - 1 {
            off.push((i, i + 1, -1.0));
            off.push((n + i, n + i + 1, -1.0));
        }
        diag.truncate(2 * n);
        let a = SparseSym::from_parts(diag, &off).unwrap();
        let pairs = shift_invert_smallest(&a, 4, 9).unwrap();
        let e1 = 2.0 - 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        let e2 = 2.0 - 2.0 * (2.0 * std::f64::consts::PI / (n as f64 + 1.0)).cos();
        assert!((pairs[0].0 - e1).abs() < 1e-10);
        assert!((pairs[1].0 - e1).abs() < 1e-10);
        assert!((pairs[2].0 - e2).abs() < 1e-10);
        assert!((pairs[3].0 - e2).abs() < 1e-10);
        // The two copies are orthogonal.
        let ip = dot(&pairs[0].1, &pairs[1].1);
        assert!(ip.abs() < 1e-8, "copies not orthogonal: {ip}");
    }

    #[test]
    fn lambda_min_estimate_finds_isolated_bottom() {
        // A deep diagonal well isolates the bottom eigenvalue, where a short
        // Lanczos run converges; check against the Sturm bisection oracle.
        let n = 200;
        let mut diag = vec![2.0; n];
        diag[40] = -5.0;
        let off: Vec<(usize, usize, f64)> = (0..n - 1).map(|i| (i, i + 1, -1.0)).collect();
        let a = SparseSym::from_parts(diag.clone(), &off).unwrap();
        let oracle = SymTridiag::new(diag, vec![-1.0; n - 1]).eigenvalue(0);
        let est = lambda_min_estimate(&a, 30, 3);
        assert!(est <= oracle + 1e-9, "estimate {est} above bottom {oracle}");
        assert!(est >= oracle - 1e-3, "estimate {est} too far below {oracle}");
    }
}
