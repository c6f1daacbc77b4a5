use super::sparse::SparseSym;
use crate::error::{Error, Result};

/// LDL^T factorization of `A - sigma I` in skyline (envelope) storage.
///
/// Fill during elimination stays inside the envelope, so rows store exactly
/// the columns from their first nonzero to the diagonal. Graph-chain
/// orderings keep the envelope near-tridiagonal except where edge chains
/// meet vertices, which is what makes this cheap for the meshes produced by
/// the discretizers. Requires `A - sigma I` positive definite; the caller
/// picks `sigma` below the spectrum (a Gershgorin bound suffices).
pub struct SkylineLdlt {
    n: usize,
    fc: Vec<usize>,
    start: Vec<usize>,
    low: Vec<f64>,
    d: Vec<f64>,
}

impl SkylineLdlt {
    pub fn factor(a: &SparseSym, sigma: f64) -> Result<SkylineLdlt> {
        Ok(eliminate(a, sigma, None)?.0)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `(A - sigma I) x = b`.
    pub fn solve(&self, b: &[f64], x: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        x.copy_from_slice(b);
        for i in 0..self.n {
            let fi = self.fc[i];
            let mut acc = x[i];
            for j in fi..i {
                acc -= self.low[self.start[i] + (j - fi)] * x[j];
            }
            x[i] = acc;
        }
        for i in 0..self.n {
            x[i] /= self.d[i];
        }
        for i in (0..self.n).rev() {
            let fi = self.fc[i];
            let xi = x[i];
            for j in fi..i {
                x[j] -= self.low[self.start[i] + (j - fi)] * xi;
            }
        }
    }

    /// Envelope size in stored doubles, for diagnostics.
    pub fn profile(&self) -> usize {
        self.low.len()
    }
}

/// Number of eigenvalues of `A` strictly below `sigma`, read off the pivot
/// signs of `A - sigma I` (Sylvester's law of inertia). Errors when a pivot
/// lands within rounding of zero: `sigma` grazes an eigenvalue, and the
/// caller should perturb it and retry.
pub fn inertia_below(a: &SparseSym, sigma: f64) -> Result<usize> {
    let (glo, ghi) = a.gershgorin();
    let scale = (glo - sigma).abs().max((ghi - sigma).abs()).max(1e-300);
    Ok(eliminate(a, sigma, Some(1e-13 * scale))?.1)
}

/// Envelope LDL^T of `A - sigma I`. With `graze = None` the matrix must be
/// positive definite; with `Some(g)` negative pivots are counted and only
/// pivots within `g` of zero are rejected.
fn eliminate(a: &SparseSym, sigma: f64, graze: Option<f64>) -> Result<(SkylineLdlt, usize)> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::degenerate("empty matrix"));
    }
    let mut fc: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for &(j, _) in a.row(i) {
            let j = j as usize;
            if j < i && j < fc[i] {
                fc[i] = j;
            }
        }
    }
    let mut start = vec![0usize; n + 1];
    for i in 0..n {
        start[i + 1] = start[i] + (i - fc[i]);
    }
    let mut low = vec![0.0f64; start[n]];
    let mut d = vec![0.0f64; n];
    for i in 0..n {
        d[i] = a.diag()[i] - sigma;
        for &(j, v) in a.row(i) {
            let j = j as usize;
            if j < i {
                low[start[i] + (j - fc[i])] = v;
            }
        }
    }
    // Row-oriented LDL^T. While row i is being processed its entries hold
    // w[j] = L[i][j] * d[j]; they are divided out at the end of the row.
    let mut negatives = 0usize;
    for i in 0..n {
        let fi = fc[i];
        for j in fi..i {
            let lo = fi.max(fc[j]);
            let mut s = low[start[i] + (j - fi)];
            for k in lo..j {
                s -= low[start[i] + (k - fi)] * low[start[j] + (k - fc[j])];
            }
            low[start[i] + (j - fi)] = s;
        }
        let mut di = d[i];
        for j in fi..i {
            let idx = start[i] + (j - fi);
            let w = low[idx];
            let l = w / d[j];
            di -= w * l;
            low[idx] = l;
        }
        match graze {
            None => {
                if !(di > 0.0) || !di.is_finite() {
                    return Err(Error::numerical(format!(
                        "shifted matrix is not positive definite (pivot {di:.3e} at row {i})"
                    )));
                }
            }
            Some(g) => {
                if !di.is_finite() || di.abs() <= g {
                    return Err(Error::numerical(format!(
                        "pivot {di:.3e} at row {i} is too close to singular"
                    )));
                }
                if di < 0.0 {
                    negatives += 1;
                }
            }
        }
        d[i] = di;
    }
    Ok((SkylineLdlt { n, fc, start, low, d }, negatives))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::deterministic_unit_vector;

    fn path_laplacian(n: usize) -> SparseSym {
        let diag = vec![2.0; n];
        let mut off = Vec::new();
        for i in 0..n - 1 {
            off.push((i, i + 1, -1.0));
        }
        SparseSym::from_parts(diag, &off).unwrap()
    }

    #[test]
    fn solves_against_matvec() {
        let n = 50;
        let a = path_laplacian(n);
        let f = SkylineLdlt::factor(&a, -0.3).unwrap();
        let b = deterministic_unit_vector(n, 11);
        let mut x = vec![0.0; n];
        f.solve(&b, &mut x);
        let mut ax = vec![0.0; n];
        a.matvec(&x, &mut ax);
        for i in 0..n {
            ax[i] += 0.3 * x[i];
        }
        let err: f64 = ax.iter().zip(&b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
        assert!(err < 1e-12, "residual {err}");
    }

    #[test]
    fn handles_wide_coupling_rows() {
        // Star-like pattern: node 0 couples to everyone, plus a chain. The
        // last row's envelope spans the whole matrix.
        let n = 20;
        let mut diag = vec![1.0; n];
        diag[0] = n as f64;
        let mut off = Vec::new();
        for i in 1..n {
            off.push((0, i, -0.5));
        }
        for i in 1..n - 1 {
            off.push((i, i + 1, -0.25));
        }
        for (i, d) in diag.iter_mut().enumerate() {
            if i > 0 {
                *d = 2.0;
            }
        }
        let a = SparseSym::from_parts(diag, &off).unwrap();
        let f = SkylineLdlt::factor(&a, -1.0).unwrap();
        let b = deterministic_unit_vector(n, 4);
        let mut x = vec![0.0; n];
        f.solve(&b, &mut x);
        let mut ax = vec![0.0; n];
        a.matvec(&x, &mut ax);
        for i in 0..n {
            ax[i] += x[i];
        }
        let err: f64 = ax.iter().zip(&b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
        assert!(err < 1e-12, "residual {err}");
    }

    #[test]
    fn rejects_indefinite_shift() {
        let a = path_laplacian(10);
        // Shift above the bottom eigenvalue makes A - sigma I indefinite.
        assert!(SkylineLdlt::factor(&a, 1.0).is_err());
    }
}
