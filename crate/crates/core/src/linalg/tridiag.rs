use super::{deterministic_unit_vector, dot, norm2, scale, LinOp};
use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix: diagonal `d` (length n) and off-diagonal `e`
/// (length n-1). Eigenvalues come from Sturm-sequence bisection, eigenvectors
/// from inverse iteration with a partial-pivot tridiagonal factorization.
#[derive(Debug, Clone)]
pub struct SymTridiag {
    d: Vec<f64>,
    e: Vec<f64>,
}

impl SymTridiag {
    pub fn new(d: Vec<f64>, e: Vec<f64>) -> Self {
        assert_eq!(e.len() + 1, d.len().max(1), "off-diagonal length must be n - 1");
        SymTridiag { d, e }
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.d
    }

    pub fn off(&self) -> &[f64] {
        &self.e
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n {
            let mut acc = self.d[i] * x[i];
            if i > 0 {
                acc += self.e[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.e[i] * x[i + 1];
            }
            y[i] = acc;
        }
    }

    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.d.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.e[i - 1].abs();
            }
            if i + 1 < n {
                r += self.e[i].abs();
            }
            lo = lo.min(self.d[i] - r);
            hi = hi.max(self.d[i] + r);
        }
        (lo, hi)
    }

    fn pivmin(&self) -> f64 {
        let max_e2 = self.e.iter().fold(1.0f64, |m, &v| m.max(v * v));
        f64::MIN_POSITIVE * max_e2
    }

    /// Number of eigenvalues at most `x`, via the Sturm sequence of the
    /// shifted LDL^T recurrence. A pivot that lands exactly on zero is
    /// treated as negative, so an eigenvalue equal to `x` is counted.
    pub fn count_below(&self, x: f64) -> usize {
        let n = self.d.len();
        let pivmin = self.pivmin();
        let mut count = 0usize;
        let mut q = 1.0f64;
        for i in 0..n {
            let off2 = if i > 0 { self.e[i - 1] * self.e[i - 1] } else { 0.0 };
            q = self.d[i] - x - off2 / q;
            if q <= pivmin {
                count += 1;
                q = q.min(-pivmin);
            }
        }
        count
    }

    /// k-th smallest eigenvalue (0-based) by bisection on the Sturm count.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        assert!(k < self.dim());
        let (glo, ghi) = self.gershgorin();
        let pad = 1e-12 * (ghi - glo).abs().max(1.0);
        let mut lo = glo - pad;
        let mut hi = ghi + pad;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 2.0 * f64::EPSILON * hi.abs().max(lo.abs()) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// The `k` smallest eigenvalues, ascending.
    pub fn smallest_eigenvalues(&self, k: usize) -> Vec<f64> {
        (0..k.min(self.dim())).map(|i| self.eigenvalue(i)).collect()
    }

    /// All eigenvalues, ascending. Bisection per eigenvalue; intended for the
    /// moderate sizes used by cross-checks, not production paths.
    pub fn full_spectrum(&self) -> Vec<f64> {
        self.smallest_eigenvalues(self.dim())
    }

    /// Eigenvalue nearest to `x`.
    pub fn nearest_eigenvalue(&self, x: f64) -> f64 {
        let n = self.dim();
        let k = self.count_below(x);
        let mut best = f64::INFINITY;
        let mut arg = f64::NAN;
        if k > 0 {
            let lam = self.eigenvalue(k - 1);
            best = (lam - x).abs();
            arg = lam;
        }
        if k < n {
            let lam = self.eigenvalue(k);
            if (lam - x).abs() < best {
                arg = lam;
            }
        }
        arg
    }

    /// Inverse iteration against `T - sigma I`, then a Rayleigh quotient.
    /// Returns the polished eigenvalue and a unit eigenvector.
    pub fn eigenpair_near(&self, sigma: f64, seed: u64) -> Result<(f64, Vec<f64>)> {
        let n = self.dim();
        let lu = TridiagLu::factor(self, sigma)?;
        let mut v = deterministic_unit_vector(n, seed);
        let mut w = vec![0.0; n];
        for _ in 0..4 {
            lu.solve(&v, &mut w);
            let nrm = norm2(&w);
            if !nrm.is_finite() || nrm == 0.0 {
                return Err(Error::numerical("inverse iteration broke down"));
            }
            scale(1.0 / nrm, &mut w);
            std::mem::swap(&mut v, &mut w);
        }
        let mut tv = vec![0.0; n];
        self.matvec(&v, &mut tv);
        let rho = dot(&v, &tv);
        Ok((rho, v))
    }

    pub fn quadratic(&self, u: &[f64]) -> f64 {
        let mut tu = vec![0.0; u.len()];
        self.matvec(u, &mut tu);
        dot(u, &tu)
    }
}

impl LinOp for SymTridiag {
    fn dim(&self) -> usize {
        self.d.len()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec(x, y);
    }
}

/// LU factorization of `T - sigma I` with partial pivoting. Row swaps push a
/// second superdiagonal into U; rows below the active pair are never touched,
/// so the subdiagonal entering each step is the original off-diagonal.
pub(crate) struct TridiagLu {
    n: usize,
    low: Vec<f64>,
    d: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    swap: Vec<bool>,
}

impl TridiagLu {
    pub(crate) fn factor(t: &SymTridiag, sigma: f64) -> Result<TridiagLu> {
        let n = t.dim();
        if n == 0 {
            return Err(Error::degenerate("empty matrix"));
        }
        let mut d: Vec<f64> = t.d.iter().map(|&x| x - sigma).collect();
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        for i in 0..n - 1 {
            u1[i] = t.e[i];
        }
        let mut low = vec![0.0; n];
        let mut swap = vec![false; n];
        let floor = {
            let (lo, hi) = t.gershgorin();
            (hi - lo).abs().max(lo.abs()).max(hi.abs()).max(1.0) * f64::EPSILON * f64::EPSILON
        };
        for i in 0..n - 1 {
            let below = t.e[i];
            if below.abs() > d[i].abs() {
                swap[i] = true;
                let (a_i, b_i) = (d[i], u1[i]);
                d[i] = below;
                u1[i] = d[i + 1];
                u2[i] = if i + 2 < n { t.e[i + 1] } else { 0.0 };
                let m = a_i / below;
                low[i] = m;
                d[i + 1] = b_i - m * u1[i];
                if i + 2 < n {
                    u1[i + 1] = -m * u2[i];
                }
            } else {
                if d[i] == 0.0 {
                    d[i] = floor;
                }
                let m = below / d[i];
                low[i] = m;
                d[i + 1] -= m * u1[i];
                u2[i] = 0.0;
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = floor;
        }
        Ok(TridiagLu { n, low, d, u1, u2, swap })
    }

    pub(crate) fn solve(&self, b: &[f64], x: &mut [f64]) {
        let n = self.n;
        x.copy_from_slice(b);
        for i in 0..n - 1 {
            if self.swap[i] {
                x.swap(i, i + 1);
            }
            x[i + 1] -= self.low[i] * x[i];
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            if i + 1 < n {
                acc -= self.u1[i] * x[i + 1];
            }
            if i + 2 < n {
                acc -= self.u2[i] * x[i + 2];
            }
            x[i] = acc / self.d[i];
        }
    }
}
