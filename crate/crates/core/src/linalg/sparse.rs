use super::LinOp;
use crate::error::{Error, Result};

/// Symmetric sparse matrix stored as a diagonal plus an adjacency list of
/// strictly-lower entries mirrored on access.
#[derive(Debug, Clone)]
pub struct SparseSym {
    n: usize,
    diag: Vec<f64>,
    /// For each row `i`, the pairs `(j, a_ij)` with `j != i`; both directions
    /// are stored so `adj[i]` is the complete off-diagonal row.
    adj: Vec<Vec<(u32, f64)>>,
}

impl SparseSym {
    /// Builds from a diagonal and strictly-upper triplets `(i, j, v)`, `i < j`.
    pub fn from_parts(diag: Vec<f64>, upper: &[(usize, usize, f64)]) -> Result<Self> {
        let n = diag.len();
        let mut adj = vec![Vec::new(); n];
        for &(i, j, v) in upper {
            if i >= j || j >= n {
                return Err(Error::invalid(format!(
                    "off-diagonal entry ({i}, {j}) is not strictly upper within n = {n}"
                )));
            }
            if v != 0.0 {
                adj[i].push((j as u32, v));
                adj[j].push((i as u32, v));
            }
        }
        for row in &mut adj {
            row.sort_by_key(|e| e.0);
        }
        Ok(SparseSym { n, diag, adj })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn row(&self, i: usize) -> &[(u32, f64)] {
        &self.adj[i]
    }

    /// Number of off-diagonal stored directions (twice the edge count).
    pub fn off_count(&self) -> usize {
        self.adj.iter().map(|r| r.len()).sum()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut acc = self.diag[i] * x[i];
            for &(j, v) in &self.adj[i] {
                acc += v * x[j as usize];
            }
            y[i] = acc;
        }
    }

    pub fn quadratic(&self, u: &[f64], v: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            let mut row = self.diag[i] * v[i];
            for &(j, w) in &self.adj[i] {
                row += w * v[j as usize];
            }
            acc += u[i] * row;
        }
        acc
    }

    /// True when every off-diagonal entry sits on the first sub/super diagonal.
    pub fn is_tridiagonal(&self) -> bool {
        self.adj.iter().enumerate().all(|(i, row)| {
            row.iter().all(|&(j, _)| (j as i64 - i as i64).abs() == 1)
        })
    }

    /// Extracts the symmetric tridiagonal representation; `None` if entries
    /// fall outside the first off-diagonal.
    pub fn to_tridiagonal(&self) -> Option<super::SymTridiag> {
        if !self.is_tridiagonal() {
            return None;
        }
        let mut off = vec![0.0; self.n.saturating_sub(1)];
        for (i, row) in self.adj.iter().enumerate() {
            for &(j, v) in row {
                if j as usize == i + 1 {
                    off[i] = v;
                }
            }
        }
        Some(super::SymTridiag::new(self.diag.clone(), off))
    }

    /// Connected components of the off-diagonal adjacency graph (nonzero
    /// entries are edges), each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut comps = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut stack = vec![start];
            let mut comp = Vec::new();
            seen[start] = true;
            while let Some(i) = stack.pop() {
                comp.push(i);
                for &(j, v) in &self.adj[i] {
                    if v != 0.0 && !seen[j as usize] {
                        seen[j as usize] = true;
                        stack.push(j as usize);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.n {
            let r: f64 = self.adj[i].iter().map(|&(_, v)| v.abs()).sum();
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        if self.n == 0 {
            (0.0, 0.0)
        } else {
            (lo, hi)
        }
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            m[(i, i)] = self.diag[i];
            for &(j, v) in &self.adj[i] {
                m[(i, j as usize)] = v;
            }
        }
        m
    }
}

impl LinOp for SparseSym {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec(x, y);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matvec_matches_dense() {
        let a = SparseSym::from_parts(vec![2.0, 3.0, 4.0], &[(0, 1, -1.0), (1, 2, -0.5)]).unwrap();
        let x = vec![1.0, 2.0, 3.0];
        let mut y = vec![0.0; 3];
        a.matvec(&x, &mut y);
        assert_eq!(y, vec![0.0, 3.5, 11.0]);
        assert!(a.is_tridiagonal());
        assert!((a.quadratic(&x, &x) - (0.0 + 7.0 + 33.0)).abs() < 1e-14);
    }

    #[test]
    fn components_split_disconnected_blocks() {
        let a = SparseSym::from_parts(vec![1.0; 5], &[(0, 2, 1.0), (1, 3, -1.0)]).unwrap();
        let comps = a.components();
        assert_eq!(comps, vec![vec![0, 2], vec![1, 3], vec![4]]);
    }

    #[test]
    fn rejects_lower_triplets() {
        assert!(SparseSym::from_parts(vec![1.0; 3], &[(2, 1, 1.0)]).is_err());
    }
}
