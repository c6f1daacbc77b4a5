//! Exact spectrum of the Kirchhoff Laplacian through its secular system.
//!
//! On each edge a solution of `-u'' = lambda u` is `a c(x) + b s(x)` with the
//! constant-coefficient pair `(c, s)` from the propagator, so an eigenfunction
//! is a vector of `2|E|` coefficients. Continuity at every vertex contributes
//! `deg(v) - 1` equations, the Kirchhoff derivative balance one more, which is
//! `2|E|` equations in total: eigenvalues are exactly the points where the
//! square secular matrix `S(lambda)` drops rank.
//!
//! Detection walks a grid in `k = sqrt(lambda)`, fine enough to oversample the
//! Weyl spacing `pi / total_length` sixteenfold. Sign changes of `det S` catch
//! odd-multiplicity roots and are sharpened by bisection; even-multiplicity
//! roots do not flip the sign, so local minima of the smallest singular value
//! are hunted by golden-section search as well. Multiplicity then comes from
//! the number of singular values under `secular_rank` at the converged point.
//! `lambda = 0` is handled exactly: its eigenspace is the locally constant
//! functions, one dimension per connected component.
//!
//! The secular matrix is used unnormalized, with rank thresholds anchored at
//! `max(sigma_max, 1)`. Row scaling would be fatal here: at a loop's full
//! period every row of the loop's block vanishes at once, and rescaling the
//! nearby matrices manufactures a nonsingular limit whose sigma_min dips only
//! at the exact root, which no grid can see.

use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::graphs::MetricGraph;
use crate::quad::golden_min;
use crate::solve1d::prop::cs;

/// One point of a graph spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphEigenvalue {
    pub lambda: f64,
    pub multiplicity: usize,
    /// Smallest singular value of the row-normalized secular matrix at
    /// `lambda`; a direct certificate of how singular the system really is.
    pub sigma_min: f64,
}

/// An eigenfunction in edgewise coefficients: on edge `e`,
/// `u(x) = a c(x) + b s(x)` with `x` the arclength from the tail and `(c, s)`
/// the fundamental pair for `-u'' = lambda u`.
#[derive(Debug, Clone)]
pub struct GraphEigenfunction {
    pub lambda: f64,
    pub coeffs: Vec<(f64, f64)>,
    /// Relative residual of the secular system at these coefficients.
    pub defect: f64,
}

impl GraphEigenfunction {
    pub fn value(&self, edge: usize, x: f64) -> f64 {
        let (a, b) = self.coeffs[edge];
        let (c, s) = cs(-self.lambda, x);
        a * c + b * s
    }

    pub fn derivative(&self, edge: usize, x: f64) -> f64 {
        let (a, b) = self.coeffs[edge];
        let (c, s) = cs(-self.lambda, x);
        -self.lambda * a * s + b * c
    }
}

/// Assembles the secular matrix at `lambda`. Unknown `2e` is the edge's value
/// coefficient `a`, `2e + 1` its derivative coefficient `b`. Loops meet their
/// vertex twice, hence the accumulating writes.
fn secular_matrix(graph: &MetricGraph, lambda: f64) -> DMatrix<f64> {
    let ne = graph.edge_count();
    let omega = -lambda;
    let ends: Vec<(f64, f64)> = graph.edges().iter().map(|e| cs(omega, e.length)).collect();
    let mut m = DMatrix::zeros(2 * ne, 2 * ne);
    let value_coeffs = |&(e, is_head): &(usize, bool)| -> [(usize, f64); 2] {
        if is_head {
            let (c, s) = ends[e];
            [(2 * e, c), (2 * e + 1, s)]
        } else {
            [(2 * e, 1.0), (2 * e + 1, 0.0)]
        }
    };
    let mut row = 0;
    for slots in graph.incidence() {
        for slot in &slots[1..] {
            for (col, w) in value_coeffs(slot) {
                m[(row, col)] += w;
            }
            for (col, w) in value_coeffs(&slots[0]) {
                m[(row, col)] -= w;
            }
            row += 1;
        }
        // Kirchhoff: derivatives pointing from the vertex into each edge sum
        // to zero. Into the edge is +u'(0) at a tail and -u'(l) at a head.
        for &(e, is_head) in &slots {
            if is_head {
                let (c, s) = ends[e];
                m[(row, 2 * e)] -= omega * s;
                m[(row, 2 * e + 1)] -= c;
            } else {
                m[(row, 2 * e + 1)] += 1.0;
            }
        }
        row += 1;
    }
    debug_assert_eq!(row, 2 * ne);
    m
}

fn sigma_extremes(m: &DMatrix<f64>) -> (f64, f64) {
    let sv = m.singular_values();
    let min = sv.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    let max = sv.iter().fold(0.0f64, |a, &b| a.max(b));
    (min, max)
}

fn bisect_sign_change(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, width: f64) -> f64 {
    let mut fa = f(a);
    if fa == 0.0 {
        return a;
    }
    for _ in 0..200 {
        if b - a <= width {
            break;
        }
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// All eigenvalues of the Kirchhoff Laplacian in `[0, lambda_max]`, with
/// multiplicities, sorted. The `k`-grid resolves sixteen points per mean
/// eigenvalue spacing; roots returned by the search are polished to a
/// `k`-width of `secular_k`.
///
/// Candidates closer to zero than two grid cells are folded into the exact
/// `lambda = 0` entry. That zone cannot hide a positive eigenvalue: the first
/// one sits at `k >= pi / (2 total_length)`, four cells above it.
pub fn kirchhoff_spectrum(
    graph: &MetricGraph,
    lambda_max: f64,
    tol: &Tolerances,
) -> Result<Vec<GraphEigenvalue>> {
    if !(lambda_max > 0.0) || !lambda_max.is_finite() {
        return Err(Error::invalid(format!(
            "spectrum window must have a positive finite top, got {lambda_max}"
        )));
    }
    let ltot = graph.total_length();
    let kmax = lambda_max.sqrt();
    let cells = (kmax / (PI / (16.0 * ltot)).min(kmax / 64.0)).ceil() as usize;
    let dk = kmax / cells as f64;

    let sigma_min_at = |k: f64| sigma_extremes(&secular_matrix(graph, k * k)).0;
    let det_at = |k: f64| secular_matrix(graph, k * k).determinant();

    let ks: Vec<f64> = (0..=cells).map(|i| i as f64 * dk).collect();
    let sig: Vec<f64> = ks.iter().map(|&k| sigma_min_at(k)).collect();
    let det: Vec<f64> = ks.iter().map(|&k| det_at(k)).collect();

    let mut candidates = Vec::new();
    for i in 1..ks.len() {
        if det[i - 1].signum() * det[i].signum() < 0.0 {
            candidates.push(bisect_sign_change(&det_at, ks[i - 1], ks[i], tol.secular_k));
        }
    }
    for i in 1..ks.len() - 1 {
        if sig[i] <= sig[i - 1] && sig[i] <= sig[i + 1] {
            candidates.push(golden_min(&sigma_min_at, ks[i - 1], ks[i + 1], tol.secular_k));
        }
    }
    candidates.retain(|&k| k > 2.0 * dk);
    candidates.sort_by(f64::total_cmp);

    let merge = (1e3 * tol.secular_k).max(1e-9);

    let mut out = vec![GraphEigenvalue {
        lambda: 0.0,
        multiplicity: graph.component_count(),
        sigma_min: sigma_min_at(0.0),
    }];
    let mut last_kept = f64::NEG_INFINITY;
    for &k in &candidates {
        if k - last_kept <= merge {
            continue;
        }
        let m = secular_matrix(graph, k * k);
        let sv = m.singular_values();
        let (smin, smax) = sigma_extremes(&m);
        // The anchor max(sigma_max, 1) keeps the rank test meaningful even
        // when the whole matrix vanishes at the root (loops at full periods).
        let thresh = tol.secular_rank * smax.max(1.0);
        if smin > thresh {
            continue;
        }
        let rank_drop = sv.iter().filter(|&&s| s <= thresh).count();
        out.push(GraphEigenvalue { lambda: k * k, multiplicity: rank_drop, sigma_min: smin });
        last_kept = k;
    }
    Ok(out)
}

/// Definite integrals of the fundamental pair over one edge:
/// `(int c^2, int c s, int s^2)`. Closed forms shared by the trigonometric
/// and hyperbolic regimes; the `s^2` integral switches to a series where the
/// exact expression loses to cancellation.
fn edge_integrals(omega: f64, l: f64) -> (f64, f64, f64) {
    let (c, s) = cs(omega, l);
    let ic = 0.5 * (l + s * c);
    let ics = 0.5 * s * s;
    let is = if omega.abs() * l * l < 1e-6 {
        l * l * l / 3.0 * (1.0 + omega * l * l / 5.0)
    } else {
        0.5 * (s * c - l) / omega
    };
    (ic, ics, is)
}

/// An orthonormal basis of the eigenspace at `lambda`, empty when `lambda` is
/// not an eigenvalue. Coefficient vectors come from the singular directions
/// of the secular matrix under `secular_rank`, then are orthonormalized in
/// the graph's own L2 inner product via closed-form edge integrals.
///
/// `lambda` must be secular-accurate, e.g. straight out of
/// [`kirchhoff_spectrum`]; a value off by more than roughly `1e-9` no longer
/// looks singular and comes back empty.
pub fn graph_eigenfunctions(
    graph: &MetricGraph,
    lambda: f64,
    tol: &Tolerances,
) -> Result<Vec<GraphEigenfunction>> {
    if !lambda.is_finite() {
        return Err(Error::invalid(format!("eigenvalue must be finite, got {lambda}")));
    }
    let ne = graph.edge_count();
    let m = secular_matrix(graph, lambda);
    let svd = nalgebra::linalg::SVD::new(m.clone(), false, true);
    let smax = svd.singular_values.iter().fold(0.0f64, |a, &b| a.max(b));
    let v_t = svd.v_t.as_ref().expect("SVD was asked for right singular vectors");

    // Same anchored threshold as the spectrum search; see the module notes on
    // why the matrix must stay unnormalized.
    let scale = smax.max(1.0);
    let mut raw: Vec<Vec<(f64, f64)>> = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= scale * tol.secular_rank {
            let dir = v_t.row(i);
            raw.push((0..ne).map(|e| (dir[2 * e], dir[2 * e + 1])).collect());
        }
    }

    let omega = -lambda;
    let ints: Vec<(f64, f64, f64)> =
        graph.edges().iter().map(|e| edge_integrals(omega, e.length)).collect();
    let ip = |u: &[(f64, f64)], w: &[(f64, f64)]| -> f64 {
        u.iter()
            .zip(w)
            .zip(&ints)
            .map(|((&(au, bu), &(aw, bw)), &(ic, ics, is))| {
                au * aw * ic + (au * bw + bu * aw) * ics + bu * bw * is
            })
            .sum()
    };

    let mut funcs: Vec<GraphEigenfunction> = Vec::new();
    for mut z in raw {
        for prev in &funcs {
            let proj = ip(&z, &prev.coeffs);
            for (zi, pi) in z.iter_mut().zip(&prev.coeffs) {
                zi.0 -= proj * pi.0;
                zi.1 -= proj * pi.1;
            }
        }
        let nrm2 = ip(&z, &z);
        if !(nrm2 > 1e-20) {
            continue;
        }
        let inv = 1.0 / nrm2.sqrt();
        for zi in z.iter_mut() {
            zi.0 *= inv;
            zi.1 *= inv;
        }
        let flat = DVector::from_iterator(2 * ne, z.iter().flat_map(|&(a, b)| [a, b]));
        let defect = (&m * &flat).norm() / (flat.norm() * scale);
        funcs.push(GraphEigenfunction { lambda, coeffs: z, defect });
    }
    Ok(funcs)
}
