//! Caccioppoli-type energy/mass comparisons. For a generalized eigenfunction
//! the energy measure charged to a set `E` is controlled by `C / b^2` times
//! the mass of the `b`-neighborhood of `E`; the probes below measure the
//! constant on discrete eigenfunctions and the collar decay of shooting
//! solutions, the two quantitative halves of that inequality.

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::forms::{assemble_schrodinger_form, energy_measure};
use crate::grid::Grid1D;
use crate::measure::SignedMeasure1D;
use crate::solve1d::{eig_smallest, GeneralizedSolution};

/// Ratios `b^2 Gamma_E(u_k) / ||u_k||^2_{B_b(E)}` for the first `k`
/// eigenfunctions over a grid of collar widths. Entries whose denominator
/// fell below `1e-14` are recorded in `flagged` and excluded from `c_est`.
#[derive(Debug, Clone)]
pub struct CaccioppoliReport {
    pub eigenvalues: Vec<f64>,
    pub b_grid: Vec<f64>,
    /// `ratios[i][j]` pairs eigenfunction `i` with collar width `b_grid[j]`.
    pub ratios: Vec<Vec<f64>>,
    /// `(eigenfunction index, b index)` of excluded entries.
    pub flagged: Vec<(usize, usize)>,
    /// Max of the included ratios: the empirical Caccioppoli constant.
    pub c_est: f64,
}

/// Runs the Caccioppoli comparison for the first `k` eigenfunctions of the
/// form assembled from `measure` on `grid`. `e` is the probed set, `b_grid`
/// the collar widths, and `b0` their upper bound; `B_{b0}(e)` must stay
/// inside the grid so no collar is clipped by the boundary.
pub fn caccioppoli_probe(
    measure: &SignedMeasure1D,
    grid: &Grid1D,
    k: usize,
    e: (f64, f64),
    b_grid: &[f64],
    b0: f64,
    tol: &Tolerances,
) -> Result<CaccioppoliReport> {
    let (e0, e1) = e;
    if !e0.is_finite() || !e1.is_finite() || !(e0 < e1) {
        return Err(Error::invalid("probed set must be a nondegenerate interval"));
    }
    if !(b0 > 0.0) || !b0.is_finite() {
        return Err(Error::invalid("collar bound b0 must be positive"));
    }
    if e0 - b0 < grid.a - 1e-12 || e1 + b0 > grid.b + 1e-12 {
        return Err(Error::window("b0-neighborhood of the probed set escapes the grid"));
    }
    if b_grid.is_empty() || b_grid.iter().any(|&b| !(b > 0.0) || b > b0) {
        return Err(Error::invalid("collar widths must lie in (0, b0]"));
    }

    let form = assemble_schrodinger_form(grid, measure)?;
    let pairs = eig_smallest(&form, k, tol)?;
    let dofs = grid.dof_nodes();
    let xs: Vec<f64> = dofs.clone().map(|i| grid.node(i)).collect();
    let slack = 1e-12 * (grid.b - grid.a);

    let mut ratios = Vec::with_capacity(k);
    let mut flagged = Vec::new();
    let mut c_est = 0.0f64;
    for (ki, pair) in pairs.iter().enumerate() {
        let dens = energy_measure(&form, &pair.vector)?;
        let gamma_e: f64 = xs
            .iter()
            .zip(&dens)
            .filter(|(&x, _)| x >= e0 - slack && x <= e1 + slack)
            .map(|(_, d)| d.gamma * d.cell_mass)
            .sum();
        let mut row = Vec::with_capacity(b_grid.len());
        for (bi, &b) in b_grid.iter().enumerate() {
            let mass: f64 = xs
                .iter()
                .zip(pair.vector.iter().zip(form.mass()))
                .filter(|(&x, _)| x >= e0 - b - slack && x <= e1 + b + slack)
                .map(|(_, (&u, &m))| m * u * u)
                .sum();
            if mass < 1e-14 {
                flagged.push((ki, bi));
                row.push(f64::INFINITY);
            } else {
                let r = b * b * gamma_e / mass;
                c_est = c_est.max(r);
                row.push(r);
            }
        }
        ratios.push(row);
    }
    Ok(CaccioppoliReport {
        eigenvalues: pairs.iter().map(|p| p.lambda).collect(),
        b_grid: b_grid.to_vec(),
        ratios,
        flagged,
        c_est,
    })
}

/// Collar-to-bulk L2 norm ratios of a shooting solution over a nested family
/// of intervals: for each `E = (lo, hi)` the collar is the `b`-fringe
/// `E minus (lo + b, hi - b)`. Decay of the sequence along a growing family
/// is the computable face of the Shnol/Caccioppoli alternative: spectral
/// energies admit solutions whose collars carry a vanishing share.
pub fn collar_ratio(
    solution: &GeneralizedSolution,
    e_sequence: &[(f64, f64)],
    b: f64,
) -> Result<Vec<f64>> {
    if e_sequence.is_empty() {
        return Err(Error::invalid("need at least one interval"));
    }
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::invalid("collar width must be positive"));
    }
    let (mut span_lo, mut span_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &x in &solution.nodes {
        span_lo = span_lo.min(x);
        span_hi = span_hi.max(x);
    }
    let mut prev: Option<(f64, f64)> = None;
    for &(lo, hi) in e_sequence {
        if !(lo < hi) || 2.0 * b >= hi - lo {
            return Err(Error::invalid("each interval must be wider than both collars"));
        }
        if lo < span_lo - 1e-12 || hi > span_hi + 1e-12 {
            return Err(Error::window("interval escapes the sampled span"));
        }
        if let Some((plo, phi)) = prev {
            if lo > plo || hi < phi {
                return Err(Error::invalid("intervals must be nested increasing"));
            }
        }
        prev = Some((lo, hi));
    }

    let mut out = Vec::with_capacity(e_sequence.len());
    for &(lo, hi) in e_sequence {
        let bulk = l2_mass_on(solution, lo, hi);
        let collar = l2_mass_on(solution, lo, lo + b) + l2_mass_on(solution, hi - b, hi);
        if bulk <= 1e-300 {
            return Err(Error::degenerate("solution carries no mass on an interval"));
        }
        out.push((collar / bulk).sqrt());
    }
    Ok(out)
}

/// Integral of `u^2` over `[lo, hi]` from the sampled nodes, exact for a
/// piecewise-linear interpolant (including the clipped boundary cells).
fn l2_mass_on(solution: &GeneralizedSolution, lo: f64, hi: f64) -> f64 {
    let n = solution.nodes.len();
    let mut total = 0.0;
    for i in 1..n {
        let (mut xa, mut xb) = (solution.nodes[i - 1], solution.nodes[i]);
        let (mut ua, mut ub) = (solution.values[i - 1], solution.values[i]);
        if xb < xa {
            std::mem::swap(&mut xa, &mut xb);
            std::mem::swap(&mut ua, &mut ub);
        }
        let (ca, cb) = (xa.max(lo), xb.min(hi));
        if cb <= ca {
            continue;
        }
        let w = xb - xa;
        let va = if w == 0.0 { ua } else { ua + (ub - ua) * (ca - xa) / w };
        let vb = if w == 0.0 { ub } else { ua + (ub - ua) * (cb - xa) / w };
        total += (cb - ca) * (va * va + va * vb + vb * vb) / 3.0;
    }
    total
}
