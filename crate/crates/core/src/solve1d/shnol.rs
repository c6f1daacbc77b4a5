//! Spectral scans through polynomially bounded solutions. A point of the
//! line's spectrum admits a generalized eigenfunction of subexponential
//! growth, so the transfer growth rate `gamma(lambda)` drops to the `1/L`
//! noise floor exactly on spectral intervals; the scan thresholds it at
//! `epsilon = shnol_eps_factor / L`. Isolated eigenvalues below the
//! essential spectrum are invisible to `gamma` (the generic solution still
//! grows) and are caught separately by a two-sided shooting Wronskian with
//! decaying boundary data.

use super::transfer::{growth_rate, transfer_matrix};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::measure::SignedMeasure1D;

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub lambdas: Vec<f64>,
    pub gammas: Vec<f64>,
    /// Detection threshold `shnol_eps_factor / half_length`.
    pub epsilon: f64,
    pub half_length: f64,
    /// Maximal grid runs with `gamma <= epsilon`, as closed intervals.
    pub intervals: Vec<(f64, f64)>,
    /// Wronskian zeros below `min(V(-L), V(L))`, refined by bisection.
    pub bound_states: Vec<f64>,
}

/// Scans `gamma(lambda)` over a uniform grid on `lambda_range` and collects
/// the detected spectral intervals and the bound states below them. The
/// decaying boundary data for the bound-state pass uses the local density
/// value at the truncation points, which is exact whenever the density is
/// constant outside `(-L, L)` and a WKB approximation otherwise.
pub fn shnol_scan(
    measure: &SignedMeasure1D,
    lambda_range: (f64, f64),
    count: usize,
    half_length: f64,
    tol: &Tolerances,
) -> Result<SpectrumReport> {
    let (lo, hi) = lambda_range;
    if !lo.is_finite() || !hi.is_finite() || !(lo < hi) {
        return Err(Error::invalid("lambda range must be a finite interval"));
    }
    if count < 2 {
        return Err(Error::invalid("scan needs at least two grid points"));
    }
    if !(half_length > 0.0) || !half_length.is_finite() {
        return Err(Error::invalid("half length must be positive and finite"));
    }
    let lambdas: Vec<f64> =
        (0..count).map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64).collect();
    let mut gammas = Vec::with_capacity(count);
    for &l in &lambdas {
        gammas.push(growth_rate(measure, l, half_length, tol)?);
    }
    let epsilon = tol.shnol_eps_factor / half_length;

    let mut intervals = Vec::new();
    let mut run: Option<(f64, f64)> = None;
    for (&l, &g) in lambdas.iter().zip(&gammas) {
        if g <= epsilon {
            run = match run {
                None => Some((l, l)),
                Some((s, _)) => Some((s, l)),
            };
        } else if let Some(r) = run.take() {
            intervals.push(r);
        }
    }
    if let Some(r) = run {
        intervals.push(r);
    }

    let vl = measure.density_at(-half_length);
    let vr = measure.density_at(half_length);
    let cap = vl.min(vr);
    let wronskian = |lambda: f64| -> Result<f64> {
        let kl = (vl - lambda).max(0.0).sqrt();
        let kr = (vr - lambda).max(0.0).sqrt();
        let left = transfer_matrix(measure, lambda, -half_length, 0.0, tol)?;
        let right = transfer_matrix(measure, lambda, half_length, 0.0, tol)?;
        let ul = left.apply_direction([1.0, kl]);
        let ur = right.apply_direction([1.0, -kr]);
        Ok(ul[0] * ur[1] - ul[1] * ur[0])
    };
    let mut bound_states = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for &l in &lambdas {
        if l >= cap {
            break;
        }
        let w = wronskian(l)?;
        if w == 0.0 {
            bound_states.push(l);
            prev = None;
            continue;
        }
        if let Some((l0, w0)) = prev {
            if w0 * w < 0.0 {
                let (mut a, mut wa, mut b) = (l0, w0, l);
                for _ in 0..200 {
                    if b - a <= 1e-13 * b.abs().max(1.0) {
                        break;
                    }
                    let mid = 0.5 * (a + b);
                    let wm = wronskian(mid)?;
                    if wm == 0.0 {
                        a = mid;
                        b = mid;
                        break;
                    }
                    if wa * wm < 0.0 {
                        b = mid;
                    } else {
                        a = mid;
                        wa = wm;
                    }
                }
                bound_states.push(0.5 * (a + b));
            }
        }
        prev = Some((l, w));
    }

    Ok(SpectrumReport { lambdas, gammas, epsilon, half_length, intervals, bound_states })
}

/// Total length of the symmetric difference of two unions of closed
/// intervals. The scale on which two detected spectra disagree.
pub fn interval_symmetric_difference(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    fn merge(v: &[(f64, f64)]) -> Vec<(f64, f64)> {
        let mut s: Vec<(f64, f64)> = v.iter().copied().filter(|&(x, y)| y >= x).collect();
        s.sort_by(|p, q| p.0.total_cmp(&q.0));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(s.len());
        for (x, y) in s {
            match out.last_mut() {
                Some(last) if x <= last.1 => last.1 = last.1.max(y),
                _ => out.push((x, y)),
            }
        }
        out
    }
    let (ma, mb) = (merge(a), merge(b));
    let contains = |v: &[(f64, f64)], x: f64| v.iter().any(|&(s, e)| s <= x && x <= e);
    let mut cuts: Vec<f64> = ma.iter().chain(&mb).flat_map(|&(s, e)| [s, e]).collect();
    cuts.sort_by(|p, q| p.total_cmp(q));
    cuts.dedup();
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        if contains(&ma, mid) != contains(&mb, mid) {
            total += w[1] - w[0];
        }
    }
    total
}
