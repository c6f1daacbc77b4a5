//! Shooting for generalized solutions of `-u'' + (nu - lambda) u = 0`, where
//! `nu = V dx + sum_j w_j delta_{x_j}`. Between atoms the equation is a plain
//! ODE; at an atom the value is continuous and the derivative jumps by
//! `u'(x+) - u'(x-) = w u(x)`. Piecewise-constant densities are propagated by
//! exact matrix exponentials; everything else goes through the adaptive
//! Dormand-Prince integrator.

use super::prop::cs;
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::measure::SignedMeasure1D;
use crate::ode::{integrate_along, OdeOptions};

/// A generalized solution sampled along the traversal direction. Derivatives
/// are one-sided: `d_left` and `d_right` differ exactly at atoms and agree
/// everywhere else. At the span endpoints both sides report the derivative on
/// the interior side.
#[derive(Debug, Clone)]
pub struct GeneralizedSolution {
    pub lambda: f64,
    /// Sample positions in traversal order (descending for backward spans).
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    pub d_left: Vec<f64>,
    pub d_right: Vec<f64>,
}

impl GeneralizedSolution {
    /// Strict sign flips along the samples; exact zeros are skipped.
    pub fn sign_changes(&self) -> usize {
        let mut last = 0.0f64;
        let mut count = 0;
        for &v in &self.values {
            if v == 0.0 {
                continue;
            }
            let s = v.signum();
            if last != 0.0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

struct Pt {
    x: f64,
    atom: f64,
    out: bool,
}

/// Integrates one generalized solution across `span` from the state
/// `init = (u, u')` at `span.0`, sampling `n_out` uniform nodes plus every
/// interior atom position. The span may run backward (`span.0 > span.1`).
/// Atoms sitting exactly on a span endpoint are not crossed and therefore
/// not applied; the density must be finite on the span.
pub fn integrate_solution(
    measure: &SignedMeasure1D,
    lambda: f64,
    span: (f64, f64),
    init: (f64, f64),
    n_out: usize,
    tol: &Tolerances,
) -> Result<GeneralizedSolution> {
    let (a, b) = span;
    if !a.is_finite() || !b.is_finite() || a == b {
        return Err(Error::invalid("span must be a nondegenerate finite interval"));
    }
    if !lambda.is_finite() || !init.0.is_finite() || !init.1.is_finite() {
        return Err(Error::invalid("lambda and the initial state must be finite"));
    }
    if n_out < 2 {
        return Err(Error::invalid("need at least two output nodes"));
    }
    let forward = b > a;
    let (lo, hi) = if forward { (a, b) } else { (b, a) };
    let segments = measure.piecewise_constant_segments(lo, hi);

    let mut pts: Vec<Pt> = Vec::with_capacity(n_out + measure.atoms().len());
    for k in 0..n_out {
        let x = if k == n_out - 1 { b } else { a + (b - a) * k as f64 / (n_out - 1) as f64 };
        pts.push(Pt { x, atom: 0.0, out: true });
    }
    for &(x, w) in measure.atoms() {
        if x > lo && x < hi && w != 0.0 {
            pts.push(Pt { x, atom: w, out: false });
        }
    }
    match &segments {
        Some(segs) => {
            for &(x0, _, _) in &segs[1..] {
                if x0 > lo && x0 < hi {
                    pts.push(Pt { x: x0, atom: 0.0, out: false });
                }
            }
        }
        None => {
            // Restart the adaptive integrator at window edges, where the
            // density may jump.
            if let Some((wlo, whi)) = measure.window() {
                for x in [wlo, whi] {
                    if x > lo && x < hi {
                        pts.push(Pt { x, atom: 0.0, out: false });
                    }
                }
            }
        }
    }
    pts.sort_by(|p, q| if forward { p.x.total_cmp(&q.x) } else { q.x.total_cmp(&p.x) });
    let mut merged: Vec<Pt> = Vec::with_capacity(pts.len());
    for p in pts {
        match merged.last_mut() {
            Some(last) if last.x == p.x => {
                last.atom += p.atom;
                last.out |= p.out;
            }
            _ => merged.push(p),
        }
    }
    let pts = merged;

    let opt = OdeOptions { rel_tol: tol.ode_rel, abs_tol: tol.ode_abs, ..OdeOptions::default() };
    let rhs = |x: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = y[1];
        dy[1] = (measure.density_at(x) - lambda) * y[0];
    };

    let m = pts.len();
    let mut nodes = Vec::with_capacity(n_out);
    let mut values = Vec::with_capacity(n_out);
    let mut d_left = Vec::with_capacity(n_out);
    let mut d_right = Vec::with_capacity(n_out);
    let (mut u, mut du) = init;

    // pts[0] is the span start: no atom there by construction.
    nodes.push(pts[0].x);
    values.push(u);
    d_left.push(du);
    d_right.push(du);

    let mut record = |pt: &Pt, u: f64, du_arrive: f64, du_leave: f64| {
        if pt.out {
            nodes.push(pt.x);
            values.push(u);
            if forward {
                d_left.push(du_arrive);
                d_right.push(du_leave);
            } else {
                d_left.push(du_leave);
                d_right.push(du_arrive);
            }
        }
    };

    let mut i = 0;
    while i + 1 < m {
        // Advance j to the end of the atom-free stretch (the stretch may end
        // with an atom point or the span end).
        let mut j = i + 1;
        while j + 1 < m && pts[j].atom == 0.0 {
            j += 1;
        }
        if segments.is_some() {
            for k in i + 1..=j {
                let delta = pts[k].x - pts[k - 1].x;
                let v = measure.density_at(0.5 * (pts[k].x + pts[k - 1].x));
                let omega = v - lambda;
                let (c, s) = cs(omega, delta);
                let (nu, ndu) = (c * u + s * du, omega * s * u + c * du);
                u = nu;
                du = ndu;
                let arrive = du;
                if pts[k].atom != 0.0 {
                    du += if forward { pts[k].atom * u } else { -pts[k].atom * u };
                }
                record(&pts[k], u, arrive, du);
            }
        } else {
            let xs: Vec<f64> = pts[i..=j].iter().map(|p| p.x).collect();
            let states = integrate_along(&rhs, &[u, du], &xs, &opt)?;
            for k in i + 1..=j {
                u = states[k - i][0];
                du = states[k - i][1];
                let arrive = du;
                if pts[k].atom != 0.0 {
                    du += if forward { pts[k].atom * u } else { -pts[k].atom * u };
                }
                record(&pts[k], u, arrive, du);
            }
        }
        i = j;
    }

    Ok(GeneralizedSolution { lambda, nodes, values, d_left, d_right })
}
