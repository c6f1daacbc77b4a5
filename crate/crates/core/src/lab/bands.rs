//! Kronig-Penney band structure. For `-u'' + w sum_n delta_{n p} u = lambda u`
//! the period map has trace `2 Delta(lambda)` and `lambda` lies in a band iff
//! `|Delta| <= 1`. The discriminant is evaluated through the same propagator
//! entries as the transfer code, so the hyperbolic continuation below zero and
//! the `lambda -> 0` limit need no special casing here.

use crate::error::{Error, Result};
use crate::solve1d::prop::cs;

/// Floquet discriminant `Delta(lambda) = c + (w/2) s` with `(c, s)` the
/// propagator entries over one period at energy `lambda`. Equals
/// `cos(k p) + (w / 2k) sin(k p)` for `lambda = k^2 > 0` and continues
/// hyperbolically below zero.
pub fn kp_discriminant(weight: f64, period: f64, lambda: f64) -> f64 {
    let (c, s) = cs(-lambda, period);
    c + 0.5 * weight * s
}

/// Spectral bands `{lambda : |Delta(lambda)| <= 1}` intersected with
/// `lambda_range`, as disjoint closed intervals in ascending order. Band
/// edges interior to the range are located by bisection to width `1e-10`.
///
/// The scan runs on a grid uniform in `sign(lambda) sqrt(|lambda|)`, which
/// spaces the cells evenly in the quasimomentum; gaps narrower than a scan
/// cell (512 cells per unit of `pi / period`) are not separated. Touching
/// bands, as at `weight = 0`, stay merged because tangency points where
/// `|Delta| = 1` from below never flip the inside predicate.
pub fn kronig_penney_bands(
    weight: f64,
    period: f64,
    lambda_range: (f64, f64),
) -> Result<Vec<(f64, f64)>> {
    let (lo, hi) = lambda_range;
    if !weight.is_finite() || !period.is_finite() || period <= 0.0 {
        return Err(Error::invalid("weight must be finite and period positive"));
    }
    if !lo.is_finite() || !hi.is_finite() || !(lo < hi) {
        return Err(Error::invalid("lambda range must be a finite interval"));
    }

    // Quasimomentum chart t <-> lambda = sign(t) t^2.
    let chart = |t: f64| t.signum() * t * t;
    let unchart = |l: f64| l.signum() * l.abs().sqrt();
    let inside = |l: f64| kp_discriminant(weight, period, l).abs() <= 1.0;

    let (ta, tb) = (unchart(lo), unchart(hi));
    let cells_per_pi = 512.0;
    let dt = std::f64::consts::PI / period / cells_per_pi;
    let cells = (((tb - ta) / dt).ceil() as usize).max(8);
    let ts: Vec<f64> =
        (0..=cells).map(|k| ta + (tb - ta) * k as f64 / cells as f64).collect();
    let flags: Vec<bool> = ts.iter().map(|&t| inside(chart(t))).collect();

    // Refines the in/out flip between two grid energies to width 1e-10.
    let locate = |mut a: f64, mut b: f64| -> f64 {
        let ia = inside(a);
        while b - a > 1e-10 {
            let mid = 0.5 * (a + b);
            if inside(mid) == ia {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    };

    let mut bands = Vec::new();
    let mut start: Option<f64> = None;
    for k in 0..=cells {
        match (start, flags[k]) {
            (None, true) => {
                let l = chart(ts[k]);
                start = Some(if k == 0 { lo } else { locate(chart(ts[k - 1]), l) });
            }
            (Some(s), false) => {
                bands.push((s, locate(chart(ts[k - 1]), chart(ts[k]))));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        bands.push((s, hi));
    }
    Ok(bands)
}
