//! Intrinsic geometry probes. For a one-dimensional form
//! `E[u] = int a(x) u'(x)^2 dx`, the intrinsic metric is
//! `rho(x, y) = | int_x^y a(t)^{-1/2} dt |`: the largest metric whose unit
//! balls keep the energy density of distance functions below one. Volume
//! growth in this metric is what spectral hypotheses (generalized
//! eigenfunction bounds, heat-kernel estimates) are phrased in.

use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;

/// Intrinsic distance between `x` and `y` for the diffusion coefficient `a`.
/// The coefficient must be uniformly elliptic on the segment; it is sampled
/// densely and rejected if it dips below `1e-12` or fails to be finite.
pub fn intrinsic_distance(a: &dyn Fn(f64) -> f64, x: f64, y: f64, rel_tol: f64) -> Result<f64> {
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::invalid("intrinsic distance needs finite endpoints"));
    }
    if x == y {
        return Ok(0.0);
    }
    let (lo, hi) = if x < y { (x, y) } else { (y, x) };
    let samples = 257;
    for k in 0..samples {
        let t = lo + (hi - lo) * k as f64 / (samples - 1) as f64;
        let v = a(t);
        if !v.is_finite() || v < 1e-12 {
            return Err(Error::domain(format!(
                "diffusion coefficient degenerates at x = {t} (a = {v})"
            )));
        }
    }
    let d = adaptive_simpson(&|t| 1.0 / a(t).sqrt(), lo, hi, rel_tol, 1e-14);
    Ok(d)
}

#[derive(Debug, Clone)]
pub struct VolumeGrowth {
    /// Fitted exponential rate `beta` in `V(r) ~ exp(beta r)`.
    pub rate: f64,
    /// Coefficient of determination of the log-linear fit.
    pub r_squared: f64,
    pub samples: Vec<(f64, f64)>,
}

/// Least-squares fit of `log V(r)` against `r` over `[r0, r1]`. A rate near
/// zero with a good fit certifies subexponential growth; spectral scans
/// assume it.
pub fn volume_growth_rate(
    volume: &dyn Fn(f64) -> f64,
    r0: f64,
    r1: f64,
    count: usize,
) -> Result<VolumeGrowth> {
    if !(r0 < r1) || count < 3 {
        return Err(Error::invalid("volume growth needs r0 < r1 and at least 3 samples"));
    }
    let mut samples = Vec::with_capacity(count);
    for k in 0..count {
        let r = r0 + (r1 - r0) * k as f64 / (count - 1) as f64;
        let v = volume(r);
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::domain(format!("volume must be positive and finite, V({r}) = {v}")));
        }
        samples.push((r, v));
    }
    let n = count as f64;
    let (mut sx, mut sy, mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(r, v) in &samples {
        let y = v.ln();
        sx += r;
        sy += y;
        sxx += r * r;
        sxy += r * y;
        syy += y * y;
    }
    let denom = n * sxx - sx * sx;
    if denom <= 0.0 {
        return Err(Error::degenerate("volume samples are collinear in r"));
    }
    let rate = (n * sxy - sx * sy) / denom;
    let sst = syy - sy * sy / n;
    let r_squared = if sst <= 0.0 {
        1.0
    } else {
        let intercept = (sy - rate * sx) / n;
        let sse: f64 = samples
            .iter()
            .map(|&(r, v)| {
                let e = v.ln() - (rate * r + intercept);
                e * e
            })
            .sum();
        1.0 - sse / sst
    };
    Ok(VolumeGrowth { rate, r_squared, samples })
}
