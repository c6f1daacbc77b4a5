//! Dormand-Prince 4(5) integration for the small first-order systems behind
//! transfer matrices and shooting solutions. Steps land exactly on the
//! requested output nodes, so no dense-output interpolant is needed; the
//! node spacing in this crate is always finer than the natural step anyway.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rel_tol: 1e-10, abs_tol: 1e-12, h_max: f64::INFINITY, max_steps: 20_000_000 }
    }
}

const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] =
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
const B5: [f64; 6] =
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

struct Stepper<'a, F> {
    f: &'a F,
    dim: usize,
    k: [Vec<f64>; 7],
    ytmp: Vec<f64>,
    y5: Vec<f64>,
}

impl<'a, F: Fn(f64, &[f64], &mut [f64])> Stepper<'a, F> {
    fn new(f: &'a F, dim: usize) -> Self {
        Stepper {
            f,
            dim,
            k: std::array::from_fn(|_| vec![0.0; dim]),
            ytmp: vec![0.0; dim],
            y5: vec![0.0; dim],
        }
    }

    /// One trial step from (x, y) with signed step h. Returns the scaled
    /// error norm; on acceptance the caller copies `y5`.
    fn trial(&mut self, x: f64, y: &[f64], h: f64, opt: &OdeOptions) -> f64 {
        let n = self.dim;
        (self.f)(x, y, &mut self.k[0]);
        let rows: [&[f64]; 5] = [&A2, &A3, &A4, &A5, &A6];
        for (s, row) in rows.iter().enumerate() {
            for i in 0..n {
                let mut acc = y[i];
                for (j, a) in row.iter().enumerate() {
                    acc += h * a * self.k[j][i];
                }
                self.ytmp[i] = acc;
            }
            let (head, tail) = self.k.split_at_mut(s + 1);
            let _ = head;
            (self.f)(x + C[s] * h, &self.ytmp, &mut tail[0]);
        }
        for i in 0..n {
            let mut acc = y[i];
            for (j, b) in B5.iter().enumerate() {
                acc += h * b * self.k[j][i];
            }
            self.y5[i] = acc;
        }
        // FSAL stage evaluated at the candidate endpoint feeds the error
        // estimate (B4 has a seventh weight).
        (self.f)(x + h, &self.y5, &mut self.ytmp);
        let mut err2 = 0.0;
        for i in 0..n {
            let mut e = 0.0;
            for (j, b) in B4.iter().enumerate() {
                let kji = if j < 6 { self.k[j][i] } else { self.ytmp[i] };
                e += h * b * kji;
            }
            e = (y[i] + e) - self.y5[i];
            let sc = opt.abs_tol + opt.rel_tol * y[i].abs().max(self.y5[i].abs());
            err2 += (e / sc) * (e / sc);
        }
        (err2 / n as f64).sqrt()
    }
}

/// Integrates `y' = f(x, y)` from `nodes[0]` through every node in order,
/// returning the state at each node. Nodes must be monotone (either
/// direction); repeated nodes repeat the state.
pub fn integrate_along<F>(f: &F, y0: &[f64], nodes: &[f64], opt: &OdeOptions) -> Result<Vec<Vec<f64>>>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    if nodes.is_empty() {
        return Ok(Vec::new());
    }
    let dir = (nodes[nodes.len() - 1] - nodes[0]).signum();
    if dir != 0.0 {
        for w in nodes.windows(2) {
            if (w[1] - w[0]) * dir < 0.0 {
                return Err(Error::invalid("output nodes must be monotone"));
            }
        }
    }
    let n = y0.len();
    let mut out = Vec::with_capacity(nodes.len());
    out.push(y0.to_vec());
    let mut y = y0.to_vec();
    let mut x = nodes[0];
    let mut stepper = Stepper::new(f, n);
    let span = (nodes[nodes.len() - 1] - nodes[0]).abs().max(f64::MIN_POSITIVE);
    let mut h = (0.01 * span).min(opt.h_max) * if dir < 0.0 { -1.0 } else { 1.0 };
    let mut prev_err: f64 = 1.0;
    let mut steps = 0usize;
    for &target in &nodes[1..] {
        while x != target {
            steps += 1;
            if steps > opt.max_steps {
                return Err(Error::numerical("step limit exceeded"));
            }
            let remaining = target - x;
            let clamped = h * remaining <= 0.0 || h.abs() >= remaining.abs();
            let hs = if clamped { remaining } else { h };
            let err = stepper.trial(x, &y, hs, opt);
            if !err.is_finite() {
                h *= 0.25;
                if h.abs() < 1e-300 {
                    return Err(Error::numerical("step size underflow"));
                }
                continue;
            }
            if err <= 1.0 {
                x = if clamped { target } else { x + hs };
                y.copy_from_slice(&stepper.y5);
                if clamped {
                    // A landing step says nothing about the cruise step.
                    continue;
                }
                let fac =
                    0.9 * err.max(1e-10).powf(-0.7 / 5.0) * prev_err.max(1e-10).powf(0.4 / 5.0);
                h = (hs * fac.clamp(0.2, 5.0)).clamp(-opt.h_max, opt.h_max);
                prev_err = err.max(1e-10);
            } else {
                let fac = (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
                h = hs * fac;
                if h.abs() < 1e-300 {
                    return Err(Error::numerical("step size underflow"));
                }
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth_is_accurate() {
        let f = |_x: f64, y: &[f64], dy: &mut [f64]| dy[0] = y[0];
        let nodes: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        let out = integrate_along(&f, &[1.0], &nodes, &OdeOptions::default()).unwrap();
        for (i, row) in out.iter().enumerate() {
            let exact = (i as f64 * 0.1).exp();
            assert!((row[0] - exact).abs() < 1e-10 * exact, "node {i}");
        }
    }

    #[test]
    fn harmonic_oscillator_round_trip() {
        let f = |_x: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        let tau = 2.0 * std::f64::consts::PI;
        let nodes: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0 * tau).collect();
        let out = integrate_along(&f, &[0.0, 1.0], &nodes, &OdeOptions::default()).unwrap();
        let last = out.last().unwrap();
        assert!((last[0] - 0.0).abs() < 1e-8, "u({tau}) = {}", last[0]);
        assert!((last[1] - 1.0).abs() < 1e-8, "u'({tau}) = {}", last[1]);
        // Quarter period hits the peak.
        let quarter = &out[25];
        assert!((quarter[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn backward_integration_mirrors_forward() {
        let f = |x: f64, y: &[f64], dy: &mut [f64]| dy[0] = -2.0 * x * y[0];
        let fwd_nodes = [0.0, 0.5, 1.0];
        let fwd = integrate_along(&f, &[1.0], &fwd_nodes, &OdeOptions::default()).unwrap();
        let bwd_nodes = [1.0, 0.5, 0.0];
        let bwd =
            integrate_along(&f, &[fwd[2][0]], &bwd_nodes, &OdeOptions::default()).unwrap();
        assert!((bwd[2][0] - 1.0).abs() < 1e-9, "round trip {}", bwd[2][0]);
        assert!((bwd[1][0] - fwd[1][0]).abs() < 1e-9);
    }

    #[test]
    fn rejects_non_monotone_nodes() {
        let f = |_x: f64, y: &[f64], dy: &mut [f64]| dy[0] = y[0];
        let nodes = [0.0, 1.0, 0.5];
        assert!(integrate_along(&f, &[1.0], &nodes, &OdeOptions::default()).is_err());
    }
}
