//! Adaptive Simpson quadrature and golden-section minimization. Integrands
//! with known kinks or very narrow features should be split there by the
//! caller: subdivision only refines structure the seed panels can see.

/// Golden-section search for a minimum of `f` on `[a, b]`, assumed unimodal
/// there; returns the bracket midpoint once it narrows to `width`.
pub(crate) fn golden_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, width: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > width {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        // Richardson correction: Simpson halving gains a factor of 16.
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Integral of `f` over `[a, b]` to mixed tolerance
/// `abs_tol + rel_tol * |integral|`. Orientation-aware: `a > b` flips sign.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    if a > b {
        return -adaptive_simpson(f, b, a, rel_tol, abs_tol);
    }
    // Seed with a 5-panel pass so the relative scale is meaningful before
    // tolerances are distributed.
    let mut coarse = 0.0;
    let step = (b - a) / 5.0;
    let mut samples = Vec::with_capacity(5);
    for i in 0..5 {
        let lo = a + i as f64 * step;
        let hi = if i == 4 { b } else { lo + step };
        let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
        coarse += simpson(fa, fm, fb, hi - lo);
        samples.push((lo, hi, fa, fm, fb));
    }
    let tol = (abs_tol + rel_tol * coarse.abs()).max(f64::MIN_POSITIVE);
    let mut total = 0.0;
    for (lo, hi, fa, fm, fb) in samples {
        let whole = simpson(fa, fm, fb, hi - lo);
        total += recurse(f, lo, hi, fa, fm, fb, whole, tol / 5.0, 48);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = adaptive_simpson(&|x| x * x * x - 2.0 * x, 0.0, 2.0, 1e-12, 1e-14);
        assert!((v - 0.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn oscillatory_integral_converges() {
        let v = adaptive_simpson(&|x| (10.0 * x).sin(), 0.0, std::f64::consts::PI, 1e-12, 1e-14);
        let exact = (1.0 - (10.0 * std::f64::consts::PI).cos()) / 10.0;
        assert!((v - exact).abs() < 1e-11, "{v} vs {exact}");
    }

    #[test]
    fn orientation_flips_sign() {
        let f = |x: f64| x.exp();
        let fwd = adaptive_simpson(&f, 0.0, 1.0, 1e-12, 1e-14);
        let bwd = adaptive_simpson(&f, 1.0, 0.0, 1e-12, 1e-14);
        assert!((fwd + bwd).abs() < 1e-14);
        assert!((fwd - (std::f64::consts::E - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn narrow_spike_is_resolved() {
        // Gaussian spike one decade narrower than the seed panels.
        let s = 0.02;
        let f = move |x: f64| (-((x - 0.37) / s).powi(2)).exp();
        let v = adaptive_simpson(&f, 0.0, 1.0, 1e-10, 1e-14);
        let exact = s * std::f64::consts::PI.sqrt();
        assert!((v - exact).abs() / exact < 1e-8, "{v} vs {exact}");
    }
}
