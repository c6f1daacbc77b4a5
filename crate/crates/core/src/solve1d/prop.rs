//! Constant-coefficient propagator pieces shared by the shooting and
//! transfer-matrix paths.

/// `(c, s)` for the equation `u'' = omega u` over a signed step `d`:
/// `c = cosh(sqrt(omega) d)` and `s = sinh(sqrt(omega) d) / sqrt(omega)`,
/// continued analytically through `omega <= 0` (trigonometric branch). The
/// propagator is `[[c, s], [omega s, c]]` with determinant exactly one.
pub(crate) fn cs(omega: f64, d: f64) -> (f64, f64) {
    let z = omega * d * d;
    if z.abs() < 1e-6 {
        // Series in z = omega d^2; the tail is below 1e-28 at the cutoff.
        let c = 1.0 + z / 2.0 * (1.0 + z / 12.0 * (1.0 + z / 30.0));
        let s = d * (1.0 + z / 6.0 * (1.0 + z / 20.0 * (1.0 + z / 42.0)));
        (c, s)
    } else if omega > 0.0 {
        let k = omega.sqrt();
        ((k * d).cosh(), (k * d).sinh() / k)
    } else {
        let k = (-omega).sqrt();
        ((k * d).cos(), (k * d).sin() / k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branches_agree_at_the_series_cutoff() {
        for &omega in &[9.999e-7, -9.999e-7] {
            let (c0, s0) = cs(omega, 1.0);
            // Nudge past the cutoff so the closed form is taken.
            let (c1, s1) = cs(omega * 1.001, 1.0);
            assert!((c0 - c1).abs() < 1e-9);
            assert!((s0 - s1).abs() < 1e-9);
        }
    }

    #[test]
    fn determinant_is_one() {
        for &(omega, d) in &[(4.0, 0.7), (-9.0, 1.3), (0.0, 2.0), (1e-9, -5.0), (25.0, -0.2)] {
            let (c, s) = cs(omega, d);
            assert!((c * c - omega * s * s - 1.0).abs() < 1e-12, "omega={omega} d={d}");
        }
    }
}
