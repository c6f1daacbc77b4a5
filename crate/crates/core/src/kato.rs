//! Kato-class diagnostics and relative form bounds for signed measures.
//!
//! The smoothing functional of a measure is probed through the free-line
//! resolvent kernel: `c_alpha = sup_x int G_alpha(x, y) d|mu|(y)`. Its decay
//! in `alpha` separates measures the semigroup smooths away (Kato class,
//! `c_alpha -> 0`) from those that are merely form-bounded. The companion
//! [`form_bound`] measures the same control directly on a discretized form:
//! the best constants in `|mu|[u^2] <= kappa (E[u] + c ||u||^2)`.

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::forms::{weyl::shifted_operator, Carrier, DiscreteForm};
use crate::linalg::{deterministic_unit_vector, SkylineLdlt};
use crate::measure::{SignedMeasure1D, Support};
use crate::quad::{adaptive_simpson, golden_min};

/// Green kernel of `-d^2/dx^2 + alpha` on the full line:
/// `e^(-sqrt(alpha) |x - y|) / (2 sqrt(alpha))`. Symmetric and positive.
pub fn resolvent_kernel_free_line(alpha: f64, x: f64, y: f64) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::domain(format!(
            "free resolvent kernel needs alpha > 0, got {alpha}"
        )));
    }
    let root = alpha.sqrt();
    Ok((-root * (x - y).abs()).exp() / (2.0 * root))
}

/// `int_{lo}^{hi} G_alpha(x, y) dy` in closed form; `root = sqrt(alpha)`.
fn kernel_box_integral(root: f64, x: f64, lo: f64, hi: f64) -> f64 {
    let denom = 2.0 * root * root;
    if x <= lo {
        ((-root * (lo - x)).exp() - (-root * (hi - x)).exp()) / denom
    } else if x >= hi {
        ((-root * (x - hi)).exp() - (-root * (x - lo)).exp()) / denom
    } else {
        (2.0 - (-root * (x - lo)).exp() - (-root * (hi - x)).exp()) / denom
    }
}

/// The Kato constant `c_alpha(|mu|) = sup_x int G_alpha(x, y) d|mu|(y)`.
///
/// The density part is integrated in closed form on piecewise-constant
/// measures and by adaptive quadrature (split at the kernel kink `y = x`)
/// otherwise; atoms are summed exactly. The supremum is taken over a
/// candidate grid spanning the support hull plus every atom, then sharpened
/// by golden-section refinement around the best candidate.
pub fn kato_constant(measure: &SignedMeasure1D, alpha: f64, tol: &Tolerances) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::domain(format!("Kato constant needs alpha > 0, got {alpha}")));
    }
    let root = alpha.sqrt();

    let density_hull = match measure.density_support() {
        Support::Empty => None,
        Support::Bounded(lo, hi) => Some((lo, hi)),
        Support::Unbounded => {
            return Err(Error::domain(
                "Kato constant needs compactly supported measures; clip the density with a window",
            ));
        }
    };
    let mut hull: Option<(f64, f64)> = density_hull;
    for &(p, _) in measure.atoms() {
        hull = Some(match hull {
            None => (p, p),
            Some((lo, hi)) => (lo.min(p), hi.max(p)),
        });
    }
    let Some((lo, hi)) = hull else {
        return Ok(0.0);
    };

    let segments = density_hull.and_then(|(a, b)| measure.piecewise_constant_segments(a, b));
    let phi = |x: f64| -> f64 {
        let mut total = 0.0;
        for &(p, w) in measure.atoms() {
            total += w.abs() * (-root * (x - p).abs()).exp() / (2.0 * root);
        }
        match (&segments, density_hull) {
            (Some(segs), _) => {
                for &(a, b, v) in segs {
                    total += v.abs() * kernel_box_integral(root, x, a, b);
                }
            }
            (None, Some((a, b))) => {
                let g = |y: f64| {
                    measure.density_at(y).abs() * (-root * (x - y).abs()).exp() / (2.0 * root)
                };
                for (s0, s1) in [(a, x.clamp(a, b)), (x.clamp(a, b), b)] {
                    if s1 > s0 {
                        total += adaptive_simpson(&g, s0, s1, tol.quad_rel, 1e-13);
                    }
                }
            }
            (None, None) => {}
        }
        total
    };

    if hi <= lo {
        return Ok(phi(lo));
    }
    let count = 257;
    let step = (hi - lo) / (count - 1) as f64;
    let at = |i: usize| lo + step * i as f64;
    let mut best = f64::NEG_INFINITY;
    for &(p, _) in measure.atoms() {
        best = best.max(phi(p));
    }
    let mut best_i = 0;
    let mut grid_best = f64::NEG_INFINITY;
    for i in 0..count {
        let v = phi(at(i));
        if v > grid_best {
            grid_best = v;
            best_i = i;
        }
    }
    best = best.max(grid_best);
    // Refine around the best grid point: away from atoms the potential of a
    // positive measure is smooth, so the one-step bracket holds the peak.
    let a = at(best_i.saturating_sub(1));
    let b = at((best_i + 1).min(count - 1));
    if b > a {
        let x = golden_min(&|x| -phi(x), a, b, 1e-10 * (hi - lo).max(1.0));
        best = best.max(phi(x));
    }
    Ok(best)
}

/// How the decay of `c_alpha` reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KatoEvidence {
    /// Constants decay like the free kernel (or faster) or have already
    /// dropped under the threshold: evidence for the Kato class proper.
    Kato,
    /// Constants stay finite but show no decay: only the extended class.
    ExtendedOnly,
}

/// Kato diagnostics along an `alpha` grid.
#[derive(Debug, Clone)]
pub struct KatoReport {
    pub alphas: Vec<f64>,
    pub constants: Vec<f64>,
    /// Minimum observed constant; no extrapolation beyond the grid.
    pub c_kato: f64,
    /// Whether the constants are nonincreasing along the grid (up to
    /// roundoff); resolvent monotonicity says they must be.
    pub nonincreasing: bool,
    /// Least-squares slope of `log c` against `log alpha`, when all
    /// constants are positive.
    pub decay_exponent: Option<f64>,
    pub evidence: KatoEvidence,
    /// `(kappa, c_kappa)` from [`form_bound`], when a caller has attached it.
    pub form_bound: Option<(f64, f64)>,
}

impl KatoReport {
    /// Classifies a grid of measured constants. Evidence for the Kato class
    /// requires a nonincreasing trend and either constants already below
    /// `threshold` at the top of the grid or a fitted decay at least as fast
    /// as the free kernel's `alpha^(-1/2)` (slope below -0.4 leaves margin
    /// for the finite grid).
    pub fn classify(alphas: Vec<f64>, constants: Vec<f64>, threshold: f64) -> Result<KatoReport> {
        if alphas.is_empty() || alphas.len() != constants.len() {
            return Err(Error::invalid("alpha grid and constants must align and be nonempty"));
        }
        if alphas.windows(2).any(|w| w[1] <= w[0]) || alphas.iter().any(|&a| !(a > 0.0)) {
            return Err(Error::invalid("alpha grid must be positive and strictly increasing"));
        }
        if constants.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::invalid("Kato constants must be finite and nonnegative"));
        }
        let c_kato = constants.iter().cloned().fold(f64::INFINITY, f64::min);
        let scale = constants.iter().cloned().fold(0.0f64, f64::max).max(1e-300);
        let nonincreasing = constants.windows(2).all(|w| w[1] <= w[0] + 1e-12 * scale);
        let decay_exponent = if constants.iter().all(|&c| c > 0.0) {
            let xs: Vec<f64> = alphas.iter().map(|a| a.ln()).collect();
            let ys: Vec<f64> = constants.iter().map(|c| c.ln()).collect();
            let n = xs.len() as f64;
            let mx = xs.iter().sum::<f64>() / n;
            let my = ys.iter().sum::<f64>() / n;
            let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
            let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
            if sxx > 0.0 {
                Some(sxy / sxx)
            } else {
                None
            }
        } else {
            None
        };
        let decays = decay_exponent.map_or(true, |s| s <= -0.4);
        let last = *constants.last().expect("nonempty");
        let evidence = if nonincreasing && (last <= threshold || decays) {
            KatoEvidence::Kato
        } else {
            KatoEvidence::ExtendedOnly
        };
        Ok(KatoReport {
            alphas,
            constants,
            c_kato,
            nonincreasing,
            decay_exponent,
            evidence,
            form_bound: None,
        })
    }
}

/// Measures `c_alpha` along `alpha_grid` and classifies the decay.
pub fn kato_class_check(
    measure: &SignedMeasure1D,
    alpha_grid: &[f64],
    tol: &Tolerances,
) -> Result<KatoReport> {
    if alpha_grid.is_empty() {
        return Err(Error::invalid("alpha grid must be nonempty"));
    }
    let constants = alpha_grid
        .iter()
        .map(|&a| kato_constant(measure, a, tol))
        .collect::<Result<Vec<f64>>>()?;
    KatoReport::classify(alpha_grid.to_vec(), constants, tol.kato_threshold)
}

/// The relative form bound of a measure against a discretized form.
#[derive(Debug, Clone)]
pub struct FormBound {
    /// `(c, kappa(c))` along the supplied grid; `kappa` is infinite where
    /// `E + c` is not positive definite.
    pub curve: Vec<(f64, f64)>,
    /// `(kappa, c_kappa)` minimizing `kappa` among entries with `kappa < 1`;
    /// `None` means the measure is inadmissible on this grid.
    pub pair: Option<(f64, f64)>,
}

/// For each `c`, the best constant `kappa(c)` in
/// `|mu|[u^2] <= kappa (E[u, u] + c (u, u)_m)`: the largest generalized
/// eigenvalue of the diagonal `|mu|` form against the shifted energy, by
/// power iteration on `(E + c M)^{-1} B`.
///
/// The measure is sampled onto the form's interval carrier exactly as the
/// assembly does: density weighted by the node masses, atoms at the nearest
/// node, and charge on eliminated Dirichlet endpoints dropped (trial
/// functions vanish there, so it never enters the quadratic form).
pub fn form_bound(
    measure: &SignedMeasure1D,
    form: &DiscreteForm,
    c_grid: &[f64],
) -> Result<FormBound> {
    let Carrier::Interval(grid) = form.carrier() else {
        return Err(Error::invalid("form bounds need a form on an interval carrier"));
    };
    if c_grid.is_empty() {
        return Err(Error::invalid("shift grid must be nonempty"));
    }
    if c_grid.iter().any(|c| !c.is_finite()) {
        return Err(Error::invalid("shift grid must be finite"));
    }
    let n = form.dim();
    let first_dof = grid.dof_nodes().start;
    let mut b = vec![0.0; n];
    for (i, bi) in b.iter_mut().enumerate() {
        *bi = measure.density_at(grid.node(first_dof + i)).abs() * form.mass()[i];
    }
    let h = grid.h();
    for &(p, w) in measure.atoms() {
        if p < grid.a - 0.5 * h || p > grid.b + 0.5 * h {
            continue;
        }
        let node = grid.nearest_node(p);
        if grid.dof_nodes().contains(&node) {
            b[node - first_dof] += w.abs();
        }
    }
    let zero_measure = b.iter().all(|&v| v == 0.0);

    let mut curve = Vec::with_capacity(c_grid.len());
    for &c in c_grid {
        if zero_measure {
            curve.push((c, 0.0));
            continue;
        }
        let Ok(ldlt) = SkylineLdlt::factor(&shifted_operator(form, c), 0.0) else {
            curve.push((c, f64::INFINITY));
            continue;
        };
        let mut v = deterministic_unit_vector(n, 5);
        let mut kappa = 0.0f64;
        let mut y = vec![0.0; n];
        let mut w = vec![0.0; n];
        for _ in 0..500 {
            for i in 0..n {
                y[i] = b[i] * v[i];
            }
            if y.iter().all(|&t| t == 0.0) {
                // Seed happened to miss the measure's support entirely.
                v = deterministic_unit_vector(n, 7919);
                continue;
            }
            ldlt.solve(&y, &mut w);
            let num: f64 = (0..n).map(|i| b[i] * w[i] * w[i]).sum();
            let den = form.energy(&w, &w) + c * form.mass_inner(&w, &w);
            let next = if den > 0.0 { num / den } else { f64::INFINITY };
            let nrm = w.iter().map(|t| t * t).sum::<f64>().sqrt();
            if nrm > 0.0 {
                for i in 0..n {
                    v[i] = w[i] / nrm;
                }
            }
            if (next - kappa).abs() <= 1e-12 * next.abs().max(1e-30) {
                kappa = next;
                break;
            }
            kappa = next;
        }
        curve.push((c, kappa));
    }
    let pair = curve
        .iter()
        .filter(|(_, k)| k.is_finite() && *k < 1.0)
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .map(|&(c, k)| (k, c));
    Ok(FormBound { curve, pair })
}
