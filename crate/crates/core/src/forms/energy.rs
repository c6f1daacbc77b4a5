//! Energy measures and the ground-state transform.
//!
//! The discrete energy measure assigns to each node the cell average
//!
//! ```text
//! gamma_i m_i = (1/2) sum_{j ~ i} w_ij (u_i - u_j)^2 + s_i u_i^2,
//! ```
//!
//! splitting every edge's energy evenly between its endpoints and charging
//! killing weights to their own node. Summing over nodes reproduces the
//! kinetic energy exactly. Against a cutoff `phi` the defining identity
//!
//! ```text
//! sum_i phi_i gamma_i m_i = E_kin[u, phi u] - (1/2) E_kin[u^2, phi]
//! ```
//!
//! holds exactly wherever no killing weight sits inside the support of
//! `phi`; at killed nodes (eliminated Dirichlet walls) the left side carries
//! the full weight `s_i u_i^2` while the polarization identity sees half.
//!
//! The ground-state transform takes a positive `Phi` with
//! `(K + diag p) Phi = lambda M Phi` and rewrites the form: for any `f, g`,
//!
//! ```text
//! E[f, g] = sum_{i<j} w_ij Phi_i Phi_j (f_i/Phi_i - f_j/Phi_j)(g_i/Phi_i - g_j/Phi_j)
//!           + lambda (f, g)_m
//!           + sum_i (f_i g_i / Phi_i) [(K + diag p - lambda M) Phi]_i,
//! ```
//!
//! an algebraic identity; the last sum vanishes at an exact eigenpair. The
//! transformed weights `w_ij Phi_i Phi_j` with mass `m_i Phi_i^2` form a
//! killing-free Markovian pencil whose spectrum is the original one shifted
//! down by `lambda`.

use super::DiscreteForm;
use crate::error::{Error, Result};
use crate::linalg::{deterministic_unit_vector, SparseSym};

#[derive(Debug, Clone, Copy)]
pub struct EnergyDensity {
    /// Density of the energy measure with respect to the node mass.
    pub gamma: f64,
    /// The node mass itself, so `gamma * cell_mass` is the cell's energy.
    pub cell_mass: f64,
}

/// Per-node energy measure of `u`. `sum_i gamma_i m_i` equals the kinetic
/// energy of `u` exactly.
pub fn energy_measure(form: &DiscreteForm, u: &[f64]) -> Result<Vec<EnergyDensity>> {
    let n = form.dim();
    if u.len() != n {
        return Err(Error::invalid("vector length does not match the form"));
    }
    let kin = form.kin();
    let mut cell = vec![0.0f64; n];
    for i in 0..n {
        for &(j, v) in kin.row(i) {
            let j = j as usize;
            let w = -v;
            let d = u[i] - u[j];
            // Each undirected edge shows up in both rows, so this charges
            // half of w (u_i - u_j)^2 to each endpoint.
            cell[i] += 0.5 * w * d * d;
        }
    }
    for (ci, (s, ui)) in cell.iter_mut().zip(form.ghost_weights().iter().zip(u)) {
        *ci += s * ui * ui;
    }
    Ok(form
        .mass()
        .iter()
        .zip(cell)
        .map(|(&m, c)| EnergyDensity { gamma: c / m, cell_mass: m })
        .collect())
}

#[derive(Debug, Clone)]
pub struct GroundStateTransform {
    /// Graph Laplacian of the transformed weights `w_ij Phi_i Phi_j`.
    pub laplacian: SparseSym,
    /// Transformed mass `m_i Phi_i^2`.
    pub mass: Vec<f64>,
}

/// Transforms the form by a positive vector `phi`. The pencil
/// `(laplacian, mass)` has the spectrum of the original generator shifted so
/// that `phi`'s eigenvalue sits at zero (exactly, when `phi` is an exact
/// eigenvector; to eigen-residual accuracy otherwise).
pub fn ground_state_transform(form: &DiscreteForm, phi: &[f64]) -> Result<GroundStateTransform> {
    let n = form.dim();
    if phi.len() != n {
        return Err(Error::invalid("vector length does not match the form"));
    }
    if phi.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::domain("ground-state transform requires a strictly positive vector"));
    }
    let mut diag = vec![0.0f64; n];
    let mut upper = Vec::with_capacity(form.kin().off_count() / 2);
    for i in 0..n {
        for &(j, v) in form.kin().row(i) {
            let j = j as usize;
            let wt = -v * phi[i] * phi[j];
            diag[i] += wt;
            if j > i {
                upper.push((i, j, -wt));
            }
        }
    }
    let laplacian = SparseSym::from_parts(diag, &upper)?;
    let mass = form.mass().iter().zip(phi).map(|(m, p)| m * p * p).collect();
    Ok(GroundStateTransform { laplacian, mass })
}

/// Largest violation of the ground-state identity over a deterministic
/// family of test pairs (the first pair is diagonal, `f = g`), each
/// normalized in the mass norm. At an exact eigenpair `(phi, lambda)` this
/// is pure roundoff; shifting `lambda` by `delta` moves it by
/// `|delta (f, g)_m| <= |delta|`.
pub fn gst_residual(
    form: &DiscreteForm,
    phi: &[f64],
    lambda: f64,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    let n = form.dim();
    if phi.len() != n {
        return Err(Error::invalid("vector length does not match the form"));
    }
    if phi.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::domain("ground-state identity requires a strictly positive vector"));
    }
    let edges = form.edges();
    let mut worst = 0.0f64;
    for t in 0..trials.max(1) {
        let mut f = deterministic_unit_vector(n, seed.wrapping_add(2 * t as u64));
        let nf = form.mass_norm(&f);
        f.iter_mut().for_each(|x| *x /= nf);
        let g = if t == 0 {
            f.clone()
        } else {
            let mut g = deterministic_unit_vector(n, seed.wrapping_add(2 * t as u64 + 1));
            let ng = form.mass_norm(&g);
            g.iter_mut().for_each(|x| *x /= ng);
            g
        };
        let lhs = form.energy(&f, &g);
        let mut quad = 0.0;
        for &(i, j, w) in &edges {
            quad += w * phi[i] * phi[j] * (f[i] / phi[i] - f[j] / phi[j])
                * (g[i] / phi[i] - g[j] / phi[j]);
        }
        let rhs = quad + lambda * form.mass_inner(&f, &g);
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::assemble_schrodinger_form;
    use crate::grid::Grid1D;
    use crate::measure::{Density, SignedMeasure1D};

    fn sample_form() -> DiscreteForm {
        let grid = Grid1D::dirichlet(0.0, 1.0, 41).unwrap();
        let measure = SignedMeasure1D::new(Density::Quadratic, vec![(0.5, -1.5)]).unwrap();
        assemble_schrodinger_form(&grid, &measure).unwrap()
    }

    #[test]
    fn energy_measure_total_is_kinetic_energy() {
        let form = sample_form();
        let u: Vec<f64> = (0..form.dim()).map(|i| ((i * i) as f64).sin() + 0.3).collect();
        let gammas = energy_measure(&form, &u).unwrap();
        let total: f64 = gammas.iter().map(|g| g.gamma * g.cell_mass).sum();
        let kin = form.kinetic(&u, &u);
        assert!(
            (total - kin).abs() <= 1e-12 * kin.abs().max(1.0),
            "total {total} vs kinetic {kin}"
        );
        assert!(gammas.iter().all(|g| g.gamma >= 0.0));
    }

    #[test]
    fn cutoff_identity_holds_for_interior_cutoffs() {
        let form = sample_form();
        let n = form.dim();
        let u: Vec<f64> = (0..n).map(|i| (0.1 * i as f64).cos() + 1.2).collect();
        // phi vanishing near both walls, so no killing weight is active.
        let phi: Vec<f64> = (0..n)
            .map(|i| if (3..n - 3).contains(&i) { 1.0 + 0.5 * (0.2 * i as f64).sin() } else { 0.0 })
            .collect();
        let gammas = energy_measure(&form, &u).unwrap();
        let lhs: f64 =
            gammas.iter().zip(&phi).map(|(g, p)| p * g.gamma * g.cell_mass).sum();
        let phiu: Vec<f64> = phi.iter().zip(&u).map(|(p, x)| p * x).collect();
        let u2: Vec<f64> = u.iter().map(|x| x * x).collect();
        let rhs = form.kinetic(&u, &phiu) - 0.5 * form.kinetic(&u2, &phi);
        assert!((lhs - rhs).abs() <= 1e-11 * lhs.abs().max(1.0), "lhs {lhs} rhs {rhs}");
    }

    #[test]
    fn gst_identity_is_exact_at_an_eigenpair() {
        let form = sample_form();
        let t = form.symmetrized_tridiag().unwrap();
        let lam = t.eigenvalue(0);
        let (rho, y) = t.eigenpair_near(lam, 5).unwrap();
        // Undo the mass symmetrization and fix the sign; the ground state of
        // this form is sign-definite.
        let mut phi: Vec<f64> =
            y.iter().zip(form.mass()).map(|(v, m)| v / m.sqrt()).collect();
        if phi[form.dim() / 2] < 0.0 {
            phi.iter_mut().for_each(|x| *x = -*x);
        }
        assert!(phi.iter().all(|&x| x > 0.0), "ground state must be positive");
        let res = gst_residual(&form, &phi, rho, 4, 42).unwrap();
        assert!(res < 1e-10, "residual at eigenpair: {res}");
        // Shifting lambda by 0.1 breaks the identity by 0.1 on the diagonal
        // trial pair.
        let shifted = gst_residual(&form, &phi, rho + 0.1, 4, 42).unwrap();
        assert!((shifted - 0.1).abs() < 1e-6, "shifted residual {shifted}");
    }

    #[test]
    fn transformed_pencil_shifts_spectrum_to_zero() {
        let form = sample_form();
        let t = form.symmetrized_tridiag().unwrap();
        let lam0 = t.eigenvalue(0);
        let lam1 = t.eigenvalue(1);
        let (rho, y) = t.eigenpair_near(lam0, 5).unwrap();
        let mut phi: Vec<f64> =
            y.iter().zip(form.mass()).map(|(v, m)| v / m.sqrt()).collect();
        if phi[form.dim() / 2] < 0.0 {
            phi.iter_mut().for_each(|x| *x = -*x);
        }
        let gst = ground_state_transform(&form, &phi).unwrap();
        // Symmetrize the transformed pencil and read off its two bottom
        // eigenvalues: 0 (constants) and the spectral gap.
        let rs: Vec<f64> = gst.mass.iter().map(|m| 1.0 / m.sqrt()).collect();
        let n = form.dim();
        let diag: Vec<f64> = (0..n).map(|i| gst.laplacian.diag()[i] * rs[i] * rs[i]).collect();
        let mut upper = Vec::new();
        for i in 0..n {
            for &(j, v) in gst.laplacian.row(i) {
                let j = j as usize;
                if j > i {
                    upper.push((i, j, v * rs[i] * rs[j]));
                }
            }
        }
        let sym = SparseSym::from_parts(diag, &upper).unwrap();
        let tt = sym.to_tridiagonal().unwrap();
        let mu0 = tt.eigenvalue(0);
        let mu1 = tt.eigenvalue(1);
        let scale = tt.gershgorin().1.abs().max(1.0);
        assert!(mu0.abs() < 1e-12 * scale, "bottom of transformed pencil: {mu0}");
        assert!(
            (mu1 - (lam1 - rho)).abs() < 1e-9 * scale,
            "gap through transform {mu1} vs direct {}",
            lam1 - rho
        );
    }
}
