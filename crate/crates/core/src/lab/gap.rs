//! Spectral gap through the ground state transform. With a strictly positive
//! ground state `Phi` at energy `lambda_0`, the form satisfies the exact
//! identity
//!
//! `E[u] + nu[u] - lambda_0 (u, u)_m = sum_{i<j} w_ij Phi_i Phi_j (u_i/Phi_i - u_j/Phi_j)^2`
//!
//! so the gap is the second eigenvalue of the transformed pencil
//! `(L_Phi, M_Phi)` with couplings `w_ij Phi_i Phi_j` and masses `m_i Phi_i^2`,
//! whose ground state is the constant vector at eigenvalue zero. The right
//! side is a sum of squares, so evaluating the gap there involves none of the
//! cancellation that `lambda_1 - lambda_0` suffers from; that is what makes
//! the identity worth checking against the eigensolver at tight tolerances.

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::forms::DiscreteForm;
use crate::linalg::{deterministic_unit_vector, SkylineLdlt, SparseSym};
use crate::solve1d::eig_smallest;

/// Returns `(lambda_0, lambda_1, gap_from_formula)`: the two smallest
/// eigenvalues from the eigensolver and the gap evaluated independently as
/// the Fiedler value of the ground-state-transformed pencil.
///
/// Errors when the form is too small, or when the computed ground state is
/// not strictly of one sign (the transform needs irreducibility).
pub fn gap_via_gst(form: &DiscreteForm, tol: &Tolerances) -> Result<(f64, f64, f64)> {
    let n = form.dim();
    if n < 2 {
        return Err(Error::invalid("gap needs at least two degrees of freedom"));
    }
    // Reducibility is a structural property, so it is decided from the
    // coupling pattern rather than from the computed ground state: on a
    // disconnected form the eigensolver returns one block's vector padded
    // with noise whose sign is accidental.
    if form.kin().components().len() > 1 {
        return Err(Error::domain(
            "coupling graph is disconnected; the form is not irreducible",
        ));
    }
    let pairs = eig_smallest(form, 2, tol)?;
    let phi = &pairs[0].vector;
    let sign = phi.iter().find(|v| **v != 0.0).map_or(0.0, |v| v.signum());
    if sign == 0.0 || phi.iter().any(|&v| v * sign <= 0.0) {
        return Err(Error::domain(
            "ground state is not strictly positive; the form is not irreducible",
        ));
    }

    // Transformed pencil: couplings w Phi_i Phi_j, masses m Phi^2.
    let edges: Vec<(usize, usize, f64)> = form
        .edges()
        .into_iter()
        .map(|(i, j, w)| (i, j, w * phi[i] * phi[j]))
        .collect();
    let masses: Vec<f64> =
        form.mass().iter().zip(phi).map(|(&m, &p)| m * p * p).collect();
    let gap = fiedler_value(n, &edges, &masses)?;
    Ok((pairs[0].lambda, pairs[1].lambda, gap))
}

/// Smallest nonzero eigenvalue of the pencil `(L, M)` for the weighted graph
/// Laplacian `L` built from `edges` and the diagonal mass `M`, via inverse
/// iteration deflated against the constant kernel vector. The Rayleigh
/// quotient is evaluated in the sum-of-squares form, which keeps its
/// relative accuracy at machine level even when the value is many orders
/// below the matrix scale.
fn fiedler_value(n: usize, edges: &[(usize, usize, f64)], masses: &[f64]) -> Result<f64> {
    if edges.is_empty() {
        return Err(Error::domain("pencil has no couplings"));
    }
    let mut diag = vec![0.0f64; n];
    let mut upper = Vec::with_capacity(edges.len());
    for &(i, j, w) in edges {
        diag[i] += w;
        diag[j] += w;
        upper.push((i, j, -w));
    }
    let total_mass: f64 = masses.iter().sum();
    let scale = diag.iter().sum::<f64>() / total_mass;

    // A tiny mass shift makes the factor definite without moving the target:
    // the iteration converges at rate (mu_1 + tau) / (mu_2 + tau).
    let tau = 1e-8 * scale;
    let shifted: Vec<f64> =
        diag.iter().zip(masses).map(|(&d, &m)| d + tau * m).collect();
    let b = SparseSym::from_parts(shifted, &upper)?;
    let fact = SkylineLdlt::factor(&b, 0.0)?;

    let quad = |v: &[f64]| -> f64 {
        edges.iter().map(|&(i, j, w)| {
            let d = v[i] - v[j];
            w * d * d
        }).sum()
    };
    let m_norm2 =
        |v: &[f64]| -> f64 { v.iter().zip(masses).map(|(&x, &m)| m * x * x).sum() };
    let deflate = |v: &mut [f64]| {
        let proj: f64 =
            v.iter().zip(masses).map(|(&x, &m)| m * x).sum::<f64>() / total_mass;
        for x in v.iter_mut() {
            *x -= proj;
        }
    };

    let mut v = deterministic_unit_vector(n, 13);
    deflate(&mut v);
    let mut rhs = vec![0.0f64; n];
    let mut mu = f64::INFINITY;
    for _ in 0..400 {
        for ((r, &m), &x) in rhs.iter_mut().zip(masses).zip(&v) {
            *r = m * x;
        }
        let mut y = vec![0.0f64; n];
        fact.solve(&rhs, &mut y);
        deflate(&mut y);
        let norm = y.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        if norm == 0.0 {
            v = deterministic_unit_vector(n, 7919);
            deflate(&mut v);
            continue;
        }
        for x in y.iter_mut() {
            *x /= norm;
        }
        let next = quad(&y) / m_norm2(&y);
        let done = (next - mu).abs() <= 1e-14 * (next.abs() + tau);
        v = y;
        mu = next;
        if done {
            break;
        }
    }
    Ok(mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{assemble_schrodinger_form, Carrier};
    use crate::graphs::{discretize_graph_form, MetricGraph};
    use crate::grid::Grid1D;
    use crate::measure::{Density, SignedMeasure1D};

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    // Splitmix-style generator so the random forms are reproducible.
    fn rng(seed: u64) -> impl FnMut() -> f64 {
        let mut state = seed;
        move || {
            state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            z = z ^ (z >> 31);
            (z >> 11) as f64 / (1u64 << 53) as f64
        }
    }

    fn random_connected_form(seed: u64) -> DiscreteForm {
        let mut r = rng(seed);
        let n = 8 + (r() * 32.0) as usize;
        let grid = Grid1D::neumann(0.0, 1.0, n).unwrap();
        let mut diag = vec![0.0f64; n];
        let mut upper = Vec::new();
        let mut link = |i: usize, j: usize, w: f64, diag: &mut Vec<f64>| {
            diag[i] += w;
            diag[j] += w;
            upper.push((i, j, -w));
        };
        for i in 0..n - 1 {
            link(i, i + 1, 0.5 + 1.5 * r(), &mut diag);
        }
        for _ in 0..n / 5 {
            let i = (r() * n as f64) as usize % n;
            let j = (r() * n as f64) as usize % n;
            if i + 1 < j {
                link(i, j, 0.2 + r(), &mut diag);
            }
        }
        let kin = SparseSym::from_parts(diag, &upper).unwrap();
        let potential: Vec<f64> = (0..n).map(|_| r() - 0.3).collect();
        let mass: Vec<f64> = (0..n).map(|_| 0.5 + 1.5 * r()).collect();
        DiscreteForm::from_parts(kin, potential, mass, Carrier::Interval(grid)).unwrap()
    }

    #[test]
    fn formula_matches_the_eigensolver_on_random_forms() {
        for seed in 0..12u64 {
            let form = random_connected_form(seed);
            let (l0, l1, gap) = gap_via_gst(&form, &tols()).unwrap();
            let eig_gap = l1 - l0;
            assert!(
                (gap - eig_gap).abs() <= 1e-8 * eig_gap.abs().max(1e-300),
                "seed {seed}: formula {gap} vs eigensolver {eig_gap}"
            );

            // The transform is also a variational lower bound: any mass-
            // orthogonal test vector has Rayleigh quotient above the gap.
            let phi =
                crate::solve1d::eig_smallest(&form, 1, &tols()).unwrap().remove(0).vector;
            let mut r = rng(seed.wrapping_mul(31).wrapping_add(7));
            let mut u: Vec<f64> = (0..form.dim()).map(|_| r() - 0.5).collect();
            let num: f64 = form.mass_inner(&u, &phi);
            let den: f64 = form.mass_inner(&phi, &phi);
            for (ui, pi) in u.iter_mut().zip(&phi) {
                *ui -= num / den * pi;
            }
            let rayleigh =
                (form.energy(&u, &u) - l0 * form.mass_inner(&u, &u))
                    / form.mass_inner(&u, &u);
            assert!(rayleigh >= gap - 1e-9 * (1.0 + rayleigh.abs()));
        }
    }

    #[test]
    fn weakly_coupled_wells_keep_the_identity_through_the_cancellation() {
        // Two 17-node wells joined by a 6-node barrier. Everything is kept
        // at scale ~0.1 so eigensolver rounding stays near 1e-15 while the
        // tunneling gap sits around 1e-6: the eigensolver difference loses
        // exactly the digits the sum-of-squares formula keeps.
        let n = 40usize;
        let grid = Grid1D::neumann(0.0, 1.0, n).unwrap();
        let mut diag = vec![0.0f64; n];
        let mut upper = Vec::new();
        for i in 0..n - 1 {
            diag[i] += 0.1;
            diag[i + 1] += 0.1;
            upper.push((i, i + 1, -0.1));
        }
        let kin = SparseSym::from_parts(diag, &upper).unwrap();
        let potential: Vec<f64> =
            (0..n).map(|i| if (17..23).contains(&i) { 0.05 } else { -0.05 }).collect();
        let form = DiscreteForm::from_parts(
            kin,
            potential,
            vec![1.0; n],
            Carrier::Interval(grid),
        )
        .unwrap();

        let sharp = Tolerances { eig_residual: 1e-13, ..Tolerances::default() };
        let (l0, l1, gap) = gap_via_gst(&form, &sharp).unwrap();
        let eig_gap = l1 - l0;
        assert!(
            eig_gap > 5e-7 && eig_gap < 5e-5,
            "barrier must produce a near-degenerate pair, got {eig_gap}"
        );
        assert!(
            (gap - eig_gap).abs() <= 1e-8 * eig_gap,
            "formula {gap} vs eigensolver {eig_gap}, rel {}",
            (gap - eig_gap).abs() / eig_gap
        );
        assert!(l0 < 0.0, "well pair must bind below the barrier");
    }

    #[test]
    fn oscillator_gap_is_two() {
        let grid = Grid1D::neumann(-8.0, 8.0, 1601).unwrap();
        let measure = SignedMeasure1D::new(Density::Quadratic, Vec::new()).unwrap();
        let form = assemble_schrodinger_form(&grid, &measure).unwrap();
        let (l0, l1, gap) = gap_via_gst(&form, &tols()).unwrap();
        assert!((gap - 2.0).abs() < 1e-3, "oscillator gap {gap}");
        assert!((gap - (l1 - l0)).abs() <= 1e-8 * (l1 - l0));
        assert!((l0 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn graph_forms_go_through_the_same_identity() {
        let star =
            MetricGraph::new(4, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]).unwrap();
        let form = discretize_graph_form(&star, 0.02).unwrap();
        let (l0, l1, gap) = gap_via_gst(&form, &tols()).unwrap();
        assert!(l0.abs() < 1e-8, "Kirchhoff ground state is constant");
        assert!((gap - (l1 - l0)).abs() <= 1e-8 * (l1 - l0));
    }

    #[test]
    fn reducible_forms_are_refused() {
        let n = 8usize;
        let grid = Grid1D::neumann(0.0, 1.0, n).unwrap();
        let mut diag = vec![0.0f64; n];
        let mut upper = Vec::new();
        for i in 0..n - 1 {
            if i == 3 {
                continue;
            }
            diag[i] += 1.0;
            diag[i + 1] += 1.0;
            upper.push((i, i + 1, -1.0));
        }
        let kin = SparseSym::from_parts(diag, &upper).unwrap();
        let potential = vec![0.0; 4].into_iter().chain(vec![1.0; 4]).collect();
        let form = DiscreteForm::from_parts(
            kin,
            potential,
            vec![1.0; n],
            Carrier::Interval(grid),
        )
        .unwrap();
        let err = gap_via_gst(&form, &tols()).unwrap_err();
        assert!(format!("{err}").contains("irreducible"));
    }
}
