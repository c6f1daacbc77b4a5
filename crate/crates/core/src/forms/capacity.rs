//! Capacity of node sets. For a set `U` the (1-)capacity is
//!
//! ```text
//! cap(U) = inf { E[v, v] + (v, v)_m : v = 1 on U },
//! ```
//!
//! attained by the equilibrium potential: `v = 1` on `U` and
//! `(K + diag p + M) v = 0` on the complement. For Markovian forms with
//! nonnegative potential the minimizer automatically satisfies
//! `0 <= v <= 1`, so pinning `v = 1` on `U` loses nothing against the
//! obstacle formulation with `v >= 1`.

use super::DiscreteForm;
use crate::error::{Error, Result};
use crate::linalg::{SkylineLdlt, SparseSym};

#[derive(Debug, Clone)]
pub struct CapacityReport {
    pub capacity: f64,
    /// The equilibrium potential on all nodes (1 on the target set).
    pub equilibrium_potential: Vec<f64>,
}

pub fn capacity(form: &DiscreteForm, target: &[usize]) -> Result<CapacityReport> {
    let n = form.dim();
    if target.is_empty() {
        return Err(Error::invalid("capacity needs a nonempty target set"));
    }
    let mut in_set = vec![false; n];
    for &i in target {
        if i >= n {
            return Err(Error::invalid(format!("target node {i} out of range")));
        }
        in_set[i] = true;
    }
    // B = K + diag p + M.
    let diag: Vec<f64> = (0..n)
        .map(|i| form.kin().diag()[i] + form.potential()[i] + form.mass()[i])
        .collect();
    let mut upper = Vec::with_capacity(form.kin().off_count() / 2);
    for i in 0..n {
        for &(j, v) in form.kin().row(i) {
            let j = j as usize;
            if j > i {
                upper.push((i, j, v));
            }
        }
    }
    let b = SparseSym::from_parts(diag, &upper)?;
    let mut v = vec![0.0; n];
    let comp: Vec<usize> = (0..n).filter(|&i| !in_set[i]).collect();
    if comp.is_empty() {
        for x in v.iter_mut() {
            *x = 1.0;
        }
    } else {
        let mut local = vec![usize::MAX; n];
        for (k, &i) in comp.iter().enumerate() {
            local[i] = k;
        }
        let sub_diag: Vec<f64> = comp.iter().map(|&i| b.diag()[i]).collect();
        let mut sub_upper = Vec::new();
        let mut rhs = vec![0.0; comp.len()];
        for (k, &i) in comp.iter().enumerate() {
            for &(j, w) in b.row(i) {
                let j = j as usize;
                if in_set[j] {
                    rhs[k] -= w;
                } else if local[j] > k {
                    sub_upper.push((k, local[j], w));
                }
            }
        }
        let sub = SparseSym::from_parts(sub_diag, &sub_upper)?;
        let ldlt = SkylineLdlt::factor(&sub, 0.0).map_err(|_| {
            Error::numerical("form plus mass is not positive definite off the target set")
        })?;
        let mut sol = vec![0.0; comp.len()];
        ldlt.solve(&rhs, &mut sol);
        for (&i, &x) in comp.iter().zip(&sol) {
            v[i] = x;
        }
        for &i in target {
            v[i] = 1.0;
        }
    }
    let capacity = form.energy(&v, &v) + form.mass_inner(&v, &v);
    Ok(CapacityReport { capacity, equilibrium_potential: v })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::assemble_schrodinger_form;
    use crate::grid::Grid1D;
    use crate::measure::SignedMeasure1D;

    #[test]
    fn interval_capacity_on_the_free_line() {
        // On the whole line, cap([-a, a]) = 2a + 2: the equilibrium
        // potential is 1 inside and exp(-(|x| - a)) outside, contributing
        // 2a from the mass inside and 1 from each exterior tail. A long
        // Neumann box with the set well inside reproduces it to O(h^2) plus
        // an exponentially small truncation error.
        let a = 1.0;
        let grid = Grid1D::neumann(-20.0, 20.0, 4001).unwrap();
        let form = assemble_schrodinger_form(&grid, &SignedMeasure1D::zero()).unwrap();
        let target: Vec<usize> = (0..form.dim())
            .filter(|&i| grid.node(i).abs() <= a + 1e-12)
            .collect();
        let rep = capacity(&form, &target).unwrap();
        let exact = 2.0 * a + 2.0;
        assert!(
            (rep.capacity - exact).abs() < 2e-4,
            "capacity {} vs {}",
            rep.capacity,
            exact
        );
        // Maximum principle: the equilibrium potential stays in [0, 1].
        assert!(rep
            .equilibrium_potential
            .iter()
            .all(|&x| (-1e-12..=1.0 + 1e-12).contains(&x)));
    }

    #[test]
    fn monotone_in_the_target_set() {
        let grid = Grid1D::neumann(-10.0, 10.0, 801).unwrap();
        let form = assemble_schrodinger_form(&grid, &SignedMeasure1D::zero()).unwrap();
        let mid = form.dim() / 2;
        let small = capacity(&form, &[mid]).unwrap().capacity;
        let large = capacity(&form, &[mid - 20, mid, mid + 20]).unwrap().capacity;
        assert!(small <= large + 1e-12, "{small} vs {large}");
    }

    #[test]
    fn whole_space_capacity_is_total_mass_for_the_free_form() {
        let grid = Grid1D::neumann(0.0, 1.0, 51).unwrap();
        let form = assemble_schrodinger_form(&grid, &SignedMeasure1D::zero()).unwrap();
        let all: Vec<usize> = (0..form.dim()).collect();
        let rep = capacity(&form, &all).unwrap();
        assert!((rep.capacity - 1.0).abs() < 1e-12);
    }
}
