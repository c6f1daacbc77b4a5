//! Discrete Dirichlet forms. A form is a Markovian stiffness matrix `K`
//! (symmetric, nonpositive off-diagonals), a signed potential vector `p`
//! (a measure already integrated against the node cells), and a positive
//! lumped mass `m`:
//!
//! ```text
//! E[u, v] = u^T K v + sum_i p_i u_i v_i,    (u, v)_m = sum_i m_i u_i v_i.
//! ```
//!
//! Writing `w_ij = -K_ij >= 0` for the edge weights and `s_i` for the row
//! sums of `K`, the kinetic part splits exactly as
//!
//! ```text
//! u^T K v = sum_{i<j} w_ij (u_i - u_j)(v_i - v_j) + sum_i s_i u_i v_i,
//! ```
//!
//! so `s_i >= 0` acts as a killing weight; eliminated Dirichlet boundary
//! couplings surface there. The generator is `H = M^{-1}(K + diag p)`, with
//! the mass-symmetrized representative `M^{-1/2}(K + diag p) M^{-1/2}`
//! available for eigensolvers.

pub mod capacity;
pub mod energy;
pub mod geometry;
pub mod irreducibility;
pub mod weyl;

pub use capacity::{capacity, CapacityReport};
pub use energy::{
    energy_measure, gst_residual, ground_state_transform, EnergyDensity, GroundStateTransform,
};
pub use geometry::{intrinsic_distance, volume_growth_rate, VolumeGrowth};
pub use irreducibility::{irreducibility, IrreducibilityReport, PositivityCertificate};
pub use weyl::{weyl_residual, WeylResidualReport};

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::linalg::{SparseSym, SymTridiag};
use crate::measure::SignedMeasure1D;

/// What the nodes of a form discretize. Solvers ignore it; output layers and
/// geometric probes use it to attach coordinates to node indices.
#[derive(Debug, Clone)]
pub enum Carrier {
    /// Nodes are the degree-of-freedom grid points of an interval.
    Interval(Grid1D),
    /// Nodes come from a metric graph: the first `vertex_count` nodes are
    /// vertices, the rest carry `(edge index, arclength from the edge tail)`.
    Graph { vertex_count: usize, chain_of: Vec<Option<(usize, f64)>> },
}

#[derive(Debug, Clone)]
pub struct DiscreteForm {
    kin: SparseSym,
    potential: Vec<f64>,
    mass: Vec<f64>,
    carrier: Carrier,
}

impl DiscreteForm {
    pub fn from_parts(
        kin: SparseSym,
        potential: Vec<f64>,
        mass: Vec<f64>,
        carrier: Carrier,
    ) -> Result<Self> {
        let n = kin.dim();
        if potential.len() != n || mass.len() != n {
            return Err(Error::invalid("stiffness, potential and mass sizes disagree"));
        }
        if mass.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
            return Err(Error::invalid("mass must be strictly positive and finite"));
        }
        if potential.iter().any(|p| !p.is_finite()) {
            return Err(Error::domain("potential has non-finite entries"));
        }
        let scale = kin.diag().iter().fold(1.0f64, |m, d| m.max(d.abs()));
        for i in 0..n {
            let mut s = kin.diag()[i];
            for &(_, v) in kin.row(i) {
                if v > 0.0 {
                    return Err(Error::invalid(format!(
                        "off-diagonal {v} at row {i} breaks Markov structure"
                    )));
                }
                s += v;
            }
            if s < -1e-12 * scale {
                return Err(Error::invalid(format!(
                    "negative killing weight {s:.3e} at row {i}"
                )));
            }
        }
        Ok(DiscreteForm { kin, potential, mass, carrier })
    }

    pub fn dim(&self) -> usize {
        self.kin.dim()
    }

    pub fn kin(&self) -> &SparseSym {
        &self.kin
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    /// Edge weights `(i, j, w_ij)` with `i < j` and `w_ij = -K_ij >= 0`.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.kin.off_count());
        for i in 0..self.dim() {
            for &(j, v) in self.kin.row(i) {
                let j = j as usize;
                if j > i {
                    out.push((i, j, -v));
                }
            }
        }
        out
    }

    /// Killing weights `s_i` (row sums of `K`), clamped at zero.
    pub fn ghost_weights(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|i| {
                let s = self.kin.diag()[i] + self.kin.row(i).iter().map(|&(_, v)| v).sum::<f64>();
                s.max(0.0)
            })
            .collect()
    }

    pub fn kinetic(&self, u: &[f64], v: &[f64]) -> f64 {
        self.kin.quadratic(u, v)
    }

    pub fn energy(&self, u: &[f64], v: &[f64]) -> f64 {
        let pot: f64 =
            self.potential.iter().zip(u).zip(v).map(|((p, a), b)| p * a * b).sum();
        self.kin.quadratic(u, v) + pot
    }

    pub fn mass_inner(&self, u: &[f64], v: &[f64]) -> f64 {
        self.mass.iter().zip(u).zip(v).map(|((m, a), b)| m * a * b).sum()
    }

    pub fn mass_norm(&self, u: &[f64]) -> f64 {
        self.mass_inner(u, u).max(0.0).sqrt()
    }

    /// Weak application `(K + diag p) u`; the generator acts as `M^{-1}` of
    /// this vector.
    pub fn apply_weak(&self, u: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.kin.matvec(u, &mut y);
        for ((yi, p), ui) in y.iter_mut().zip(&self.potential).zip(u) {
            *yi += p * ui;
        }
        y
    }

    /// Weak eigen-residual `(K + diag p) u - lambda M u`.
    pub fn weak_residual(&self, lambda: f64, u: &[f64]) -> Vec<f64> {
        let mut r = self.apply_weak(u);
        for ((ri, m), ui) in r.iter_mut().zip(&self.mass).zip(u) {
            *ri -= lambda * m * ui;
        }
        r
    }

    /// Mass-symmetrized generator `M^{-1/2} (K + diag p) M^{-1/2}`. Same
    /// spectrum as `H`; eigenvectors map back through `M^{-1/2}`.
    pub fn symmetrized(&self) -> SparseSym {
        let n = self.dim();
        let rs: Vec<f64> = self.mass.iter().map(|m| 1.0 / m.sqrt()).collect();
        let diag: Vec<f64> = (0..n)
            .map(|i| (self.kin.diag()[i] + self.potential[i]) * rs[i] * rs[i])
            .collect();
        let mut upper = Vec::with_capacity(self.kin.off_count());
        for i in 0..n {
            for &(j, v) in self.kin.row(i) {
                let j = j as usize;
                if j > i {
                    upper.push((i, j, v * rs[i] * rs[j]));
                }
            }
        }
        SparseSym::from_parts(diag, &upper).expect("symmetrization preserves structure")
    }

    /// Tridiagonal symmetrized generator when the coupling pattern is a path.
    pub fn symmetrized_tridiag(&self) -> Option<SymTridiag> {
        self.symmetrized().to_tridiagonal()
    }
}

/// Assembles the finite-difference form of `-u'' + nu` on a uniform grid,
/// where `nu = V dx + sum_j w_j delta_{x_j}`.
///
/// Second differences scaled by `1/h` give the stiffness; the mass is the
/// trapezoid rule (`h` inside, `h/2` at Neumann ends). The density is lumped
/// as `V(x_i) m_i`; atoms land on their nearest node (midpoint ties resolve
/// left). Atoms rounding onto an eliminated Dirichlet endpoint or lying
/// outside `[a - h/2, b + h/2]` are dropped, matching the continuum facts
/// that a delta charge at a Dirichlet endpoint is invisible and the operator
/// only sees the measure restricted to the interval.
pub fn assemble_schrodinger_form(
    grid: &Grid1D,
    measure: &SignedMeasure1D,
) -> Result<DiscreteForm> {
    let h = grid.h();
    let dofs = grid.dof_nodes();
    let lo = dofs.start;
    let ndof = dofs.len();
    if ndof < 2 {
        return Err(Error::invalid("grid leaves fewer than two degrees of freedom"));
    }
    let mut diag = vec![0.0; ndof];
    let mut upper = Vec::with_capacity(ndof - 1);
    for (k, node) in dofs.clone().enumerate() {
        let mut neighbors = 0.0;
        if node > 0 {
            neighbors += 1.0;
        }
        if node + 1 < grid.n {
            neighbors += 1.0;
        }
        diag[k] = neighbors / h;
        if node + 1 < dofs.end {
            upper.push((k, k + 1, -1.0 / h));
        }
    }
    let mut mass = vec![h; ndof];
    if lo == 0 {
        mass[0] = 0.5 * h;
    }
    if dofs.end == grid.n {
        mass[ndof - 1] = 0.5 * h;
    }
    let mut potential = vec![0.0; ndof];
    for (k, node) in dofs.clone().enumerate() {
        let v = measure.density_at(grid.node(node));
        if !v.is_finite() {
            return Err(Error::domain(format!(
                "density is singular at grid node x = {}",
                grid.node(node)
            )));
        }
        potential[k] = v * mass[k];
    }
    for &(x, w) in measure.atoms() {
        if x < grid.a - 0.5 * h || x > grid.b + 0.5 * h {
            continue;
        }
        let node = grid.nearest_node(x);
        if dofs.contains(&node) {
            potential[node - lo] += w;
        }
    }
    let kin = SparseSym::from_parts(diag, &upper)?;
    DiscreteForm::from_parts(kin, potential, mass, Carrier::Interval(*grid))
}
