use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

/// Uniform grid on a closed interval `[a, b]` with `n` nodes and a boundary
/// condition at each end. The associated form eliminates Dirichlet endpoints,
/// so the degrees of freedom are the non-Dirichlet nodes.
#[derive(Debug, Clone, Copy)]
pub struct Grid1D {
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub bc_left: BoundaryCondition,
    pub bc_right: BoundaryCondition,
}

impl Grid1D {
    pub fn new(
        a: f64,
        b: f64,
        n: usize,
        bc_left: BoundaryCondition,
        bc_right: BoundaryCondition,
    ) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::invalid("grid endpoints must be finite"));
        }
        if a >= b {
            return Err(Error::invalid(format!(
                "grid requires a < b, got a = {a}, b = {b}"
            )));
        }
        if n < 3 {
            return Err(Error::invalid(format!("grid requires n >= 3, got n = {n}")));
        }
        Ok(Grid1D { a, b, n, bc_left, bc_right })
    }

    pub fn dirichlet(a: f64, b: f64, n: usize) -> Result<Self> {
        Grid1D::new(a, b, n, BoundaryCondition::Dirichlet, BoundaryCondition::Dirichlet)
    }

    pub fn neumann(a: f64, b: f64, n: usize) -> Result<Self> {
        Grid1D::new(a, b, n, BoundaryCondition::Neumann, BoundaryCondition::Neumann)
    }

    /// Node spacing.
    pub fn h(&self) -> f64 {
        (self.b - self.a) / (self.n - 1) as f64
    }

    /// Coordinate of node `i` (over all `n` nodes, including eliminated ones).
    pub fn node(&self, i: usize) -> f64 {
        self.a + self.h() * i as f64
    }

    /// Indices of the degree-of-freedom nodes, in increasing order.
    pub fn dof_nodes(&self) -> std::ops::Range<usize> {
        let lo = if self.bc_left == BoundaryCondition::Dirichlet { 1 } else { 0 };
        let hi = if self.bc_right == BoundaryCondition::Dirichlet { self.n - 1 } else { self.n };
        lo..hi
    }

    /// Index of the grid node nearest to `x`; exact midpoints resolve to the
    /// left node so that atom placement is deterministic.
    pub fn nearest_node(&self, x: f64) -> usize {
        let t = (x - self.a) / self.h();
        let f = t.floor();
        let frac = t - f;
        let i = if frac > 0.5 { f as isize + 1 } else { f as isize };
        i.clamp(0, self.n as isize - 1) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_tiny_and_reversed_grids() {
        assert!(Grid1D::dirichlet(0.0, 1.0, 2).is_err());
        assert!(Grid1D::dirichlet(1.0, 0.0, 10).is_err());
        assert!(Grid1D::dirichlet(0.0, f64::INFINITY, 10).is_err());
    }

    #[test]
    fn dof_ranges_respect_boundary_conditions() {
        let g = Grid1D::dirichlet(0.0, 1.0, 5).unwrap();
        assert_eq!(g.dof_nodes(), 1..4);
        let g = Grid1D::neumann(0.0, 1.0, 5).unwrap();
        assert_eq!(g.dof_nodes(), 0..5);
        let g = Grid1D::new(
            0.0,
            1.0,
            5,
            BoundaryCondition::Neumann,
            BoundaryCondition::Dirichlet,
        )
        .unwrap();
        assert_eq!(g.dof_nodes(), 0..4);
    }

    #[test]
    fn nearest_node_breaks_ties_left() {
        let g = Grid1D::neumann(0.0, 4.0, 5).unwrap(); // h = 1, nodes at integers
        assert_eq!(g.nearest_node(1.49), 1);
        assert_eq!(g.nearest_node(1.51), 2);
        assert_eq!(g.nearest_node(1.5), 1); // exact midpoint goes left
        assert_eq!(g.nearest_node(-3.0), 0);
        assert_eq!(g.nearest_node(9.0), 4);
    }
}
