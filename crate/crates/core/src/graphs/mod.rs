//! Compact metric graphs with Kirchhoff vertex coupling.
//!
//! A [`MetricGraph`] is a finite set of vertices joined by edges of positive
//! length; loops and parallel edges are allowed. Functions on the graph live
//! edgewise, parametrized by arclength from each edge's tail, subject to
//! continuity at vertices and a zero sum of inward derivatives (which at a
//! degree-one vertex degenerates to a Neumann condition).
//!
//! The negative second derivative under these conditions is approached two
//! ways that cross-check each other: exactly through the secular system in
//! [`secular`], and through [`discretize_graph_form`], which glues per-edge
//! finite-difference chains into a [`DiscreteForm`] for the generic solvers.

use crate::error::{Error, Result};
use crate::forms::{Carrier, DiscreteForm};
use crate::linalg::SparseSym;

mod secular;

pub use secular::{
    graph_eigenfunctions, kirchhoff_spectrum, GraphEigenfunction, GraphEigenvalue,
};

/// One edge of a metric graph. `tail` and `head` fix the arclength
/// parametrization (`x = 0` at the tail); they carry no other meaning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphEdge {
    pub tail: usize,
    pub head: usize,
    pub length: f64,
}

/// A finite metric graph. Construction validates the combinatorics once;
/// everything downstream relies on it.
#[derive(Debug, Clone)]
pub struct MetricGraph {
    vertex_count: usize,
    edges: Vec<GraphEdge>,
}

impl MetricGraph {
    /// Builds a graph from `(tail, head, length)` triples. Every vertex must
    /// meet at least one edge, and lengths must be positive and finite. Loops
    /// (`tail == head`) and parallel edges are fine.
    pub fn new(vertex_count: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::invalid("a metric graph needs at least one vertex"));
        }
        if edges.is_empty() {
            return Err(Error::invalid("a metric graph needs at least one edge"));
        }
        let mut touched = vec![false; vertex_count];
        let mut list = Vec::with_capacity(edges.len());
        for &(tail, head, length) in edges {
            if tail >= vertex_count || head >= vertex_count {
                return Err(Error::invalid(format!(
                    "edge ({tail}, {head}) references a vertex outside 0..{vertex_count}"
                )));
            }
            if !(length > 0.0) || !length.is_finite() {
                return Err(Error::invalid(format!(
                    "edge ({tail}, {head}) must have positive finite length, got {length}"
                )));
            }
            touched[tail] = true;
            touched[head] = true;
            list.push(GraphEdge { tail, head, length });
        }
        if let Some(v) = touched.iter().position(|t| !t) {
            return Err(Error::invalid(format!("vertex {v} has no incident edge")));
        }
        Ok(Self { vertex_count, edges: list })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    pub fn min_edge_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).fold(f64::INFINITY, f64::min)
    }

    /// Number of connected components (vertices joined by edges).
    pub fn component_count(&self) -> usize {
        let mut seen = vec![false; self.vertex_count];
        let inc = self.incidence();
        let mut count = 0;
        for start in 0..self.vertex_count {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(v) = stack.pop() {
                for &(e, _) in &inc[v] {
                    let other = self.edges[e].tail + self.edges[e].head - v;
                    // For loops other == v and the branch is a no-op.
                    if !seen[other] {
                        seen[other] = true;
                        stack.push(other);
                    }
                }
            }
        }
        count
    }

    /// Per-vertex incidence slots `(edge index, is_head_end)`. A loop
    /// contributes two slots to its vertex, one per end.
    pub(crate) fn incidence(&self) -> Vec<Vec<(usize, bool)>> {
        let mut inc = vec![Vec::new(); self.vertex_count];
        for (i, e) in self.edges.iter().enumerate() {
            inc[e.tail].push((i, false));
            inc[e.head].push((i, true));
        }
        inc
    }

    /// Shortest-path distances from `source` to every vertex. Dense Dijkstra;
    /// the graphs here are small enough that a heap would be noise.
    fn vertex_distances(&self, source: usize) -> Vec<f64> {
        let n = self.vertex_count;
        let inc = self.incidence();
        let mut dist = vec![f64::INFINITY; n];
        let mut done = vec![false; n];
        dist[source] = 0.0;
        for _ in 0..n {
            let mut best = usize::MAX;
            let mut best_d = f64::INFINITY;
            for v in 0..n {
                if !done[v] && dist[v] < best_d {
                    best = v;
                    best_d = dist[v];
                }
            }
            if best == usize::MAX {
                break;
            }
            done[best] = true;
            for &(e, _) in &inc[best] {
                let edge = &self.edges[e];
                let other = edge.tail + edge.head - best;
                if dist[best] + edge.length < dist[other] {
                    dist[other] = dist[best] + edge.length;
                }
            }
        }
        dist
    }
}

/// Geodesic distance between two points of the graph, each given as
/// `(edge index, arclength from the edge tail)`.
///
/// The minimum runs over the direct same-edge segment (when applicable) and
/// the four exit-end combinations through the vertex metric, so paths that
/// leave a long edge and wrap around the rest of the graph are found.
pub fn graph_path_metric(
    graph: &MetricGraph,
    from: (usize, f64),
    to: (usize, f64),
) -> Result<f64> {
    let locate = |(e, x): (usize, f64)| -> Result<(usize, f64, f64)> {
        let edge = graph
            .edges()
            .get(e)
            .ok_or_else(|| Error::invalid(format!("edge index {e} out of range")))?;
        if !(0.0..=edge.length).contains(&x) || !x.is_finite() {
            return Err(Error::invalid(format!(
                "arclength {x} outside edge {e} of length {}",
                edge.length
            )));
        }
        Ok((e, x, edge.length))
    };
    let (e1, x1, l1) = locate(from)?;
    let (e2, x2, l2) = locate(to)?;

    let mut best = if e1 == e2 { (x1 - x2).abs() } else { f64::INFINITY };
    let a = &graph.edges()[e1];
    let b = &graph.edges()[e2];
    let from_tail = graph.vertex_distances(a.tail);
    let from_head = graph.vertex_distances(a.head);
    for (exit_cost, dist_row) in [(x1, &from_tail), (l1 - x1, &from_head)] {
        for (enter_vertex, enter_cost) in [(b.tail, x2), (b.head, l2 - x2)] {
            best = best.min(exit_cost + dist_row[enter_vertex] + enter_cost);
        }
    }
    Ok(best)
}

/// Discretizes the Kirchhoff form on a graph with target mesh step `h`.
///
/// Nodes are ordered vertices first, then each edge's interior points in edge
/// order; edge `e` gets `ceil(length / h)` equal segments. Stiffness is the
/// standard chain (weights `1/h_e`) and mass is trapezoidal, so segment ends
/// shared by several edges accumulate mass from all of them: the discrete
/// form is the honest Galerkin gluing, and Kirchhoff coupling emerges without
/// any explicit vertex equation.
///
/// `h` must not exceed a quarter of the shortest edge; coarser meshes would
/// let an edge collapse to a level where loops and parallel edges degenerate.
pub fn discretize_graph_form(graph: &MetricGraph, h: f64) -> Result<DiscreteForm> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::invalid(format!("mesh step must be positive, got {h}")));
    }
    let lmin = graph.min_edge_length();
    if h > lmin / 4.0 {
        return Err(Error::invalid(format!(
            "mesh step {h} exceeds a quarter of the shortest edge ({lmin})"
        )));
    }
    let nv = graph.vertex_count();
    let mut chain_of: Vec<Option<(usize, f64)>> = vec![None; nv];
    let mut diag = vec![0.0; nv];
    let mut mass = vec![0.0; nv];
    let mut off: Vec<(usize, usize, f64)> = Vec::new();
    for (ei, e) in graph.edges().iter().enumerate() {
        let segments = (e.length / h).ceil() as usize;
        let he = e.length / segments as f64;
        let w = 1.0 / he;
        let mut prev = e.tail;
        let mut link = |i: usize, j: usize, diag: &mut Vec<f64>, mass: &mut Vec<f64>| {
            off.push((i.min(j), i.max(j), -w));
            diag[i] += w;
            diag[j] += w;
            mass[i] += he / 2.0;
            mass[j] += he / 2.0;
        };
        for s in 1..segments {
            let idx = diag.len();
            diag.push(0.0);
            mass.push(0.0);
            chain_of.push(Some((ei, he * s as f64)));
            link(prev, idx, &mut diag, &mut mass);
            prev = idx;
        }
        link(prev, e.head, &mut diag, &mut mass);
    }
    let n = diag.len();
    let kin = SparseSym::from_parts(diag, &off)?;
    DiscreteForm::from_parts(
        kin,
        vec![0.0; n],
        mass,
        Carrier::Graph { vertex_count: nv, chain_of },
    )
}
