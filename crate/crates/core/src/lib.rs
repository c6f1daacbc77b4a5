//! Numerical laboratory for the spectral theory of strongly local Dirichlet
//! forms, instantiated on three families of models:
//!
//! * one-dimensional Schrodinger operators `-u'' + V dx + sum_j w_j delta_{x_j}`
//!   with signed measure perturbations,
//! * Kirchhoff quantum graphs (continuity plus vanishing sum of inward
//!   derivatives at every vertex),
//! * radially reduced planar delta shells `-Delta - alpha delta_{|x|=R}`.
//!
//! The crate assembles mass-lumped finite-difference forms, computes discrete
//! energy measures, ground-state transforms, capacities, Kato constants and
//! form bounds, transfer-matrix growth rates and Shnol-type spectral scans,
//! secular determinants for metric graphs, and a set of higher-level
//! experiments (Allegretto-Piepenbrink thresholds, spectral-gap evaluation
//! through the ground-state transform, Caccioppoli ratios, Kronig-Penney
//! bands, delta-shell sector spectra).
//!
//! Everything is deterministic: no global state, no ambient randomness, and
//! parallel sweeps merge in index order, so repeated runs produce identical
//! bytes. The `lab` binary exposes the experiment drivers behind a TOML
//! configuration file.

pub mod cli;
pub mod config;
pub mod error;
pub mod forms;
pub mod graphs;
pub mod grid;
pub mod kato;
pub mod lab;
pub mod linalg;
pub mod measure;
pub mod ode;
pub mod quad;
pub mod solve1d;

pub use config::Tolerances;
pub use error::{Error, Result};
pub use forms::DiscreteForm;
pub use grid::{BoundaryCondition, Grid1D};
pub use measure::{Density, SignedMeasure1D};
