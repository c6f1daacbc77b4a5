//! The spectral laboratory: probes that turn structural statements about
//! measure-perturbed forms into numerical experiments. Positivity of
//! generalized solutions against the spectral bottom, the ground-state
//! transform as a cancellation-free gap formula, Caccioppoli energy/mass
//! ratios and collar decay, Kronig-Penney band structure, and the radial
//! reduction of the planar delta shell.

mod ap;
mod bands;
mod cacc;
mod gap;
mod shell;

pub use ap::{ap_check, ap_threshold, APReport, APVerdict};
pub use bands::{kp_discriminant, kronig_penney_bands};
pub use cacc::{caccioppoli_probe, collar_ratio, CaccioppoliReport};
pub use gap::gap_via_gst;
pub use shell::{delta_shell_radial, shell_bound_state, ShellSector};
