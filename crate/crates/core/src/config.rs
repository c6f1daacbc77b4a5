//! Central tolerance record. Every numerical threshold used by the library
//! lives here with its default, so experiments can be rescaled coherently.

#[derive(Debug, Clone)]
pub struct Tolerances {
    /// Relative residual target for eigenpairs, scaled by (|lambda| + 1).
    pub eig_residual: f64,
    /// Relative tolerance of the adaptive Dormand-Prince integrator.
    pub ode_rel: f64,
    /// Absolute tolerance of the adaptive Dormand-Prince integrator.
    pub ode_abs: f64,
    /// Relative tolerance of adaptive Simpson quadrature.
    pub quad_rel: f64,
    /// Bisection width for secular roots in the wavenumber k.
    pub secular_k: f64,
    /// Singular values below this (after row normalization) count toward the
    /// multiplicity of a secular root.
    pub secular_rank: f64,
    /// c_alpha below this at the largest alpha is direct Kato-class evidence.
    pub kato_threshold: f64,
    /// Detection threshold for spectral scans is `shnol_eps_factor / L`.
    pub shnol_eps_factor: f64,
    /// Number of initial angles swept by positivity checks.
    pub ap_angles: usize,
    /// Half-bandwidth used when grouping nearly equal eigenvalues into
    /// clusters for re-orthogonalization, relative to the spectral width.
    pub eig_cluster_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eig_residual: 1e-10,
            ode_rel: 1e-10,
            ode_abs: 1e-12,
            quad_rel: 1e-10,
            secular_k: 1e-12,
            secular_rank: 1e-8,
            kato_threshold: 1e-3,
            shnol_eps_factor: 10.0,
            ap_angles: 720,
            eig_cluster_rel: 1e-8,
        }
    }
}

impl Tolerances {
    /// Multiplies every residual/step tolerance by `scale` (>= 1 loosens).
    /// Counts (angle sweeps) and structural thresholds are left alone.
    pub fn scaled(&self, scale: f64) -> Self {
        Tolerances {
            eig_residual: self.eig_residual * scale,
            ode_rel: self.ode_rel * scale,
            ode_abs: self.ode_abs * scale,
            quad_rel: self.quad_rel * scale,
            secular_k: self.secular_k * scale,
            secular_rank: self.secular_rank * scale,
            kato_threshold: self.kato_threshold,
            shnol_eps_factor: self.shnol_eps_factor,
            ap_angles: self.ap_angles,
            eig_cluster_rel: self.eig_cluster_rel,
        }
    }
}
