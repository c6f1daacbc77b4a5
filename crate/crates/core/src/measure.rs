//! Signed measures `nu = V dx + sum_j w_j delta_{x_j}` on the line: an
//! absolutely continuous part given by a density from a closed vocabulary and
//! a finite list of atoms.

use crate::error::{Error, Result};

/// Density vocabulary for the absolutely continuous part.
#[derive(Debug, Clone, PartialEq)]
pub enum Density {
    Zero,
    /// Constant value `c`. Needs an explicit window to have compact support.
    Constant(f64),
    /// `V(x) = x^2`.
    Quadratic,
    /// `V(x) = -depth` on `|x| < width / 2`, zero outside.
    Well { depth: f64, width: f64 },
    /// `V(x) = coeff / x^2` (radial centrifugal terms).
    InverseSquare { coeff: f64 },
    /// Piecewise-linear interpolation of `(xs, vs)`; zero outside `xs`.
    Table { xs: Vec<f64>, vs: Vec<f64> },
}

/// Support of the density part after window clipping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    Empty,
    Bounded(f64, f64),
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignedMeasure1D {
    density: Density,
    /// Optional clip: the density is multiplied by the indicator of this
    /// interval. Required for unbounded vocabulary entries wherever compact
    /// support matters (Kato constants, transfer products over atoms).
    window: Option<(f64, f64)>,
    /// Atoms `(position, weight)`, kept sorted by position.
    atoms: Vec<(f64, f64)>,
}

impl SignedMeasure1D {
    pub fn new(density: Density, atoms: Vec<(f64, f64)>) -> Result<Self> {
        Self::with_window(density, None, atoms)
    }

    pub fn with_window(
        density: Density,
        window: Option<(f64, f64)>,
        mut atoms: Vec<(f64, f64)>,
    ) -> Result<Self> {
        match &density {
            Density::Constant(c) => {
                if !c.is_finite() {
                    return Err(Error::invalid("constant density must be finite"));
                }
            }
            Density::Well { depth, width } => {
                if !depth.is_finite() || !width.is_finite() || *width <= 0.0 {
                    return Err(Error::invalid("well requires finite depth and width > 0"));
                }
            }
            Density::InverseSquare { coeff } => {
                if !coeff.is_finite() {
                    return Err(Error::invalid("inverse-square coefficient must be finite"));
                }
            }
            Density::Table { xs, vs } => {
                if xs.len() != vs.len() || xs.len() < 2 {
                    return Err(Error::invalid("table needs matching xs/vs with >= 2 rows"));
                }
                if xs.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(Error::invalid("table xs must be strictly increasing"));
                }
                if xs.iter().chain(vs.iter()).any(|v| !v.is_finite()) {
                    return Err(Error::invalid("table entries must be finite"));
                }
            }
            Density::Zero | Density::Quadratic => {}
        }
        if let Some((lo, hi)) = window {
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(Error::invalid("density window must be a finite interval"));
            }
        }
        for &(x, w) in &atoms {
            if !x.is_finite() || !w.is_finite() {
                return Err(Error::invalid("atoms must have finite positions and weights"));
            }
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(SignedMeasure1D { density, window, atoms })
    }

    pub fn zero() -> Self {
        SignedMeasure1D { density: Density::Zero, window: None, atoms: Vec::new() }
    }

    pub fn from_atoms(atoms: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(Density::Zero, atoms)
    }

    /// Atoms of weight `weight` at `period * j` for every integer `j` with
    /// position inside `[span.0, span.1]`.
    pub fn periodic_atoms(weight: f64, period: f64, span: (f64, f64)) -> Result<Self> {
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::invalid("period must be positive and finite"));
        }
        let j0 = (span.0 / period).ceil() as i64;
        let j1 = (span.1 / period).floor() as i64;
        let atoms = (j0..=j1).map(|j| (j as f64 * period, weight)).collect();
        Self::from_atoms(atoms)
    }

    pub fn density(&self) -> &Density {
        &self.density
    }

    pub fn window(&self) -> Option<(f64, f64)> {
        self.window
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    fn in_window(&self, x: f64) -> bool {
        match self.window {
            Some((lo, hi)) => x >= lo && x <= hi,
            None => true,
        }
    }

    /// Density value at `x` (window clip applied).
    pub fn density_at(&self, x: f64) -> f64 {
        if !self.in_window(x) {
            return 0.0;
        }
        match &self.density {
            Density::Zero => 0.0,
            Density::Constant(c) => *c,
            Density::Quadratic => x * x,
            Density::Well { depth, width } => {
                if x.abs() < width / 2.0 {
                    -*depth
                } else {
                    0.0
                }
            }
            Density::InverseSquare { coeff } => {
                if x == 0.0 {
                    f64::INFINITY * coeff.signum()
                } else {
                    coeff / (x * x)
                }
            }
            Density::Table { xs, vs } => {
                if x < xs[0] || x > *xs.last().unwrap() {
                    return 0.0;
                }
                let k = match xs.binary_search_by(|p| p.total_cmp(&x)) {
                    Ok(k) => return vs[k],
                    Err(k) => k,
                };
                let (x0, x1) = (xs[k - 1], xs[k]);
                let t = (x - x0) / (x1 - x0);
                vs[k - 1] * (1.0 - t) + vs[k] * t
            }
        }
    }

    /// Support of the density part (after the window clip). `Unbounded` means
    /// compact-support preconditions fail.
    pub fn density_support(&self) -> Support {
        let natural = match &self.density {
            Density::Zero => Support::Empty,
            Density::Constant(c) => {
                if *c == 0.0 {
                    Support::Empty
                } else {
                    Support::Unbounded
                }
            }
            Density::Quadratic | Density::InverseSquare { .. } => Support::Unbounded,
            Density::Well { width, depth } => {
                if *depth == 0.0 {
                    Support::Empty
                } else {
                    Support::Bounded(-width / 2.0, width / 2.0)
                }
            }
            Density::Table { xs, .. } => Support::Bounded(xs[0], *xs.last().unwrap()),
        };
        match (natural, self.window) {
            (Support::Empty, _) => Support::Empty,
            (s, None) => s,
            (Support::Unbounded, Some((lo, hi))) => Support::Bounded(lo, hi),
            (Support::Bounded(a, b), Some((lo, hi))) => {
                let (a, b) = (a.max(lo), b.min(hi));
                if a < b {
                    Support::Bounded(a, b)
                } else {
                    Support::Empty
                }
            }
        }
    }

    /// When the density is piecewise constant on `[lo, hi]`, the list of
    /// segments `(x0, x1, value)` covering it, split at every discontinuity.
    /// `None` when the density genuinely varies (quadratic, table, radial).
    pub fn piecewise_constant_segments(&self, lo: f64, hi: f64) -> Option<Vec<(f64, f64, f64)>> {
        let mut breaks: Vec<f64> = vec![lo, hi];
        match &self.density {
            Density::Zero | Density::Constant(_) => {}
            Density::Well { width, .. } => {
                breaks.push(-width / 2.0);
                breaks.push(width / 2.0);
            }
            _ => return None,
        }
        if let Some((wlo, whi)) = self.window {
            breaks.push(wlo);
            breaks.push(whi);
        }
        breaks.retain(|x| *x >= lo && *x <= hi);
        breaks.sort_by(|a, b| a.total_cmp(b));
        breaks.dedup();
        let mut segs = Vec::new();
        for w in breaks.windows(2) {
            let (x0, x1) = (w[0], w[1]);
            if x1 > x0 {
                segs.push((x0, x1, self.density_at(0.5 * (x0 + x1))));
            }
        }
        if segs.is_empty() {
            segs.push((lo, hi, 0.0));
        }
        Some(segs)
    }

    /// Measure with density `|V|` and atom weights `|w_j|`.
    pub fn total_variation(&self) -> SignedMeasure1D {
        let density = match &self.density {
            Density::Constant(c) => Density::Constant(c.abs()),
            Density::Well { depth, width } => {
                // |well| is +depth on the well; represent through a table.
                Density::Table {
                    xs: vec![-width / 2.0, width / 2.0],
                    vs: vec![depth.abs(), depth.abs()],
                }
            }
            Density::InverseSquare { coeff } => Density::InverseSquare { coeff: coeff.abs() },
            Density::Table { xs, vs } => Density::Table {
                xs: xs.clone(),
                vs: vs.iter().map(|v| v.abs()).collect(),
            },
            d => d.clone(),
        };
        SignedMeasure1D {
            density,
            window: self.window,
            atoms: self.atoms.iter().map(|&(x, w)| (x, w.abs())).collect(),
        }
    }

    pub fn is_identically_zero(&self) -> bool {
        self.density_support() == Support::Empty && self.atoms.iter().all(|&(_, w)| w == 0.0)
    }
}
