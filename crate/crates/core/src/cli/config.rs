//! Configuration schema for the `lab` binary: exactly one `[model]` section,
//! an ordered `[[experiment]]` list, and an `[output]` section. Parsing is
//! strict in both directions: unknown keys are rejected with their key path,
//! and every accepted config can be echoed back with all defaults filled, so
//! `lab validate` shows exactly what `lab run` would execute.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::MetricGraph;
use crate::grid::{BoundaryCondition, Grid1D};
use crate::measure::{Density, SignedMeasure1D};

/// A parsed, cross-checked configuration. The schema sections are kept for
/// echoing; `model` and `experiments` are the resolved objects the runner
/// consumes.
#[derive(Debug, Clone)]
pub struct RunConfig {
    model_section: ModelSection,
    output: OutputSection,
    pub model: Model,
    pub experiments: Vec<ExperimentConfig>,
}

/// The resolved model every experiment driver receives.
#[derive(Debug, Clone)]
pub enum Model {
    Line { grid: Grid1D, measure: SignedMeasure1D },
    Graph { graph: MetricGraph, mesh: f64 },
    Shell { alpha: f64, radius: f64, m_max: usize, grid: Grid1D },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: ModelSection,
    #[serde(default, rename = "experiment")]
    experiments: Vec<toml::Table>,
    #[serde(default)]
    output: OutputSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub kind: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shell: Option<ShellSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Schrodinger1d,
    MetricGraph,
    DeltaShell,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub a: f64,
    pub b: f64,
    pub n: usize,
    #[serde(default)]
    pub bc: BcKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BcKind {
    #[default]
    Dirichlet,
    Neumann,
}

/// Density vocabulary plus atoms. The `[model.measure]` keys that apply
/// depend on `density`; supplying one that belongs to a different density is
/// rejected by name so configs stay auditable.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSection {
    #[serde(default)]
    pub density: DensityKind,
    /// `density = "constant"`: the constant value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    /// `density = "well"`: depth and width of `-depth` on `|x| < width/2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    /// `density = "inverse_square"`: `V(x) = coeff / x^2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeff: Option<f64>,
    /// `density = "table"`: path (relative to the config file) of a
    /// two-column `x,V` text file, linearly interpolated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    /// Restricts the density to a compact window.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
    /// Atoms as `[position, weight]` pairs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub atoms: Vec<[f64; 2]>,
    /// Shorthand for an atom of `weight` at every multiple of `period`
    /// inside `span`; merged with the explicit atom list.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periodic_atoms: Option<PeriodicAtomsSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityKind {
    #[default]
    Zero,
    Constant,
    Quadratic,
    Well,
    InverseSquare,
    Table,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodicAtomsSection {
    pub weight: f64,
    pub period: f64,
    pub span: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSection {
    pub vertices: usize,
    /// Edge triplets `[head, tail, length]`.
    pub edges: Vec<(usize, usize, f64)>,
    /// Mesh step for form-based experiments; defaults to a 64th of the
    /// shortest edge.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShellSection {
    pub alpha: f64,
    pub radius: f64,
    #[serde(default)]
    pub m_max: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_directory")]
    pub directory: String,
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { directory: default_directory(), formats: default_formats() }
    }
}

fn default_directory() -> String {
    "out".to_string()
}

fn default_formats() -> Vec<String> {
    vec!["csv".to_string()]
}

/// One experiment with its parameters resolved and defaulted.
#[derive(Debug, Clone)]
pub enum ExperimentConfig {
    Spectrum(SpectrumParams),
    Shnol(ShnolParams),
    Ap(ApParams),
    Gap(GapParams),
    Cacc(CaccParams),
    Kato(KatoParams),
    Weyl(WeylParams),
    Capacity(CapacityParams),
    GraphSpectrum(GraphSpectrumParams),
}

pub const EXPERIMENT_NAMES: [&str; 9] = [
    "spectrum",
    "shnol",
    "ap",
    "gap",
    "cacc",
    "kato",
    "weyl",
    "capacity",
    "graph_spectrum",
];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumParams {
    /// Eigenvalues requested (per sector for a shell model).
    #[serde(default = "default_count")]
    pub count: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShnolParams {
    pub lambda_min: f64,
    pub lambda_max: f64,
    #[serde(default = "default_scan_count")]
    pub count: usize,
    pub half_length: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApParams {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub window: [f64; 2],
    /// Energies swept between the range ends for the verdict table.
    #[serde(default = "default_sweep_count")]
    pub count: usize,
    /// Bisection width for the threshold estimate.
    #[serde(default = "default_threshold_width")]
    pub width: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapParams {}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaccParams {
    /// Eigenfunctions probed.
    #[serde(default = "default_count")]
    pub count: usize,
    /// The probed set `E` as `[lo, hi]`.
    pub e: [f64; 2],
    pub b_grid: Vec<f64>,
    /// Collar bound; defaults to the largest entry of `b_grid`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b0: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KatoParams {
    pub alphas: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeylParams {
    /// Eigenpairs probed at their own Ritz values.
    #[serde(default = "default_count")]
    pub count: usize,
    /// Extra energies probed with a fixed deterministic trial vector.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub probes: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacityParams {
    /// Target intervals `[lo, hi]`, one capacity per row.
    pub targets: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpectrumParams {
    pub lambda_max: f64,
}

fn default_count() -> usize {
    6
}

fn default_scan_count() -> usize {
    2001
}

fn default_sweep_count() -> usize {
    33
}

fn default_threshold_width() -> f64 {
    1e-4
}

/// Reads and fully validates a configuration file. Every error names the
/// offending key path; syntax errors carry the line and column from the
/// parser.
pub fn parse_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let base = path.parent().map(PathBuf::from).unwrap_or_default();
    parse_config_str(&text, &base)
}

/// [`parse_config`] on in-memory text; `base` anchors relative file
/// references such as table densities.
pub fn parse_config_str(text: &str, base: &Path) -> Result<RunConfig> {
    let raw: RawConfig =
        toml::from_str(text).map_err(|e| Error::config(e.to_string().trim().to_string()))?;

    let mut model_section = raw.model;
    let model = resolve_model(&mut model_section, base)?;

    let mut experiments = Vec::with_capacity(raw.experiments.len());
    for (i, table) in raw.experiments.into_iter().enumerate() {
        let exp = ExperimentConfig::from_table(i, table)?;
        exp.check_model(i, &model_section.kind)?;
        experiments.push(exp);
    }

    let output = raw.output;
    for f in &output.formats {
        if f != "csv" {
            return Err(Error::config(format!(
                "output.formats: unsupported format {f:?} (supported: \"csv\")"
            )));
        }
    }
    if output.directory.is_empty() {
        return Err(Error::config("output.directory: must not be empty"));
    }

    Ok(RunConfig { model_section, output, model, experiments })
}

impl RunConfig {
    pub fn output_directory(&self) -> &str {
        &self.output.directory
    }

    /// The configuration echoed as canonical TOML with every default filled.
    pub fn echo(&self) -> String {
        let mut root = toml::Table::new();
        root.insert(
            "model".into(),
            toml::Value::try_from(&self.model_section).expect("schema serializes"),
        );
        if !self.experiments.is_empty() {
            let tables: Vec<toml::Value> = self
                .experiments
                .iter()
                .map(|e| toml::Value::Table(e.to_table()))
                .collect();
            root.insert("experiment".into(), toml::Value::Array(tables));
        }
        root.insert(
            "output".into(),
            toml::Value::try_from(&self.output).expect("schema serializes"),
        );
        toml::to_string_pretty(&root).expect("tables render")
    }
}

fn resolve_model(section: &mut ModelSection, base: &Path) -> Result<Model> {
    let forbid = |field: Option<&str>, kind: &str| -> Result<()> {
        match field {
            Some(name) => Err(Error::config(format!(
                "model.{name}: not a section of kind = {kind:?}"
            ))),
            None => Ok(()),
        }
    };
    match section.kind {
        ModelKind::Schrodinger1d => {
            forbid(section.graph.as_ref().map(|_| "graph"), "schrodinger1d")?;
            forbid(section.shell.as_ref().map(|_| "shell"), "schrodinger1d")?;
            let grid_section = section
                .grid
                .as_ref()
                .ok_or_else(|| Error::config("model.grid: required for kind = \"schrodinger1d\""))?;
            let grid = build_grid(grid_section)?;
            let measure = match &mut section.measure {
                Some(m) => resolve_measure(m, base)?,
                None => {
                    section.measure = Some(MeasureSection::default_zero());
                    SignedMeasure1D::zero()
                }
            };
            Ok(Model::Line { grid, measure })
        }
        ModelKind::MetricGraph => {
            forbid(section.grid.as_ref().map(|_| "grid"), "metric_graph")?;
            forbid(section.measure.as_ref().map(|_| "measure"), "metric_graph")?;
            forbid(section.shell.as_ref().map(|_| "shell"), "metric_graph")?;
            let gs = section
                .graph
                .as_mut()
                .ok_or_else(|| Error::config("model.graph: required for kind = \"metric_graph\""))?;
            let graph = MetricGraph::new(gs.vertices, &gs.edges)
                .map_err(|e| Error::config(format!("model.graph: {e}")))?;
            let mesh = match gs.mesh {
                Some(m) if m.is_finite() && m > 0.0 => m,
                Some(m) => {
                    return Err(Error::config(format!(
                        "model.graph.mesh: must be positive and finite, got {m}"
                    )))
                }
                None => {
                    let m = graph.min_edge_length() / 64.0;
                    gs.mesh = Some(m);
                    m
                }
            };
            Ok(Model::Graph { graph, mesh })
        }
        ModelKind::DeltaShell => {
            forbid(section.graph.as_ref().map(|_| "graph"), "delta_shell")?;
            forbid(section.measure.as_ref().map(|_| "measure"), "delta_shell")?;
            let shell = section
                .shell
                .as_ref()
                .ok_or_else(|| Error::config("model.shell: required for kind = \"delta_shell\""))?;
            let grid_section = section
                .grid
                .as_ref()
                .ok_or_else(|| Error::config("model.grid: required for kind = \"delta_shell\""))?;
            if grid_section.a != 0.0 {
                return Err(Error::config("model.grid.a: radial grids start at 0"));
            }
            if grid_section.bc != BcKind::Dirichlet {
                return Err(Error::config("model.grid.bc: radial reduction needs \"dirichlet\""));
            }
            if !shell.alpha.is_finite() || shell.alpha <= 0.0 {
                return Err(Error::config("model.shell.alpha: must be positive and finite"));
            }
            if !shell.radius.is_finite()
                || shell.radius <= 0.0
                || shell.radius >= grid_section.b
            {
                return Err(Error::config(
                    "model.shell.radius: must lie strictly between 0 and grid.b",
                ));
            }
            let grid = build_grid(grid_section)?;
            Ok(Model::Shell {
                alpha: shell.alpha,
                radius: shell.radius,
                m_max: shell.m_max,
                grid,
            })
        }
    }
}

fn build_grid(s: &GridSection) -> Result<Grid1D> {
    if !s.a.is_finite() || !s.b.is_finite() {
        return Err(Error::config("model.grid: endpoints must be finite"));
    }
    let bc = match s.bc {
        BcKind::Dirichlet => BoundaryCondition::Dirichlet,
        BcKind::Neumann => BoundaryCondition::Neumann,
    };
    Grid1D::new(s.a, s.b, s.n, bc, bc).map_err(|e| Error::config(format!("model.grid: {e}")))
}

impl MeasureSection {
    fn default_zero() -> Self {
        MeasureSection {
            density: DensityKind::Zero,
            value: None,
            depth: None,
            width: None,
            coeff: None,
            file: None,
            window: None,
            atoms: Vec::new(),
            periodic_atoms: None,
        }
    }
}

fn resolve_measure(section: &MeasureSection, base: &Path) -> Result<SignedMeasure1D> {
    // Parameters that do not belong to the chosen density are rejected by
    // key so a typo cannot silently change the model.
    let claim = |field: Option<()>, name: &str, owner: &str| -> Result<()> {
        match field {
            Some(()) if owner != density_name(section.density) => Err(Error::config(format!(
                "model.measure.{name}: only valid for density = {owner:?}"
            ))),
            _ => Ok(()),
        }
    };
    claim(section.value.map(|_| ()), "value", "constant")?;
    claim(section.depth.map(|_| ()), "depth", "well")?;
    claim(section.width.map(|_| ()), "width", "well")?;
    claim(section.coeff.map(|_| ()), "coeff", "inverse_square")?;
    claim(section.file.as_ref().map(|_| ()), "file", "table")?;

    let density = match section.density {
        DensityKind::Zero => Density::Zero,
        DensityKind::Quadratic => Density::Quadratic,
        DensityKind::Constant => Density::Constant(section.value.ok_or_else(|| {
            Error::config("model.measure.value: required for density = \"constant\"")
        })?),
        DensityKind::Well => {
            let depth = section.depth.ok_or_else(|| {
                Error::config("model.measure.depth: required for density = \"well\"")
            })?;
            let width = section.width.ok_or_else(|| {
                Error::config("model.measure.width: required for density = \"well\"")
            })?;
            Density::Well { depth, width }
        }
        DensityKind::InverseSquare => Density::InverseSquare {
            coeff: section.coeff.ok_or_else(|| {
                Error::config("model.measure.coeff: required for density = \"inverse_square\"")
            })?,
        },
        DensityKind::Table => {
            let file = section.file.as_ref().ok_or_else(|| {
                Error::config("model.measure.file: required for density = \"table\"")
            })?;
            let (xs, vs) = read_table(&base.join(file))?;
            Density::Table { xs, vs }
        }
    };

    let mut atoms: Vec<(f64, f64)> =
        section.atoms.iter().map(|&[x, w]| (x, w)).collect();
    if let Some(p) = &section.periodic_atoms {
        let comb = SignedMeasure1D::periodic_atoms(p.weight, p.period, (p.span[0], p.span[1]))
            .map_err(|e| Error::config(format!("model.measure.periodic_atoms: {e}")))?;
        atoms.extend_from_slice(comb.atoms());
    }

    let window = section.window.map(|[lo, hi]| (lo, hi));
    SignedMeasure1D::with_window(density, window, atoms)
        .map_err(|e| Error::config(format!("model.measure: {e}")))
}

fn density_name(k: DensityKind) -> &'static str {
    match k {
        DensityKind::Zero => "zero",
        DensityKind::Constant => "constant",
        DensityKind::Quadratic => "quadratic",
        DensityKind::Well => "well",
        DensityKind::InverseSquare => "inverse_square",
        DensityKind::Table => "table",
    }
}

/// Two-column numeric text: `x value` per line, comma or whitespace
/// separated, `#` comments and blank lines skipped.
fn read_table(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::config(format!("model.measure.file: cannot read {}: {e}", path.display()))
    })?;
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> =
            body.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        let bad = || {
            Error::config(format!(
                "model.measure.file: line {} of {} is not an `x value` pair",
                lineno + 1,
                path.display()
            ))
        };
        if fields.len() != 2 {
            return Err(bad());
        }
        xs.push(fields[0].parse::<f64>().map_err(|_| bad())?);
        vs.push(fields[1].parse::<f64>().map_err(|_| bad())?);
    }
    Ok((xs, vs))
}

impl ExperimentConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentConfig::Spectrum(_) => "spectrum",
            ExperimentConfig::Shnol(_) => "shnol",
            ExperimentConfig::Ap(_) => "ap",
            ExperimentConfig::Gap(_) => "gap",
            ExperimentConfig::Cacc(_) => "cacc",
            ExperimentConfig::Kato(_) => "kato",
            ExperimentConfig::Weyl(_) => "weyl",
            ExperimentConfig::Capacity(_) => "capacity",
            ExperimentConfig::GraphSpectrum(_) => "graph_spectrum",
        }
    }

    fn from_table(index: usize, mut table: toml::Table) -> Result<Self> {
        let name = match table.remove("name") {
            Some(toml::Value::String(s)) => s,
            Some(_) => {
                return Err(Error::config(format!(
                    "experiment[{index}].name: must be a string"
                )))
            }
            None => {
                return Err(Error::config(format!("experiment[{index}].name: missing")))
            }
        };
        let exp = match name.as_str() {
            "spectrum" => ExperimentConfig::Spectrum(params(index, table)?),
            "shnol" => ExperimentConfig::Shnol(params(index, table)?),
            "ap" => ExperimentConfig::Ap(params(index, table)?),
            "gap" => ExperimentConfig::Gap(params(index, table)?),
            "cacc" => ExperimentConfig::Cacc(params(index, table)?),
            "kato" => ExperimentConfig::Kato(params(index, table)?),
            "weyl" => ExperimentConfig::Weyl(params(index, table)?),
            "capacity" => ExperimentConfig::Capacity(params(index, table)?),
            "graph_spectrum" => ExperimentConfig::GraphSpectrum(params(index, table)?),
            other => {
                return Err(Error::config(format!(
                    "experiment[{index}].name: unrecognized experiment {other:?} (known: {})",
                    EXPERIMENT_NAMES.join(", ")
                )))
            }
        };
        exp.validate(index)?;
        Ok(exp)
    }

    fn validate(&self, index: usize) -> Result<()> {
        let at = |key: &str, msg: &str| -> Error {
            Error::config(format!("experiment[{index}].{key}: {msg}"))
        };
        let finite_range = |lo: f64, hi: f64, key: &str| -> Result<()> {
            if !lo.is_finite() || !hi.is_finite() || !(lo < hi) {
                Err(at(key, "must be a finite interval with min < max"))
            } else {
                Ok(())
            }
        };
        match self {
            ExperimentConfig::Spectrum(p) => {
                if p.count == 0 {
                    return Err(at("count", "must be at least 1"));
                }
            }
            ExperimentConfig::Shnol(p) => {
                finite_range(p.lambda_min, p.lambda_max, "lambda_min/lambda_max")?;
                if p.count < 2 {
                    return Err(at("count", "scan needs at least two energies"));
                }
                if !(p.half_length > 0.0) || !p.half_length.is_finite() {
                    return Err(at("half_length", "must be positive and finite"));
                }
            }
            ExperimentConfig::Ap(p) => {
                finite_range(p.lambda_min, p.lambda_max, "lambda_min/lambda_max")?;
                finite_range(p.window[0], p.window[1], "window")?;
                if p.count < 2 {
                    return Err(at("count", "sweep needs at least two energies"));
                }
                if !(p.width > 0.0) || !p.width.is_finite() {
                    return Err(at("width", "must be positive and finite"));
                }
            }
            ExperimentConfig::Gap(_) => {}
            ExperimentConfig::Cacc(p) => {
                if p.count == 0 {
                    return Err(at("count", "must be at least 1"));
                }
                finite_range(p.e[0], p.e[1], "e")?;
                if p.b_grid.is_empty() {
                    return Err(at("b_grid", "must not be empty"));
                }
                if p.b_grid.iter().any(|b| !b.is_finite() || *b <= 0.0) {
                    return Err(at("b_grid", "entries must be positive and finite"));
                }
                if let Some(b0) = p.b0 {
                    if !b0.is_finite() || b0 <= 0.0 {
                        return Err(at("b0", "must be positive and finite"));
                    }
                }
            }
            ExperimentConfig::Kato(p) => {
                if p.alphas.is_empty() {
                    return Err(at("alphas", "must not be empty"));
                }
                if p.alphas.iter().any(|a| !a.is_finite() || *a <= 0.0) {
                    return Err(at("alphas", "entries must be positive and finite"));
                }
                if p.alphas.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(at("alphas", "must be strictly increasing"));
                }
            }
            ExperimentConfig::Weyl(p) => {
                if p.count == 0 {
                    return Err(at("count", "must be at least 1"));
                }
                if p.probes.iter().any(|l| !l.is_finite()) {
                    return Err(at("probes", "entries must be finite"));
                }
            }
            ExperimentConfig::Capacity(p) => {
                if p.targets.is_empty() {
                    return Err(at("targets", "must not be empty"));
                }
                for (k, t) in p.targets.iter().enumerate() {
                    finite_range(t[0], t[1], &format!("targets[{k}]"))?;
                }
            }
            ExperimentConfig::GraphSpectrum(p) => {
                if !(p.lambda_max > 0.0) || !p.lambda_max.is_finite() {
                    return Err(at("lambda_max", "must be positive and finite"));
                }
            }
        }
        Ok(())
    }

    fn check_model(&self, index: usize, kind: &ModelKind) -> Result<()> {
        let need = |ok: bool, requirement: &str| -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::config(format!(
                    "experiment[{index}]: {} requires {requirement}",
                    self.name()
                )))
            }
        };
        match self {
            ExperimentConfig::Spectrum(_) => Ok(()),
            ExperimentConfig::Gap(_) => need(
                matches!(kind, ModelKind::Schrodinger1d | ModelKind::MetricGraph),
                "kind = \"schrodinger1d\" or \"metric_graph\"",
            ),
            ExperimentConfig::GraphSpectrum(_) => {
                need(matches!(kind, ModelKind::MetricGraph), "kind = \"metric_graph\"")
            }
            _ => need(matches!(kind, ModelKind::Schrodinger1d), "kind = \"schrodinger1d\""),
        }
    }

    /// The experiment as a TOML table with `name` and all defaults filled.
    pub fn to_table(&self) -> toml::Table {
        let mut t = match self {
            ExperimentConfig::Spectrum(p) => serialize_params(p),
            ExperimentConfig::Shnol(p) => serialize_params(p),
            ExperimentConfig::Ap(p) => serialize_params(p),
            ExperimentConfig::Gap(p) => serialize_params(p),
            ExperimentConfig::Cacc(p) => serialize_params(p),
            ExperimentConfig::Kato(p) => serialize_params(p),
            ExperimentConfig::Weyl(p) => serialize_params(p),
            ExperimentConfig::Capacity(p) => serialize_params(p),
            ExperimentConfig::GraphSpectrum(p) => serialize_params(p),
        };
        t.insert("name".into(), toml::Value::String(self.name().into()));
        t
    }
}

fn params<T: DeserializeOwned>(index: usize, table: toml::Table) -> Result<T> {
    toml::Value::Table(table).try_into().map_err(|e| {
        Error::config(format!("experiment[{index}]: {}", e.to_string().trim()))
    })
}

fn serialize_params<T: Serialize>(p: &T) -> toml::Table {
    match toml::Value::try_from(p).expect("params serialize") {
        toml::Value::Table(t) => t,
        _ => unreachable!("params are structs"),
    }
}
