//! Front end for the `lab` binary: configuration parsing, the experiment
//! runner, and the CSV/manifest writers.
//!
//! The runner executes experiments in listed order; jobs inside one
//! experiment may fan out over a rayon pool, but results are collected by
//! index and files are written by this single orchestrating thread, so a
//! given config and build produce byte-identical CSV bodies at any worker
//! count. The manifest carries wall times and is the one file excluded from
//! that guarantee.

mod config;
mod experiments;

use std::fmt::Display;
use std::path::PathBuf;
use std::time::Instant;

use crate::config::Tolerances;
use crate::error::{Error, Result};

pub use config::{
    parse_config, parse_config_str, ApParams, BcKind, CaccParams, CapacityParams,
    DensityKind, ExperimentConfig, GapParams, GraphSpectrumParams, GraphSection,
    GridSection, KatoParams, MeasureSection, Model, ModelKind, ModelSection,
    OutputSection, PeriodicAtomsSection, RunConfig, ShellSection, ShnolParams,
    SpectrumParams, WeylParams, EXPERIMENT_NAMES,
};

/// Environment variable overriding the configured output directory; the
/// `--out` flag overrides both.
pub const OUTPUT_DIR_ENV: &str = "LAB_OUTPUT_DIR";

/// Runner knobs taken from the command line.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    /// Worker threads; `None` lets rayon pick.
    pub threads: Option<usize>,
    /// Multiplier applied to every residual/step tolerance.
    pub tol_scale: f64,
}

impl RunOptions {
    pub fn new() -> Self {
        RunOptions { out_dir: None, threads: None, tol_scale: 1.0 }
    }
}

/// One experiment's table: name, typed columns, numeric rows, and the
/// key-value metadata echoed into the manifest.
#[derive(Debug, Clone)]
pub struct ResultTable {
    pub experiment: String,
    columns: Vec<Col>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: Vec<(String, String)>,
}

/// Column descriptor: integer columns print without an exponent so flags
/// and indices stay readable.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Col {
    name: &'static str,
    integer: bool,
}

impl Col {
    pub(crate) fn int(name: &'static str) -> Col {
        Col { name, integer: true }
    }
    pub(crate) fn float(name: &'static str) -> Col {
        Col { name, integer: false }
    }
}

impl ResultTable {
    pub(crate) fn new(experiment: &str, columns: &[Col], rows: Vec<Vec<f64>>) -> Result<Self> {
        for (i, c) in columns.iter().enumerate() {
            if columns[..i].iter().any(|d| d.name == c.name) {
                return Err(Error::invalid(format!("duplicate column {:?}", c.name)));
            }
        }
        if rows.iter().any(|r| r.len() != columns.len()) {
            return Err(Error::invalid("result rows must match the header width"));
        }
        Ok(ResultTable {
            experiment: experiment.to_string(),
            columns: columns.to_vec(),
            rows,
            metadata: Vec::new(),
        })
    }

    pub(crate) fn meta(&mut self, key: &str, value: impl Display) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    pub fn headers(&self) -> Vec<&'static str> {
        self.columns.iter().map(|c| c.name).collect()
    }

    /// The CSV body: a header line plus one line per row. Floats carry 17
    /// significant digits (`{:.16e}`), integer columns print bare, and the
    /// decimal separator is always `.`; the output is locale-independent
    /// and byte-stable.
    pub fn csv(&self) -> String {
        let mut out = String::new();
        let names: Vec<&str> = self.columns.iter().map(|c| c.name).collect();
        out.push_str(&names.join(","));
        out.push('\n');
        for row in &self.rows {
            let mut first = true;
            for (c, v) in self.columns.iter().zip(row) {
                if !first {
                    out.push(',');
                }
                first = false;
                if c.integer {
                    out.push_str(&format!("{}", *v as i64));
                } else {
                    out.push_str(&format!("{v:.16e}"));
                }
            }
            out.push('\n');
        }
        out
    }
}

/// What happened to one experiment of a run.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub name: String,
    /// CSV file name inside the output directory, when the experiment
    /// succeeded.
    pub file: Option<String>,
    pub rows: usize,
    pub error: Option<String>,
    pub wall_ms: f64,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub directory: PathBuf,
    pub outcomes: Vec<ExperimentOutcome>,
}

impl RunReport {
    pub fn all_ok(&self) -> bool {
        self.outcomes.iter().all(|o| o.error.is_none())
    }
}

/// Executes every experiment of `config` in listed order and writes one CSV
/// per experiment plus `manifest.toml` into the output directory (resolved
/// as `--out` flag, then [`OUTPUT_DIR_ENV`], then the config).
///
/// A failing experiment is recorded in the manifest and the remaining ones
/// still run; the error is only reflected in [`RunReport::all_ok`]. `Err` is
/// reserved for infrastructure failures: an unwritable output directory or
/// an unbuildable worker pool.
pub fn run(config: &RunConfig, opts: &RunOptions) -> Result<RunReport> {
    let directory: PathBuf = opts
        .out_dir
        .clone()
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(config.output_directory()));
    std::fs::create_dir_all(&directory)?;

    let tol_scale = if opts.tol_scale > 0.0 && opts.tol_scale.is_finite() {
        opts.tol_scale
    } else {
        return Err(Error::config("tol-scale must be positive and finite"));
    };
    let tol = Tolerances::default().scaled(tol_scale);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::numerical(format!("worker pool: {e}")))?;

    let mut outcomes = Vec::with_capacity(config.experiments.len());
    let mut tables: Vec<Option<ResultTable>> = Vec::with_capacity(config.experiments.len());
    for (i, exp) in config.experiments.iter().enumerate() {
        let started = Instant::now();
        let result = pool.install(|| experiments::drive(&config.model, exp, &tol));
        let wall_ms = started.elapsed().as_secs_f64() * 1e3;
        match result {
            Ok(table) => {
                let file = format!("{:02}-{}.csv", i + 1, exp.name());
                std::fs::write(directory.join(&file), table.csv())?;
                outcomes.push(ExperimentOutcome {
                    name: exp.name().to_string(),
                    file: Some(file),
                    rows: table.rows.len(),
                    error: None,
                    wall_ms,
                });
                tables.push(Some(table));
            }
            Err(e) => {
                outcomes.push(ExperimentOutcome {
                    name: exp.name().to_string(),
                    file: None,
                    rows: 0,
                    error: Some(e.to_string()),
                    wall_ms,
                });
                tables.push(None);
            }
        }
    }

    let manifest = render_manifest(&tol, tol_scale, opts.threads, &outcomes, &tables);
    std::fs::write(directory.join("manifest.toml"), manifest)?;
    Ok(RunReport { directory, outcomes })
}

fn render_manifest(
    tol: &Tolerances,
    tol_scale: f64,
    threads: Option<usize>,
    outcomes: &[ExperimentOutcome],
    tables: &[Option<ResultTable>],
) -> String {
    let mut root = toml::Table::new();
    root.insert("tol_scale".into(), tol_scale.into());
    root.insert(
        "threads".into(),
        match threads {
            Some(n) => toml::Value::Integer(n as i64),
            None => toml::Value::String("default".into()),
        },
    );

    let mut tol_table = toml::Table::new();
    tol_table.insert("eig_residual".into(), tol.eig_residual.into());
    tol_table.insert("ode_rel".into(), tol.ode_rel.into());
    tol_table.insert("ode_abs".into(), tol.ode_abs.into());
    tol_table.insert("quad_rel".into(), tol.quad_rel.into());
    tol_table.insert("secular_k".into(), tol.secular_k.into());
    tol_table.insert("secular_rank".into(), tol.secular_rank.into());
    tol_table.insert("kato_threshold".into(), tol.kato_threshold.into());
    tol_table.insert("shnol_eps_factor".into(), tol.shnol_eps_factor.into());
    tol_table.insert("ap_angles".into(), toml::Value::Integer(tol.ap_angles as i64));
    tol_table.insert("eig_cluster_rel".into(), tol.eig_cluster_rel.into());
    root.insert("tolerances".into(), toml::Value::Table(tol_table));

    let mut entries = Vec::with_capacity(outcomes.len());
    for (o, t) in outcomes.iter().zip(tables) {
        let mut e = toml::Table::new();
        e.insert("name".into(), toml::Value::String(o.name.clone()));
        e.insert(
            "status".into(),
            toml::Value::String(if o.error.is_none() { "ok" } else { "error" }.into()),
        );
        if let Some(f) = &o.file {
            e.insert("file".into(), toml::Value::String(f.clone()));
        }
        if let Some(msg) = &o.error {
            e.insert("error".into(), toml::Value::String(msg.clone()));
        }
        e.insert("rows".into(), toml::Value::Integer(o.rows as i64));
        e.insert("wall_ms".into(), o.wall_ms.into());
        if let Some(table) = t {
            if !table.metadata.is_empty() {
                let mut m = toml::Table::new();
                for (k, v) in &table.metadata {
                    m.insert(k.clone(), toml::Value::String(v.clone()));
                }
                e.insert("metadata".into(), toml::Value::Table(m));
            }
        }
        entries.push(toml::Value::Table(e));
    }
    root.insert("experiment".into(), toml::Value::Array(entries));
    toml::to_string_pretty(&root).expect("manifest renders")
}

/// `(name, what it measures)` for `lab list-experiments`.
pub fn experiment_catalog() -> Vec<(&'static str, &'static str)> {
    vec![
        ("spectrum", "smallest eigenvalues of the assembled form (per sector on a shell)"),
        ("shnol", "transfer growth rate over an energy grid with detected spectral bands"),
        ("ap", "positive-solution verdicts over an energy sweep and the threshold energy"),
        ("gap", "spectral gap via the ground state transform against the eigensolver"),
        ("cacc", "Caccioppoli energy/mass ratios over eigenfunctions and collar widths"),
        ("kato", "Kato constants c_alpha along an alpha grid with decay classification"),
        ("weyl", "Weyl residuals and spectrum-distance bounds at eigenpairs and probes"),
        ("capacity", "variational capacity of target intervals"),
        ("graph_spectrum", "Kirchhoff eigenvalues of the metric graph by the secular equation"),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Density;
    use std::path::Path;

    fn parse(text: &str) -> Result<RunConfig> {
        parse_config_str(text, Path::new("."))
    }

    const MINIMAL: &str = r#"
[model]
kind = "schrodinger1d"
grid = { a = -20.0, b = 20.0, n = 801 }
measure = { atoms = [[0.0, -2.0]] }

[[experiment]]
name = "spectrum"
count = 1
"#;

    #[test]
    fn minimal_config_parses_and_echoes_defaults() {
        let cfg = parse(MINIMAL).unwrap();
        let Model::Line { grid, measure } = &cfg.model else {
            panic!("expected a line model")
        };
        assert_eq!(grid.n, 801);
        assert_eq!(measure.atoms(), &[(0.0, -2.0)]);
        assert_eq!(measure.density(), &Density::Zero);

        let echo = cfg.echo();
        assert!(echo.contains("bc = \"dirichlet\""), "default bc echoed:\n{echo}");
        assert!(echo.contains("density = \"zero\""), "default density echoed:\n{echo}");
        assert!(echo.contains("directory = \"out\""), "default output echoed:\n{echo}");
        assert!(echo.contains("count = 1"), "explicit value kept:\n{echo}");

        // The echo is itself a valid config resolving to the same model.
        let again = parse(&echo).unwrap();
        assert_eq!(again.experiments.len(), 1);
        assert_eq!(again.output_directory(), "out");
    }

    #[test]
    fn unknown_keys_are_rejected_with_their_path() {
        let err = parse(&MINIMAL.replace("count = 1", "kount = 1")).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("experiment[0]"), "{msg}");
        assert!(msg.contains("kount"), "{msg}");

        let err = parse(
            "[model]\nkind = \"schrodinger1d\"\ngrid = { a = 0.0, b = 1.0, n = 9, spacing = 2 }",
        )
        .unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("spacing"), "{msg}");
    }

    #[test]
    fn unrecognized_experiment_names_are_listed() {
        let err = parse(&MINIMAL.replace("\"spectrum\"", "\"spectral\"")).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("experiment[0].name"), "{msg}");
        assert!(msg.contains("spectral"), "{msg}");
        assert!(msg.contains("graph_spectrum"), "known names listed: {msg}");
    }

    #[test]
    fn density_parameters_are_claimed_by_their_density() {
        let err = parse(
            "[model]\nkind = \"schrodinger1d\"\ngrid = { a = 0.0, b = 1.0, n = 9 }\nmeasure = { density = \"zero\", depth = 2.0 }",
        )
        .unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("model.measure.depth"), "{msg}");
        assert!(msg.contains("well"), "{msg}");
    }

    #[test]
    fn graph_configs_resolve_with_a_default_mesh() {
        let cfg = parse(
            r#"
[model]
kind = "metric_graph"
graph = { vertices = 4, edges = [[0, 1, 1.0], [0, 2, 1.0], [0, 3, 1.5]] }

[[experiment]]
name = "graph_spectrum"
lambda_max = 100.0
"#,
        )
        .unwrap();
        let Model::Graph { graph, mesh } = &cfg.model else {
            panic!("expected a graph model")
        };
        assert_eq!(graph.vertex_count(), 4);
        assert_eq!(graph.edge_count(), 3);
        assert!((mesh - 1.0 / 64.0).abs() < 1e-15, "default mesh = lmin/64");
        assert!(cfg.echo().contains("mesh = 0.015625"), "{}", cfg.echo());
    }

    #[test]
    fn experiments_must_match_the_model_kind() {
        let err = parse(
            r#"
[model]
kind = "metric_graph"
graph = { vertices = 2, edges = [[0, 1, 1.0]] }

[[experiment]]
name = "shnol"
lambda_min = 0.0
lambda_max = 1.0
half_length = 10.0
"#,
        )
        .unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("experiment[0]"), "{msg}");
        assert!(msg.contains("schrodinger1d"), "{msg}");

        let err = parse(&MINIMAL.replace(
            "name = \"spectrum\"\ncount = 1",
            "name = \"graph_spectrum\"\nlambda_max = 10.0",
        ))
        .unwrap_err();
        assert!(format!("{err}").contains("metric_graph"), "{err}");
    }

    #[test]
    fn sections_outside_the_model_kind_are_rejected() {
        let err = parse(
            r#"
[model]
kind = "schrodinger1d"
grid = { a = 0.0, b = 1.0, n = 9 }
graph = { vertices = 2, edges = [[0, 1, 1.0]] }
"#,
        )
        .unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("model.graph"), "{msg}");
    }

    #[test]
    fn periodic_atoms_merge_with_the_explicit_list() {
        let cfg = parse(
            r#"
[model]
kind = "schrodinger1d"
grid = { a = -3.0, b = 3.0, n = 601 }
measure = { atoms = [[0.5, -1.0]], periodic_atoms = { weight = 2.0, period = 1.0, span = [-2.0, 2.0] } }
"#,
        )
        .unwrap();
        let Model::Line { measure, .. } = &cfg.model else { panic!() };
        // 5 comb atoms at -2..2 plus the explicit one, sorted by position.
        let atoms = measure.atoms();
        assert_eq!(atoms.len(), 6);
        assert_eq!(atoms[3], (0.5, -1.0));
        assert!(atoms.windows(2).all(|w| w[0].0 <= w[1].0));
    }

    #[test]
    fn table_densities_load_from_a_file() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("v.dat"),
            "# piecewise potential\n-1.0, 0.0\n0.0 2.0\n1.0,0.0\n",
        )
        .unwrap();
        let cfg = parse_config_str(
            r#"
[model]
kind = "schrodinger1d"
grid = { a = -2.0, b = 2.0, n = 101 }
measure = { density = "table", file = "v.dat" }
"#,
            dir.path(),
        )
        .unwrap();
        let Model::Line { measure, .. } = &cfg.model else { panic!() };
        assert!((measure.density_at(0.0) - 2.0).abs() < 1e-15);
        assert!((measure.density_at(0.5) - 1.0).abs() < 1e-15);

        let err = parse_config_str(
            r#"
[model]
kind = "schrodinger1d"
grid = { a = -2.0, b = 2.0, n = 101 }
measure = { density = "table", file = "missing.dat" }
"#,
            dir.path(),
        )
        .unwrap_err();
        assert!(format!("{err}").contains("model.measure.file"), "{err}");
    }

    #[test]
    fn shell_configs_demand_a_radial_dirichlet_grid() {
        let base = r#"
[model]
kind = "delta_shell"
shell = { alpha = 1.0, radius = 1.0 }
grid = { a = 0.0, b = 40.0, n = 2001 }
"#;
        assert!(parse(base).is_ok());
        let err = parse(&base.replace("a = 0.0", "a = 1.0")).unwrap_err();
        assert!(format!("{err}").contains("model.grid.a"), "{err}");
        let err =
            parse(&base.replace("n = 2001", "n = 2001, bc = \"neumann\"")).unwrap_err();
        assert!(format!("{err}").contains("model.grid.bc"), "{err}");
    }

    #[test]
    fn result_tables_enforce_shape_and_render_csv() {
        let t = ResultTable::new(
            "spectrum",
            &[Col::int("index"), Col::float("lambda")],
            vec![vec![0.0, 1.0], vec![1.0, 0.25]],
        )
        .unwrap();
        assert_eq!(t.csv(), "index,lambda\n0,1.0000000000000000e0\n1,2.5000000000000000e-1\n");

        assert!(ResultTable::new(
            "x",
            &[Col::int("a"), Col::int("a")],
            Vec::new()
        )
        .is_err());
        assert!(ResultTable::new("x", &[Col::int("a")], vec![vec![1.0, 2.0]]).is_err());
    }
}
