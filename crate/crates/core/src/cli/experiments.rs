//! Experiment drivers: each maps a resolved model and parameter set to one
//! [`ResultTable`]. Parameter sweeps with independent jobs (Kato alphas,
//! positivity energies) fan out through rayon and collect in index order, so
//! the emitted rows do not depend on the worker count.

use rayon::prelude::*;

use super::config::{ExperimentConfig, Model};
use super::{Col, ResultTable};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::forms::{assemble_schrodinger_form, capacity, weyl_residual, DiscreteForm};
use crate::graphs::{discretize_graph_form, kirchhoff_spectrum};
use crate::grid::Grid1D;
use crate::kato::{kato_constant, KatoEvidence, KatoReport};
use crate::lab::{ap_check, ap_threshold, caccioppoli_probe, delta_shell_radial, gap_via_gst, APVerdict};
use crate::linalg::deterministic_unit_vector;
use crate::measure::SignedMeasure1D;
use crate::solve1d::{eig_smallest, shnol_scan};

/// Seed of the fixed trial vector used for off-eigenvalue Weyl probes.
const WEYL_PROBE_SEED: u64 = 17;

pub(super) fn drive(
    model: &Model,
    exp: &ExperimentConfig,
    tol: &Tolerances,
) -> Result<ResultTable> {
    match exp {
        ExperimentConfig::Spectrum(p) => spectrum(model, p.count, tol),
        ExperimentConfig::Shnol(p) => {
            let (_, measure) = line_model(model)?;
            shnol(measure, p, tol)
        }
        ExperimentConfig::Ap(p) => {
            let (_, measure) = line_model(model)?;
            ap(measure, p, tol)
        }
        ExperimentConfig::Gap(_) => gap(model, tol),
        ExperimentConfig::Cacc(p) => {
            let (grid, measure) = line_model(model)?;
            cacc(measure, grid, p, tol)
        }
        ExperimentConfig::Kato(p) => {
            let (_, measure) = line_model(model)?;
            kato(measure, &p.alphas, tol)
        }
        ExperimentConfig::Weyl(p) => {
            let (grid, measure) = line_model(model)?;
            weyl(grid, measure, p, tol)
        }
        ExperimentConfig::Capacity(p) => {
            let (grid, measure) = line_model(model)?;
            capacity_rows(grid, measure, &p.targets)
        }
        ExperimentConfig::GraphSpectrum(p) => {
            let Model::Graph { graph, .. } = model else {
                return Err(Error::config("graph_spectrum needs a metric_graph model"));
            };
            let spectrum = kirchhoff_spectrum(graph, p.lambda_max, tol)?;
            let rows = spectrum
                .iter()
                .map(|e| vec![e.lambda, e.multiplicity as f64, e.sigma_min])
                .collect();
            let mut table = ResultTable::new(
                "graph_spectrum",
                &[Col::float("lambda"), Col::int("multiplicity"), Col::float("sigma_min")],
                rows,
            )?;
            table.meta("vertices", graph.vertex_count());
            table.meta("edges", graph.edge_count());
            table.meta("total_length", graph.total_length());
            Ok(table)
        }
    }
}

fn line_model(model: &Model) -> Result<(&Grid1D, &SignedMeasure1D)> {
    match model {
        Model::Line { grid, measure } => Ok((grid, measure)),
        _ => Err(Error::config("experiment needs a schrodinger1d model")),
    }
}

fn line_form(model: &Model) -> Result<DiscreteForm> {
    match model {
        Model::Line { grid, measure } => assemble_schrodinger_form(grid, measure),
        Model::Graph { graph, mesh } => discretize_graph_form(graph, *mesh),
        Model::Shell { .. } => Err(Error::config("experiment needs a single assembled form")),
    }
}

fn spectrum(model: &Model, count: usize, tol: &Tolerances) -> Result<ResultTable> {
    if let Model::Shell { alpha, radius, m_max, grid } = model {
        let sectors = delta_shell_radial(*alpha, *radius, *m_max, grid, tol)?;
        let mut rows = Vec::new();
        for s in &sectors {
            for (i, &l) in s.negative_eigenvalues.iter().take(count).enumerate() {
                rows.push(vec![s.m as f64, i as f64, l]);
            }
        }
        let mut table = ResultTable::new(
            "spectrum",
            &[Col::int("m"), Col::int("index"), Col::float("lambda")],
            rows,
        )?;
        table.meta("sectors", sectors.len());
        table.meta("grid_n", grid.n);
        return Ok(table);
    }
    let form = line_form(model)?;
    let pairs = eig_smallest(&form, count, tol)?;
    let rows = pairs
        .iter()
        .enumerate()
        .map(|(i, p)| vec![i as f64, p.lambda, p.residual])
        .collect();
    let mut table = ResultTable::new(
        "spectrum",
        &[Col::int("index"), Col::float("lambda"), Col::float("residual")],
        rows,
    )?;
    table.meta("dim", form.dim());
    Ok(table)
}

fn shnol(
    measure: &SignedMeasure1D,
    p: &super::config::ShnolParams,
    tol: &Tolerances,
) -> Result<ResultTable> {
    let report = shnol_scan(
        measure,
        (p.lambda_min, p.lambda_max),
        p.count,
        p.half_length,
        tol,
    )?;
    let rows = report
        .lambdas
        .iter()
        .zip(&report.gammas)
        .map(|(&l, &g)| vec![l, g, f64::from(u8::from(g <= report.epsilon))])
        .collect();
    let mut table = ResultTable::new(
        "shnol",
        &[Col::float("lambda"), Col::float("gamma"), Col::int("detected")],
        rows,
    )?;
    table.meta("epsilon", report.epsilon);
    table.meta("half_length", report.half_length);
    table.meta("intervals", format_pairs(&report.intervals));
    table.meta("bound_states", format_list(&report.bound_states));
    Ok(table)
}

fn ap(
    measure: &SignedMeasure1D,
    p: &super::config::ApParams,
    tol: &Tolerances,
) -> Result<ResultTable> {
    let window = (p.window[0], p.window[1]);
    let lambdas: Vec<f64> = (0..p.count)
        .map(|k| {
            p.lambda_min + (p.lambda_max - p.lambda_min) * k as f64 / (p.count - 1) as f64
        })
        .collect();
    let reports = lambdas
        .par_iter()
        .map(|&l| ap_check(measure, l, window, tol))
        .collect::<Result<Vec<_>>>()?;
    let rows = reports
        .iter()
        .map(|r| {
            vec![
                r.lambda,
                f64::from(u8::from(r.verdict == APVerdict::Positive)),
                r.swept as f64,
                r.first_sign_change.unwrap_or(f64::NAN),
            ]
        })
        .collect();
    let mut table = ResultTable::new(
        "ap",
        &[
            Col::float("lambda"),
            Col::int("positive"),
            Col::int("swept"),
            Col::float("first_sign_change"),
        ],
        rows,
    )?;
    table.meta("window", format!("[{}, {}]", window.0, window.1));
    match ap_threshold(measure, window, (p.lambda_min, p.lambda_max), p.width, tol) {
        Ok(star) => table.meta("lambda_star", star),
        // A one-sided range has no threshold to report; that is data, not a
        // failure of the sweep above.
        Err(Error::Degenerate(_)) | Err(Error::NoBracket(_)) => {
            table.meta("lambda_star", "none (range does not bracket the threshold)")
        }
        Err(e) => return Err(e),
    }
    Ok(table)
}

fn gap(model: &Model, tol: &Tolerances) -> Result<ResultTable> {
    let form = line_form(model)?;
    let (l0, l1, gap) = gap_via_gst(&form, tol)?;
    let eig_gap = l1 - l0;
    let rel = (gap - eig_gap).abs() / eig_gap.abs().max(f64::MIN_POSITIVE);
    let rows = vec![vec![l0, l1, gap, rel]];
    let mut table = ResultTable::new(
        "gap",
        &[
            Col::float("lambda0"),
            Col::float("lambda1"),
            Col::float("gap_via_gst"),
            Col::float("identity_rel_residual"),
        ],
        rows,
    )?;
    table.meta("dim", form.dim());
    Ok(table)
}

fn cacc(
    measure: &SignedMeasure1D,
    grid: &Grid1D,
    p: &super::config::CaccParams,
    tol: &Tolerances,
) -> Result<ResultTable> {
    let b0 = p.b0.unwrap_or_else(|| p.b_grid.iter().cloned().fold(0.0, f64::max));
    let report =
        caccioppoli_probe(measure, grid, p.count, (p.e[0], p.e[1]), &p.b_grid, b0, tol)?;
    let mut rows = Vec::with_capacity(report.eigenvalues.len() * report.b_grid.len());
    for (i, &lambda) in report.eigenvalues.iter().enumerate() {
        for (j, &b) in report.b_grid.iter().enumerate() {
            rows.push(vec![i as f64, lambda, b, report.ratios[i][j]]);
        }
    }
    let mut table = ResultTable::new(
        "cacc",
        &[Col::int("k"), Col::float("lambda"), Col::float("b"), Col::float("ratio")],
        rows,
    )?;
    table.meta("c_est", report.c_est);
    table.meta("flagged", report.flagged.len());
    table.meta("e", format!("[{}, {}]", p.e[0], p.e[1]));
    Ok(table)
}

fn kato(measure: &SignedMeasure1D, alphas: &[f64], tol: &Tolerances) -> Result<ResultTable> {
    let constants = alphas
        .par_iter()
        .map(|&a| kato_constant(measure, a, tol))
        .collect::<Result<Vec<f64>>>()?;
    let report = KatoReport::classify(alphas.to_vec(), constants, tol.kato_threshold)?;
    let rows = report
        .alphas
        .iter()
        .zip(&report.constants)
        .map(|(&a, &c)| vec![a, c])
        .collect();
    let mut table =
        ResultTable::new("kato", &[Col::float("alpha"), Col::float("c_alpha")], rows)?;
    table.meta("c_kato", report.c_kato);
    table.meta("nonincreasing", report.nonincreasing);
    table.meta(
        "evidence",
        match report.evidence {
            KatoEvidence::Kato => "kato",
            KatoEvidence::ExtendedOnly => "extended_only",
        },
    );
    if let Some(s) = report.decay_exponent {
        table.meta("decay_exponent", s);
    }
    Ok(table)
}

fn weyl(
    grid: &Grid1D,
    measure: &SignedMeasure1D,
    p: &super::config::WeylParams,
    tol: &Tolerances,
) -> Result<ResultTable> {
    let form = assemble_schrodinger_form(grid, measure)?;
    let pairs = eig_smallest(&form, p.count, tol)?;
    let mut rows = Vec::with_capacity(pairs.len() + p.probes.len());
    for pair in &pairs {
        let r = weyl_residual(&form, pair.lambda, &pair.vector)?;
        rows.push(vec![r.lambda, r.residual, r.distance_bound, 1.0]);
    }
    let trial = deterministic_unit_vector(form.dim(), WEYL_PROBE_SEED);
    for &lambda in &p.probes {
        let r = weyl_residual(&form, lambda, &trial)?;
        rows.push(vec![r.lambda, r.residual, r.distance_bound, 0.0]);
    }
    let mut table = ResultTable::new(
        "weyl",
        &[
            Col::float("lambda"),
            Col::float("residual"),
            Col::float("distance_bound"),
            Col::int("eigenpair"),
        ],
        rows,
    )?;
    table.meta("dim", form.dim());
    table.meta("probe_seed", WEYL_PROBE_SEED);
    Ok(table)
}

fn capacity_rows(
    grid: &Grid1D,
    measure: &SignedMeasure1D,
    targets: &[[f64; 2]],
) -> Result<ResultTable> {
    let form = assemble_schrodinger_form(grid, measure)?;
    let dof_start = grid.dof_nodes().start;
    let mut rows = Vec::with_capacity(targets.len());
    for &[lo, hi] in targets {
        let target: Vec<usize> = grid
            .dof_nodes()
            .filter(|&i| {
                let x = grid.node(i);
                lo <= x && x <= hi
            })
            .map(|i| i - dof_start)
            .collect();
        if target.is_empty() {
            return Err(Error::domain(format!(
                "capacity target [{lo}, {hi}] contains no grid node"
            )));
        }
        let report = capacity(&form, &target)?;
        rows.push(vec![lo, hi, report.capacity]);
    }
    let mut table = ResultTable::new(
        "capacity",
        &[Col::float("lo"), Col::float("hi"), Col::float("capacity")],
        rows,
    )?;
    table.meta("dim", form.dim());
    Ok(table)
}

fn format_list(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| format!("{x:.6e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn format_pairs(xs: &[(f64, f64)]) -> String {
    let parts: Vec<String> =
        xs.iter().map(|(a, b)| format!("[{a:.6e}, {b:.6e}]")).collect();
    format!("[{}]", parts.join(", "))
}
