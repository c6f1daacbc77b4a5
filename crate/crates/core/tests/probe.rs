//! Scratch measurements for pinning tolerances; not part of the suite.

use std::f64::consts::PI;
use std::time::Instant;

use formlab::forms::{
    assemble_schrodinger_form, capacity, irreducibility, weyl_residual, Carrier, DiscreteForm,
};
use formlab::graphs::{discretize_graph_form, kirchhoff_spectrum, MetricGraph};
use formlab::lab::{
    ap_check, ap_threshold, caccioppoli_probe, gap_via_gst, kronig_penney_bands,
    shell_bound_state,
};
use formlab::linalg::SparseSym;
use formlab::solve1d::{eig_smallest, shnol_scan};
use formlab::{Density, Grid1D, SignedMeasure1D, Tolerances};

fn tols() -> Tolerances {
    Tolerances::default()
}

fn rng(seed: u64) -> impl FnMut() -> f64 {
    let mut state = seed;
    move || {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z = z ^ (z >> 31);
        (z >> 11) as f64 / (1u64 << 53) as f64
    }
}

fn double_well(total: usize, barrier: usize, height: f64) -> DiscreteForm {
    let n = total;
    let lo = (n - barrier) / 2;
    let hi = lo + barrier;
    let grid = Grid1D::neumann(0.0, 1.0, n).unwrap();
    let mut diag = vec![0.0f64; n];
    let mut upper = Vec::new();
    for i in 0..n - 1 {
        diag[i] += 0.1;
        diag[i + 1] += 0.1;
        upper.push((i, i + 1, -0.1));
    }
    let kin = SparseSym::from_parts(diag, &upper).unwrap();
    let potential: Vec<f64> =
        (0..n).map(|i| if (lo..hi).contains(&i) { height } else { -0.05 }).collect();
    DiscreteForm::from_parts(kin, potential, vec![1.0; n], Carrier::Interval(grid)).unwrap()
}

#[test]
fn probe_double_well() {
    let sharp = Tolerances { eig_residual: 1e-13, ..Tolerances::default() };
    for barrier in [6usize, 8, 10, 12] {
        let form = double_well(40, barrier, 0.05);
        let (l0, l1, gap) = gap_via_gst(&form, &sharp).unwrap();
        let eig_gap = l1 - l0;
        println!(
            "double well barrier={barrier}: eig_gap={eig_gap:.3e} gap={gap:.3e} rel={:.3e} l0={l0:.6}",
            (gap - eig_gap).abs() / eig_gap
        );
    }
}

#[test]
fn probe_kp_shnol() {
    let t0 = Instant::now();
    let bands = kronig_penney_bands(2.0, 1.0, (0.0, 40.0)).unwrap();
    println!("kp bands in (0,40): {bands:?}");
    let measure = SignedMeasure1D::periodic_atoms(2.0, 1.0, (-201.0, 201.0)).unwrap();
    let report = shnol_scan(&measure, (0.0, 40.0), 4001, 200.0, &tols()).unwrap();
    println!(
        "kp shnol: {} intervals {:?} epsilon {:.3e} elapsed {:?}",
        report.intervals.len(),
        report.intervals,
        report.epsilon,
        t0.elapsed()
    );
    for (i, (det, ora)) in report.intervals.iter().zip(&bands).enumerate() {
        println!(
            "  band {i}: lo diff {:.4} hi diff {:.4}",
            det.0 - ora.0,
            det.1 - ora.1
        );
    }
    let t1 = Instant::now();
    let free = shnol_scan(&SignedMeasure1D::zero(), (-2.0, 4.0), 601, 200.0, &tols()).unwrap();
    println!("free shnol: {:?} elapsed {:?}", free.intervals, t1.elapsed());
}

#[test]
fn probe_richardson() {
    let eigs = |density: Density, a: f64, b: f64, n: usize, k: usize| -> Vec<f64> {
        let grid = Grid1D::dirichlet(a, b, n).unwrap();
        let measure = SignedMeasure1D::new(density, vec![]).unwrap();
        let form = assemble_schrodinger_form(&grid, &measure).unwrap();
        eig_smallest(&form, k, &tols()).unwrap().iter().map(|p| p.lambda).collect()
    };
    let fine = eigs(Density::Zero, 0.0, PI, 4097, 3);
    let coarse = eigs(Density::Zero, 0.0, PI, 2049, 3);
    for (k, target) in [1.0f64, 4.0, 9.0].iter().enumerate() {
        let rich = (4.0 * fine[k] - coarse[k]) / 3.0;
        println!(
            "box k={k}: fine rel {:.2e} richardson rel {:.2e}",
            (fine[k] - target).abs() / target,
            (rich - target).abs() / target
        );
    }
    let fine = eigs(Density::Quadratic, -8.0, 8.0, 4097, 4);
    let coarse = eigs(Density::Quadratic, -8.0, 8.0, 2049, 4);
    for (k, target) in [1.0f64, 3.0, 5.0, 7.0].iter().enumerate() {
        let rich = (4.0 * fine[k] - coarse[k]) / 3.0;
        println!(
            "ho k={k}: fine abs {:.2e} richardson abs {:.2e}",
            (fine[k] - target).abs(),
            (rich - target).abs()
        );
    }
}

#[test]
fn probe_weyl() {
    // Plane wave on growing boxes, h = 1, theta = pi/4.
    let theta = PI / 4.0;
    let lambda = 2.0 - 2.0 * theta.cos();
    let mut last = f64::INFINITY;
    for p in 10..=14u32 {
        let n = 1usize << p;
        let grid = Grid1D::dirichlet(0.0, (n + 1) as f64, n + 2).unwrap();
        let form = assemble_schrodinger_form(&grid, &SignedMeasure1D::zero()).unwrap();
        let u: Vec<f64> = grid.dof_nodes().map(|j| (theta * j as f64).sin()).collect();
        let rep = weyl_residual(&form, lambda, &u).unwrap();
        println!(
            "box 2^{p}: residual {:.4e} ratio {:.4}",
            rep.residual,
            rep.residual / last
        );
        last = rep.residual;
    }

    // Eigenpairs and gap midpoints on the well form, dense oracle.
    let grid = Grid1D::dirichlet(-8.0, 8.0, 257).unwrap();
    let measure =
        SignedMeasure1D::new(Density::Well { depth: 2.0, width: 2.0 }, vec![]).unwrap();
    let form = assemble_schrodinger_form(&grid, &measure).unwrap();
    let sharp = Tolerances { eig_residual: 1e-12, ..Tolerances::default() };
    let pairs = eig_smallest(&form, 5, &sharp).unwrap();
    for (i, p) in pairs.iter().take(2).enumerate() {
        let rep = weyl_residual(&form, p.lambda, &p.vector).unwrap();
        println!("eigenpair {i}: eta {:.3e}", rep.residual);
    }
    let dense = form.symmetrized().to_dense();
    let eig = nalgebra::SymmetricEigen::new(dense);
    let mut all: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    all.sort_by(f64::total_cmp);
    let lambda_max = *all.last().unwrap();
    for j in 0..4 {
        let mid = 0.5 * (pairs[j].lambda + pairs[j + 1].lambda);
        let dist = all.iter().map(|l| (l - mid).abs()).fold(f64::INFINITY, f64::min);
        for (tag, u) in [
            ("eigvec", pairs[j].vector.clone()),
            ("random", formlab::linalg::deterministic_unit_vector(form.dim(), 99)),
        ] {
            let rep = weyl_residual(&form, mid, &u).unwrap();
            let ratio = rep.residual * (lambda_max + rep.shift).sqrt() / dist;
            println!("gap {j} {tag}: eta*sqrt/dist = {ratio:.4}");
        }
    }
}

#[test]
fn probe_ap() {
    let t0 = Instant::now();
    let cases: Vec<(&str, SignedMeasure1D, (f64, f64), (f64, f64), f64)> = vec![
        (
            "oscillator",
            SignedMeasure1D::new(Density::Quadratic, vec![]).unwrap(),
            (-8.0, 8.0),
            (0.0, 2.0),
            1.0,
        ),
        (
            "delta well",
            SignedMeasure1D::from_atoms(vec![(0.0, -2.0)]).unwrap(),
            (-30.0, 30.0),
            (-1.5, -0.5),
            -1.0,
        ),
        (
            "free line",
            SignedMeasure1D::zero(),
            (-30.0, 30.0),
            (-0.5, 0.5),
            0.0,
        ),
    ];
    for (name, measure, window, range, target) in &cases {
        let t1 = Instant::now();
        let star = ap_threshold(measure, *window, *range, 1e-4, &tols()).unwrap();
        let rep = ap_check(measure, star + 0.1, *window, &tols()).unwrap();
        println!(
            "{name}: lambda* {star:.6} (err {:.2e}), +0.1: {:?} swept {} changers {} [{:?}]",
            (star - target).abs(),
            rep.verdict,
            rep.swept,
            rep.sign_changers,
            t1.elapsed()
        );
    }
    println!("ap total {:?}", t0.elapsed());
}

#[test]
fn probe_cacc() {
    let measure = SignedMeasure1D::new(Density::Quadratic, vec![]).unwrap();
    let b_grid = [0.25, 0.5, 1.0];
    let mut last = 0.0f64;
    for n in [2001usize, 4001] {
        let t0 = Instant::now();
        let grid = Grid1D::dirichlet(-8.0, 8.0, n).unwrap();
        let rep = caccioppoli_probe(&measure, &grid, 11, (-1.0, 1.0), &b_grid, 1.0, &tols())
            .unwrap();
        println!(
            "cacc n={n}: c_est {:.6} flagged {} ratio_to_prev {:.4} [{:?}]",
            rep.c_est,
            rep.flagged.len(),
            rep.c_est / last.max(1e-300),
            t0.elapsed()
        );
        last = rep.c_est;
    }
}

#[test]
fn probe_capacity() {
    for n in [6001usize, 12001] {
        let grid = Grid1D::dirichlet(-30.0, 30.0, n).unwrap();
        let form = assemble_schrodinger_form(&grid, &SignedMeasure1D::zero()).unwrap();
        for a in [1.0f64, 2.0] {
            let dof0 = grid.dof_nodes().start;
            let target: Vec<usize> = grid
                .dof_nodes()
                .filter(|&i| grid.node(i).abs() <= a + 1e-12)
                .map(|i| i - dof0)
                .collect();
            let rep = capacity(&form, &target).unwrap();
            println!(
                "capacity n={n} a={a}: {:.8} err {:.2e}",
                rep.capacity,
                (rep.capacity - (2.0 * a + 2.0)).abs()
            );
        }
    }
}

#[test]
fn probe_graphs() {
    let t0 = Instant::now();
    let loop_graph = MetricGraph::new(1, &[(0, 0, 2.0 * PI)]).unwrap();
    let spec = kirchhoff_spectrum(&loop_graph, 9.5, &tols()).unwrap();
    for ge in &spec {
        println!(
            "loop: lambda {:.12} mult {} k-defect {:.2e}",
            ge.lambda,
            ge.multiplicity,
            (ge.lambda.sqrt() - ge.lambda.sqrt().round()).abs()
        );
    }
    println!("loop elapsed {:?}", t0.elapsed());

    let star = MetricGraph::new(4, &[(0, 1, 0.6), (0, 2, 1.0), (0, 3, 1.4)]).unwrap();
    let t1 = Instant::now();
    let sec = kirchhoff_spectrum(&star, 45.0, &tols()).unwrap();
    let flat: Vec<f64> = sec
        .iter()
        .flat_map(|ge| std::iter::repeat(ge.lambda).take(ge.multiplicity))
        .collect();
    println!("star secular: {:?} [{:?}]", &flat[..7.min(flat.len())], t1.elapsed());
    let t2 = Instant::now();
    let form = discretize_graph_form(&star, 1e-3).unwrap();
    let pairs = eig_smallest(&form, 6, &tols()).unwrap();
    for (i, p) in pairs.iter().enumerate() {
        println!("star disc {i}: {:.8} diff {:.2e}", p.lambda, (p.lambda - flat[i]).abs());
    }
    println!("star disc elapsed {:?} dim {}", t2.elapsed(), form.dim());

    let t3 = Instant::now();
    let big = kirchhoff_spectrum(&star, 2500.0, &tols()).unwrap();
    let count: usize = big.iter().map(|ge| ge.multiplicity).sum();
    let weyl = star.total_length() * 50.0 / PI;
    println!(
        "star weyl: count {count} vs {weyl:.2} (slack {}) [{:?}]",
        (count as f64 - weyl).abs(),
        t3.elapsed()
    );
}

#[test]
fn probe_irreducibility_margins() {
    let mut worst_res = f64::INFINITY;
    let mut worst_semi = f64::INFINITY;
    for seed in 0..25u64 {
        let mut r = rng(seed);
        let n = 6 + (r() * 7.0) as usize;
        let mut diag = vec![0.0f64; n];
        let mut upper = Vec::new();
        for i in 0..n - 1 {
            let w = 0.5 + 1.5 * r();
            diag[i] += w;
            diag[i + 1] += w;
            upper.push((i, i + 1, -w));
        }
        let kin = SparseSym::from_parts(diag, &upper).unwrap();
        let potential: Vec<f64> = (0..n).map(|_| r() - 0.3).collect();
        let mass: Vec<f64> = (0..n).map(|_| 0.5 + 1.5 * r()).collect();
        let form = DiscreteForm::from_parts(
            kin,
            potential,
            mass,
            Carrier::Graph { vertex_count: n, chain_of: vec![None; n] },
        )
        .unwrap();
        let rep = irreducibility(&form, 64).unwrap();
        let cert = rep.certificate.unwrap();
        worst_res = worst_res.min(cert.resolvent_min);
        worst_semi = worst_semi.min(cert.semigroup_min);
    }
    println!("irreducible margins: resolvent {worst_res:.3e} semigroup {worst_semi:.3e}");
}

#[test]
fn probe_shell() {
    let lambda = shell_bound_state(0.05, 1.0, 0).unwrap().unwrap();
    let gamma = 0.577_215_664_901_532_9f64;
    let asym = -4.0 * (-2.0 * gamma - 2.0 / 0.05).exp();
    println!("shell alpha=0.05: lambda {lambda:.6e} asym ratio {:.6}", lambda / asym);
    let t0 = Instant::now();
    let grid = Grid1D::dirichlet(0.0, 40.0, 8001).unwrap();
    let sectors =
        formlab::lab::delta_shell_radial(1.0, 1.0, 0, &grid, &tols()).unwrap();
    println!(
        "shell grid alpha=1: negatives {:?} [{:?}]",
        sectors[0].negative_eigenvalues,
        t0.elapsed()
    );
}
