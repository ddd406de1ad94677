use std::f64::consts::PI;
use std::sync::Arc;

use fracrd_core::rd::{
    oracle_field, solve_field, InitialCondition, RdProblem, SolveOptions, Source, SpectralGrid, TimeOperator,
};

fn gaussian(width: f64, shift: f64) -> InitialCondition {
    InitialCondition::Sampled(Arc::new(move |x: f64| (-((x - shift) / width).powi(2)).exp()))
}

fn triple(alpha: f64, beta: f64, gamma: f64, a: f64, b: f64) -> TimeOperator {
    TimeOperator::Triple { alpha, beta, gamma, a, b }
}

#[test]
fn fractional_diffusion_matches_oracle_assembly() {
    let p = RdProblem::fundamental(triple(0.8, 0.5, 0.5, 0.0, 0.0), 1.6, 1.0, 0.0);
    let grid = SpectralGrid::new(10.0, 64).unwrap();
    let series = solve_field(&p, &grid, &[1.0], &SolveOptions::default()).unwrap();
    let oracle = oracle_field(&p, &grid, &[1.0], 4000).unwrap();
    assert!(series.converged());
    let series = series.with_oracle(&oracle).unwrap();
    let delta = series.oracle_delta.as_ref().unwrap()[0];
    assert!(delta < 1e-4, "max-norm difference {delta}");
}

#[test]
fn mass_is_conserved_without_reaction() {
    let grid = SpectralGrid::new(20.0, 256).unwrap();
    let p = RdProblem::fundamental(triple(0.9, 0.3, 0.6, 0.4, 0.2), 1.8, 0.7, 0.0);
    let times = [0.2, 0.7, 1.5];
    let table = solve_field(&p, &grid, &times, &SolveOptions::default()).unwrap();
    for m in 0..times.len() {
        assert!((table.mass(m) - 1.0).abs() < 1e-8, "t = {}: {}", times[m], table.mass(m));
    }
}

#[test]
fn three_term_and_multi_term_families_agree() {
    let grid = SpectralGrid::new(12.0, 128).unwrap();
    let mut p = RdProblem::fundamental(triple(0.95, 0.35, 0.6, 0.3, 0.4), 1.5, 0.9, 0.2);
    p.initial = gaussian(1.0, 0.5);
    let a = solve_field(&p, &grid, &[0.3, 0.8], &SolveOptions::default()).unwrap();
    p.time = TimeOperator::General(vec![(1.0, 0.95), (0.4, 0.6), (0.3, 0.35)]);
    let b = solve_field(&p, &grid, &[0.3, 0.8], &SolveOptions::default()).unwrap();
    assert!(a.converged() && b.converged());
    for d in a.max_abs_difference(&b).unwrap() {
        assert!(d < 1e-10, "{d}");
    }
}

#[test]
fn realness_of_sampled_data() {
    let grid = SpectralGrid::new(10.0, 128).unwrap();
    let mut p = RdProblem::fundamental(triple(0.7, 0.2, 0.4, 0.5, 0.5), 1.2, 1.0, 0.3);
    p.initial = gaussian(1.5, -1.0);
    let table = solve_field(&p, &grid, &[0.5], &SolveOptions::default()).unwrap();
    let d = &table.diagnostics[0];
    assert!(d.imaginary_residue <= 1e-10 * d.peak, "{} vs {}", d.imaginary_residue, d.peak);
}

#[test]
fn superposition_in_data_and_source() {
    let grid = SpectralGrid::new(10.0, 64).unwrap();
    let op = TimeOperator::General(vec![(1.0, 0.75), (0.5, 0.25)]);
    let f1 = |x: f64| (-x * x).exp();
    let f2 = |x: f64| 0.5 * (-(x - 1.0).powi(2)).exp();
    let phi1 = |x: f64, t: f64| (-(x * x) / 2.0).exp() * t;
    let phi2 = |x: f64, t: f64| (-(x + 1.0).powi(2)).exp() * (1.0 - t).cos();
    let build = |f: Arc<dyn Fn(f64) -> f64 + Send + Sync>, phi: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>| RdProblem {
        time: op.clone(),
        space_order: 2.0,
        diffusion: 1.0,
        reaction: 0.1,
        initial: InitialCondition::Sampled(f),
        source: Some(Source::Sampled(phi)),
    };
    let opts = SolveOptions::default();
    let t = [0.6];
    let one = solve_field(&build(Arc::new(f1), Arc::new(phi1)), &grid, &t, &opts).unwrap();
    let two = solve_field(&build(Arc::new(f2), Arc::new(phi2)), &grid, &t, &opts).unwrap();
    let both = solve_field(
        &build(Arc::new(move |x| f1(x) + f2(x)), Arc::new(move |x, t| phi1(x, t) + phi2(x, t))),
        &grid,
        &t,
        &opts,
    )
    .unwrap();
    let worst = (0..grid.mode_count())
        .map(|i| (both.values[0][i] - one.values[0][i] - two.values[0][i]).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-10, "{worst}");
}

#[test]
fn spectral_self_convergence() {
    let mut p = RdProblem::fundamental(triple(0.85, 0.4, 0.6, 0.3, 0.2), 2.0, 1.0, 0.0);
    p.initial = gaussian(1.0, 0.0);
    let coarse = SpectralGrid::new(16.0, 128).unwrap();
    let fine = SpectralGrid::new(16.0, 256).unwrap();
    let a = solve_field(&p, &coarse, &[0.5], &SolveOptions::default()).unwrap();
    let b = solve_field(&p, &fine, &[0.5], &SolveOptions::default()).unwrap();
    // node i of the coarse grid is node 2i of the fine one
    let worst = (0..coarse.mode_count())
        .map(|i| (a.values[0][i] - b.values[0][2 * i]).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-8, "{worst}");
}

#[test]
fn output_is_independent_of_thread_count() {
    let grid = SpectralGrid::new(10.0, 128).unwrap();
    let mut p = RdProblem::fundamental(triple(0.9, 0.5, 0.7, 0.5, 0.5), 1.5, 1.0, 0.25);
    p.initial = gaussian(1.0, 0.3);
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| solve_field(&p, &grid, &[0.4, 0.9], &SolveOptions::default()).unwrap())
    };
    let a = run(1);
    let b = run(4);
    for (x, y) in a.values.iter().flatten().zip(b.values.iter().flatten()) {
        assert_eq!(x.to_bits(), y.to_bits());
    }
}

#[test]
fn heat_kernel_reproduced_by_general_family() {
    let grid = SpectralGrid::new(20.0, 1024).unwrap();
    let p = RdProblem::fundamental(TimeOperator::General(vec![(1.0, 1.0)]), 2.0, 1.0, 0.0);
    let table = solve_field(&p, &grid, &[0.25], &SolveOptions::default()).unwrap();
    let worst = grid
        .nodes()
        .iter()
        .zip(&table.values[0])
        .map(|(&x, &v)| (v - (-x * x).exp() / PI.sqrt()).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-6, "{worst}");
}
