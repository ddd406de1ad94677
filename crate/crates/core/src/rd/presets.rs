//! Named special cases. Each one only fills in an `RdProblem`; the general
//! path does all the work, so a preset can never disagree with it.

use super::problem::{InitialCondition, RdProblem, Source, TimeOperator};

#[derive(Debug, Clone)]
pub enum Preset {
    /// D^{1/2} + a D^{1/2} + b D^{1/2} in time and space order 1/2.
    HalfOrders {
        a: f64,
        b: f64,
        diffusion: f64,
        reaction: f64,
        initial: InitialCondition,
        source: Option<Source>,
    },
    /// Dirac initial data and no source.
    Fundamental {
        time: TimeOperator,
        space_order: f64,
        diffusion: f64,
        reaction: f64,
    },
    /// D^α + a D^β: the three-term operator with b = 0.
    TwoTerm {
        alpha: f64,
        beta: f64,
        a: f64,
        space_order: f64,
        diffusion: f64,
        reaction: f64,
        initial: InitialCondition,
        source: Option<Source>,
    },
    /// D^{2α} + a D^α with the Laplacian and Dirac data, optionally forced.
    ForcedTelegraph {
        alpha: f64,
        a: f64,
        diffusion: f64,
        reaction: f64,
        source: Option<Source>,
    },
    /// Σ_j a_j D^{1/2} with space order 1/2.
    GeneralHalfOrders {
        coefficients: Vec<f64>,
        diffusion: f64,
        reaction: f64,
        initial: InitialCondition,
        source: Option<Source>,
    },
    /// General operator without the reaction term; `terms` holds (a_j, α_j).
    GeneralNoReaction {
        terms: Vec<(f64, f64)>,
        space_order: f64,
        diffusion: f64,
        initial: InitialCondition,
        source: Option<Source>,
    },
}

pub fn preset_problem(preset: Preset) -> RdProblem {
    match preset {
        Preset::HalfOrders {
            a,
            b,
            diffusion,
            reaction,
            initial,
            source,
        } => RdProblem {
            time: TimeOperator::Triple {
                alpha: 0.5,
                beta: 0.5,
                gamma: 0.5,
                a,
                b,
            },
            space_order: 0.5,
            diffusion,
            reaction,
            initial,
            source,
        },
        Preset::Fundamental {
            time,
            space_order,
            diffusion,
            reaction,
        } => RdProblem::fundamental(time, space_order, diffusion, reaction),
        Preset::TwoTerm {
            alpha,
            beta,
            a,
            space_order,
            diffusion,
            reaction,
            initial,
            source,
        } => RdProblem {
            time: TimeOperator::Triple {
                alpha,
                beta,
                gamma: beta,
                a,
                b: 0.0,
            },
            space_order,
            diffusion,
            reaction,
            initial,
            source,
        },
        Preset::ForcedTelegraph {
            alpha,
            a,
            diffusion,
            reaction,
            source,
        } => RdProblem {
            time: TimeOperator::Triple {
                alpha: 2.0 * alpha,
                beta: alpha,
                gamma: alpha,
                a,
                b: 0.0,
            },
            space_order: 2.0,
            diffusion,
            reaction,
            initial: InitialCondition::DiracDelta,
            source,
        },
        Preset::GeneralHalfOrders {
            coefficients,
            diffusion,
            reaction,
            initial,
            source,
        } => RdProblem {
            time: TimeOperator::General(coefficients.into_iter().map(|a| (a, 0.5)).collect()),
            space_order: 0.5,
            diffusion,
            reaction,
            initial,
            source,
        },
        Preset::GeneralNoReaction {
            terms,
            space_order,
            diffusion,
            initial,
            source,
        } => RdProblem {
            time: TimeOperator::General(terms),
            space_order,
            diffusion,
            reaction: 0.0,
            initial,
            source,
        },
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use num_complex::Complex64;

    use super::*;
    use crate::inversion::invert_two_term;
    use crate::rd::field::{solve_field, SolveOptions};
    use crate::rd::green::{green_route, GreenOptions};
    use crate::rd::grid::SpectralGrid;
    use crate::rd::telegraph::{telegraph_solution, TelegraphParams};

    fn gaussian() -> InitialCondition {
        InitialCondition::Sampled(Arc::new(|x: f64| (-x * x).exp()))
    }

    fn max_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn half_orders_collapse_to_one_relaxation() {
        let grid = SpectralGrid::new(10.0, 128).unwrap();
        let (a, b) = (0.7, 0.3);
        let p = preset_problem(Preset::HalfOrders {
            a,
            b,
            diffusion: 1.0,
            reaction: 0.2,
            initial: gaussian(),
            source: None,
        });
        let single = RdProblem {
            time: TimeOperator::General(vec![(1.0 + a + b, 0.5)]),
            ..p.clone()
        };
        let x = solve_field(&p, &grid, &[0.4, 1.0], &SolveOptions::default()).unwrap();
        let y = solve_field(&single, &grid, &[0.4, 1.0], &SolveOptions::default()).unwrap();
        assert!(x.converged() && y.converged());
        for d in x.max_abs_difference(&y).unwrap() {
            assert!(d < 1e-10, "{d}");
        }
    }

    #[test]
    fn two_term_preset_matches_two_term_inversion() {
        let (alpha, beta, a, t) = (0.85, 0.35, 0.6, 0.7);
        let p = preset_problem(Preset::TwoTerm {
            alpha,
            beta,
            a,
            space_order: 1.5,
            diffusion: 0.8,
            reaction: 0.1,
            initial: InitialCondition::DiracDelta,
            source: None,
        });
        let grid = SpectralGrid::new(8.0, 32).unwrap();
        let table = solve_field(&p, &grid, &[t], &SolveOptions::default()).unwrap();
        let trunc = SolveOptions::default().mode.trunc;
        // rebuild the spectrum from the two-term series and transform it the same way
        let spectrum: Vec<Complex64> = grid
            .wavenumbers()
            .iter()
            .map(|&k| {
                let c = p.mode_constant(k);
                let s1 = invert_two_term(alpha, alpha, beta, a, c, t, &trunc).unwrap().value;
                let s2 = invert_two_term(beta, alpha, beta, a, c, t, &trunc).unwrap().value;
                Complex64::new(s1 + a * s2, 0.0)
            })
            .collect();
        let direct: Vec<f64> = grid.inverse(&spectrum).iter().map(|v| v.re).collect();
        assert!(max_diff(&table.values[0], &direct) < 1e-10);
    }

    #[test]
    fn forced_telegraph_without_source_is_the_telegraph_solution() {
        let (alpha, a, nu, xi) = (0.6, 1.5, 0.8, 0.3);
        let p = preset_problem(Preset::ForcedTelegraph {
            alpha,
            a,
            diffusion: nu * nu,
            reaction: xi * xi,
            source: None,
        });
        let grid = SpectralGrid::new(10.0, 64).unwrap();
        let x = solve_field(&p, &grid, &[0.9], &SolveOptions::default()).unwrap();
        let params = TelegraphParams {
            damping: a,
            nu,
            xi,
            alpha,
        };
        let y = telegraph_solution(&params, &grid, &[0.9], 1e-14).unwrap();
        assert!(x.max_abs_difference(&y).unwrap()[0] < 1e-10);
    }

    #[test]
    fn green_route_matches_spectral_assembly() {
        let grid = SpectralGrid::new(16.0, 256).unwrap();
        let p = preset_problem(Preset::GeneralNoReaction {
            terms: vec![(1.0, 0.8), (0.5, 0.4)],
            space_order: 2.0,
            diffusion: 1.0,
            initial: gaussian(),
            source: None,
        });
        let spectral = solve_field(&p, &grid, &[0.5], &SolveOptions::default()).unwrap();
        let green = green_route(&p, &grid, &[0.5], &GreenOptions::default()).unwrap();
        assert!(green.converged());
        let d = spectral.max_abs_difference(&green).unwrap()[0];
        assert!(d < 1e-5, "{d}");
    }

    #[test]
    fn green_route_with_source() {
        let grid = SpectralGrid::new(8.0, 64).unwrap();
        let phi: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync> = Arc::new(|x: f64, t: f64| (-(x * x)).exp() * (1.0 + t));
        let p = preset_problem(Preset::GeneralNoReaction {
            terms: vec![(1.0, 0.9)],
            space_order: 2.0,
            diffusion: 1.0,
            initial: gaussian(),
            source: Some(Source::Sampled(phi)),
        });
        let opts = GreenOptions {
            mode: crate::rd::mode::ModeOptions {
                source_nodes: 32,
                source_doubling: false,
                ..Default::default()
            },
            ..GreenOptions::default()
        };
        let spectral = solve_field(
            &p,
            &grid,
            &[0.6],
            &SolveOptions {
                mode: opts.mode,
                ..SolveOptions::default()
            },
        )
        .unwrap();
        let green = green_route(&p, &grid, &[0.6], &opts).unwrap();
        let d = spectral.max_abs_difference(&green).unwrap()[0];
        assert!(d < 1e-5, "{d}");
    }
}
