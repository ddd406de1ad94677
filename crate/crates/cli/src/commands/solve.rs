use std::f64::consts::PI;
use std::sync::Arc;

use fracrd_core::inversion::Truncation;
use fracrd_core::rd::{
    green_route, oracle_field, solve_field, GreenOptions, InitialCondition, ModeOptions, RdProblem, SolutionTable, SolveOptions, Source,
    SpectralGrid, TimeOperator,
};
use num_complex::Complex64;

use crate::error::{config, CliError};
use crate::field::{field_table, summarize_field};
use crate::options::{finite, options, overlay, parse_terms, positive, require, times, Toggle};
use crate::output::Outcome;

options!(
    /// Solve the fractional reaction-diffusion problem on a periodic grid.
    SolveArgs {
        /// Starting values: heat (classical heat kernel) or three-order (three fractional orders, Gaussian data).
        preset: String,
        /// Three-term operator D^alpha + a D^beta + b D^gamma.
        alpha: f64,
        beta: f64,
        gamma: f64,
        a: f64,
        b: f64,
        /// General operator as coef:order pairs, e.g. `1:0.9,0.5:0.7`; exclusive with alpha..b.
        terms: String,
        /// Order η of the Riesz operator, symbol |k|^η [default: 2].
        space_order: f64,
        /// ν² [default: 1].
        diffusion: f64,
        /// ξ² [default: 0].
        reaction: f64,
        /// dirac, gaussian or sech [default: gaussian].
        initial: String,
        /// Width w of the initial profile: exp(−(x−x0)²/w²) or sech((x−x0)/w) [default: 1].
        width: f64,
        center: f64,
        /// [default: 1].
        amplitude: f64,
        /// none or gaussian: A exp(−(x−x0)²/w²) exp(−λt) [default: none].
        source: String,
        source_amplitude: f64,
        source_width: f64,
        source_center: f64,
        source_decay: f64,
        /// Half-width L of the periodic box [−L, L) [default: 10].
        half_width: f64,
        /// Grid points N, a power of two [default: 256].
        modes: usize,
        /// Comma-separated positive times [default: 1].
        #[arg(value_delimiter = ',')]
        times: Vec<f64>,
        /// Series tolerance per mode [default: 1e-10].
        tol: f64,
        /// Outer series cap per mode [default: 400].
        max_outer: usize,
        /// Gauss-Legendre nodes of the source convolution [default: 64].
        source_nodes: usize,
        /// spectral or green [default: spectral].
        route: String,
        /// Fractional ODE oracle per mode [default: off].
        #[arg(value_enum)]
        oracle: Toggle,
        /// Oracle steps per solve [default: 4000].
        oracle_steps: usize,
        /// Largest accepted oracle disagreement [default: 1e-4].
        oracle_tol: f64,
        /// Worker threads; output does not depend on it.
        threads: usize,
    }
);

fn preset_defaults(name: &str) -> Result<SolveArgs, CliError> {
    Ok(match name {
        "heat" => SolveArgs {
            alpha: Some(1.0),
            space_order: Some(2.0),
            diffusion: Some(1.0),
            reaction: Some(0.0),
            initial: Some("dirac".into()),
            half_width: Some(20.0),
            modes: Some(1024),
            times: Some(vec![0.1, 0.25, 1.0]),
            ..Default::default()
        },
        "three-order" => SolveArgs {
            terms: Some("1:0.9,0.5:0.7,0.3:0.5".into()),
            space_order: Some(1.5),
            diffusion: Some(1.0),
            reaction: Some(0.1),
            initial: Some("gaussian".into()),
            width: Some(1.0),
            half_width: Some(10.0),
            modes: Some(256),
            times: Some(vec![0.25, 0.5, 1.0]),
            ..Default::default()
        },
        _ => return Err(config(format!("unknown preset `{name}` (heat, three-order)"))),
    })
}

/// Fully validated inputs of one solve.
pub struct SolveSetup {
    pub problem: RdProblem,
    pub grid: SpectralGrid,
    pub times: Vec<f64>,
    pub mode: ModeOptions,
    pub green: bool,
    pub oracle: Option<(usize, f64)>,
    pub threads: Option<usize>,
    pub meta: Vec<(String, String)>,
}

pub fn gaussian_initial(amplitude: f64, width: f64, center: f64) -> InitialCondition {
    InitialCondition::Spectrum {
        spectrum: Arc::new(move |k: f64| {
            let mag = amplitude * width * PI.sqrt() * (-k * k * width * width / 4.0).exp();
            Complex64::from_polar(mag, k * center)
        }),
        profile: Some(Arc::new(move |x: f64| amplitude * (-((x - center) / width).powi(2)).exp())),
    }
}

fn sech_initial(amplitude: f64, width: f64, center: f64) -> InitialCondition {
    InitialCondition::Spectrum {
        spectrum: Arc::new(move |k: f64| {
            let mag = amplitude * PI * width / (PI * k * width / 2.0).cosh();
            Complex64::from_polar(mag, k * center)
        }),
        profile: Some(Arc::new(move |x: f64| amplitude / ((x - center) / width).cosh())),
    }
}

pub fn setup(raw: &SolveArgs) -> Result<SolveSetup, CliError> {
    let o = match &raw.preset {
        Some(name) => overlay(&preset_defaults(name)?, raw)?,
        None => raw.clone(),
    };
    let mut meta: Vec<(String, String)> = vec![("command".into(), "solve".into())];
    let mut echo = |k: &str, v: String| meta.push((k.to_string(), v));
    echo("preset", o.preset.clone().unwrap_or_else(|| "none".into()));

    let time = match &o.terms {
        Some(text) => {
            if o.alpha.is_some() || o.beta.is_some() || o.gamma.is_some() || o.a.is_some() || o.b.is_some() {
                return Err(config("give the three-term operator (alpha, beta, gamma, a, b) or `terms`, not both"));
            }
            let terms = parse_terms(text)?;
            let shown: Vec<String> = terms.iter().map(|(c, e)| format!("{c}:{e}")).collect();
            echo("terms", shown.join(" "));
            TimeOperator::General(terms)
        }
        None => {
            let alpha = require(&o.alpha, "alpha")?;
            let (a, b) = (o.a.unwrap_or(0.0), o.b.unwrap_or(0.0));
            // unused orders only need to be admissible
            let beta = o.beta.unwrap_or(if a == 0.0 { alpha } else { f64::NAN });
            let gamma = o.gamma.unwrap_or(if b == 0.0 { alpha } else { f64::NAN });
            if beta.is_nan() || gamma.is_nan() {
                return Err(config("a nonzero `a` needs `beta` and a nonzero `b` needs `gamma`"));
            }
            for (k, v) in [("alpha", alpha), ("beta", beta), ("gamma", gamma), ("a", a), ("b", b)] {
                echo(k, v.to_string());
            }
            TimeOperator::Triple { alpha, beta, gamma, a, b }
        }
    };
    let space_order = o.space_order.unwrap_or(2.0);
    let diffusion = o.diffusion.unwrap_or(1.0);
    let reaction = o.reaction.unwrap_or(0.0);
    echo("space_order", space_order.to_string());
    echo("diffusion", diffusion.to_string());
    echo("reaction", reaction.to_string());

    let kind = o.initial.clone().unwrap_or_else(|| "gaussian".into());
    let amplitude = finite(o.amplitude.unwrap_or(1.0), "amplitude")?;
    let width = positive(o.width.unwrap_or(1.0), "width")?;
    let center = finite(o.center.unwrap_or(0.0), "center")?;
    let initial = match kind.as_str() {
        "dirac" => InitialCondition::DiracDelta,
        "gaussian" => gaussian_initial(amplitude, width, center),
        "sech" => sech_initial(amplitude, width, center),
        _ => return Err(config(format!("unknown initial condition `{kind}` (dirac, gaussian, sech)"))),
    };
    echo("initial", kind.clone());
    if kind != "dirac" {
        echo("amplitude", amplitude.to_string());
        echo("width", width.to_string());
        echo("center", center.to_string());
    }

    let source_kind = o.source.clone().unwrap_or_else(|| "none".into());
    let source = match source_kind.as_str() {
        "none" => None,
        "gaussian" => {
            let amp = finite(o.source_amplitude.unwrap_or(1.0), "source-amplitude")?;
            let w = positive(o.source_width.unwrap_or(1.0), "source-width")?;
            let x0 = finite(o.source_center.unwrap_or(0.0), "source-center")?;
            let decay = finite(o.source_decay.unwrap_or(0.0), "source-decay")?;
            for (k, v) in [("source_amplitude", amp), ("source_width", w), ("source_center", x0), ("source_decay", decay)] {
                echo(k, v.to_string());
            }
            Some(Source::Sampled(Arc::new(move |x: f64, t: f64| {
                amp * (-((x - x0) / w).powi(2)).exp() * (-decay * t).exp()
            })))
        }
        _ => return Err(config(format!("unknown source `{source_kind}` (none, gaussian)"))),
    };
    echo("source", source_kind);

    let problem = RdProblem {
        time,
        space_order,
        diffusion,
        reaction,
        initial,
        source,
    };
    problem.validate().map_err(|e| config(e.to_string()))?;

    let half_width = o.half_width.unwrap_or(10.0);
    let modes = o.modes.unwrap_or(256);
    let grid = SpectralGrid::new(half_width, modes).map_err(|e| config(e.to_string()))?;
    echo("half_width", half_width.to_string());
    echo("modes", modes.to_string());
    let ts = times(&o.times, &[1.0])?;
    let shown: Vec<String> = ts.iter().map(f64::to_string).collect();
    echo("times", shown.join(" "));

    let route = o.route.clone().unwrap_or_else(|| "spectral".into());
    let green = match route.as_str() {
        "spectral" => false,
        "green" => true,
        _ => return Err(config(format!("unknown route `{route}` (spectral, green)"))),
    };
    let mode = ModeOptions {
        trunc: Truncation {
            tol: o.tol.unwrap_or(1e-10),
            max_outer: o.max_outer.unwrap_or(400),
            ..Truncation::default()
        },
        source_nodes: o.source_nodes.unwrap_or(64),
        source_doubling: !green,
    };
    mode.validate().map_err(|e| config(e.to_string()))?;
    echo("route", route);
    echo("tol", mode.trunc.tol.to_string());
    echo("max_outer", mode.trunc.max_outer.to_string());
    if problem.source.is_some() {
        echo("source_nodes", mode.source_nodes.to_string());
    }

    let oracle = if o.oracle.unwrap_or(Toggle::Off) == Toggle::On {
        if problem.source.is_some() {
            return Err(config("the ODE oracle handles source-free problems only"));
        }
        let steps = o.oracle_steps.unwrap_or(4000);
        if steps < 16 || steps % 2 != 0 {
            return Err(config(format!("`oracle-steps` must be even and at least 16, got {steps}")));
        }
        let tol = positive(o.oracle_tol.unwrap_or(1e-4), "oracle-tol")?;
        echo("oracle", "on".into());
        echo("oracle_steps", steps.to_string());
        echo("oracle_tol", tol.to_string());
        Some((steps, tol))
    } else {
        echo("oracle", "off".into());
        None
    };
    if green && matches!(&problem.initial, InitialCondition::Spectrum { profile: None, .. }) {
        return Err(config("the Green route needs the initial profile in x"));
    }
    if o.threads == Some(0) {
        return Err(config("`threads` must be positive"));
    }
    Ok(SolveSetup {
        problem,
        grid,
        times: ts,
        mode,
        green,
        oracle,
        threads: o.threads,
        meta,
    })
}

/// Runs `f` on a pool of the requested size, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| config(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

pub fn compute(s: &SolveSetup) -> Result<SolutionTable, CliError> {
    let numerical = |e: fracrd_core::rd::RdError| CliError::Numerical(e.to_string());
    with_threads(s.threads, || {
        let sol = if s.green {
            let opts = GreenOptions {
                mode: s.mode,
                ..GreenOptions::default()
            };
            green_route(&s.problem, &s.grid, &s.times, &opts)
        } else {
            let opts = SolveOptions {
                mode: s.mode,
                ..SolveOptions::default()
            };
            solve_field(&s.problem, &s.grid, &s.times, &opts)
        }
        .map_err(numerical)?;
        match s.oracle {
            None => Ok(sol),
            Some((steps, _)) => {
                let reference = oracle_field(&s.problem, &s.grid, &s.times, steps).map_err(numerical)?;
                sol.with_oracle(&reference).map_err(numerical)
            }
        }
    })?
}

/// max |N − G| against the heat kernel when the problem is a classical heat
/// equation with Dirac data.
fn heat_reference_error(s: &SolveSetup, sol: &SolutionTable) -> Option<f64> {
    let p = &s.problem;
    let terms = p.time.normalized().ok()?;
    let [(coef, order)] = terms[..] else { return None };
    if order != 1.0 || p.space_order != 2.0 || p.reaction != 0.0 || p.source.is_some() || !matches!(p.initial, InitialCondition::DiracDelta) {
        return None;
    }
    let d = p.diffusion / coef;
    let nodes = s.grid.nodes();
    let mut worst = 0.0f64;
    for (&t, values) in sol.times.iter().zip(&sol.values) {
        for (&x, &v) in nodes.iter().zip(values) {
            let g = (-x * x / (4.0 * d * t)).exp() / (4.0 * PI * d * t).sqrt();
            worst = worst.max((v - g).abs());
        }
    }
    Some(worst)
}

pub fn field_outcome(sol: &SolutionTable, meta: Vec<(String, String)>, oracle_tol: Option<f64>) -> Outcome {
    let mut table = field_table(sol);
    table.meta = meta;
    summarize_field(&mut table, sol);
    let mut out = Outcome::new(table);
    for (m, d) in sol.diagnostics.iter().enumerate() {
        if !d.converged {
            let bad = d.modes.iter().filter(|m| !m.converged).count();
            out.flags.push(format!("t = {}: {bad} modes not converged", sol.times[m]));
        }
        if d.grid_too_coarse {
            out.notes.push(format!(
                "t = {}: spectrum at the Nyquist mode is {:e} of its peak; the grid is too coarse",
                sol.times[m], d.nyquist_ratio
            ));
        }
    }
    if let (Some(deltas), Some(tol)) = (&sol.oracle_delta, oracle_tol) {
        for (&t, &d) in sol.times.iter().zip(deltas) {
            if !(d <= tol) {
                out.flags.push(format!("t = {t}: oracle disagreement {d:e} above {tol:e}"));
            }
        }
    }
    out
}

pub fn run(o: &SolveArgs) -> Result<Outcome, CliError> {
    let s = setup(o)?;
    let sol = compute(&s)?;
    let mut out = field_outcome(&sol, s.meta.clone(), s.oracle.map(|(_, tol)| tol));
    if let Some(e) = heat_reference_error(&s, &sol) {
        out.table.summarize("heat_kernel_max_abs_error", e);
    }
    Ok(out)
}

