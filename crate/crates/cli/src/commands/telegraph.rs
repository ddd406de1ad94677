use fracrd_core::rd::{
    oracle_field, telegraph_mode_with_form, telegraph_solution_with_form, RdProblem, SpectralGrid, TelegraphForm, TelegraphParams,
    TimeOperator,
};
use rayon::prelude::*;

use super::solve::{field_outcome, with_threads};
use crate::error::{config, CliError};
use crate::options::{options, overlay, positive, times, Toggle};
use crate::output::Outcome;

options!(
    /// Fundamental solution of D^{2α}N + a D^αN = ν²N_xx + ξ²N with Dirac data.
    TelegraphArgs {
        /// classical: α = 1, a = 1, ν = 1, ξ = 0 on L = 20, N = 256.
        preset: String,
        /// Fractional order α in (0, 1] [default: 1].
        alpha: f64,
        /// Damping a [default: 1].
        damping: f64,
        /// ν [default: 1].
        nu: f64,
        /// ξ [default: 0].
        xi: f64,
        /// weighted or root-difference [default: weighted].
        form: String,
        /// [default: 20].
        half_width: f64,
        /// [default: 256].
        modes: usize,
        /// [default: 1].
        #[arg(value_delimiter = ',')]
        times: Vec<f64>,
        /// Mittag-Leffler tolerance [default: 1e-13].
        tol: f64,
        /// Fractional ODE oracle per mode [default: off].
        #[arg(value_enum)]
        oracle: Toggle,
        /// [default: 4000].
        oracle_steps: usize,
        /// [default: 1e-4].
        oracle_tol: f64,
        threads: usize,
    }
);

/// u'' + a u' + c u = 0 with u(0) = 1, u'(0) = 0, in closed form.
pub fn damped_oscillator(a: f64, c: f64, t: f64) -> f64 {
    let h = a / 2.0;
    let disc = h * h - c;
    let decay = (-h * t).exp();
    if disc > 0.0 {
        let r = disc.sqrt();
        // cosh + (h/r) sinh, written to stay finite as r → 0
        decay * ((r * t).cosh() + h * t * sinhc(r * t))
    } else {
        let w = (-disc).sqrt();
        decay * ((w * t).cos() + h * t * sinc(w * t))
    }
}

fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 { 1.0 + x * x / 6.0 } else { x.sinh() / x }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 { 1.0 - x * x / 6.0 } else { x.sin() / x }
}

pub fn run(raw: &TelegraphArgs) -> Result<Outcome, CliError> {
    let o = match raw.preset.as_deref() {
        None => raw.clone(),
        Some("classical") => {
            let base = TelegraphArgs {
                alpha: Some(1.0),
                damping: Some(1.0),
                nu: Some(1.0),
                xi: Some(0.0),
                half_width: Some(20.0),
                modes: Some(256),
                times: Some(vec![0.5, 1.0, 2.0]),
                ..Default::default()
            };
            overlay(&base, raw)?
        }
        Some(other) => return Err(config(format!("unknown preset `{other}` (classical)"))),
    };
    let params = TelegraphParams {
        damping: o.damping.unwrap_or(1.0),
        nu: o.nu.unwrap_or(1.0),
        xi: o.xi.unwrap_or(0.0),
        alpha: o.alpha.unwrap_or(1.0),
    };
    params.validate().map_err(|e| config(e.to_string()))?;
    let form_name = o.form.clone().unwrap_or_else(|| "weighted".into());
    let form = match form_name.as_str() {
        "weighted" => TelegraphForm::Weighted,
        "root-difference" => TelegraphForm::RootDifference,
        _ => return Err(config(format!("unknown form `{form_name}` (weighted, root-difference)"))),
    };
    let half_width = o.half_width.unwrap_or(20.0);
    let modes = o.modes.unwrap_or(256);
    let grid = SpectralGrid::new(half_width, modes).map_err(|e| config(e.to_string()))?;
    let ts = times(&o.times, &[1.0])?;
    let tol = o.tol.unwrap_or(1e-13);
    if !(1e-15..=1e-3).contains(&tol) {
        return Err(config(format!("`tol` must lie in [1e-15, 1e-3], got {tol}")));
    }
    let oracle = if o.oracle.unwrap_or(Toggle::Off) == Toggle::On {
        let steps = o.oracle_steps.unwrap_or(4000);
        if steps < 16 || steps % 2 != 0 {
            return Err(config(format!("`oracle-steps` must be even and at least 16, got {steps}")));
        }
        Some((steps, positive(o.oracle_tol.unwrap_or(1e-4), "oracle-tol")?))
    } else {
        None
    };
    if o.threads == Some(0) {
        return Err(config("`threads` must be positive"));
    }

    let numerical = |e: fracrd_core::rd::RdError| CliError::Numerical(e.to_string());
    let (sol, classical) = with_threads(o.threads, || -> Result<_, CliError> {
        let mut sol = telegraph_solution_with_form(&params, &grid, &ts, tol, form).map_err(numerical)?;
        if let Some((steps, _)) = oracle {
            let problem = RdProblem::fundamental(
                TimeOperator::Triple {
                    alpha: 2.0 * params.alpha,
                    beta: params.alpha,
                    gamma: params.alpha,
                    a: params.damping,
                    b: 0.0,
                },
                2.0,
                params.nu * params.nu,
                params.xi * params.xi,
            );
            let reference = oracle_field(&problem, &grid, &ts, steps).map_err(numerical)?;
            sol = sol.with_oracle(&reference).map_err(numerical)?;
        }
        // per-mode comparison with the damped oscillator when α = 1
        let classical = (params.alpha == 1.0).then(|| {
            let ks = grid.distinct_magnitudes();
            ts.par_iter()
                .flat_map(|&t| ks.par_iter().map(move |&k| (t, k)))
                .map(|(t, k)| {
                    let exact = damped_oscillator(params.damping, params.mode_constant(k), t);
                    telegraph_mode_with_form(&params, k, t, tol, form)
                        .map_or(f64::INFINITY, |m| (m.value - exact).abs() / exact.abs().max(1.0))
                })
                .reduce(|| 0.0, f64::max)
        });
        Ok((sol, classical))
    })??;

    let mut meta: Vec<(String, String)> = vec![("command".into(), "telegraph".into())];
    let mut echo = |k: &str, v: String| meta.push((k.to_string(), v));
    echo("preset", o.preset.clone().unwrap_or_else(|| "none".into()));
    echo("alpha", params.alpha.to_string());
    echo("damping", params.damping.to_string());
    echo("nu", params.nu.to_string());
    echo("xi", params.xi.to_string());
    echo("form", form_name);
    echo("half_width", half_width.to_string());
    echo("modes", modes.to_string());
    echo("times", ts.iter().map(f64::to_string).collect::<Vec<_>>().join(" "));
    echo("tol", tol.to_string());
    match oracle {
        Some((steps, otol)) => {
            echo("oracle", "on".into());
            echo("oracle_steps", steps.to_string());
            echo("oracle_tol", otol.to_string());
        }
        None => echo("oracle", "off".into()),
    }
    let mut out = field_outcome(&sol, meta, oracle.map(|(_, t)| t));
    if let Some(d) = classical {
        out.table.summarize("classical_mode_max_delta", d);
    }
    Ok(out)
}
