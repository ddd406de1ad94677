use fracrd_core::oracles::{solve_fode, talbot_invert, FodeProblem, FractionalTerm};
use num_complex::Complex64;
use rayon::prelude::*;

use super::ilt::talbot_config;
use super::symbol::SymbolSpec;
use crate::error::{config, CliError};
use crate::options::{finite, options, parse_terms, positive, require, times};
use crate::output::Outcome;
use crate::table::Table;

options!(
    /// Run an oracle on its own: `fode` (product-integration ODE solver) or `talbot` (contour inversion).
    OracleArgs {
        /// fode or talbot.
        kind: String,
        /// fode: Σ coef·D^order as coef:order pairs; talbot: general symbol terms.
        terms: String,
        /// fode: coefficient of u; talbot: constant of the general symbol [default: 0].
        a0: f64,
        /// fode: u(0) [default: 1].
        u0: f64,
        /// fode: u'(0), used when an order exceeds 1 [default: 0].
        u1: f64,
        /// fode: uniform steps on [0, max t] [default: 4000].
        steps: usize,
        /// fode: also solve with half the steps and require agreement to this level.
        self_check_tol: f64,
        /// talbot: three-term symbol.
        rho: f64,
        preset: String,
        alpha: f64,
        beta: f64,
        gamma: f64,
        a: f64,
        b: f64,
        c: f64,
        /// talbot: contour nodes [default: 48].
        talbot_nodes: usize,
        /// talbot: self-check target [default: 1e-8].
        talbot_precision: f64,
        /// [default: 1].
        #[arg(value_delimiter = ',')]
        times: Vec<f64>,
    }
);

fn reject(kind: &str, keys: &[(&str, bool)]) -> Result<(), CliError> {
    match keys.iter().find(|(_, set)| *set) {
        Some((key, _)) => Err(config(format!("`{key}` does not apply to the {kind} oracle"))),
        None => Ok(()),
    }
}

pub fn run(o: &OracleArgs) -> Result<Outcome, CliError> {
    let kind = require(&o.kind, "kind")?;
    let ts = times(&o.times, &[1.0])?;
    match kind.as_str() {
        "fode" => fode(o, &ts),
        "talbot" => talbot(o, &ts),
        _ => Err(config(format!("unknown oracle `{kind}` (fode, talbot)"))),
    }
}

fn fode(o: &OracleArgs, ts: &[f64]) -> Result<Outcome, CliError> {
    reject(
        "fode",
        &[
            ("rho", o.rho.is_some()),
            ("preset", o.preset.is_some()),
            ("alpha", o.alpha.is_some()),
            ("beta", o.beta.is_some()),
            ("gamma", o.gamma.is_some()),
            ("a", o.a.is_some()),
            ("b", o.b.is_some()),
            ("c", o.c.is_some()),
            ("talbot-nodes", o.talbot_nodes.is_some()),
            ("talbot-precision", o.talbot_precision.is_some()),
        ],
    )?;
    let terms = parse_terms(&require(&o.terms, "terms")?)?;
    let zeroth = finite(o.a0.unwrap_or(0.0), "a0")?;
    let u0 = finite(o.u0.unwrap_or(1.0), "u0")?;
    let u1 = finite(o.u1.unwrap_or(0.0), "u1")?;
    let horizon = ts.iter().copied().fold(0.0, f64::max);
    let mut problem = FodeProblem::homogeneous(
        terms
            .iter()
            .map(|&(coef, order)| FractionalTerm {
                order,
                coef: Complex64::new(coef, 0.0),
            })
            .collect(),
        Complex64::new(zeroth, 0.0),
        Complex64::new(u0, 0.0),
        horizon,
        o.steps.unwrap_or(4000),
    );
    problem.initial_slope = Complex64::new(u1, 0.0);
    problem.self_check_tol = o.self_check_tol.map(|t| positive(t, "self-check-tol")).transpose()?;
    problem.validate().map_err(|e| config(e.to_string()))?;

    let sol = solve_fode(&problem).map_err(|e| CliError::Numerical(e.to_string()))?;
    let mut table = Table::new(&["t", "u"]);
    table.meta("command", "oracle");
    table.meta("kind", "fode");
    let shown: Vec<String> = terms.iter().map(|(c, e)| format!("{c}:{e}")).collect();
    table.meta("terms", shown.join(" "));
    table.meta("a0", zeroth);
    table.meta("u0", u0);
    table.meta("u1", u1);
    table.meta("steps", problem.steps);
    table.meta("horizon", horizon);
    for &t in ts {
        table.push(vec![t.into(), sol.at(t).re.into()]);
    }
    if let Some(d) = sol.self_check_difference {
        table.summarize("self_check_difference", d);
    }
    Ok(Outcome::new(table))
}

fn talbot(o: &OracleArgs, ts: &[f64]) -> Result<Outcome, CliError> {
    reject(
        "talbot",
        &[
            ("u0", o.u0.is_some()),
            ("u1", o.u1.is_some()),
            ("steps", o.steps.is_some()),
            ("self-check-tol", o.self_check_tol.is_some()),
        ],
    )?;
    let spec = SymbolSpec {
        rho: o.rho,
        preset: o.preset.clone(),
        alpha: o.alpha,
        beta: o.beta,
        gamma: o.gamma,
        a: o.a,
        b: o.b,
        c: o.c,
        terms: o.terms.clone(),
        a0: o.a0,
    };
    let symbol = spec.build()?;
    let cfg = talbot_config(o.talbot_nodes, o.talbot_precision)?;
    let results: Vec<_> = ts
        .par_iter()
        .map(|&t| talbot_invert(|s| symbol.laplace_value(s), t, &cfg))
        .collect();
    let mut table = Table::new(&["t", "value", "difference"]);
    table.meta("command", "oracle");
    table.meta("kind", "talbot");
    symbol.describe(&mut table);
    table.meta("talbot_nodes", cfg.node_count);
    table.meta("talbot_precision", cfg.precision_target);
    let mut out_flags = Vec::new();
    for (&t, r) in ts.iter().zip(&results) {
        match r {
            Ok(est) => table.push(vec![t.into(), est.value.re.into(), est.difference.into()]),
            Err(e) => {
                out_flags.push(format!("t = {t}: {e}"));
                table.push(vec![t.into(), f64::NAN.into(), f64::INFINITY.into()]);
            }
        }
    }
    let mut out = Outcome::new(table);
    out.flags = out_flags;
    Ok(out)
}
