use fracrd_core::inversion::Truncation;
use fracrd_core::oracles::{talbot_invert, TalbotConfig};
use rayon::prelude::*;

use super::symbol::{series_cell, SymbolSpec};
use crate::error::{config, CliError};
use crate::options::{options, times, Toggle};
use crate::output::Outcome;
use crate::table::{Cell, Table};

options!(
    /// Invert a three-term or general fractional symbol by its series, optionally against Talbot.
    IltOptions {
        /// Numerator exponent; exclusive with `preset`.
        rho: f64,
        /// Named ρ: one, alpha, beta, gamma, alpha-plus-beta (three-term) or one, alpha1, alpha2, alpha1-plus-alpha2 (general).
        preset: String,
        alpha: f64,
        beta: f64,
        gamma: f64,
        a: f64,
        b: f64,
        c: f64,
        /// General symbol as coef:exponent pairs, leading exponent first, e.g. `1:0.9,0.5:0.6`.
        terms: String,
        /// Constant of the general symbol [default: 0].
        a0: f64,
        /// Comma-separated positive times [default: 1].
        #[arg(value_delimiter = ',')]
        times: Vec<f64>,
        /// Relative series tolerance [default: 1e-10].
        tol: f64,
        /// Cap on outer series blocks [default: 400].
        max_outer: usize,
        /// Talbot comparison [default: on].
        #[arg(value_enum)]
        oracle: Toggle,
        /// Talbot contour nodes [default: 48].
        talbot_nodes: usize,
        /// Talbot self-check target [default: 1e-8].
        talbot_precision: f64,
    }
);

impl IltOptions {
    pub fn symbol_spec(&self) -> SymbolSpec {
        SymbolSpec {
            rho: self.rho,
            preset: self.preset.clone(),
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            a: self.a,
            b: self.b,
            c: self.c,
            terms: self.terms.clone(),
            a0: self.a0,
        }
    }
}

pub fn truncation(tol: Option<f64>, max_outer: Option<usize>) -> Result<Truncation, CliError> {
    let trunc = Truncation {
        tol: tol.unwrap_or(1e-10),
        max_outer: max_outer.unwrap_or(400),
        ..Truncation::default()
    };
    trunc.validate().map_err(|e| config(e.to_string()))?;
    Ok(trunc)
}

pub fn talbot_config(nodes: Option<usize>, precision: Option<f64>) -> Result<TalbotConfig, CliError> {
    let cfg = TalbotConfig {
        node_count: nodes.unwrap_or(48),
        precision_target: precision.unwrap_or(1e-8),
        contour_scale: None,
    };
    cfg.validate().map_err(|e| config(e.to_string()))?;
    Ok(cfg)
}

pub fn run(o: &IltOptions) -> Result<Outcome, CliError> {
    let symbol = o.symbol_spec().build()?;
    let ts = times(&o.times, &[1.0])?;
    let trunc = truncation(o.tol, o.max_outer)?;
    let oracle = o.oracle.unwrap_or(Toggle::On) == Toggle::On;
    let talbot = talbot_config(o.talbot_nodes, o.talbot_precision)?;

    let series: Vec<_> = ts.par_iter().map(|&t| series_cell(symbol.invert(t, &trunc))).collect();
    let oracle_values: Vec<_> = if oracle {
        ts.par_iter()
            .map(|&t| talbot_invert(|s| symbol.laplace_value(s), t, &talbot))
            .collect()
    } else {
        Vec::new()
    };

    let mut columns = vec!["t", "series_value", "series_est_error", "outer_terms", "converged"];
    if oracle {
        columns.extend(["talbot_value", "talbot_difference", "abs_delta"]);
    }
    let mut table = Table::new(&columns);
    table.meta("command", "ilt");
    symbol.describe(&mut table);
    table.meta("tol", trunc.tol);
    table.meta("max_outer", trunc.max_outer);
    table.meta("oracle", if oracle { "on" } else { "off" });
    if oracle {
        table.meta("talbot_nodes", talbot.node_count);
        table.meta("talbot_precision", talbot.precision_target);
    }

    let mut out_flags = Vec::new();
    let mut max_delta = 0.0f64;
    for (i, (&t, s)) in ts.iter().zip(&series).enumerate() {
        let mut row: Vec<Cell> = vec![t.into(), s.value.into(), s.est_error.into(), s.outer_terms.into(), s.converged.into()];
        if let Some(why) = &s.failure {
            out_flags.push(format!("t = {t}: series not converged ({why})"));
        }
        if oracle {
            match &oracle_values[i] {
                Ok(est) => {
                    let delta = (s.value - est.value.re).abs();
                    row.extend([est.value.re.into(), est.difference.into(), delta.into()]);
                    if s.converged {
                        max_delta = max_delta.max(delta);
                        // the oracle's own self-check difference is not the series' fault
                        if delta > trunc.tol * est.value.re.abs().max(1.0) + est.difference {
                            out_flags.push(format!("t = {t}: series and Talbot differ by {delta:e}"));
                        }
                    }
                }
                Err(e) => {
                    row.extend([f64::NAN.into(), f64::INFINITY.into(), f64::NAN.into()]);
                    out_flags.push(format!("t = {t}: Talbot failed: {e}"));
                }
            }
        }
        table.push(row);
    }
    table.summarize("converged", series.iter().filter(|s| s.converged).count());
    table.summarize("rows", ts.len());
    if oracle {
        table.summarize("max_abs_delta_converged", max_delta);
    }
    let mut out = Outcome::new(table);
    out.flags = out_flags;
    Ok(out)
}
