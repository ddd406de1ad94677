use std::path::{Path, PathBuf};

use fracrd_core::ml::{eval_prabhakar, PrabhakarOrder};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{config, CliError};
use crate::options::{display_path, options, parse_complex, require};
use crate::output::Outcome;
use crate::table::{Cell, Table};

options!(
    /// Evaluate E^γ_{α,β}(z) on a list of points or a sweep file.
    MlOptions {
        alpha: f64,
        /// [default: 1]
        beta: f64,
        /// [default: 1]
        gamma: f64,
        /// Comma-separated points such as `1`, `-2.5`, `1+2i`.
        #[arg(value_delimiter = ',')]
        z: Vec<String>,
        /// CSV with columns alpha, z_re and optionally beta, gamma, z_im; replaces alpha, beta, gamma and z.
        sweep: PathBuf,
        /// Requested accuracy, relative above |E| = 1 and absolute below [default: 1e-14].
        tol: f64,
    }
);

struct Point {
    order: PrabhakarOrder,
    z: Complex64,
}

fn order(alpha: f64, beta: f64, gamma: f64) -> Result<PrabhakarOrder, CliError> {
    PrabhakarOrder::new(alpha, beta, gamma).map_err(|e| config(e.to_string()))
}

fn read_sweep(path: &Path) -> Result<Vec<Point>, CliError> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| config(format!("cannot read sweep {}: {e}", path.display())))?;
    let headers = r.headers().map_err(|e| config(e.to_string()))?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (Some(ia), Some(ire)) = (col("alpha"), col("z_re")) else {
        return Err(config("sweep file needs `alpha` and `z_re` columns"));
    };
    let (ib, ig, iim) = (col("beta"), col("gamma"), col("z_im"));
    let mut points = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| config(e.to_string()))?;
        let get = |i: Option<usize>, default: f64| -> Result<f64, CliError> {
            match i {
                None => Ok(default),
                Some(i) => rec
                    .get(i)
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| config(format!("sweep row {}: unreadable value in column {}", line + 1, &headers[i]))),
            }
        };
        points.push(Point {
            order: order(get(Some(ia), 1.0)?, get(ib, 1.0)?, get(ig, 1.0)?)?,
            z: Complex64::new(get(Some(ire), 0.0)?, get(iim, 0.0)?),
        });
    }
    if points.is_empty() {
        return Err(config("sweep file has no rows"));
    }
    Ok(points)
}

pub fn run(o: &MlOptions) -> Result<Outcome, CliError> {
    let tol = o.tol.unwrap_or(1e-14);
    if !(1e-15..=1e-3).contains(&tol) {
        return Err(config(format!("`tol` must lie in [1e-15, 1e-3], got {tol}")));
    }
    let points = match &o.sweep {
        Some(path) => {
            if o.alpha.is_some() || o.beta.is_some() || o.gamma.is_some() || o.z.is_some() {
                return Err(config("`sweep` replaces alpha, beta, gamma and z; give one or the other"));
            }
            read_sweep(path)?
        }
        None => {
            let ord = order(require(&o.alpha, "alpha")?, o.beta.unwrap_or(1.0), o.gamma.unwrap_or(1.0))?;
            let zs = require(&o.z, "z")?;
            if zs.is_empty() {
                return Err(config("`z` is empty"));
            }
            zs.iter()
                .map(|s| Ok(Point { order: ord, z: parse_complex(s)? }))
                .collect::<Result<_, CliError>>()?
        }
    };

    let results: Vec<_> = points.par_iter().map(|p| eval_prabhakar(p.order, p.z, tol)).collect();

    let mut table = Table::new(&[
        "alpha", "beta", "gamma", "z_re", "z_im", "value_re", "value_im", "est_error", "regime", "terms_used", "flagged",
    ]);
    table.meta("command", "ml");
    table.meta("tol", tol);
    match &o.sweep {
        Some(_) => table.meta("sweep", display_path(&o.sweep)),
        None => {
            table.meta("alpha", points[0].order.alpha());
            table.meta("beta", points[0].order.beta());
            table.meta("gamma", points[0].order.gamma());
        }
    }
    let mut outcome_flags = Vec::new();
    let mut flagged_rows = 0usize;
    let mut worst = 0.0f64;
    for (i, (p, r)) in points.iter().zip(&results).enumerate() {
        let mut row: Vec<Cell> = vec![
            p.order.alpha().into(),
            p.order.beta().into(),
            p.order.gamma().into(),
            p.z.re.into(),
            p.z.im.into(),
        ];
        let flagged = match r {
            Ok(e) => {
                let rel = e.est_error / e.value.norm().max(1.0);
                worst = worst.max(rel);
                row.extend([
                    e.value.re.into(),
                    e.value.im.into(),
                    e.est_error.into(),
                    e.regime.as_str().into(),
                    e.terms_used.into(),
                ]);
                !(rel <= tol)
            }
            Err(err) => {
                outcome_flags.push(format!("row {i}: {err}"));
                row.extend([f64::NAN.into(), f64::NAN.into(), f64::INFINITY.into(), "Failed".into(), 0usize.into()]);
                true
            }
        };
        flagged_rows += flagged as usize;
        row.push(flagged.into());
        table.push(row);
    }
    table.summarize("rows", points.len());
    table.summarize("flagged_rows", flagged_rows);
    table.summarize("max_relative_est_error", worst);
    let mut out = Outcome::new(table);
    if flagged_rows > 0 {
        out.flags.push(format!("{flagged_rows} of {} rows above tol", points.len()));
    }
    out.flags.extend(outcome_flags);
    Ok(out)
}
