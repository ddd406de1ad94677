//! Long-format field tables: one row per (t, x) with the per-time flags, and
//! the reader that recovers times, nodes and values from such a table.

use fracrd_core::rd::SolutionTable;

use crate::error::CliError;
use crate::table::{Cell, Table};

pub fn field_table(sol: &SolutionTable) -> Table {
    let oracle = sol.oracle_delta.is_some();
    let mut columns = vec!["t", "x", "N", "converged"];
    if oracle {
        columns.push("oracle_delta");
    }
    let mut table = Table::new(&columns);
    let nodes = sol.grid.nodes();
    for (m, (&t, values)) in sol.times.iter().zip(&sol.values).enumerate() {
        let converged = sol.diagnostics[m].converged;
        for (&x, &v) in nodes.iter().zip(values) {
            let mut row: Vec<Cell> = vec![t.into(), x.into(), v.into(), converged.into()];
            if let Some(d) = &sol.oracle_delta {
                row.push(d[m].into());
            }
            table.push(row);
        }
    }
    table
}

/// Per-time diagnostics appended as summary lines.
pub fn summarize_field(table: &mut Table, sol: &SolutionTable) {
    let worst = |f: &dyn Fn(usize) -> f64| (0..sol.times.len()).map(f).fold(0.0, f64::max);
    table.summarize("converged", sol.converged());
    table.summarize("est_error_max", worst(&|m| sol.diagnostics[m].est_error));
    table.summarize("imaginary_residue_max", worst(&|m| sol.diagnostics[m].imaginary_residue));
    table.summarize("nyquist_ratio_max", worst(&|m| sol.diagnostics[m].nyquist_ratio));
    table.summarize("grid_too_coarse", sol.grid_too_coarse());
    let unconverged: usize = sol.diagnostics.iter().map(|d| d.modes.iter().filter(|m| !m.converged).count()).sum();
    table.summarize("unconverged_modes", unconverged);
    for m in 0..sol.times.len() {
        table.summarize(&format!("mass.{m}"), sol.mass(m));
    }
    if let Some(d) = &sol.oracle_delta {
        table.summarize("oracle_delta_max", d.iter().copied().fold(0.0, f64::max));
    }
}

/// Times, nodes and values[m][i] read back from a long-format table.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldData {
    pub times: Vec<f64>,
    pub nodes: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl FieldData {
    pub fn from_table(table: &Table) -> Result<Self, CliError> {
        let col = |name: &str| table.column(name).ok_or_else(|| CliError::Parse(format!("no `{name}` column")));
        let (ct, cx, cn) = (col("t")?, col("x")?, col("N")?);
        let num = |row: &[Cell], c: usize| row[c].as_f64().ok_or_else(|| CliError::Parse(format!("non-numeric cell {}", row[c])));
        let mut data = FieldData {
            times: Vec::new(),
            nodes: Vec::new(),
            values: Vec::new(),
        };
        for row in &table.rows {
            let (t, x, v) = (num(row, ct)?, num(row, cx)?, num(row, cn)?);
            if data.times.last().map(|l: &f64| l.to_bits()) != Some(t.to_bits()) {
                data.times.push(t);
                data.values.push(Vec::new());
            }
            let m = data.values.len() - 1;
            if m == 0 {
                data.nodes.push(x);
            } else if data.nodes.get(data.values[m].len()).map(|n| n.to_bits()) != Some(x.to_bits()) {
                return Err(CliError::Parse(format!("time {t} does not repeat the node layout")));
            }
            data.values[m].push(v);
        }
        if data.values.iter().any(|v| v.len() != data.nodes.len()) {
            return Err(CliError::Parse("ragged field table".into()));
        }
        Ok(data)
    }

    /// Exact, bitwise equality with a solution table.
    pub fn matches(&self, sol: &SolutionTable) -> bool {
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        bits(&self.times) == bits(&sol.times)
            && bits(&self.nodes) == bits(&sol.grid.nodes())
            && self.values.len() == sol.values.len()
            && self.values.iter().zip(&sol.values).all(|(a, b)| bits(a) == bits(b))
    }
}
