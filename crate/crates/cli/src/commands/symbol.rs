//! Symbol construction shared by `ilt` and `oracle talbot`.

use fracrd_core::inversion::{
    invert_general, invert_three_term, GeneralPreset, InversionError, InversionResult, MultiTermSymbol, RhoPreset, ThreeTermSymbol,
    Truncation,
};
use num_complex::Complex64;

use crate::error::{config, CliError};
use crate::options::{parse_terms, require};
use crate::table::Table;

/// Raw symbol options as given; `terms` selects the general family.
#[derive(Debug, Clone, Default)]
pub struct SymbolSpec {
    pub rho: Option<f64>,
    pub preset: Option<String>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub c: Option<f64>,
    pub terms: Option<String>,
    pub a0: Option<f64>,
}

pub enum Symbol {
    ThreeTerm(ThreeTermSymbol),
    General(MultiTermSymbol),
}

fn three_term_preset(name: &str) -> Result<RhoPreset, CliError> {
    Ok(match name {
        "one" => RhoPreset::One,
        "alpha" => RhoPreset::Alpha,
        "beta" => RhoPreset::Beta,
        "gamma" => RhoPreset::Gamma,
        "alpha-plus-beta" => RhoPreset::AlphaPlusBeta,
        _ => return Err(config(format!("unknown three-term preset `{name}` (one, alpha, beta, gamma, alpha-plus-beta)"))),
    })
}

fn general_preset(name: &str) -> Result<GeneralPreset, CliError> {
    Ok(match name {
        "one" => GeneralPreset::One,
        "alpha1" => GeneralPreset::Alpha1,
        "alpha2" => GeneralPreset::Alpha2,
        "alpha1-plus-alpha2" => GeneralPreset::Alpha1PlusAlpha2,
        _ => return Err(config(format!("unknown general preset `{name}` (one, alpha1, alpha2, alpha1-plus-alpha2)"))),
    })
}

impl SymbolSpec {
    pub fn build(&self) -> Result<Symbol, CliError> {
        let err = |e: InversionError| config(e.to_string());
        if self.rho.is_some() && self.preset.is_some() {
            return Err(config("give `rho` or `preset`, not both"));
        }
        match &self.terms {
            Some(text) => {
                for (key, v) in [("alpha", self.alpha), ("beta", self.beta), ("gamma", self.gamma), ("a", self.a), ("b", self.b), ("c", self.c)] {
                    if v.is_some() {
                        return Err(config(format!("`{key}` belongs to the three-term symbol; the general one takes `terms` and `a0`")));
                    }
                }
                let terms = parse_terms(text)?;
                let a0 = self.a0.unwrap_or(0.0);
                let sym = match (self.rho, &self.preset) {
                    (Some(rho), _) => MultiTermSymbol::new(rho, a0, &terms),
                    (None, p) => MultiTermSymbol::with_preset(general_preset(p.as_deref().unwrap_or("alpha1"))?, a0, &terms),
                };
                Ok(Symbol::General(sym.map_err(err)?))
            }
            None => {
                if self.a0.is_some() {
                    return Err(config("`a0` belongs to the general symbol; the three-term one takes `c`"));
                }
                let alpha = require(&self.alpha, "alpha")?;
                let (beta, gamma) = (self.beta.unwrap_or(0.0), self.gamma.unwrap_or(0.0));
                let (a, b, c) = (self.a.unwrap_or(0.0), self.b.unwrap_or(0.0), self.c.unwrap_or(0.0));
                let sym = match (self.rho, &self.preset) {
                    (Some(rho), _) => ThreeTermSymbol::new(rho, alpha, beta, gamma, a, b, c),
                    (None, p) => ThreeTermSymbol::with_preset(three_term_preset(p.as_deref().unwrap_or("alpha"))?, alpha, beta, gamma, a, b, c),
                };
                Ok(Symbol::ThreeTerm(sym.map_err(err)?))
            }
        }
    }
}

impl Symbol {
    pub fn invert(&self, t: f64, trunc: &Truncation) -> Result<InversionResult, InversionError> {
        match self {
            Symbol::ThreeTerm(s) => invert_three_term(s, t, trunc),
            Symbol::General(s) => invert_general(s, t, trunc),
        }
    }

    pub fn laplace_value(&self, s: Complex64) -> Complex64 {
        match self {
            Symbol::ThreeTerm(x) => x.laplace_value(s),
            Symbol::General(x) => x.laplace_value(s),
        }
    }

    /// Echo of the normalized symbol.
    pub fn describe(&self, table: &mut Table) {
        match self {
            Symbol::ThreeTerm(s) => {
                table.meta("symbol", "three-term");
                table.meta("rho", s.rho());
                table.meta("alpha", s.alpha());
                table.meta("beta", s.beta());
                table.meta("gamma", s.gamma());
                table.meta("a", s.a());
                table.meta("b", s.b());
                table.meta("c", s.c());
                table.meta("prefactor", s.prefactor());
            }
            Symbol::General(s) => {
                table.meta("symbol", "general");
                table.meta("rho", s.rho());
                table.meta("a0", s.a0());
                let terms: Vec<String> = s.terms().iter().map(|(a, e)| format!("{a}:{e}")).collect();
                table.meta("terms", terms.join(" "));
            }
        }
    }
}

/// Series value with its flag; non-convergence keeps the partial sum.
pub struct SeriesCell {
    pub value: f64,
    pub est_error: f64,
    pub outer_terms: usize,
    pub converged: bool,
    pub failure: Option<String>,
}

pub fn series_cell(r: Result<InversionResult, InversionError>) -> SeriesCell {
    match r {
        Ok(r) => SeriesCell {
            value: r.value,
            est_error: r.est_error,
            outer_terms: r.outer_terms_used,
            converged: r.converged,
            failure: (!r.converged).then(|| format!("{:?}", r.domain_flag)),
        },
        Err(InversionError::NonConvergent { outer_terms, partial }) => SeriesCell {
            value: partial,
            est_error: f64::INFINITY,
            outer_terms,
            converged: false,
            failure: Some("outer cap reached".into()),
        },
        Err(e) => SeriesCell {
            value: f64::NAN,
            est_error: f64::INFINITY,
            outer_terms: 0,
            converged: false,
            failure: Some(e.to_string()),
        },
    }
}
