//! Subcommand options. Every option is a long flag and a key of the same name
//! in a flat TOML file passed with `--config`; a flag given on the command line
//! replaces the file's value. Unknown keys in the file are rejected.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{config, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Toggle {
    On,
    Off,
}

/// Defines an options struct with the shared `config`, `output` and `format`
/// fields followed by the listed ones. All fields are optional so that the
/// file and the flags can be merged before defaults apply.
macro_rules! options {
    ($(#[$m:meta])* $name:ident { $($(#[$fm:meta])* $field:ident : $ty:ty),* $(,)? }) => {
        $(#[$m])*
        #[derive(Debug, Clone, Default, clap::Args, serde::Serialize, serde::Deserialize)]
        #[serde(deny_unknown_fields, rename_all = "kebab-case")]
        pub struct $name {
            /// Flat TOML file whose keys are the long flag names; flags override it.
            #[arg(long)]
            #[serde(skip)]
            pub config: Option<std::path::PathBuf>,
            /// Write the table to this file instead of standard output.
            #[arg(long)]
            pub output: Option<std::path::PathBuf>,
            /// Table format [default: csv].
            #[arg(long, value_enum)]
            pub format: Option<$crate::options::Format>,
            $(
                $(#[$fm])*
                #[arg(long)]
                pub $field: Option<$ty>,
            )*
        }

        impl $name {
            /// Options from the config file with the flags laid over them.
            pub fn resolve(&self) -> Result<Self, $crate::error::CliError> {
                $crate::options::merge(self, self.config.as_deref())
            }

            pub fn target(&self) -> $crate::output::Target {
                $crate::output::Target {
                    path: self.output.clone(),
                    format: self.format.unwrap_or_default(),
                }
            }
        }
    };
}

pub(crate) use options;

pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, file: Option<&Path>) -> Result<T, CliError> {
    let mut table = match file {
        None => toml::Table::new(),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| config(format!("cannot read {}: {e}", path.display())))?;
            text.parse::<toml::Table>()
                .map_err(|e| config(format!("{}: {}", path.display(), e.message())))?
        }
    };
    if let Some((key, _)) = table.iter().find(|(_, v)| v.is_table()) {
        return Err(config(format!("config files are flat; `{key}` is a table")));
    }
    // None fields are left out of the serialized flags
    let given = toml::Table::try_from(flags).map_err(|e| config(e.to_string()))?;
    table.extend(given);
    T::deserialize(toml::Value::Table(table)).map_err(|e| config(e.message().to_string()))
}

/// `top` with its unset fields taken from `base`.
pub fn overlay<T: Serialize + DeserializeOwned>(base: &T, top: &T) -> Result<T, CliError> {
    let mut table = toml::Table::try_from(base).map_err(|e| config(e.to_string()))?;
    table.extend(toml::Table::try_from(top).map_err(|e| config(e.to_string()))?);
    T::deserialize(toml::Value::Table(table)).map_err(|e| config(e.message().to_string()))
}

/// Parses `re`, `re+imi`, `re-imi` or `imi`, e.g. `-2.5`, `1+2i`, `0.5-1e-3i`, `3i`.
pub fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let bad = || config(format!("cannot read `{s}` as a complex number"));
    let t = s.trim();
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not the leading one or part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&j| matches!(bytes[j], b'+' | b'-') && !matches!(bytes[j - 1], b'e' | b'E'));
    let imag = |txt: &str| match txt {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => txt.parse::<f64>().map_err(|_| bad()),
    };
    match split {
        Some(j) => Ok(Complex64::new(body[..j].parse().map_err(|_| bad())?, imag(&body[j..])?)),
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

/// Parses `coef:order` pairs separated by commas, e.g. `1:0.9,0.5:0.6`.
pub fn parse_terms(s: &str) -> Result<Vec<(f64, f64)>, CliError> {
    s.split(',')
        .map(|pair| {
            let (c, o) = pair
                .split_once(':')
                .ok_or_else(|| config(format!("term `{pair}` is not of the form coef:order")))?;
            let num = |x: &str| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|_| config(format!("cannot read `{x}` in term `{pair}`")))
            };
            Ok((num(c)?, num(o)?))
        })
        .collect()
}

pub fn require<T: Clone>(value: &Option<T>, key: &str) -> Result<T, CliError> {
    value.clone().ok_or_else(|| config(format!("missing required option `{key}`")))
}

pub fn positive(value: f64, key: &str) -> Result<f64, CliError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(config(format!("`{key}` must be positive and finite, got {value}")))
    }
}

pub fn finite(value: f64, key: &str) -> Result<f64, CliError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(config(format!("`{key}` must be finite, got {value}")))
    }
}

pub fn times(value: &Option<Vec<f64>>, default: &[f64]) -> Result<Vec<f64>, CliError> {
    let t = value.clone().unwrap_or_else(|| default.to_vec());
    if t.is_empty() {
        return Err(config("`times` is empty"));
    }
    for &x in &t {
        positive(x, "times")?;
    }
    Ok(t)
}

pub fn display_path(p: &Option<PathBuf>) -> String {
    p.as_ref().map_or_else(|| "-".to_string(), |p| p.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    options!(Demo {
        alpha: f64,
        #[arg(value_delimiter = ',')]
        times: Vec<f64>,
        name: String,
    });

    #[test]
    fn complex_forms() {
        let c = |s| parse_complex(s).unwrap();
        assert_eq!(c("-2.5"), Complex64::new(-2.5, 0.0));
        assert_eq!(c("1+2i"), Complex64::new(1.0, 2.0));
        assert_eq!(c("-1e-3-4.5i"), Complex64::new(-1e-3, -4.5));
        assert_eq!(c("1e+2+1e-2i"), Complex64::new(100.0, 0.01));
        assert_eq!(c("3i"), Complex64::new(0.0, 3.0));
        assert_eq!(c("-i"), Complex64::new(0.0, -1.0));
        assert!(parse_complex("1+2j").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn terms_parse() {
        assert_eq!(parse_terms("1:0.9, 0.5:0.6").unwrap(), vec![(1.0, 0.9), (0.5, 0.6)]);
        assert!(parse_terms("1;0.9").is_err());
    }

    #[test]
    fn flags_override_file_and_unknown_keys_fail() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "alpha = 1\ntimes = [0.1, 0.2]\nname = \"file\"\n").unwrap();
        let flags = Demo {
            name: Some("flag".into()),
            ..Demo::default()
        };
        assert_eq!(flags.resolve().unwrap().name.as_deref(), Some("flag"));
        assert_eq!(flags.target().format, Format::Csv);
        let merged = merge(&flags, Some(&path)).unwrap();
        assert_eq!(merged.alpha, Some(1.0));
        assert_eq!(merged.times, Some(vec![0.1, 0.2]));
        assert_eq!(merged.name.as_deref(), Some("flag"));

        std::fs::write(&path, "alpah = 1\n").unwrap();
        let err = merge(&Demo::default(), Some(&path)).unwrap_err();
        assert_eq!(err.kind(), "config");
        assert!(err.to_string().contains("alpah"), "{err}");

        std::fs::write(&path, "[section]\nalpha = 1\n").unwrap();
        assert!(merge(&Demo::default(), Some(&path)).is_err());
    }
}
