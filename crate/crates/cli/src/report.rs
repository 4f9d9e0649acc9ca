//! `key: value` reports with exact and decimal number rendering.

use std::fmt::{self, Display};

use wsne_core::rational::{to_decimal_string, to_exact_string};
use wsne_core::Rational;

/// Digits after the point for non-terminating decimals.
pub const DECIMAL_PLACES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum NumberFormat {
    Exact,
    Decimal,
    /// Exact value under `key`, decimal under `key_decimal`.
    #[default]
    Both,
}

/// Ordered `key: value` lines.
#[derive(Debug, Clone, Default)]
pub struct Report {
    format: NumberFormat,
    lines: Vec<(String, String)>,
}

impl Report {
    pub fn new(format: NumberFormat) -> Self {
        Self {
            format,
            lines: Vec::new(),
        }
    }

    pub fn text(&mut self, key: impl Into<String>, value: impl Display) -> &mut Self {
        self.lines.push((key.into(), value.to_string()));
        self
    }

    pub fn number(&mut self, key: impl Into<String>, value: &Rational) -> &mut Self {
        self.numbers_with(key.into(), std::slice::from_ref(value))
    }

    pub fn numbers(&mut self, key: impl Into<String>, values: &[Rational]) -> &mut Self {
        self.numbers_with(key.into(), values)
    }

    fn numbers_with(&mut self, key: String, values: &[Rational]) -> &mut Self {
        let join = |f: fn(&Rational) -> String| values.iter().map(f).collect::<Vec<_>>().join(" ");
        let decimal = |v: &Rational| to_decimal_string(v, DECIMAL_PLACES);
        match self.format {
            NumberFormat::Exact => self.text(key, join(to_exact_string)),
            NumberFormat::Decimal => self.text(key, join(decimal)),
            NumberFormat::Both => {
                let decimal_key = format!("{key}_decimal");
                self.text(key, join(to_exact_string)).text(decimal_key, join(decimal))
            }
        }
    }

    /// Indices as a space-separated list, `-` when empty.
    pub fn indices(&mut self, key: impl Into<String>, values: &[usize]) -> &mut Self {
        let text = if values.is_empty() {
            "-".to_string()
        } else {
            values.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
        };
        self.text(key, text)
    }

    /// The value recorded under `key`, if any.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.lines.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

impl Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.lines {
            writeln!(f, "{k}: {v}")?;
        }
        Ok(())
    }
}
