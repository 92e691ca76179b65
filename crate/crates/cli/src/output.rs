use std::io::{self, Write};

use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Tsv,
}

impl Format {
    fn separator(self) -> char {
        match self {
            Format::Csv => ',',
            Format::Tsv => '\t',
        }
    }
}

pub const NA: &str = "n/a";

/// `%g`-style: `digits` significant digits, trailing zeros dropped,
/// scientific outside `[1e-4, 10^digits)`.
pub fn sig(v: f64, digits: usize) -> String {
    if !v.is_finite() {
        return NA.to_string();
    }
    if v == 0.0 {
        return "0".to_string();
    }
    let digits = digits.max(1);
    // the exponent after rounding, so 9.9999996 -> 10 moves up a decade
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        return format!("{}e{exp}", trim(mantissa));
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim(&format!("{v:.decimals$}")).to_string()
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Rows of text cells written with a header.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn write(&self, out: &mut dyn Write, format: Format) -> io::Result<()> {
        let sep = format.separator().to_string();
        writeln!(out, "{}", self.header.join(&sep))?;
        for row in &self.rows {
            writeln!(out, "{}", row.join(&sep))?;
        }
        out.flush()
    }
}
