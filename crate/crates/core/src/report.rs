//! Text tables and CSV for statistics reports.
//!
//! CSV reports are `parameter,value` rows with full-precision values and can be
//! read back with [`parse_ent_csv`]. Text tables round for display (ties to
//! even): entropy and serial correlation to 6 decimals, chi-square to 2, mean
//! to 4 and the π estimate to 9.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::stats::{EntReport, NistLiteReport, Parameter, ParameterVerdict};

fn display(p: Parameter, r: &EntReport) -> String {
    if p == Parameter::SerialCorrelation && !r.serial_correlation_defined {
        return "undefined".into();
    }
    fmt_value(p, p.value(r))
}

fn fmt_value(p: Parameter, v: f64) -> String {
    match p {
        Parameter::Entropy => format!("{v:.6}"),
        Parameter::ChiSquare => format!("{v:.2}"),
        Parameter::ArithmeticMean => format!("{v:.4}"),
        Parameter::MonteCarloPi => format!("{v:.9}"),
        Parameter::SerialCorrelation => format!("{v:.6}"),
    }
}

/// Ideal-value column as conventionally printed.
fn ideal_text(p: Parameter) -> &'static str {
    match p {
        Parameter::Entropy => "8.000000",
        Parameter::ChiSquare => "256.00",
        Parameter::ArithmeticMean => "127.5",
        Parameter::MonteCarloPi => "3.141592653",
        Parameter::SerialCorrelation => "0.0",
    }
}

pub fn ent_text(label: &str, r: &EntReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "ENT byte-mode analysis: {label} ({} bytes)", r.byte_count);
    let _ = writeln!(s, "{:<32}{:>16}{:>16}", "Parameter", "Value", "Ideal Value");
    for p in Parameter::ALL {
        let _ = writeln!(s, "{:<32}{:>16}{:>16}", p.label(), display(p, r), ideal_text(p));
    }
    s
}

pub fn nist_text(r: &NistLiteReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "NIST-style tests ({} bits, alpha = 0.01)", r.bit_count);
    let _ = writeln!(s, "{:<32}{:>16}{:>8}", "Test", "P-value", "Result");
    for (name, p) in r.p_values() {
        let verdict = if crate::stats::nist::passes(p) { "PASS" } else { "FAIL" };
        let _ = writeln!(s, "{:<32}{:>16.6}{:>8}", name, p, verdict);
    }
    s
}

pub fn ent_csv(r: &EntReport) -> String {
    let mut s = String::from("parameter,value\n");
    let _ = writeln!(s, "byte_count,{}", r.byte_count);
    for p in Parameter::ALL {
        let _ = writeln!(s, "{},{}", p.key(), p.value(r));
    }
    let _ = writeln!(s, "serial_correlation_defined,{}", r.serial_correlation_defined);
    s
}

/// NIST rows in the same `parameter,value` layout, without a header.
pub fn nist_csv_rows(r: &NistLiteReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "nist_bit_count,{}", r.bit_count);
    let _ = writeln!(s, "nist_monobit_sum,{}", r.monobit_sum);
    let _ = writeln!(s, "nist_monobit_statistic,{}", r.monobit_statistic);
    for (name, p) in r.p_values() {
        let _ = writeln!(s, "p_{name},{p}");
    }
    s
}

/// Reads the ENT rows of a `parameter,value` CSV; other rows are ignored.
pub fn parse_ent_csv(text: &str) -> Result<EntReport> {
    let mut values: [Option<f64>; 5] = [None; 5];
    let mut byte_count = 0u64;
    let mut defined = true;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line == "parameter,value" {
            continue;
        }
        let (key, value) = line
            .split_once(',')
            .ok_or_else(|| Error::Corrupt(format!("report line {}: expected key,value", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        let bad = || Error::Corrupt(format!("report line {}: bad value {value:?}", lineno + 1));
        match key {
            "byte_count" => byte_count = value.parse().map_err(|_| bad())?,
            "serial_correlation_defined" => defined = value.parse().map_err(|_| bad())?,
            _ => {
                if let Some(i) = Parameter::ALL.iter().position(|p| p.key() == key) {
                    values[i] = Some(value.parse().map_err(|_| bad())?);
                }
            }
        }
    }
    let get = |p: Parameter| {
        let i = Parameter::ALL.iter().position(|&q| q == p).unwrap();
        values[i].ok_or_else(|| Error::Corrupt(format!("report is missing {}", p.key())))
    };
    Ok(EntReport {
        byte_count,
        entropy_bits_per_byte: get(Parameter::Entropy)?,
        chi_square: get(Parameter::ChiSquare)?,
        arithmetic_mean: get(Parameter::ArithmeticMean)?,
        monte_carlo_pi: get(Parameter::MonteCarloPi)?,
        serial_correlation: get(Parameter::SerialCorrelation)?,
        serial_correlation_defined: defined,
    })
}

pub fn comparison_text(before: &str, after: &str, verdicts: &[ParameterVerdict]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "Comparison: {before} -> {after}");
    let _ = writeln!(
        s,
        "{:<32}{:>16}{:>16}{:>16}{:>12}",
        "Parameter", "Before", "After", "Ideal Value", "Verdict"
    );
    for v in verdicts {
        let p = v.parameter;
        let show = |x: f64, d: f64| {
            if d.is_infinite() {
                "undefined".to_string()
            } else {
                fmt_value(p, x)
            }
        };
        let _ = writeln!(
            s,
            "{:<32}{:>16}{:>16}{:>16}{:>12}",
            p.label(),
            show(v.before, v.distance_before),
            show(v.after, v.distance_after),
            ideal_text(p),
            v.verdict.to_string()
        );
    }
    s
}

/// `label,chi_square,arithmetic_mean`, one row per labelled input.
pub fn figure_csv(rows: &[(String, EntReport)]) -> String {
    let mut s = String::from("label,chi_square,arithmetic_mean\n");
    for (label, r) in rows {
        let _ = writeln!(s, "{},{},{}", csv_field(label), r.chi_square, r.arithmetic_mean);
    }
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
