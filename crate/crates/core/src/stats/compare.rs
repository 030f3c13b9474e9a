use std::fmt;

use crate::stats::ent::EntReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parameter {
    Entropy,
    ChiSquare,
    ArithmeticMean,
    MonteCarloPi,
    SerialCorrelation,
}

impl Parameter {
    pub const ALL: [Parameter; 5] = [
        Parameter::Entropy,
        Parameter::ChiSquare,
        Parameter::ArithmeticMean,
        Parameter::MonteCarloPi,
        Parameter::SerialCorrelation,
    ];

    /// Value expected from truly random bytes.
    pub fn ideal(self) -> f64 {
        match self {
            Parameter::Entropy => 8.0,
            Parameter::ChiSquare => 256.0,
            Parameter::ArithmeticMean => 127.5,
            Parameter::MonteCarloPi => std::f64::consts::PI,
            Parameter::SerialCorrelation => 0.0,
        }
    }

    /// Key used in CSV reports.
    pub fn key(self) -> &'static str {
        match self {
            Parameter::Entropy => "entropy",
            Parameter::ChiSquare => "chi_square",
            Parameter::ArithmeticMean => "arithmetic_mean",
            Parameter::MonteCarloPi => "monte_carlo_pi",
            Parameter::SerialCorrelation => "serial_correlation",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Parameter::Entropy => "Entropy",
            Parameter::ChiSquare => "Chi-Square Distribution",
            Parameter::ArithmeticMean => "Arithmetic Mean",
            Parameter::MonteCarloPi => "Monte Carlo value of Pi",
            Parameter::SerialCorrelation => "Serial Correlation Coefficient",
        }
    }

    pub fn value(self, r: &EntReport) -> f64 {
        match self {
            Parameter::Entropy => r.entropy_bits_per_byte,
            Parameter::ChiSquare => r.chi_square,
            Parameter::ArithmeticMean => r.arithmetic_mean,
            Parameter::MonteCarloPi => r.monte_carlo_pi,
            Parameter::SerialCorrelation => r.serial_correlation,
        }
    }

    /// `|value - ideal|`. An undefined serial correlation is infinitely far.
    pub fn distance(self, r: &EntReport) -> f64 {
        if self == Parameter::SerialCorrelation && !r.serial_correlation_defined {
            return f64::INFINITY;
        }
        (self.value(r) - self.ideal()).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Improved,
    Unchanged,
    Worsened,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Improved => "improved",
            Verdict::Unchanged => "unchanged",
            Verdict::Worsened => "worsened",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterVerdict {
    pub parameter: Parameter,
    pub before: f64,
    pub after: f64,
    pub distance_before: f64,
    pub distance_after: f64,
    pub verdict: Verdict,
}

/// "Improved" means the distance to the ideal value strictly shrank.
pub fn compare_reports(before: &EntReport, after: &EntReport) -> Vec<ParameterVerdict> {
    Parameter::ALL
        .iter()
        .map(|&p| {
            let (db, da) = (p.distance(before), p.distance(after));
            let verdict = if da < db {
                Verdict::Improved
            } else if da > db {
                Verdict::Worsened
            } else {
                Verdict::Unchanged
            };
            ParameterVerdict {
                parameter: p,
                before: p.value(before),
                after: p.value(after),
                distance_before: db,
                distance_after: da,
                verdict,
            }
        })
        .collect()
}
