//! The five byte-mode statistics of the ENT battery, computed in one pass.

use std::io::Read;

use crate::error::{Error, Result};

/// Smallest input that yields one Monte Carlo point.
pub const ENT_MIN_BYTES: u64 = 6;

/// Squared radius of the Monte Carlo circle: both coordinates are 24-bit.
const MC_RADIUS_SQ: u64 = ((1u64 << 24) - 1) * ((1u64 << 24) - 1);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntReport {
    pub byte_count: u64,
    pub entropy_bits_per_byte: f64,
    pub chi_square: f64,
    pub arithmetic_mean: f64,
    pub monte_carlo_pi: f64,
    /// `0.0` when undefined (constant stream).
    pub serial_correlation: f64,
    pub serial_correlation_defined: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SerialCorrelation {
    pub value: f64,
    pub defined: bool,
}

/// Streaming accumulator for [`EntReport`].
#[derive(Debug, Clone)]
pub struct EntAnalyzer {
    counts: [u64; 256],
    n: u64,
    sum: u64,
    sum_sq: u64,
    sum_lag: u128,
    first: Option<u8>,
    last: u8,
    mc_buf: [u8; 6],
    mc_len: usize,
    mc_points: u64,
    mc_inside: u64,
}

impl Default for EntAnalyzer {
    fn default() -> Self {
        Self::new()
    }
}

impl EntAnalyzer {
    pub fn new() -> Self {
        EntAnalyzer {
            counts: [0; 256],
            n: 0,
            sum: 0,
            sum_sq: 0,
            sum_lag: 0,
            first: None,
            last: 0,
            mc_buf: [0; 6],
            mc_len: 0,
            mc_points: 0,
            mc_inside: 0,
        }
    }

    pub fn update(&mut self, data: &[u8]) {
        let Some((&head, _)) = data.split_first() else {
            return;
        };
        let mut prev = match self.first {
            None => {
                self.first = Some(head);
                None
            }
            Some(_) => Some(self.last),
        };
        let mut lag = 0u64;
        for &b in data {
            let v = u64::from(b);
            self.counts[b as usize] += 1;
            self.sum += v;
            self.sum_sq += v * v;
            if let Some(p) = prev {
                lag += u64::from(p) * v;
                if lag > u64::MAX / 2 {
                    self.sum_lag += u128::from(lag);
                    lag = 0;
                }
            }
            prev = Some(b);

            self.mc_buf[self.mc_len] = b;
            self.mc_len += 1;
            if self.mc_len == 6 {
                self.mc_len = 0;
                self.mc_points += 1;
                if mc_inside(&self.mc_buf) {
                    self.mc_inside += 1;
                }
            }
        }
        self.sum_lag += u128::from(lag);
        self.n += data.len() as u64;
        self.last = data[data.len() - 1];
    }

    pub fn byte_count(&self) -> u64 {
        self.n
    }

    pub fn counts(&self) -> &[u64; 256] {
        &self.counts
    }

    pub fn entropy(&self) -> f64 {
        let n = self.n as f64;
        self.counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / n;
                -p * p.log2()
            })
            .sum::<f64>()
            // -0.0 for a single-symbol stream
            .max(0.0)
    }

    /// `Σ (c - n/256)^2 / (n/256)`, rewritten as `(256 Σc² - n²) / n` and
    /// evaluated exactly in integers up to the final division, so the result
    /// depends on the histogram alone and not on bin order.
    pub fn chi_square(&self) -> f64 {
        let sum_sq: u128 = self.counts.iter().map(|&c| u128::from(c) * u128::from(c)).sum();
        let n = u128::from(self.n);
        (256 * sum_sq - n * n) as f64 / self.n as f64
    }

    pub fn mean(&self) -> f64 {
        self.sum as f64 / self.n as f64
    }

    pub fn monte_carlo_pi(&self) -> f64 {
        4.0 * self.mc_inside as f64 / self.mc_points as f64
    }

    /// Circular lag-1 correlation, evaluated in exact integer arithmetic up to
    /// the final division.
    pub fn serial_correlation(&self) -> SerialCorrelation {
        let n = i128::from(self.n);
        let sum = i128::from(self.sum);
        let wrap = u128::from(self.last) * u128::from(self.first.unwrap_or(0));
        let lag = (self.sum_lag + wrap) as i128;
        let num = n * lag - sum * sum;
        let den = n * i128::from(self.sum_sq) - sum * sum;
        if den == 0 {
            SerialCorrelation {
                value: 0.0,
                defined: false,
            }
        } else {
            SerialCorrelation {
                value: num as f64 / den as f64,
                defined: true,
            }
        }
    }

    pub fn finish(&self) -> Result<EntReport> {
        if self.n < ENT_MIN_BYTES {
            return Err(Error::TooShort {
                needed: ENT_MIN_BYTES,
                got: self.n,
                unit: "bytes",
            });
        }
        let scc = self.serial_correlation();
        Ok(EntReport {
            byte_count: self.n,
            entropy_bits_per_byte: self.entropy(),
            chi_square: self.chi_square(),
            arithmetic_mean: self.mean(),
            monte_carlo_pi: self.monte_carlo_pi(),
            serial_correlation: scc.value,
            serial_correlation_defined: scc.defined,
        })
    }
}

fn mc_inside(g: &[u8; 6]) -> bool {
    let x = (u64::from(g[0]) << 16) | (u64::from(g[1]) << 8) | u64::from(g[2]);
    let y = (u64::from(g[3]) << 16) | (u64::from(g[4]) << 8) | u64::from(g[5]);
    x * x + y * y <= MC_RADIUS_SQ
}

pub(crate) fn drain<R: Read>(mut input: R, mut f: impl FnMut(&[u8])) -> Result<()> {
    let mut buf = vec![0u8; 1 << 16];
    loop {
        match input.read(&mut buf) {
            Ok(0) => return Ok(()),
            Ok(n) => f(&buf[..n]),
            Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e.into()),
        }
    }
}

pub fn ent_analyze<R: Read>(input: R) -> Result<EntReport> {
    let mut a = EntAnalyzer::new();
    drain(input, |b| a.update(b))?;
    a.finish()
}

pub fn monte_carlo_pi<R: Read>(input: R) -> Result<f64> {
    let mut a = EntAnalyzer::new();
    drain(input, |b| a.update(b))?;
    if a.mc_points == 0 {
        return Err(Error::TooShort {
            needed: 6,
            got: a.n,
            unit: "bytes",
        });
    }
    Ok(a.monte_carlo_pi())
}

pub fn serial_correlation<R: Read>(input: R) -> Result<SerialCorrelation> {
    let mut a = EntAnalyzer::new();
    drain(input, |b| a.update(b))?;
    if a.n < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: a.n,
            unit: "bytes",
        });
    }
    Ok(a.serial_correlation())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic(len: usize) -> Vec<u8> {
        (0..len).map(|i| i as u8).collect()
    }

    #[test]
    fn cyclic_is_exactly_uniform() {
        let r = ent_analyze(&cyclic(1 << 20)[..]).unwrap();
        assert_eq!(r.entropy_bits_per_byte, 8.0);
        assert_eq!(r.chi_square, 0.0);
        assert_eq!(r.arithmetic_mean, 127.5);
        assert!(r.serial_correlation_defined);
    }

    #[test]
    fn all_zero() {
        let n = 1u64 << 20;
        let r = ent_analyze(&vec![0u8; n as usize][..]).unwrap();
        assert_eq!(r.entropy_bits_per_byte, 0.0);
        assert!(r.entropy_bits_per_byte.is_sign_positive());
        assert_eq!(r.arithmetic_mean, 0.0);
        // One bin holds n: (n - n/256)^2/(n/256) + 255 * n/256 = 255 n.
        assert_eq!(r.chi_square, 255.0 * n as f64);
        assert_eq!(r.monte_carlo_pi, 4.0);
        assert!(!r.serial_correlation_defined);
        assert_eq!(r.serial_correlation, 0.0);
    }

    #[test]
    fn mc_boundary() {
        assert_eq!(monte_carlo_pi(&[0u8; 12][..]).unwrap(), 4.0);
        assert_eq!(monte_carlo_pi(&[0xFFu8; 12][..]).unwrap(), 0.0);
        // Leftover bytes are ignored.
        assert_eq!(monte_carlo_pi(&[0u8; 11][..]).unwrap(), 4.0);
        assert!(monte_carlo_pi(&[0u8; 5][..]).is_err());
        // A point exactly on the circle counts as inside.
        let on = [0xFF, 0xFF, 0xFF, 0, 0, 0];
        assert_eq!(monte_carlo_pi(&on[..]).unwrap(), 4.0);
    }

    #[test]
    fn alternating_is_perfectly_anticorrelated() {
        let data: Vec<u8> = (0..1000).map(|i| if i % 2 == 0 { 0 } else { 0xFF }).collect();
        let s = serial_correlation(&data[..]).unwrap();
        assert!(s.defined);
        assert_eq!(s.value, -1.0);
    }

    #[test]
    fn short_inputs() {
        assert!(matches!(
            ent_analyze(&[1u8, 2, 3][..]),
            Err(Error::TooShort { needed: 6, got: 3, .. })
        ));
        assert!(serial_correlation(&[1u8][..]).is_err());
        assert!(ent_analyze(&[][..]).is_err());
    }

    #[test]
    fn split_updates_match_single_update() {
        let data: Vec<u8> = (0..10_007u32).map(|i| (i * i % 253) as u8).collect();
        let mut whole = EntAnalyzer::new();
        whole.update(&data);
        let mut parts = EntAnalyzer::new();
        for c in data.chunks(97) {
            parts.update(c);
        }
        parts.update(&[]);
        assert_eq!(whole.finish().unwrap(), parts.finish().unwrap());
    }
}
