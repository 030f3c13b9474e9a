//! Four tests from NIST SP 800-22: frequency (monobit), frequency within a
//! block, runs, and cumulative sums in both directions. Bits are read
//! MSB-first from each byte. All four accumulate in a single streaming pass.

use std::io::Read;

use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma_ur;

use crate::error::{Error, Result};
use crate::stats::ent::drain;

pub const SIGNIFICANCE: f64 = 0.01;
pub const BLOCK_BITS: u64 = 128;
/// One full block-frequency block; also clears the monobit minimum of 100.
pub const NIST_MIN_BITS: u64 = BLOCK_BITS;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NistLiteReport {
    pub bit_count: u64,
    /// Sum of `2b - 1` over all bits.
    pub monobit_sum: i64,
    /// `|sum| / sqrt(n)`.
    pub monobit_statistic: f64,
    pub p_monobit: f64,
    pub p_block_frequency: f64,
    pub p_runs: f64,
    pub p_cusum_forward: f64,
    pub p_cusum_backward: f64,
}

impl NistLiteReport {
    pub fn p_values(&self) -> [(&'static str, f64); 5] {
        [
            ("monobit", self.p_monobit),
            ("block_frequency", self.p_block_frequency),
            ("runs", self.p_runs),
            ("cusum_forward", self.p_cusum_forward),
            ("cusum_backward", self.p_cusum_backward),
        ]
    }

    pub fn all_pass(&self) -> bool {
        self.p_values().iter().all(|&(_, p)| passes(p))
    }
}

pub fn passes(p: f64) -> bool {
    p >= SIGNIFICANCE
}

#[derive(Debug, Clone)]
pub struct NistAccumulator {
    block_bits: u64,
    n: u64,
    ones: u64,
    block_ones: u64,
    blocks: u64,
    block_chi: f64,
    transitions: u64,
    last: Option<bool>,
    partial: i64,
    max_abs: i64,
    /// Extremes of the partial sums S_0..S_{n-1}.
    prefix_min: i64,
    prefix_max: i64,
}

impl Default for NistAccumulator {
    fn default() -> Self {
        Self::new()
    }
}

impl NistAccumulator {
    pub fn new() -> Self {
        Self::with_block_bits(BLOCK_BITS)
    }

    pub(crate) fn with_block_bits(block_bits: u64) -> Self {
        NistAccumulator {
            block_bits,
            n: 0,
            ones: 0,
            block_ones: 0,
            blocks: 0,
            block_chi: 0.0,
            transitions: 0,
            last: None,
            partial: 0,
            max_abs: 0,
            prefix_min: 0,
            prefix_max: 0,
        }
    }

    pub fn update(&mut self, data: &[u8]) {
        for &byte in data {
            for shift in (0..8).rev() {
                self.push_bit((byte >> shift) & 1 == 1);
            }
        }
    }

    pub(crate) fn push_bit(&mut self, bit: bool) {
        self.prefix_min = self.prefix_min.min(self.partial);
        self.prefix_max = self.prefix_max.max(self.partial);
        self.partial += if bit { 1 } else { -1 };
        self.max_abs = self.max_abs.max(self.partial.abs());

        self.n += 1;
        if bit {
            self.ones += 1;
            self.block_ones += 1;
        }
        if self.n.is_multiple_of(self.block_bits) {
            let pi = self.block_ones as f64 / self.block_bits as f64 - 0.5;
            self.block_chi += pi * pi;
            self.blocks += 1;
            self.block_ones = 0;
        }
        if let Some(prev) = self.last {
            if prev != bit {
                self.transitions += 1;
            }
        }
        self.last = Some(bit);
    }

    pub fn bit_count(&self) -> u64 {
        self.n
    }

    pub fn finish(&self) -> Result<NistLiteReport> {
        let needed = self.block_bits.max(100);
        if self.n < needed {
            return Err(Error::TooShort {
                needed,
                got: self.n,
                unit: "bits",
            });
        }
        let n = self.n as f64;
        let sqrt_n = n.sqrt();

        let s_obs = self.partial.unsigned_abs() as f64 / sqrt_n;
        let p_monobit = erfc(s_obs / std::f64::consts::SQRT_2);

        let chi = 4.0 * self.block_bits as f64 * self.block_chi;
        // Every block exactly balanced: the statistic is 0 and the upper tail is 1.
        let p_block_frequency = if chi > 0.0 {
            gamma_ur(self.blocks as f64 / 2.0, chi / 2.0)
        } else {
            1.0
        };

        let pi = self.ones as f64 / n;
        let p_runs = if (pi - 0.5).abs() >= 2.0 / sqrt_n {
            // Frequency prerequisite failed; the runs test is not applicable.
            0.0
        } else {
            let v = (self.transitions + 1) as f64;
            let num = (v - 2.0 * n * pi * (1.0 - pi)).abs();
            let den = 2.0 * (2.0 * n).sqrt() * pi * (1.0 - pi);
            erfc(num / den)
        };

        let z_back = (self.partial - self.prefix_min)
            .abs()
            .max((self.partial - self.prefix_max).abs());

        Ok(NistLiteReport {
            bit_count: self.n,
            monobit_sum: self.partial,
            monobit_statistic: s_obs,
            p_monobit: clamp01(p_monobit),
            p_block_frequency: clamp01(p_block_frequency),
            p_runs: clamp01(p_runs),
            p_cusum_forward: clamp01(cusum_p(self.n, self.max_abs)),
            p_cusum_backward: clamp01(cusum_p(self.n, z_back)),
        })
    }
}

fn clamp01(p: f64) -> f64 {
    p.clamp(0.0, 1.0)
}

/// Summation limits are truncated toward zero, as in the reference code.
fn cusum_p(n: u64, z: i64) -> f64 {
    let normal = Normal::standard();
    let phi = |x: f64| normal.cdf(x);
    let n = n as f64;
    let z = z as f64;
    let sqrt_n = n.sqrt();

    let mut sum1 = 0.0;
    let mut k = ((-n / z + 1.0) / 4.0).trunc() as i64;
    let hi = ((n / z - 1.0) / 4.0).trunc() as i64;
    while k <= hi {
        let kf = k as f64;
        sum1 += phi((4.0 * kf + 1.0) * z / sqrt_n) - phi((4.0 * kf - 1.0) * z / sqrt_n);
        k += 1;
    }
    let mut sum2 = 0.0;
    let mut k = ((-n / z - 3.0) / 4.0).trunc() as i64;
    while k <= hi {
        let kf = k as f64;
        sum2 += phi((4.0 * kf + 3.0) * z / sqrt_n) - phi((4.0 * kf + 1.0) * z / sqrt_n);
        k += 1;
    }
    1.0 - sum1 + sum2
}

pub fn nist_lite<R: Read>(input: R) -> Result<NistLiteReport> {
    let mut acc = NistAccumulator::new();
    drain(input, |b| acc.update(b))?;
    acc.finish()
}
