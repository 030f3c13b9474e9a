//! Classical whiteners kept for comparison: XOR of two streams and the
//! Von Neumann pair extractor.

use std::io::{self, Read, Write};

use crate::error::Result;

const BUF: usize = 64 * 1024;

/// Writes `a[i] ^ b[i]` until either source ends. Returns bytes written.
pub fn xor_combine<A: Read, B: Read, W: Write>(mut a: A, mut b: B, mut out: W) -> Result<u64> {
    let mut ba = vec![0u8; BUF];
    let mut bb = vec![0u8; BUF];
    let mut total = 0u64;
    loop {
        let na = fill(&mut a, &mut ba)?;
        let nb = fill(&mut b, &mut bb)?;
        let n = na.min(nb);
        for (x, y) in ba[..n].iter_mut().zip(&bb[..n]) {
            *x ^= y;
        }
        out.write_all(&ba[..n])?;
        total += n as u64;
        if n < BUF {
            break;
        }
    }
    out.flush()?;
    Ok(total)
}

/// Von Neumann extractor state carried between buffers.
#[derive(Debug, Clone, Default)]
pub struct VnState {
    /// First bit of a pair whose second bit has not arrived yet.
    pending: Option<bool>,
    /// Output bits not yet forming a full byte, MSB-first.
    acc: u8,
    acc_bits: u8,
    emitted: u64,
}

impl VnState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Consumes `input`, appending completed output bytes to `out`.
    pub fn feed(&mut self, input: &[u8], out: &mut Vec<u8>) {
        for &byte in input {
            for shift in (0..8).rev() {
                let bit = (byte >> shift) & 1 == 1;
                match self.pending.take() {
                    None => self.pending = Some(bit),
                    Some(first) if first != bit => self.push(first, out),
                    Some(_) => {}
                }
            }
        }
    }

    /// 01 emits 0 and 10 emits 1, i.e. the pair's first bit.
    fn push(&mut self, bit: bool, out: &mut Vec<u8>) {
        self.acc = (self.acc << 1) | u8::from(bit);
        self.acc_bits += 1;
        self.emitted += 1;
        if self.acc_bits == 8 {
            out.push(self.acc);
            self.acc = 0;
            self.acc_bits = 0;
        }
    }

    /// Drops any unpaired bit, flushes a zero-padded partial byte, and returns
    /// the number of output bits.
    pub fn finish(mut self, out: &mut Vec<u8>) -> u64 {
        if self.acc_bits > 0 {
            out.push(self.acc << (8 - self.acc_bits));
        }
        self.pending = None;
        self.emitted
    }
}

/// Streams `input` through the extractor. Returns the true output bit count;
/// the file's last byte may carry zero padding.
pub fn von_neumann<R: Read, W: Write>(mut input: R, mut out: W) -> Result<u64> {
    let mut state = VnState::new();
    let mut buf = vec![0u8; BUF];
    let mut produced = Vec::with_capacity(BUF / 2);
    loop {
        let n = fill(&mut input, &mut buf)?;
        if n == 0 {
            break;
        }
        state.feed(&buf[..n], &mut produced);
        out.write_all(&produced)?;
        produced.clear();
    }
    let bits = state.finish(&mut produced);
    out.write_all(&produced)?;
    out.flush()?;
    Ok(bits)
}

fn fill<R: Read>(r: &mut R, buf: &mut [u8]) -> io::Result<usize> {
    let mut n = 0;
    while n < buf.len() {
        match r.read(&mut buf[n..]) {
            Ok(0) => break,
            Ok(k) => n += k,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e),
        }
    }
    Ok(n)
}
