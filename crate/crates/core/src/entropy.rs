//! Sources of the random integers consumed by permutation generation and
//! per-chunk pool selection.
//!
//! Every source exposes raw bytes through [`EntropySource::fill_bytes`];
//! integer draws are built on top by rejection sampling so that no range is
//! favoured by modulo reduction.
//!
//! The deterministic source is the ChaCha20 keystream (RFC 8439 block
//! function, 20 rounds, zero nonce). The 32-byte key is the 64-bit user key in
//! little-endian order followed by 24 zero bytes, and the stream starts at
//! block `counter`. Bytes are consumed strictly in keystream order, so any
//! ChaCha20 implementation reproduces the same draw sequence.

use std::fmt;
use std::fs::File;
use std::io::{self, BufReader, Read};
use std::path::{Path, PathBuf};

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};

/// Consecutive rejections tolerated before a source is declared broken. Each
/// draw is rejected with probability at most 1/2, so a healthy source hits
/// this with probability below 2^-128.
const MAX_REJECTIONS: u32 = 128;

pub trait EntropySource {
    /// Fills `buf` completely or fails.
    fn fill_bytes(&mut self, buf: &mut [u8]) -> Result<()>;

    /// Uniform integer in `[lo, hi]`, both inclusive.
    ///
    /// Draws the fewest big-endian bytes that cover the range and rejects
    /// values at or above the largest multiple of the range size. A
    /// degenerate range returns `lo` without touching the source.
    fn random_int(&mut self, lo: u64, hi: u64) -> Result<u64> {
        if lo > hi {
            return Err(Error::InvalidRange { lo, hi });
        }
        let span = hi - lo;
        if span == 0 {
            return Ok(lo);
        }
        let nbytes = (64 - span.leading_zeros()).div_ceil(8) as usize;
        let range = u128::from(span) + 1;
        let total = 1u128 << (8 * nbytes);
        let limit = total - total % range;
        let mut buf = [0u8; 8];
        for _ in 0..MAX_REJECTIONS {
            self.fill_bytes(&mut buf[..nbytes])?;
            let v = buf[..nbytes]
                .iter()
                .fold(0u128, |acc, &b| (acc << 8) | u128::from(b));
            if v < limit {
                return Ok(lo + (v % range) as u64);
            }
        }
        Err(Error::Source(format!(
            "{MAX_REJECTIONS} consecutive rejections drawing from [{lo}, {hi}]"
        )))
    }

    /// Uniform index in `[0, m)`.
    fn random_index(&mut self, m: usize) -> Result<usize> {
        if m == 0 {
            return Err(Error::InvalidArgument("random_index needs m >= 1".into()));
        }
        Ok(self.random_int(0, m as u64 - 1)? as usize)
    }
}

impl<S: EntropySource + ?Sized> EntropySource for &mut S {
    fn fill_bytes(&mut self, buf: &mut [u8]) -> Result<()> {
        (**self).fill_bytes(buf)
    }

    fn random_int(&mut self, lo: u64, hi: u64) -> Result<u64> {
        (**self).random_int(lo, hi)
    }
}

impl<S: EntropySource + ?Sized> EntropySource for Box<S> {
    fn fill_bytes(&mut self, buf: &mut [u8]) -> Result<()> {
        (**self).fill_bytes(buf)
    }

    fn random_int(&mut self, lo: u64, hi: u64) -> Result<u64> {
        (**self).random_int(lo, hi)
    }
}

/// Operating-system entropy, buffered.
pub struct OsEntropy {
    buf: Box<[u8; 4096]>,
    pos: usize,
}

impl OsEntropy {
    pub fn new() -> Self {
        OsEntropy {
            buf: Box::new([0; 4096]),
            pos: 4096,
        }
    }
}

impl Default for OsEntropy {
    fn default() -> Self {
        Self::new()
    }
}

impl EntropySource for OsEntropy {
    fn fill_bytes(&mut self, out: &mut [u8]) -> Result<()> {
        let mut written = 0;
        while written < out.len() {
            if self.pos == self.buf.len() {
                getrandom::fill(&mut self.buf[..]).map_err(|e| Error::Source(e.to_string()))?;
                self.pos = 0;
            }
            let n = (self.buf.len() - self.pos).min(out.len() - written);
            out[written..written + n].copy_from_slice(&self.buf[self.pos..self.pos + n]);
            self.pos += n;
            written += n;
        }
        Ok(())
    }
}

/// Raw bytes from a reader, consumed sequentially. Running out is an error;
/// the stream is never rewound.
pub struct SeedFileEntropy<R> {
    reader: R,
    consumed: u64,
}

impl SeedFileEntropy<BufReader<File>> {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        Ok(Self::from_reader(BufReader::new(File::open(path)?)))
    }
}

impl<R: Read> SeedFileEntropy<R> {
    pub fn from_reader(reader: R) -> Self {
        SeedFileEntropy {
            reader,
            consumed: 0,
        }
    }

    pub fn consumed(&self) -> u64 {
        self.consumed
    }
}

impl<R: Read> EntropySource for SeedFileEntropy<R> {
    fn fill_bytes(&mut self, buf: &mut [u8]) -> Result<()> {
        let mut filled = 0;
        while filled < buf.len() {
            match self.reader.read(&mut buf[filled..]) {
                Ok(0) => {
                    return Err(Error::SourceExhausted {
                        consumed: self.consumed + filled as u64,
                    })
                }
                Ok(n) => filled += n,
                Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
                Err(e) => return Err(e.into()),
            }
        }
        self.consumed += filled as u64;
        Ok(())
    }
}

/// Keyed, counter-based deterministic byte stream (ChaCha20 keystream).
pub struct CounterEntropy {
    rng: ChaCha20Rng,
    block: [u8; 64],
    pos: usize,
}

impl CounterEntropy {
    pub fn new(key: u64, counter: u64) -> Self {
        let mut seed = [0u8; 32];
        seed[..8].copy_from_slice(&key.to_le_bytes());
        let mut rng = ChaCha20Rng::from_seed(seed);
        rng.set_word_pos(u128::from(counter) * 16);
        CounterEntropy {
            rng,
            block: [0; 64],
            pos: 64,
        }
    }
}

impl EntropySource for CounterEntropy {
    fn fill_bytes(&mut self, out: &mut [u8]) -> Result<()> {
        let mut written = 0;
        while written < out.len() {
            if self.pos == 64 {
                self.rng.fill_bytes(&mut self.block);
                self.pos = 0;
            }
            let n = (64 - self.pos).min(out.len() - written);
            out[written..written + n].copy_from_slice(&self.block[self.pos..self.pos + n]);
            self.pos += n;
            written += n;
        }
        Ok(())
    }
}

/// Which source to open; the configuration-level view of an entropy source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SourceSpec {
    Os,
    SeedFile(PathBuf),
    Counter { key: u64, counter: u64 },
}

impl SourceSpec {
    pub fn open(&self) -> Result<Box<dyn EntropySource + Send>> {
        Ok(match self {
            SourceSpec::Os => Box::new(OsEntropy::new()),
            SourceSpec::SeedFile(path) => Box::new(SeedFileEntropy::open(path)?),
            SourceSpec::Counter { key, counter } => Box::new(CounterEntropy::new(*key, *counter)),
        })
    }
}

impl fmt::Display for SourceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceSpec::Os => write!(f, "os"),
            SourceSpec::SeedFile(p) => write!(f, "seed-file:{}", p.display()),
            SourceSpec::Counter { key, counter } => write!(f, "counter:key={key},counter={counter}"),
        }
    }
}
