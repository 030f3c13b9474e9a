//! Bit-position permutations: the compact form of an N×N permutation matrix.
//!
//! A permutation matrix has a single 1 in each row, so `P × chunk` is a
//! gather: output bit `i` is input bit `map[i]`, where `P[i][map[i]] = 1`.

use std::fmt;
use std::str::FromStr;

use crate::bits;
use crate::entropy::EntropySource;
use crate::error::{Error, Result};

/// Largest accepted `n_qubits` unless the caller raises it.
pub const DEFAULT_MAX_QUBITS: u32 = 16;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IndexPermutation {
    map: Vec<u32>,
}

impl fmt::Debug for IndexPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.map.len() <= 32 {
            f.debug_tuple("IndexPermutation").field(&self.map).finish()
        } else {
            write!(f, "IndexPermutation(size={})", self.map.len())
        }
    }
}

impl IndexPermutation {
    /// Validates `map` as a bijection on `0..map.len()`.
    pub fn new(map: Vec<u32>) -> Result<Self> {
        if map.is_empty() {
            return Err(Error::NotBijection("empty map".into()));
        }
        if map.len() > u32::MAX as usize {
            return Err(Error::NotBijection("map too large".into()));
        }
        let mut seen = vec![false; map.len()];
        for (i, &v) in map.iter().enumerate() {
            let slot = seen
                .get_mut(v as usize)
                .ok_or_else(|| Error::NotBijection(format!("map[{i}] = {v} out of range")))?;
            if *slot {
                return Err(Error::NotBijection(format!("value {v} repeated at {i}")));
            }
            *slot = true;
        }
        Ok(IndexPermutation { map })
    }

    pub fn identity(size: usize) -> Self {
        IndexPermutation {
            map: (0..size as u32).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.map.len()
    }

    pub fn map(&self) -> &[u32] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i as u32 == v)
    }

    /// `output[i] = chunk[map[i]]`.
    pub fn apply(&self, chunk: &[bool]) -> Result<Vec<bool>> {
        self.check_len(chunk.len())?;
        Ok(self.map.iter().map(|&m| chunk[m as usize]).collect())
    }

    /// Byte-packed application for sizes that are a multiple of 8. `src` and
    /// `dst` hold exactly one chunk each.
    pub fn apply_bytes(&self, src: &[u8], dst: &mut [u8]) -> Result<()> {
        let n = self.map.len();
        if !n.is_multiple_of(8) {
            return Err(Error::InvalidArgument(format!(
                "byte-packed apply needs a multiple of 8 bits, size is {n}"
            )));
        }
        self.check_len(src.len() * 8)?;
        self.check_len(dst.len() * 8)?;
        for (out, idx) in dst.iter_mut().zip(self.map.chunks_exact(8)) {
            let mut acc = 0u8;
            for (b, &m) in idx.iter().enumerate() {
                let m = m as usize;
                acc |= ((src[m >> 3] << (m & 7)) & 0x80) >> b;
            }
            *out = acc;
        }
        Ok(())
    }

    /// Applies to the `size()` bits of `src` starting at `bit_offset`, writing
    /// the same bit range of `dst`. Used when chunks are narrower than a byte.
    pub fn apply_at(&self, src: &[u8], dst: &mut [u8], bit_offset: usize) -> Result<()> {
        let end = bit_offset + self.map.len();
        if end > src.len() * 8 || end > dst.len() * 8 {
            return Err(Error::LengthMismatch {
                expected: end,
                got: src.len().min(dst.len()) * 8,
            });
        }
        for (i, &m) in self.map.iter().enumerate() {
            let bit = bits::get(src, bit_offset + m as usize);
            bits::set(dst, bit_offset + i, bit);
        }
        Ok(())
    }

    pub fn invert(&self) -> Self {
        let mut inv = vec![0u32; self.map.len()];
        for (i, &m) in self.map.iter().enumerate() {
            inv[m as usize] = i as u32;
        }
        IndexPermutation { map: inv }
    }

    /// The permutation equivalent to applying `b` first, then `self`.
    pub fn compose(&self, b: &IndexPermutation) -> Result<Self> {
        if self.size() != b.size() {
            return Err(Error::LengthMismatch {
                expected: self.size(),
                got: b.size(),
            });
        }
        Ok(IndexPermutation {
            map: self.map.iter().map(|&a| b.map[a as usize]).collect(),
        })
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.map.len() {
            return Err(Error::LengthMismatch {
                expected: self.map.len(),
                got,
            });
        }
        Ok(())
    }
}

/// How permutations are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShuffleMode {
    /// Three-loop procedure with a full-range draw per position. Not uniform
    /// over permutations, but kept as the reference procedure.
    #[default]
    Paper,
    /// Fisher-Yates with a shrinking range; uniform given a uniform source.
    Unbiased,
}

impl ShuffleMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ShuffleMode::Paper => "paper",
            ShuffleMode::Unbiased => "unbiased",
        }
    }
}

impl fmt::Display for ShuffleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ShuffleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(ShuffleMode::Paper),
            "unbiased" => Ok(ShuffleMode::Unbiased),
            other => Err(Error::InvalidArgument(format!(
                "unknown shuffle mode {other:?} (expected paper or unbiased)"
            ))),
        }
    }
}

fn size_for(n_qubits: u32, max_qubits: u32) -> Result<usize> {
    if n_qubits == 0 || n_qubits > max_qubits {
        return Err(Error::SizeLimit {
            got: n_qubits,
            max: max_qubits,
        });
    }
    Ok(1usize << n_qubits)
}

/// Draws `K[i] = RandomInt(1, N)` for every position in ascending order,
/// starts from the identity, then for `i = N..1` swaps `S[K[i]]` with `S[i]`.
pub fn generate_paper_shuffle<S>(n_qubits: u32, rng: &mut S) -> Result<IndexPermutation>
where
    S: EntropySource + ?Sized,
{
    generate(ShuffleMode::Paper, n_qubits, DEFAULT_MAX_QUBITS, rng)
}

/// Textbook Fisher-Yates: for `i = N..2`, draw `r = RandomInt(1, i)` and swap
/// position `i` with position `i - r + 1`. A draw of 1 leaves position `i` in
/// place, so a source that always yields the low end gives the identity.
pub fn generate_unbiased_shuffle<S>(n_qubits: u32, rng: &mut S) -> Result<IndexPermutation>
where
    S: EntropySource + ?Sized,
{
    generate(ShuffleMode::Unbiased, n_qubits, DEFAULT_MAX_QUBITS, rng)
}

pub fn generate<S>(
    mode: ShuffleMode,
    n_qubits: u32,
    max_qubits: u32,
    rng: &mut S,
) -> Result<IndexPermutation>
where
    S: EntropySource + ?Sized,
{
    let n = size_for(n_qubits, max_qubits)?;
    let mut s: Vec<u32> = (0..n as u32).collect();
    match mode {
        ShuffleMode::Paper => {
            let mut k = Vec::with_capacity(n);
            for _ in 0..n {
                k.push(rng.random_int(1, n as u64)? as usize - 1);
            }
            for i in (0..n).rev() {
                s.swap(k[i], i);
            }
        }
        ShuffleMode::Unbiased => {
            for i in (2..=n).rev() {
                let r = rng.random_int(1, i as u64)? as usize;
                s.swap(i - 1, i - r);
            }
        }
    }
    Ok(IndexPermutation { map: s })
}
