//! Pools of permutations and their on-disk format.
//!
//! ```text
//! "PWPL" | version u16 = 1 | n_qubits u8 | reserved u8 = 0 | count u32
//!        | tag_len u16 | tag (UTF-8)
//!        | count × ( N × u32 map | crc32 u32 )
//! ```
//!
//! All integers little-endian. Each record's CRC-32 (IEEE) covers the record's
//! own map bytes.

use std::io::{self, Read, Write};

use crate::entropy::EntropySource;
use crate::error::{Error, Result};
use crate::permutation::{self, IndexPermutation, ShuffleMode};

pub const POOL_MAGIC: &[u8; 4] = b"PWPL";
pub const POOL_VERSION: u16 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixPool {
    n_qubits: u32,
    permutations: Vec<IndexPermutation>,
    generator_tag: String,
}

impl MatrixPool {
    pub fn new(
        n_qubits: u32,
        permutations: Vec<IndexPermutation>,
        generator_tag: impl Into<String>,
    ) -> Result<Self> {
        if n_qubits == 0 || n_qubits > 31 {
            return Err(Error::SizeLimit {
                got: n_qubits,
                max: 31,
            });
        }
        if permutations.is_empty() {
            return Err(Error::InvalidArgument("pool must hold at least one permutation".into()));
        }
        if permutations.len() > u32::MAX as usize {
            return Err(Error::InvalidArgument("pool too large".into()));
        }
        let size = 1usize << n_qubits;
        if let Some(p) = permutations.iter().find(|p| p.size() != size) {
            return Err(Error::LengthMismatch {
                expected: size,
                got: p.size(),
            });
        }
        let generator_tag = generator_tag.into();
        if generator_tag.len() > u16::MAX as usize {
            return Err(Error::InvalidArgument("generator tag longer than 65535 bytes".into()));
        }
        Ok(MatrixPool {
            n_qubits,
            permutations,
            generator_tag,
        })
    }

    /// Draws `count` permutations in order from `rng`.
    pub fn generate<S>(
        n_qubits: u32,
        count: usize,
        mode: ShuffleMode,
        max_qubits: u32,
        rng: &mut S,
        generator_tag: impl Into<String>,
    ) -> Result<Self>
    where
        S: EntropySource + ?Sized,
    {
        if count == 0 {
            return Err(Error::InvalidArgument("pool count must be at least 1".into()));
        }
        let perms = (0..count)
            .map(|_| permutation::generate(mode, n_qubits, max_qubits, rng))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n_qubits, perms, generator_tag)
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    /// Bits per chunk, `2^n_qubits`.
    pub fn size(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn count(&self) -> usize {
        self.permutations.len()
    }

    pub fn permutations(&self) -> &[IndexPermutation] {
        &self.permutations
    }

    pub fn get(&self, index: usize) -> Option<&IndexPermutation> {
        self.permutations.get(index)
    }

    pub fn generator_tag(&self) -> &str {
        &self.generator_tag
    }

    pub fn inverted(&self) -> MatrixPool {
        MatrixPool {
            n_qubits: self.n_qubits,
            permutations: self.permutations.iter().map(|p| p.invert()).collect(),
            generator_tag: self.generator_tag.clone(),
        }
    }

    pub fn save<W: Write>(&self, mut sink: W) -> Result<()> {
        let mut head = Vec::with_capacity(14 + self.generator_tag.len());
        head.extend_from_slice(POOL_MAGIC);
        head.extend_from_slice(&POOL_VERSION.to_le_bytes());
        head.push(self.n_qubits as u8);
        head.push(0);
        head.extend_from_slice(&(self.count() as u32).to_le_bytes());
        head.extend_from_slice(&(self.generator_tag.len() as u16).to_le_bytes());
        head.extend_from_slice(self.generator_tag.as_bytes());
        sink.write_all(&head)?;

        let mut record = Vec::with_capacity(self.size() * 4 + 4);
        for p in &self.permutations {
            record.clear();
            for &v in p.map() {
                record.extend_from_slice(&v.to_le_bytes());
            }
            let crc = crc32fast::hash(&record);
            record.extend_from_slice(&crc.to_le_bytes());
            sink.write_all(&record)?;
        }
        sink.flush()?;
        Ok(())
    }

    pub fn load<R: Read>(mut source: R) -> Result<Self> {
        let mut head = [0u8; 14];
        read_exact_or(&mut source, &mut head, "pool header")?;
        if &head[..4] != POOL_MAGIC {
            return Err(Error::BadMagic { expected: "PWPL" });
        }
        let version = u16::from_le_bytes([head[4], head[5]]);
        if version != POOL_VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        let n_qubits = u32::from(head[6]);
        if head[7] != 0 {
            return Err(Error::Corrupt(format!("reserved byte is {:#04x}", head[7])));
        }
        if n_qubits == 0 || n_qubits > 31 {
            return Err(Error::Corrupt(format!("n_qubits {n_qubits} out of range")));
        }
        let count = u32::from_le_bytes(head[8..12].try_into().unwrap()) as usize;
        if count == 0 {
            return Err(Error::Corrupt("pool count is zero".into()));
        }
        let tag_len = u16::from_le_bytes([head[12], head[13]]) as usize;
        let mut tag = vec![0u8; tag_len];
        read_exact_or(&mut source, &mut tag, "generator tag")?;
        let tag = String::from_utf8(tag)
            .map_err(|_| Error::Corrupt("generator tag is not UTF-8".into()))?;

        let size = 1usize << n_qubits;
        let mut record = vec![0u8; size * 4 + 4];
        let mut perms = Vec::with_capacity(count.min(1024));
        for r in 0..count {
            read_exact_or(&mut source, &mut record, "permutation record")?;
            let (body, crc) = record.split_at(size * 4);
            let stored = u32::from_le_bytes(crc.try_into().unwrap());
            if crc32fast::hash(body) != stored {
                return Err(Error::Checksum(format!("record {r}")));
            }
            let map = body
                .chunks_exact(4)
                .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
                .collect();
            let perm = IndexPermutation::new(map)
                .map_err(|e| Error::Corrupt(format!("record {r}: {e}")))?;
            perms.push(perm);
        }
        MatrixPool::new(n_qubits, perms, tag)
    }
}

pub(crate) fn read_exact_or<R: Read>(r: &mut R, buf: &mut [u8], what: &'static str) -> Result<()> {
    match r.read_exact(buf) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => Err(Error::Truncated(what)),
        Err(e) => Err(e.into()),
    }
}
