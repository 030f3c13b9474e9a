//! Streaming whitening: frame the input into N-bit chunks, permute each chunk
//! with a pool member picked at random, and write the chunks back in order.
//!
//! Selections are drawn on the coordinating thread in chunk order before a
//! batch is handed to the worker pool, so output depends only on the input,
//! the pool and the selector's byte stream, never on scheduling. A trailing
//! partial chunk is copied through unchanged, which keeps output length equal
//! to input length.

use std::io::{self, Read, Write};

use rayon::prelude::*;

use crate::entropy::{EntropySource, SourceSpec};
use crate::error::{Error, Result};
use crate::permutation::{IndexPermutation, ShuffleMode};
use crate::pool::{read_exact_or, MatrixPool};

pub const TRACE_MAGIC: &[u8; 4] = b"PWTR";
pub const TRACE_VERSION: u16 = 1;

/// Target bytes per batch handed to the workers.
const BATCH_BYTES: usize = 1 << 20;

/// `(full_chunk_count, tail_length)` for a stream of `input_bit_length` bits.
pub fn frame(input_bit_length: u64, n_bits: u64) -> (u64, u64) {
    assert!(n_bits >= 1, "chunk width must be at least one bit");
    (input_bit_length / n_bits, input_bit_length % n_bits)
}

/// Framing summary of a processed stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChunkStream {
    pub chunk_bits: u64,
    pub full_chunk_count: u64,
    pub tail_bits: u64,
}

impl ChunkStream {
    pub fn input_bits(&self) -> u64 {
        self.full_chunk_count * self.chunk_bits + self.tail_bits
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TailPolicy {
    #[default]
    Passthrough,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WhitenConfig {
    pub n_qubits: u32,
    /// Pool size used when a pool is generated for this run.
    pub pool_count: usize,
    pub shuffle_mode: ShuffleMode,
    pub selection_source: SourceSpec,
    pub tail_policy: TailPolicy,
    pub record_selections: bool,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

impl Default for WhitenConfig {
    fn default() -> Self {
        WhitenConfig {
            n_qubits: 13,
            pool_count: 32,
            shuffle_mode: ShuffleMode::Paper,
            selection_source: SourceSpec::Os,
            tail_policy: TailPolicy::Passthrough,
            record_selections: false,
            workers: None,
        }
    }
}

/// Pool index chosen for each full chunk, in chunk order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionTrace {
    chunk_bits: u32,
    indices: Vec<u32>,
}

impl SelectionTrace {
    pub fn new(chunk_bits: u32, indices: Vec<u32>) -> Self {
        SelectionTrace {
            chunk_bits,
            indices,
        }
    }

    pub fn chunk_bits(&self) -> u32 {
        self.chunk_bits
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    /// `(chunk ordinal, pool index)` pairs.
    pub fn entries(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.indices.iter().enumerate().map(|(k, &i)| (k as u64, i))
    }

    /// `"PWTR" | version u16 | chunk_bits u32 | count u64 | count × u32 | crc32`,
    /// little-endian, CRC-32 over every preceding byte.
    pub fn save<W: Write>(&self, sink: W) -> Result<()> {
        let mut sink = CrcWriter::new(io::BufWriter::new(sink));
        sink.write_all(TRACE_MAGIC)?;
        sink.write_all(&TRACE_VERSION.to_le_bytes())?;
        sink.write_all(&self.chunk_bits.to_le_bytes())?;
        sink.write_all(&(self.indices.len() as u64).to_le_bytes())?;
        for &i in &self.indices {
            sink.write_all(&i.to_le_bytes())?;
        }
        let crc = sink.hasher.clone().finalize();
        let mut inner = sink.inner;
        inner.write_all(&crc.to_le_bytes())?;
        inner.flush()?;
        Ok(())
    }

    pub fn load<R: Read>(mut source: R) -> Result<Self> {
        let mut hasher = crc32fast::Hasher::new();
        let mut head = [0u8; 18];
        read_exact_or(&mut source, &mut head, "trace header")?;
        hasher.update(&head);
        if &head[..4] != TRACE_MAGIC {
            return Err(Error::BadMagic { expected: "PWTR" });
        }
        let version = u16::from_le_bytes([head[4], head[5]]);
        if version != TRACE_VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        let chunk_bits = u32::from_le_bytes(head[6..10].try_into().unwrap());
        let count = u64::from_le_bytes(head[10..18].try_into().unwrap());

        let mut indices = Vec::with_capacity(count.min(1 << 20) as usize);
        let mut buf = vec![0u8; 4 * 4096];
        let mut left = count;
        while left > 0 {
            let n = left.min(4096) as usize;
            read_exact_or(&mut source, &mut buf[..4 * n], "trace indices")?;
            hasher.update(&buf[..4 * n]);
            indices.extend(
                buf[..4 * n]
                    .chunks_exact(4)
                    .map(|c| u32::from_le_bytes(c.try_into().unwrap())),
            );
            left -= n as u64;
        }
        let mut crc = [0u8; 4];
        read_exact_or(&mut source, &mut crc, "trace checksum")?;
        if hasher.finalize() != u32::from_le_bytes(crc) {
            return Err(Error::Checksum("selection trace".into()));
        }
        Ok(SelectionTrace {
            chunk_bits,
            indices,
        })
    }
}

struct CrcWriter<W> {
    inner: W,
    hasher: crc32fast::Hasher,
}

impl<W: Write> CrcWriter<W> {
    fn new(inner: W) -> Self {
        CrcWriter {
            inner,
            hasher: crc32fast::Hasher::new(),
        }
    }
}

impl<W: Write> Write for CrcWriter<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.hasher.update(&buf[..n]);
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WhitenSummary {
    pub stream: ChunkStream,
    /// Present when `record_selections` was set.
    pub trace: Option<SelectionTrace>,
}

pub fn whiten_stream<R, W, S>(
    input: R,
    pool: &MatrixPool,
    cfg: &WhitenConfig,
    selector: &mut S,
    output: W,
) -> Result<WhitenSummary>
where
    R: Read,
    W: Write,
    S: EntropySource + ?Sized,
{
    if cfg.n_qubits != pool.n_qubits() {
        return Err(Error::InvalidArgument(format!(
            "pool holds {}-qubit permutations but configuration asks for {}",
            pool.n_qubits(),
            cfg.n_qubits
        )));
    }
    let m = pool.count();
    let mut recorded = cfg.record_selections.then(Vec::new);
    let stream = run(
        input,
        pool.permutations(),
        pool.size(),
        cfg.workers,
        |_| {
            let idx = selector.random_index(m)?;
            if let Some(r) = recorded.as_mut() {
                r.push(idx as u32);
            }
            Ok(idx)
        },
        output,
    )?;
    Ok(WhitenSummary {
        stream,
        trace: recorded.map(|ix| SelectionTrace::new(pool.size() as u32, ix)),
    })
}

/// Inverts [`whiten_stream`] given the forward run's pool and trace.
///
/// The trace is checked against the pool before anything is written; a trace
/// shorter or longer than the input's chunk count is reported after the
/// stream has been consumed.
pub fn unwhiten_stream<R, W>(
    input: R,
    pool: &MatrixPool,
    trace: &SelectionTrace,
    output: W,
    workers: Option<usize>,
) -> Result<ChunkStream>
where
    R: Read,
    W: Write,
{
    if trace.chunk_bits() as usize != pool.size() {
        return Err(Error::InvalidArgument(format!(
            "trace was recorded for {}-bit chunks, pool has {}-bit permutations",
            trace.chunk_bits(),
            pool.size()
        )));
    }
    if let Some(&bad) = trace.indices().iter().find(|&&i| i as usize >= pool.count()) {
        return Err(Error::PoolIndex {
            index: bad,
            count: pool.count(),
        });
    }
    let inverse = pool.inverted();
    let indices = trace.indices();
    let stream = run(
        input,
        inverse.permutations(),
        pool.size(),
        workers,
        |ordinal| {
            indices.get(ordinal as usize).map(|&i| i as usize).ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "selection trace covers {} chunks but input has more",
                    indices.len()
                ))
            })
        },
        output,
    )?;
    if stream.full_chunk_count != indices.len() as u64 {
        return Err(Error::TraceLength {
            trace: indices.len() as u64,
            input: stream.full_chunk_count,
        });
    }
    Ok(stream)
}

fn run<R, W, F>(
    mut input: R,
    perms: &[IndexPermutation],
    n_bits: usize,
    workers: Option<usize>,
    mut select: F,
    mut output: W,
) -> Result<ChunkStream>
where
    R: Read,
    W: Write,
    F: FnMut(u64) -> Result<usize>,
{
    // A unit is the smallest byte-aligned group of whole chunks.
    let unit_bytes = (n_bits / 8).max(1);
    let chunks_per_unit = (8 / n_bits).max(1);
    let units_per_batch = (BATCH_BYTES / unit_bytes).max(1);
    let batch_bytes = units_per_batch * unit_bytes;

    let threads = match workers {
        Some(w) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?,
        ),
        None => None,
    };

    let mut src = vec![0u8; batch_bytes];
    let mut dst = vec![0u8; batch_bytes];
    let mut selection = Vec::with_capacity(units_per_batch * chunks_per_unit);
    let mut chunks = 0u64;
    let mut tail_bits = 0u64;

    loop {
        let filled = fill(&mut input, &mut src)?;
        if filled == 0 {
            break;
        }
        let units = filled / unit_bytes;
        let aligned = units * unit_bytes;

        selection.clear();
        for _ in 0..units * chunks_per_unit {
            selection.push(select(chunks)?);
            chunks += 1;
        }

        let work = |(dst_unit, (src_unit, picks)): (&mut [u8], (&[u8], &[usize]))| -> Result<()> {
            if n_bits >= 8 {
                perms[picks[0]].apply_bytes(src_unit, dst_unit)
            } else {
                for (c, &p) in picks.iter().enumerate() {
                    perms[p].apply_at(src_unit, dst_unit, c * n_bits)?;
                }
                Ok(())
            }
        };
        let mut job = || {
            dst[..aligned]
                .par_chunks_mut(unit_bytes)
                .zip(
                    src[..aligned]
                        .par_chunks(unit_bytes)
                        .zip(selection.par_chunks(chunks_per_unit)),
                )
                .try_for_each(work)
        };
        match &threads {
            Some(tp) => tp.install(job)?,
            None => job()?,
        }
        output.write_all(&dst[..aligned])?;

        if aligned < filled {
            // Only reachable at end of input: a partial chunk is copied through.
            output.write_all(&src[aligned..filled])?;
            tail_bits = ((filled - aligned) * 8) as u64;
        }
        if filled < batch_bytes {
            break;
        }
    }
    output.flush()?;
    Ok(ChunkStream {
        chunk_bits: n_bits as u64,
        full_chunk_count: chunks,
        tail_bits,
    })
}

/// Reads until `buf` is full or the source is exhausted.
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
