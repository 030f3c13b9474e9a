//! Size-preserving whitening of raw random streams with pools of bit-position
//! permutations, plus the statistics used to judge the result.
//!
//! A stream is cut into chunks of `N = 2^n` bits. Each chunk is multiplied by
//! an N×N permutation matrix drawn at random from a fixed pool, which in index
//! form means output bit `i` is input bit `map[i]`. Output length always equals
//! input length.
//!
//! ```
//! use permwhite_core::{bits, IndexPermutation};
//!
//! let p = IndexPermutation::new(vec![0, 2, 3, 1]).unwrap();
//! let out = p.apply(&bits::parse("0001").unwrap()).unwrap();
//! assert_eq!(bits::render(&out), "0010");
//! ```

pub mod baseline;
pub mod bits;
pub mod entropy;
pub mod error;
pub mod permutation;
pub mod pool;
pub mod report;
pub mod stats;
pub mod whiten;

pub use entropy::{CounterEntropy, EntropySource, OsEntropy, SeedFileEntropy, SourceSpec};
pub use error::{Error, ErrorKind, Result};
pub use permutation::{
    generate_paper_shuffle, generate_unbiased_shuffle, IndexPermutation, ShuffleMode,
    DEFAULT_MAX_QUBITS,
};
pub use pool::MatrixPool;
pub use whiten::{
    frame, unwhiten_stream, whiten_stream, ChunkStream, SelectionTrace, TailPolicy, WhitenConfig,
    WhitenSummary,
};
