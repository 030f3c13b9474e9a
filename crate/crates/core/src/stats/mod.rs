//! Randomness statistics: the ENT byte-mode battery, a four-test NIST
//! subset, and before/after comparison against ideal values.

pub mod compare;
pub mod ent;
pub mod nist;

pub use compare::{compare_reports, Parameter, ParameterVerdict, Verdict};
pub use ent::{ent_analyze, monte_carlo_pi, serial_correlation, EntAnalyzer, EntReport};
pub use nist::{nist_lite, NistAccumulator, NistLiteReport};

use std::io::Read;

use crate::error::Result;

/// Both batteries over one stream in a single read.
pub fn analyze<R: Read>(input: R) -> Result<(EntReport, NistLiteReport)> {
    let mut ent = EntAnalyzer::new();
    let mut nist = NistAccumulator::new();
    ent::drain(input, |b| {
        ent.update(b);
        nist.update(b);
    })?;
    Ok((ent.finish()?, nist.finish()?))
}
