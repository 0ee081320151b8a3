//! Versioned JSON checkpoints for resuming a generation run bit-for-bit.
//!
//! Floats are stored as their IEEE-754 bit patterns and `z` values as
//! decimal strings, so nothing is lost in the JSON round trip.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use lr_core::engine::{Engine, EngineSnapshot, LrState};
use lr_core::sum::CompensatedSum;
use lr_core::zstream::{StreamState, ZElement};
use serde::{Deserialize, Serialize};

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub m: u64,
    /// `(prime, exponent)` pairs in increasing prime order.
    pub exponents: Vec<(u64, u32)>,
    pub last: Option<Element>,
    pub sum_delta: Accumulator,
    pub sum_log_q: Accumulator,
    pub sum_recip_z: Accumulator,
    pub stream: Stream,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Element {
    pub q: u64,
    pub k: u32,
    pub z: String,
    pub ordinal: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Accumulator {
    /// Readable value; ignored when loading.
    pub value: f64,
    pub sum_bits: u64,
    pub compensation_bits: u64,
    pub abs_sum_bits: u64,
    pub terms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stream {
    pub next_prime: u64,
    pub emitted: u64,
    /// `(q, k, z)` in the order they will be emitted.
    pub pending: Vec<(u64, u32, String)>,
}

#[derive(Deserialize)]
struct VersionOnly {
    version: u32,
}

impl Accumulator {
    fn from_sum(s: &CompensatedSum) -> Self {
        let (sum, comp, abs, terms) = s.parts();
        Self {
            value: s.value(),
            sum_bits: sum.to_bits(),
            compensation_bits: comp.to_bits(),
            abs_sum_bits: abs.to_bits(),
            terms,
        }
    }

    fn to_sum(&self) -> CompensatedSum {
        CompensatedSum::from_parts(
            f64::from_bits(self.sum_bits),
            f64::from_bits(self.compensation_bits),
            f64::from_bits(self.abs_sum_bits),
            self.terms,
        )
    }
}

fn parse_z(s: &str) -> Result<u128> {
    s.parse().with_context(|| format!("bad z value {s:?}"))
}

impl Checkpoint {
    pub fn from_engine(engine: &Engine) -> Self {
        let snap = engine.snapshot();
        let s = &snap.state;
        Self {
            version: CHECKPOINT_VERSION,
            m: s.m(),
            exponents: s.exponents().iter().map(|(&p, &k)| (p, k)).collect(),
            last: s.last().map(|e| Element {
                q: e.q,
                k: e.k,
                z: e.z.to_string(),
                ordinal: e.ordinal,
            }),
            sum_delta: Accumulator::from_sum(s.sum_delta()),
            sum_log_q: Accumulator::from_sum(s.sum_log_q()),
            sum_recip_z: Accumulator::from_sum(s.sum_recip_z()),
            stream: Stream {
                next_prime: snap.stream.next_prime,
                emitted: snap.stream.emitted,
                pending: snap
                    .stream
                    .pending
                    .iter()
                    .map(|&(q, k, z)| (q, k, z.to_string()))
                    .collect(),
            },
        }
    }

    /// Rebuilds the engine; every consistency check of the core types applies.
    pub fn to_engine(&self) -> Result<Engine> {
        if self.version != CHECKPOINT_VERSION {
            bail!("unsupported checkpoint version {}", self.version);
        }
        let last = match &self.last {
            Some(e) => Some(ZElement {
                q: e.q,
                k: e.k,
                z: parse_z(&e.z)?,
                ordinal: e.ordinal,
            }),
            None => None,
        };
        let state = LrState::from_parts(
            self.m,
            self.exponents.iter().copied().collect(),
            last,
            [
                self.sum_delta.to_sum(),
                self.sum_log_q.to_sum(),
                self.sum_recip_z.to_sum(),
            ],
        )?;
        let pending = self
            .stream
            .pending
            .iter()
            .map(|(q, k, z)| Ok((*q, *k, parse_z(z)?)))
            .collect::<Result<Vec<_>>>()?;
        let stream = StreamState {
            pending,
            next_prime: self.stream.next_prime,
            emitted: self.stream.emitted,
        };
        Ok(Engine::restore(&EngineSnapshot { state, stream })?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("checkpoint serializes");
        s.push('\n');
        s
    }

    /// Refuses any version other than [`CHECKPOINT_VERSION`] before looking
    /// at the rest of the document.
    pub fn from_json(text: &str) -> Result<Self> {
        let v: VersionOnly =
            serde_json::from_str(text).context("checkpoint has no version field")?;
        if v.version != CHECKPOINT_VERSION {
            bail!(
                "unsupported checkpoint version {} (this build reads version {})",
                v.version,
                CHECKPOINT_VERSION
            );
        }
        serde_json::from_str(text).context("malformed checkpoint")
    }

    /// Writes to a sibling temporary file and renames it into place.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        fs::write(&tmp, self.to_json())
            .with_context(|| format!("writing checkpoint {}", path.display()))?;
        fs::rename(&tmp, path).with_context(|| format!("writing checkpoint {}", path.display()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading checkpoint {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("loading checkpoint {}", path.display()))
    }
}
