//! Incremental construction of the LR numbers `n_m`.
//!
//! Consuming the stream element `(q, k)` raises the exponent of `q` from
//! `k - 1` to `k`, multiplies `n` by `q` and multiplies `ρ(n)` by `1 + 1/z`.
//! `n_m` itself is never materialised here; the state keeps compensated
//! running sums of `δ`, `log q` and `1/z` instead, so `log ρ(n_m)`, `log n_m`
//! and `Σ 1/z_i` are available at any `m`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::sum::CompensatedSum;
use crate::zstream::{StreamState, ZElement, ZStream};
use crate::{Error, Result, EXP_GAMMA, ROBIN_THRESHOLD};

/// The LR number `n_m` with its error-tracked accumulators.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LrState {
    m: u64,
    exponents: BTreeMap<u64, u32>,
    last: Option<ZElement>,
    sum_delta: CompensatedSum,
    sum_log_q: CompensatedSum,
    sum_recip_z: CompensatedSum,
}

impl LrState {
    /// The empty product, `m = 0`.
    pub fn new() -> Self {
        Self::default()
    }

    /// Reassembles a state from stored parts.
    ///
    /// Fails unless the exponents sum to `m`, `last` (when present) is the
    /// `m`-th element and agrees with the exponent of its prime, and every
    /// accumulator has seen exactly `m` terms.
    pub fn from_parts(
        m: u64,
        exponents: BTreeMap<u64, u32>,
        last: Option<ZElement>,
        sums: [CompensatedSum; 3],
    ) -> Result<Self> {
        let total: u64 = exponents.values().map(|&k| k as u64).sum();
        if total != m || exponents.values().any(|&k| k == 0) {
            return Err(Error::BadStreamState("exponents do not sum to m"));
        }
        match last {
            None if m != 0 => return Err(Error::BadStreamState("missing last element")),
            Some(e) if e.ordinal != m || exponents.get(&e.q) != Some(&e.k) => {
                return Err(Error::BadStreamState(
                    "last element disagrees with exponents",
                ))
            }
            _ => {}
        }
        if sums.iter().any(|s| s.terms() != m) {
            return Err(Error::BadStreamState(
                "accumulator term counts differ from m",
            ));
        }
        let [sum_delta, sum_log_q, sum_recip_z] = sums;
        Ok(Self {
            m,
            exponents,
            last,
            sum_delta,
            sum_log_q,
            sum_recip_z,
        })
    }

    /// Consumes the `(m+1)`-th stream element.
    pub fn extend(&mut self, e: &ZElement) -> Result<()> {
        let current = self.exponents.get(&e.q).copied().unwrap_or(0);
        if e.ordinal != self.m + 1 || e.k != current + 1 {
            return Err(Error::OutOfOrder {
                q: e.q,
                k: e.k,
                ordinal: e.ordinal,
                expected_ordinal: self.m + 1,
                expected_k: current + 1,
            });
        }
        self.exponents.insert(e.q, e.k);
        self.m += 1;
        self.last = Some(*e);
        self.sum_delta.add(e.delta());
        self.sum_log_q.add(libm::log(e.q as f64));
        self.sum_recip_z.add(1.0 / e.z as f64);
        Ok(())
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    /// Prime → exponent, ascending by prime.
    pub fn exponents(&self) -> &BTreeMap<u64, u32> {
        &self.exponents
    }

    pub fn exponent(&self, p: u64) -> u32 {
        self.exponents.get(&p).copied().unwrap_or(0)
    }

    pub fn last(&self) -> Option<&ZElement> {
        self.last.as_ref()
    }

    /// `z_m`, the value of the last consumed element.
    pub fn z_m(&self) -> Option<u128> {
        self.last.map(|e| e.z)
    }

    /// `Σ δ_i = log ρ(n_m)`.
    pub fn sum_delta(&self) -> &CompensatedSum {
        &self.sum_delta
    }

    /// `Σ log q_i = log n_m`.
    pub fn sum_log_q(&self) -> &CompensatedSum {
        &self.sum_log_q
    }

    pub fn sum_recip_z(&self) -> &CompensatedSum {
        &self.sum_recip_z
    }

    pub fn log_rho(&self) -> f64 {
        self.sum_delta.value()
    }

    pub fn log_n(&self) -> f64 {
        self.sum_log_q.value()
    }

    fn require_nonempty(&self, what: &'static str) -> Result<()> {
        if self.m == 0 {
            Err(Error::EmptyState { what })
        } else {
            Ok(())
        }
    }

    /// `ρ(n_m) = exp(Σ δ_i)`.
    pub fn rho(&self) -> Result<f64> {
        self.require_nonempty("rho")?;
        Ok(libm::exp(self.log_rho()))
    }

    /// `G(n_m) = ρ(n_m) / log log n_m`. Negative for `m = 1`, where `log 2 < 1`.
    pub fn g_value(&self) -> Result<f64> {
        let rho = self.rho()?;
        let loglog = libm::log(self.log_n());
        if loglog.abs() < 1e-12 {
            return Err(Error::DegenerateLogLog(loglog));
        }
        Ok(rho / loglog)
    }

    /// Exact test of `n_m <= bound`, stopping as soon as the partial product
    /// exceeds it.
    pub fn n_at_most(&self, bound: u64) -> bool {
        let mut acc: u64 = 1;
        for (&p, &k) in &self.exponents {
            for _ in 0..k {
                acc = acc.saturating_mul(p);
                if acc > bound {
                    return false;
                }
            }
        }
        true
    }

    /// Exponents never increase as the prime increases.
    pub fn exponents_non_increasing(&self) -> bool {
        let ks: Vec<u32> = self.exponents.values().copied().collect();
        ks.windows(2).all(|w| w[0] >= w[1])
    }

    /// Robin verdict for `n_m`: `ρ(n_m) < e^γ log log n_m` when `n_m > 5040`.
    pub fn robin_check(&self) -> Result<RobinVerdict> {
        self.require_nonempty("robin_check")?;
        let eps = f64::EPSILON;
        let rho = self.rho()?;
        let log_n = self.log_n();
        let loglog = libm::log(log_n);
        let margin = EXP_GAMMA * loglog - rho;

        // exp amplifies an absolute error in Σδ into a relative error in ρ;
        // log turns the absolute error in log n into err/log n.
        let rho_err = rho * (self.sum_delta.error_bound() + 2.0 * eps);
        let loglog_err = self.sum_log_q.error_bound() / log_n + 2.0 * eps * loglog.abs();
        let error_bound = 2.0 * (rho_err + EXP_GAMMA * loglog_err + eps * (rho + margin.abs()));

        let status = if self.n_at_most(ROBIN_THRESHOLD) {
            RobinStatus::BelowThreshold
        } else if margin > error_bound {
            RobinStatus::Holds
        } else {
            RobinStatus::Fails
        };
        Ok(RobinVerdict {
            status,
            margin,
            error_bound,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RobinStatus {
    Holds,
    /// Includes margins too small to resolve in floating point.
    Fails,
    BelowThreshold,
}

impl RobinStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RobinStatus::Holds => "holds",
            RobinStatus::Fails => "fails",
            RobinStatus::BelowThreshold => "below_threshold",
        }
    }
}

impl fmt::Display for RobinStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobinVerdict {
    pub status: RobinStatus,
    /// `e^γ log log n_m − ρ(n_m)`; positive means the inequality holds.
    pub margin: f64,
    /// Bound on the floating-point error in `margin`.
    pub error_bound: f64,
}

impl RobinVerdict {
    /// The sign of the margin could not be resolved.
    pub fn is_indeterminate(&self) -> bool {
        self.status == RobinStatus::Fails && self.margin > -self.error_bound
    }
}

/// One row of output: the element consumed at step `m` and the resulting
/// values for `n_m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record {
    pub m: u64,
    pub q: u64,
    pub k: u32,
    pub z: u128,
    pub delta: f64,
    pub rho: f64,
    pub log_n: f64,
    pub g: f64,
    pub verdict: RobinVerdict,
}

/// Destination for records produced by [`Engine::run`].
pub trait RecordSink {
    type Error;

    fn record(&mut self, record: &Record) -> core::result::Result<(), Self::Error>;

    /// Called after every `checkpoint_every` steps.
    fn checkpoint(&mut self, _engine: &Engine) -> core::result::Result<(), Self::Error> {
        Ok(())
    }
}

impl RecordSink for Vec<Record> {
    type Error = core::convert::Infallible;

    fn record(&mut self, record: &Record) -> core::result::Result<(), Self::Error> {
        self.push(*record);
        Ok(())
    }
}

#[derive(Debug)]
pub enum RunError<E> {
    Engine(Error),
    Sink(E),
}

impl<E: fmt::Display> fmt::Display for RunError<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Engine(e) => write!(f, "{e}"),
            RunError::Sink(e) => write!(f, "output failed: {e}"),
        }
    }
}

impl<E: fmt::Debug + fmt::Display> core::error::Error for RunError<E> {}

impl<E> From<Error> for RunError<E> {
    fn from(e: Error) -> Self {
        RunError::Engine(e)
    }
}

/// What a run saw.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunSummary {
    pub first_m: u64,
    pub last_m: u64,
    pub holds: u64,
    pub below_threshold: u64,
    /// `m` of every `fails` verdict, indeterminate ones included.
    pub failures: Vec<u64>,
    /// Largest `G(n_m)` among `n_m > 5040`, with its `m`.
    pub max_g: Option<(f64, u64)>,
}

impl RunSummary {
    fn observe(&mut self, r: &Record) {
        if self.first_m == 0 {
            self.first_m = r.m;
        }
        self.last_m = r.m;
        match r.verdict.status {
            RobinStatus::BelowThreshold => self.below_threshold += 1,
            RobinStatus::Holds => self.holds += 1,
            RobinStatus::Fails => self.failures.push(r.m),
        }
        if r.verdict.status != RobinStatus::BelowThreshold
            && self.max_g.is_none_or(|(g, _)| r.g > g)
        {
            self.max_g = Some((r.g, r.m));
        }
    }
}

/// Everything needed to resume an [`Engine`] bit-for-bit.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineSnapshot {
    pub state: LrState,
    pub stream: StreamState,
}

/// A [`ZStream`] folded into an [`LrState`].
#[derive(Debug, Clone, Default)]
pub struct Engine {
    stream: ZStream,
    state: LrState,
}

impl Engine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn state(&self) -> &LrState {
        &self.state
    }

    pub fn m(&self) -> u64 {
        self.state.m
    }

    /// Consumes one element and returns the record for the new `n_m`.
    pub fn step(&mut self) -> Result<Record> {
        let e = self.stream.next_element()?;
        self.state.extend(&e)?;
        self.record()
    }

    /// Record for the current `n_m`.
    pub fn record(&self) -> Result<Record> {
        let e = self
            .state
            .last
            .ok_or(Error::EmptyState { what: "record" })?;
        Ok(Record {
            m: self.state.m,
            q: e.q,
            k: e.k,
            z: e.z,
            delta: e.delta(),
            rho: self.state.rho()?,
            log_n: self.state.log_n(),
            g: self.state.g_value()?,
            verdict: self.state.robin_check()?,
        })
    }

    /// Advances `count` steps, handing each record to `sink` and calling
    /// `sink.checkpoint` whenever `m` is a multiple of `checkpoint_every`.
    pub fn run<S: RecordSink>(
        &mut self,
        count: u64,
        sink: &mut S,
        checkpoint_every: Option<u64>,
    ) -> core::result::Result<RunSummary, RunError<S::Error>> {
        if count == 0 {
            return Err(Error::InvalidArgument("run needs count >= 1").into());
        }
        let mut summary = RunSummary::default();
        for _ in 0..count {
            let r = self.step()?;
            summary.observe(&r);
            sink.record(&r).map_err(RunError::Sink)?;
            if let Some(every) = checkpoint_every.filter(|&n| n > 0) {
                if self.state.m.is_multiple_of(every) {
                    sink.checkpoint(self).map_err(RunError::Sink)?;
                }
            }
        }
        Ok(summary)
    }

    pub fn snapshot(&self) -> EngineSnapshot {
        EngineSnapshot {
            state: self.state.clone(),
            stream: self.stream.state(),
        }
    }

    /// Resumes from a snapshot after checking that the LR state and the
    /// stream agree: same `m`, and each pending `(q, k)` sits one above the
    /// exponent of `q`.
    pub fn restore(snapshot: &EngineSnapshot) -> Result<Self> {
        let stream = ZStream::from_state(&snapshot.stream)?;
        let state = snapshot.state.clone();
        if stream.emitted() != state.m {
            return Err(Error::BadStreamState("stream and LR state disagree on m"));
        }
        for &(q, k, _) in &snapshot.stream.pending {
            if state.exponent(q) + 1 != k {
                return Err(Error::BadStreamState(
                    "pending element does not follow the exponent of its prime",
                ));
            }
        }
        if state
            .exponents
            .keys()
            .any(|&p| p >= snapshot.stream.next_prime)
        {
            return Err(Error::BadStreamState("exponent for an unseeded prime"));
        }
        Ok(Self { stream, state })
    }
}
