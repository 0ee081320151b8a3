//! The sorted stream `Z` of prime-power partial sums `z_{q,k} = q + q² + … + q^k`.
//!
//! Elements come out by increasing `z`; equal values are ordered by larger
//! prime first (`5 + 5² = 30` precedes `2 + 2² + 2³ + 2⁴ = 30`). The stream
//! is a k-way merge over one chain per prime, held in a binary heap that
//! contains exactly one pending element per seeded prime. Primes are seeded
//! lazily from a segmented sieve, so there is no fixed horizon.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::primes::{primes_up_to, PrimeStream};
use crate::{Error, Result};

/// One member of `Z` at its position in the stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ZElement {
    pub q: u64,
    pub k: u32,
    pub z: u128,
    /// 1-based position in the stream.
    pub ordinal: u64,
}

impl ZElement {
    /// `δ = log(1 + 1/z)`, the increment to `log ρ` contributed by this element.
    pub fn delta(&self) -> f64 {
        delta_of_z(self.z)
    }
}

/// `q + q² + … + q^k`, exactly.
pub fn z_value(q: u64, k: u32) -> Result<u128> {
    if q < 2 {
        return Err(Error::InvalidArgument("z_value needs q >= 2"));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("z_value needs k >= 1"));
    }
    let q128 = q as u128;
    let mut z = q128;
    for j in 2..=k {
        z = z
            .checked_mul(q128)
            .and_then(|v| v.checked_add(q128))
            .ok_or(Error::Overflow { q, k: j })?;
    }
    Ok(z)
}

/// `δ_{q,k} = log(1 + 1/z_{q,k})`.
pub fn delta(q: u64, k: u32) -> Result<f64> {
    z_value(q, k).map(delta_of_z)
}

/// `log(1 + 1/z)` through `log1p`, so the result keeps full relative
/// precision even when `1/z` is far below machine epsilon.
#[inline]
pub fn delta_of_z(z: u128) -> f64 {
    libm::log1p(1.0 / z as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pending {
    z: u128,
    q: u64,
    k: u32,
}

// BinaryHeap is a max-heap: "greatest" is the smallest z, then the largest q.
impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        other.z.cmp(&self.z).then(self.q.cmp(&other.q))
    }
}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Snapshot of a [`ZStream`], sufficient to resume it exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamState {
    /// `(q, k, z)` for the next unemitted element of every seeded prime,
    /// in stream order.
    pub pending: Vec<(u64, u32, u128)>,
    /// Smallest prime not yet seeded.
    pub next_prime: u64,
    /// Number of elements already produced.
    pub emitted: u64,
}

/// Iterator over `Z` in stream order.
#[derive(Debug, Clone)]
pub struct ZStream {
    pending: BinaryHeap<Pending>,
    primes: PrimeStream,
    next_prime: u64,
    emitted: u64,
}

impl Default for ZStream {
    fn default() -> Self {
        Self::new()
    }
}

impl ZStream {
    pub fn new() -> Self {
        let mut primes = PrimeStream::new();
        let next_prime = primes.next().expect("prime stream is unbounded");
        Self {
            pending: BinaryHeap::new(),
            primes,
            next_prime,
            emitted: 0,
        }
    }

    pub fn emitted(&self) -> u64 {
        self.emitted
    }

    pub fn next_prime(&self) -> u64 {
        self.next_prime
    }

    fn seed_through(&mut self, z: u128) {
        while self.next_prime as u128 <= z {
            let p = self.next_prime;
            self.pending.push(Pending {
                z: p as u128,
                q: p,
                k: 1,
            });
            self.next_prime = self.primes.next().expect("prime stream is unbounded");
        }
    }

    /// Pops the next element of `Z`.
    ///
    /// On overflow of the popped prime's chain the stream is left untouched
    /// and every further call fails the same way.
    pub fn next_element(&mut self) -> Result<ZElement> {
        // z_{p,1} = p, so every prime below the current minimum must be in the heap.
        let frontier = self.pending.peek().map_or(self.next_prime as u128, |t| t.z);
        self.seed_through(frontier);
        self.pop_pending()
    }

    fn pop_pending(&mut self) -> Result<ZElement> {
        let top = *self.pending.peek().expect("seeded heap is non-empty");
        let next_z = top
            .z
            .checked_mul(top.q as u128)
            .and_then(|v| v.checked_add(top.q as u128))
            .ok_or(Error::Overflow {
                q: top.q,
                k: top.k + 1,
            })?;
        self.pending.pop();
        self.pending.push(Pending {
            z: next_z,
            q: top.q,
            k: top.k + 1,
        });
        self.emitted += 1;
        Ok(ZElement {
            q: top.q,
            k: top.k,
            z: top.z,
            ordinal: self.emitted,
        })
    }

    pub fn state(&self) -> StreamState {
        let mut pending: Vec<Pending> = self.pending.iter().copied().collect();
        // descending in heap order = stream order
        pending.sort_unstable_by(|a, b| b.cmp(a));
        StreamState {
            pending: pending.into_iter().map(|p| (p.q, p.k, p.z)).collect(),
            next_prime: self.next_prime,
            emitted: self.emitted,
        }
    }

    /// Rebuilds a stream from a snapshot, checking that it describes a
    /// reachable state: `next_prime` is prime, every smaller prime has
    /// exactly one pending entry with a correct `z`, and `emitted` equals the
    /// number of elements those entries imply were already produced.
    pub fn from_state(state: &StreamState) -> Result<Self> {
        let mut primes = PrimeStream::starting_at(state.next_prime);
        let next_prime = primes.next().expect("prime stream is unbounded");
        if next_prime != state.next_prime {
            return Err(Error::BadStreamState("next_prime is not prime"));
        }
        let mut seeded: Vec<u64> = state.pending.iter().map(|&(q, _, _)| q).collect();
        seeded.sort_unstable();
        if seeded != primes_up_to(next_prime - 1) {
            return Err(Error::BadStreamState(
                "pending primes are not exactly the primes below next_prime",
            ));
        }
        let mut heap = BinaryHeap::with_capacity(state.pending.len());
        let mut implied_emitted = 0u64;
        for &(q, k, z) in &state.pending {
            if k == 0 || z_value(q, k)? != z {
                return Err(Error::BadStreamState("pending z does not match (q, k)"));
            }
            implied_emitted += (k - 1) as u64;
            heap.push(Pending { z, q, k });
        }
        if implied_emitted != state.emitted {
            return Err(Error::BadStreamState(
                "emitted count disagrees with pending exponents",
            ));
        }
        Ok(Self {
            pending: heap,
            primes,
            next_prime,
            emitted: state.emitted,
        })
    }
}

impl Iterator for ZStream {
    type Item = Result<ZElement>;

    fn next(&mut self) -> Option<Self::Item> {
        Some(self.next_element())
    }
}
