//! Prime sources: a fixed sieve, an unbounded segmented sieve, and exact
//! integer roots and logarithms.

use alloc::vec;
use alloc::vec::Vec;

const SEGMENT: u64 = 1 << 16;

/// All primes `<= limit`, ascending (odd-only sieve of Eratosthenes).
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    // index i stands for 2i + 1
    let len = ((limit - 1) / 2 + 1) as usize;
    let mut composite = vec![false; len];
    composite[0] = true;
    let mut i = 1usize;
    loop {
        let p = 2 * i as u64 + 1;
        if p * p > limit {
            break;
        }
        if !composite[i] {
            let mut j = ((p * p) / 2) as usize;
            while j < len {
                composite[j] = true;
                j += p as usize;
            }
        }
        i += 1;
    }
    let mut primes = Vec::with_capacity(approx_prime_count(limit));
    primes.push(2);
    primes.extend(
        composite
            .iter()
            .enumerate()
            .filter(|(_, &c)| !c)
            .map(|(i, _)| 2 * i as u64 + 1),
    );
    primes
}

fn approx_prime_count(limit: u64) -> usize {
    let x = limit as f64;
    if x < 17.0 {
        8
    } else {
        (1.26 * x / libm::log(x)) as usize
    }
}

/// Unbounded ascending prime iterator built on a segmented sieve.
///
/// It can start at any integer, which is what lets a [`ZStream`](crate::zstream::ZStream)
/// resume from a checkpoint without replaying the primes it already seeded.
#[derive(Debug, Clone)]
pub struct PrimeStream {
    base: Vec<u64>,
    base_limit: u64,
    next_lo: u64,
    segment: Vec<u64>,
    pos: usize,
    marks: Vec<bool>,
}

impl PrimeStream {
    pub fn new() -> Self {
        Self::starting_at(2)
    }

    /// Yields every prime `>= start`.
    pub fn starting_at(start: u64) -> Self {
        Self {
            base: Vec::new(),
            base_limit: 0,
            next_lo: start.max(2),
            segment: Vec::new(),
            pos: 0,
            marks: Vec::new(),
        }
    }

    fn ensure_base(&mut self, hi: u64) {
        // need every prime p with p*p < hi
        let needed = isqrt(hi) + 1;
        if self.base_limit >= needed {
            return;
        }
        let limit = needed.max(2 * self.base_limit).max(1024);
        self.base = primes_up_to(limit);
        self.base_limit = limit;
    }

    fn fill_segment(&mut self) {
        let lo = self.next_lo;
        let hi = lo.saturating_add(SEGMENT);
        self.ensure_base(hi);
        self.marks.clear();
        self.marks.resize((hi - lo) as usize, false);
        for &p in &self.base {
            if p.saturating_mul(p) >= hi {
                break;
            }
            let first = (p * p).max(lo.div_ceil(p) * p);
            let mut j = first;
            while j < hi {
                self.marks[(j - lo) as usize] = true;
                j += p;
            }
        }
        self.segment.clear();
        self.segment.extend(
            self.marks
                .iter()
                .enumerate()
                .filter(|(_, &c)| !c)
                .map(|(i, _)| lo + i as u64)
                .filter(|&n| n >= 2),
        );
        self.pos = 0;
        self.next_lo = hi;
    }
}

impl Default for PrimeStream {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for PrimeStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        while self.pos >= self.segment.len() {
            if self.next_lo == u64::MAX {
                return None;
            }
            self.fill_segment();
        }
        let p = self.segment[self.pos];
        self.pos += 1;
        Some(p)
    }
}

/// `base^exp <= x`, without overflow.
fn pow_le(base: u64, exp: u32, x: u128) -> bool {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = match acc.checked_mul(base as u128) {
            Some(v) if v <= x => v,
            _ => return false,
        };
    }
    true
}

pub fn isqrt(x: u64) -> u64 {
    iroot(x, 2)
}

/// `⌊x^{1/k}⌋`. The floating estimate is corrected with exact integer powers,
/// so boundary cases such as perfect powers are never off by one.
pub fn iroot(x: u64, k: u32) -> u64 {
    assert!(k >= 1, "root index must be positive");
    if k == 1 || x < 2 {
        return x;
    }
    let mut r = libm::pow(x as f64, 1.0 / k as f64) as u64;
    while r > 0 && !pow_le(r, k, x as u128) {
        r -= 1;
    }
    while pow_le(r + 1, k, x as u128) {
        r += 1;
    }
    r
}

/// `⌊log x / log base⌋` for `x >= 1`, `base >= 2`: the largest `j` with
/// `base^j <= x`.
pub fn ilog_floor(x: u128, base: u64) -> u32 {
    assert!(base >= 2 && x >= 1);
    let mut j = 0;
    let mut acc: u128 = 1;
    while let Some(next) = acc.checked_mul(base as u128) {
        if next > x {
            break;
        }
        acc = next;
        j += 1;
    }
    j
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(n: u64) -> bool {
        n >= 2
            && (2..)
                .take_while(|d| d * d <= n)
                .all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn small_sieve_matches_trial_division() {
        let expected: Vec<u64> = (0..2000).filter(|&n| trial_division(n)).collect();
        assert_eq!(primes_up_to(1999), expected);
        assert_eq!(primes_up_to(1), Vec::<u64>::new());
        assert_eq!(primes_up_to(2), vec![2]);
        assert_eq!(primes_up_to(3), vec![2, 3]);
    }

    #[test]
    fn stream_matches_sieve_across_segments() {
        let limit = 3 * SEGMENT + 17;
        let streamed: Vec<u64> = PrimeStream::new().take_while(|&p| p <= limit).collect();
        assert_eq!(streamed, primes_up_to(limit));
    }

    #[test]
    fn stream_can_start_mid_range() {
        let mut s = PrimeStream::starting_at(100_000);
        assert_eq!(s.next(), Some(100_003));
        assert_eq!(PrimeStream::starting_at(7).next(), Some(7));
        assert_eq!(PrimeStream::starting_at(0).next(), Some(2));
    }

    #[test]
    fn iroot_is_exact_at_perfect_powers() {
        assert_eq!(iroot(0, 3), 0);
        assert_eq!(iroot(1, 5), 1);
        assert_eq!(iroot(8, 3), 2);
        assert_eq!(iroot(7, 3), 1);
        assert_eq!(iroot(1_000_000, 2), 1000);
        assert_eq!(iroot(999_999, 2), 999);
        assert_eq!(iroot(1 << 40, 20), 4);
        assert_eq!(iroot((1 << 40) - 1, 20), 3);
        assert_eq!(iroot(u64::MAX, 2), 4_294_967_295);
        for x in 0..5000u64 {
            for k in 2..6 {
                let r = iroot(x, k);
                assert!(r.pow(k) <= x && (r + 1).pow(k) > x, "x={x} k={k}");
            }
        }
    }

    #[test]
    fn ilog_floor_boundaries() {
        assert_eq!(ilog_floor(14, 2), 3);
        assert_eq!(ilog_floor(14, 3), 2);
        assert_eq!(ilog_floor(16, 2), 4);
        assert_eq!(ilog_floor(15, 2), 3);
        assert_eq!(ilog_floor(1, 7), 0);
        assert_eq!(ilog_floor(u128::MAX, 2), 127);
    }
}
