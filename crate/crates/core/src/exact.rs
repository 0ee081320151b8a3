//! Exact big-integer ground truth for `σ(n)/n`.
//!
//! Everything here is arbitrary precision and independent of the
//! floating-point accumulators in [`crate::engine`], which makes it usable as
//! an oracle for them.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::primes::primes_up_to;
use crate::{Error, Result};

/// Largest `m` the brute-force maximiser accepts.
pub const MAX_BRUTE_FORCE_M: usize = 12;

/// A factorisation `n = ∏ p^{a_p}` with distinct primes and positive exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ExponentMap(BTreeMap<u64, u32>);

impl ExponentMap {
    /// Builds a map from `(prime, exponent)` pairs, rejecting zero exponents,
    /// repeated primes and non-primes.
    pub fn new<I: IntoIterator<Item = (u64, u32)>>(pairs: I) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (p, a) in pairs {
            if a == 0 {
                return Err(Error::InvalidArgument("exponents must be positive"));
            }
            if !is_prime(p) {
                return Err(Error::InvalidArgument("exponent map keys must be prime"));
            }
            if map.insert(p, a).is_some() {
                return Err(Error::InvalidArgument("repeated prime in exponent map"));
            }
        }
        Ok(Self(map))
    }

    /// Wraps an LR exponent map, which already satisfies the invariants.
    pub fn from_lr(exponents: &BTreeMap<u64, u32>) -> Self {
        debug_assert!(exponents.values().all(|&a| a > 0));
        Self(exponents.clone())
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.0.iter().map(|(&p, &a)| (p, a))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of exponents (`ω` in the LR literature, usually written `Ω`).
    pub fn omega(&self) -> u64 {
        self.0.values().map(|&a| a as u64).sum()
    }

    pub fn as_map(&self) -> &BTreeMap<u64, u32> {
        &self.0
    }
}

fn is_prime(n: u64) -> bool {
    if n < 4 {
        return n >= 2;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Exact `n` for an exponent map; `1` for the empty map.
pub fn materialize(e: &ExponentMap) -> BigUint {
    e.iter()
        .map(|(p, a)| BigUint::from(p).pow(a))
        .fold(BigUint::one(), |acc, x| acc * x)
}

/// Reduced fraction `σ(n)/n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactRho {
    numerator: BigUint,
    denominator: BigUint,
}

impl ExactRho {
    /// Reduces `numerator/denominator`; the denominator must be non-zero.
    pub fn new(numerator: BigUint, denominator: BigUint) -> Self {
        assert!(!denominator.is_zero(), "zero denominator");
        let g = numerator.gcd(&denominator);
        Self {
            numerator: numerator / &g,
            denominator: denominator / g,
        }
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn denominator(&self) -> &BigUint {
        &self.denominator
    }

    /// Nearest `f64`, also for numerators and denominators beyond `f64` range.
    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.numerator, &self.denominator)
    }
}

impl Ord for ExactRho {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.numerator * &other.denominator).cmp(&(&other.numerator * &self.denominator))
    }
}

impl PartialOrd for ExactRho {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl core::ops::Mul for &ExactRho {
    type Output = ExactRho;

    fn mul(self, rhs: &ExactRho) -> ExactRho {
        ExactRho::new(
            &self.numerator * &rhs.numerator,
            &self.denominator * &rhs.denominator,
        )
    }
}

impl fmt::Display for ExactRho {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    // scale so the integer quotient carries at least 64 significant bits
    let shift = den.bits() as i64 - num.bits() as i64 + 66;
    let q = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    let top_shift = q.bits().saturating_sub(64);
    let mantissa = (&q >> top_shift).to_u64().expect("64-bit window") as f64;
    mantissa * libm::exp2((top_shift as i64 - shift) as f64)
}

/// Natural logarithm of a big integer, accurate to a few ulps.
pub fn ln_big(n: &BigUint) -> f64 {
    assert!(!n.is_zero(), "log of zero");
    let drop = n.bits().saturating_sub(64);
    let top = (n >> drop).to_u64().expect("64-bit window") as f64;
    libm::log(top) + drop as f64 * core::f64::consts::LN_2
}

/// `σ(p^a) = 1 + p + … + p^a`.
fn sigma_prime_power(p: u64, a: u32) -> BigUint {
    let pb = BigUint::from(p);
    (pb.pow(a + 1) - 1u32) / (pb - 1u32)
}

/// `σ(n)/n = ∏_p (1 + p + … + p^a)/p^a`, exactly. The empty map gives `1`.
pub fn sigma_over_n_exact(e: &ExponentMap) -> ExactRho {
    let (num, den) = e
        .iter()
        .fold((BigUint::one(), BigUint::one()), |(num, den), (p, a)| {
            (num * sigma_prime_power(p, a), den * BigUint::from(p).pow(a))
        });
    ExactRho::new(num, den)
}

/// Result of the brute-force maximisation over `S_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub m: usize,
    /// The maximiser with the smallest `n`.
    pub best: ExponentMap,
    pub n: BigUint,
    pub rho: ExactRho,
    /// Every maximiser, ascending by `n`. Has length 1 when the maximum is unique.
    pub maximizers: Vec<ExponentMap>,
    /// Number of exponent vectors enumerated.
    pub candidates: u64,
}

struct Search {
    primes: Vec<u64>,
    // log ρ(p^a) and p^a per prime index and exponent
    log_rho: Vec<Vec<f64>>,
    power: Vec<Vec<u128>>,
    current: Vec<u32>,
    best_log: f64,
    shortlist: Vec<(f64, Vec<u32>)>,
    candidates: u64,
}

// Candidates within this relative distance of the float maximum are compared
// exactly; the float sums have ~1e-15 relative error for m <= 12.
const SHORTLIST_WINDOW: f64 = 1e-9;

impl Search {
    fn visit(&mut self, index: usize, remaining: u32, log_acc: f64) {
        if index + 1 == self.primes.len() {
            self.current[index] = remaining;
            self.leaf(log_acc + self.log_rho[index][remaining as usize]);
            return;
        }
        for a in (0..=remaining).rev() {
            self.current[index] = a;
            self.visit(
                index + 1,
                remaining - a,
                log_acc + self.log_rho[index][a as usize],
            );
        }
    }

    fn leaf(&mut self, log_rho: f64) {
        self.candidates += 1;
        if log_rho > self.best_log {
            self.best_log = log_rho;
            let floor = log_rho * (1.0 - SHORTLIST_WINDOW);
            self.shortlist.retain(|(l, _)| *l >= floor);
        }
        if log_rho >= self.best_log * (1.0 - SHORTLIST_WINDOW) {
            self.shortlist.push((log_rho, self.current.clone()));
        }
    }

    fn n_of(&self, exps: &[u32]) -> u128 {
        exps.iter()
            .enumerate()
            .map(|(i, &a)| self.power[i][a as usize])
            .product()
    }
}

/// Maximises `ρ` over `S_m = { n : Σ exponents = m }` by enumerating every
/// weak composition of `m` over the first `m` primes (`C(2m−1, m)` vectors).
///
/// Primes beyond the first `m` never need to be considered: some smaller
/// prime is unused and swapping it in strictly increases `ρ`. Ties in `ρ`
/// are resolved by smallest `n`; all maximisers are reported.
pub fn brute_force_max_rho(m: usize) -> Result<OracleResult> {
    if !(1..=MAX_BRUTE_FORCE_M).contains(&m) {
        return Err(Error::OracleRange {
            m,
            max: MAX_BRUTE_FORCE_M,
        });
    }
    let primes: Vec<u64> = primes_up_to(64).into_iter().take(m).collect();
    let mut log_rho = Vec::with_capacity(m);
    let mut power = Vec::with_capacity(m);
    for &p in &primes {
        let mut lr = Vec::with_capacity(m + 1);
        let mut pw = Vec::with_capacity(m + 1);
        let (mut pa, mut sigma) = (1u128, 1u128);
        for _ in 0..=m {
            lr.push(libm::log(sigma as f64) - libm::log(pa as f64));
            pw.push(pa);
            pa *= p as u128;
            sigma += pa;
        }
        log_rho.push(lr);
        power.push(pw);
    }
    let mut search = Search {
        primes,
        log_rho,
        power,
        current: alloc::vec![0; m],
        best_log: f64::NEG_INFINITY,
        shortlist: Vec::new(),
        candidates: 0,
    };
    search.visit(0, m as u32, 0.0);

    let to_map = |exps: &[u32], primes: &[u64]| {
        ExponentMap(
            primes
                .iter()
                .zip(exps)
                .filter(|(_, &a)| a > 0)
                .map(|(&p, &a)| (p, a))
                .collect(),
        )
    };
    let mut scored: Vec<(ExactRho, u128, ExponentMap)> = search
        .shortlist
        .iter()
        .map(|(_, exps)| {
            let map = to_map(exps, &search.primes);
            (sigma_over_n_exact(&map), search.n_of(exps), map)
        })
        .collect();
    let top = scored
        .iter()
        .map(|(r, _, _)| r)
        .max()
        .expect("enumeration is non-empty")
        .clone();
    scored.retain(|(r, _, _)| *r == top);
    scored.sort_by_key(|&(_, n, _)| n);
    let maximizers: Vec<ExponentMap> = scored.into_iter().map(|(_, _, e)| e).collect();
    let best = maximizers[0].clone();
    Ok(OracleResult {
        m,
        n: materialize(&best),
        rho: top,
        best,
        maximizers,
        candidates: search.candidates,
    })
}

/// Renders `n` as `2^3·3^2·5·7`; the empty map renders as `1`.
pub fn factorization_string(e: &ExponentMap) -> String {
    use core::fmt::Write;
    let mut out = String::new();
    for (i, (p, a)) in e.iter().enumerate() {
        if i > 0 {
            out.push('·');
        }
        if a == 1 {
            let _ = write!(out, "{p}");
        } else {
            let _ = write!(out, "{p}^{a}");
        }
    }
    if out.is_empty() {
        out.push('1');
    }
    out
}
