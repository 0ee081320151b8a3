//! Sieve-backed Chebyshev functions and executable bound checkers.
//!
//! [`SieveTables`] precomputes prefix sums over the primes, the prime powers
//! and the non-prime elements of `Z` up to a limit, so `θ(x)`, `ψ(x)` and
//! `ψ_Z(x)` cost one binary search each. The checkers evaluate the bracket
//! and floor bounds on `y_k` and `k_p`, the threshold characterisation of the
//! LR exponents, the sandwich on `log ρ(n_m)`, the `ψ_Z` and `log n_m`
//! bounds, the Dusart estimate for `θ` and the prime harmonic bound.
//!
//! Floating comparisons treat differences within [`TOLERANCE_ULPS`] ulps of
//! the operands' magnitude as ties: a tie passes a `≤` and fails a `<`.

use alloc::vec::Vec;

use crate::constants::ConstantEstimate;
use crate::engine::LrState;
use crate::primes::{ilog_floor, iroot, isqrt, primes_up_to};
use crate::sum::CompensatedSum;
use crate::zstream::z_value;
use crate::{Error, Result};

pub const TOLERANCE_ULPS: f64 = 64.0;

/// Constant in the prime harmonic bound `Σ_{q<=y} 1/q < log log y + 0.8666`.
pub const MERTENS_OFFSET: f64 = 0.8666;

/// Lower end of the range where `|θ(x) − x| < 0.2x/log²x` is claimed.
pub const DUSART_START: u64 = 3_594_641;

/// Residual bound for the `y_k` root: `|y + … + y^k − z| <= 1e−9·z`.
pub const YK_RESIDUAL: f64 = 1e-9;

fn tolerance(scale: f64) -> f64 {
    TOLERANCE_ULPS * f64::EPSILON * scale
}

/// Prefix sums for `θ`, `ψ` and `ψ_Z` up to a fixed limit.
#[derive(Debug, Clone)]
pub struct SieveTables {
    limit: u64,
    primes: Vec<u64>,
    theta_prefix: Vec<f64>,
    prime_powers: Vec<u64>,
    psi_prefix: Vec<f64>,
    composite_z: Vec<u64>,
    composite_z_prefix: Vec<f64>,
}

fn prefix_sums(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = CompensatedSum::new();
    values
        .map(|v| {
            acc.add(v);
            acc.value()
        })
        .collect()
}

fn prefix_at(keys: &[u64], prefix: &[f64], x: u64) -> f64 {
    match keys.partition_point(|&v| v <= x) {
        0 => 0.0,
        n => prefix[n - 1],
    }
}

impl SieveTables {
    pub const DEFAULT_LIMIT: u64 = 10_000_000;

    pub fn new(limit: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::InvalidArgument("sieve limit must be at least 2"));
        }
        let primes = primes_up_to(limit);
        let theta_prefix = prefix_sums(primes.iter().map(|&p| libm::log(p as f64)));

        // every p^k <= limit, tagged with log p
        let mut powers: Vec<(u64, u64)> = primes.iter().map(|&p| (p, p)).collect();
        for &p in primes.iter().take_while(|&&p| p * p <= limit) {
            let mut pk = p * p;
            loop {
                powers.push((pk, p));
                match pk.checked_mul(p) {
                    Some(next) if next <= limit => pk = next,
                    _ => break,
                }
            }
        }
        powers.sort_unstable();
        let psi_prefix = prefix_sums(powers.iter().map(|&(_, p)| libm::log(p as f64)));
        let prime_powers = powers.into_iter().map(|(v, _)| v).collect();

        let mut composite_z = Vec::new();
        for &q in primes.iter().take_while(|&&q| q <= isqrt(limit)) {
            let mut k = 2;
            while let Ok(z) = z_value(q, k) {
                if z > limit as u128 {
                    break;
                }
                composite_z.push(z as u64);
                k += 1;
            }
        }
        composite_z.sort_unstable();
        let composite_z_prefix = prefix_sums(composite_z.iter().map(|&z| libm::log(z as f64)));

        Ok(Self {
            limit,
            primes,
            theta_prefix,
            prime_powers,
            psi_prefix,
            composite_z,
            composite_z_prefix,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Primes `<= x` (clamped to the limit).
    pub fn primes_up_to(&self, x: u64) -> &[u64] {
        &self.primes[..self.primes.partition_point(|&p| p <= x)]
    }

    fn check_range(&self, x: u64) -> Result<()> {
        if x > self.limit {
            Err(Error::BeyondSieve {
                x,
                limit: self.limit,
            })
        } else {
            Ok(())
        }
    }

    fn check_range_u128(&self, x: u128) -> Result<u64> {
        if x > self.limit as u128 {
            Err(Error::BeyondSieve {
                x: u64::try_from(x).unwrap_or(u64::MAX),
                limit: self.limit,
            })
        } else {
            Ok(x as u64)
        }
    }

    /// `θ(x) = Σ_{p<=x} log p`; zero below 2.
    pub fn theta(&self, x: u64) -> Result<f64> {
        self.check_range(x)?;
        Ok(prefix_at(&self.primes, &self.theta_prefix, x))
    }

    /// `ψ(x) = Σ_{p^k<=x} log p`; zero below 2.
    pub fn psi(&self, x: u64) -> Result<f64> {
        self.check_range(x)?;
        Ok(prefix_at(&self.prime_powers, &self.psi_prefix, x))
    }

    /// `ψ_Z(x) = Σ_{z∈Z, z<=x} log z`, repeated values counted with multiplicity.
    pub fn psi_z(&self, x: u64) -> Result<f64> {
        self.check_range(x)?;
        Ok(prefix_at(&self.primes, &self.theta_prefix, x)
            + prefix_at(&self.composite_z, &self.composite_z_prefix, x))
    }
}

/// The positive root `y` of `y + y² + … + y^k = z` for `k >= 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YkValue {
    pub z: u128,
    pub k: u32,
    pub y: f64,
    /// `z^{1/k} − 1`.
    pub lower: f64,
    /// `z^{1/k}`.
    pub upper: f64,
    /// `y + … + y^k − z` at the returned `y`.
    pub residual: f64,
}

impl YkValue {
    pub fn in_bracket(&self) -> bool {
        self.lower < self.y && self.y < self.upper
    }
}

fn partial_geometric(y: f64, k: u32) -> f64 {
    let mut acc = 0.0;
    for _ in 0..k {
        acc = (acc + 1.0) * y;
    }
    acc
}

/// Solves `y + … + y^k = z` by bisection on `(z^{1/k} − 1, z^{1/k})`, which
/// always brackets the root: `y^k < z < (y + 1)^k`. Bisection runs until the
/// interval cannot be split further in `f64`.
pub fn solve_y_k(z: u128, k: u32) -> Result<YkValue> {
    if z < 2 {
        return Err(Error::InvalidArgument("solve_y_k needs z >= 2"));
    }
    if k < 2 {
        return Err(Error::InvalidArgument("solve_y_k needs k >= 2"));
    }
    let zf = z as f64;
    let upper = libm::pow(zf, 1.0 / k as f64);
    let lower = upper - 1.0;
    let (mut lo, mut hi) = (lower, upper);
    for _ in 0..200 {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if partial_geometric(mid, k) < zf {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (rlo, rhi) = (partial_geometric(lo, k) - zf, partial_geometric(hi, k) - zf);
    let (y, residual) = if rlo.abs() <= rhi.abs() {
        (lo, rlo)
    } else {
        (hi, rhi)
    };
    Ok(YkValue {
        z,
        k,
        y,
        lower,
        upper,
        residual,
    })
}

/// `⌊y_k⌋` for the root of `y + … + y^k = z`: the largest integer `c` with
/// `c + … + c^k <= z`, decided exactly.
pub fn floor_y_k(z: u128, k: u32) -> Result<u64> {
    let est = solve_y_k(z, k)?.y as u64;
    let fits = |c: u64| c < 2 || z_value(c, k).is_ok_and(|v| v <= z);
    let mut c = est;
    while c > 0 && !fits(c) {
        c -= 1;
    }
    while fits(c + 1) {
        c += 1;
    }
    Ok(c)
}

/// `ψ_Z(x)` rebuilt from `θ(x)` and the chains `k >= 2`: each prime `q <= y_k`
/// contributes `log(q + … + q^k)`.
pub fn psi_z_by_thresholds(x: u64, tables: &SieveTables) -> Result<f64> {
    let mut sum = CompensatedSum::new();
    sum.add(tables.theta(x)?);
    if x >= 6 {
        for k in 2..=ilog_floor(x as u128, 2) {
            let cut = floor_y_k(x as u128, k)?;
            for &q in tables.primes_up_to(cut) {
                sum.add(libm::log(z_value(q, k)? as f64));
            }
        }
    }
    Ok(sum.value())
}

/// A failed instance in a [`BoundReport`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    /// `m`, `x` or prime at which the bound failed.
    pub at: u64,
    /// Which side or clause failed.
    pub part: &'static str,
    pub slack: f64,
}

/// Number of failure witnesses kept verbatim; the rest are only counted.
pub const MAX_WITNESSES: usize = 64;

/// Outcome of running a checker over one instance or a range of them.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub theorem: &'static str,
    /// Inclusive range of `m` (or `x`) covered.
    pub range: (u64, u64),
    pub checked: u64,
    pub failed: u64,
    /// Smallest distance to a bound seen (negative on failure).
    pub worst_slack: f64,
    pub worst_at: u64,
    pub failures: Vec<Witness>,
    /// Report-only quantity, e.g. `ψ_Z(z) − θ(z) − 2√z`.
    pub residual: Option<f64>,
}

impl BoundReport {
    pub fn new(theorem: &'static str, range: (u64, u64)) -> Self {
        Self {
            theorem,
            range,
            checked: 0,
            failed: 0,
            worst_slack: f64::INFINITY,
            worst_at: range.0,
            failures: Vec::new(),
            residual: None,
        }
    }

    pub fn pass(&self) -> bool {
        self.failed == 0
    }

    fn observe(&mut self, at: u64, part: &'static str, slack: f64, ok: bool) {
        self.checked += 1;
        if slack < self.worst_slack {
            self.worst_slack = slack;
            self.worst_at = at;
        }
        if !ok {
            self.failed += 1;
            if self.failures.len() < MAX_WITNESSES {
                self.failures.push(Witness { at, part, slack });
            }
        }
    }

    /// Strict `lhs < rhs` with a tie tolerance.
    fn strict(&mut self, at: u64, part: &'static str, lhs: f64, rhs: f64, tol: f64) {
        let slack = rhs - lhs;
        self.observe(at, part, slack, slack > tol);
    }

    /// `lhs <= rhs` with a tie tolerance.
    fn non_strict(&mut self, at: u64, part: &'static str, lhs: f64, rhs: f64, tol: f64) {
        let slack = rhs - lhs;
        self.observe(at, part, slack, slack >= -tol);
    }

    /// Folds another report for the same bound into this one.
    pub fn merge(&mut self, other: BoundReport) {
        self.range = (
            self.range.0.min(other.range.0),
            self.range.1.max(other.range.1),
        );
        self.checked += other.checked;
        self.failed += other.failed;
        if other.worst_slack < self.worst_slack {
            self.worst_slack = other.worst_slack;
            self.worst_at = other.worst_at;
        }
        let room = MAX_WITNESSES.saturating_sub(self.failures.len());
        self.failures.extend(other.failures.into_iter().take(room));
        if other.residual.is_some() {
            self.residual = other.residual;
        }
    }
}

fn last_element(state: &LrState) -> Result<(u64, u128)> {
    state.last().map(|e| (e.q, e.z)).ok_or(Error::EmptyState {
        what: "bound check",
    })
}

/// Walks `primes` alongside the LR exponents, yielding `(p, k_p)` with
/// `k_p = 0` for primes absent from `n_m`.
fn exponents_along<'a>(
    primes: &'a [u64],
    state: &'a LrState,
) -> impl Iterator<Item = (u64, u32)> + 'a {
    let mut exps = state.exponents().iter().peekable();
    primes.iter().map(move |&p| match exps.peek() {
        Some(&(&q, &k)) if q == p => {
            exps.next();
            (p, k)
        }
        _ => (p, 0),
    })
}

/// Bracket `z^{1/k} − 1 < y_k < z^{1/k}` and residual for every `2 <= k <= K`,
/// `K = ⌊log z / log 2⌋`, plus `θ(z^{1/k}) − log(z)/k <= θ(y_k) <= θ(z^{1/k})`.
pub fn check_lemma1(z: u128, tables: &SieveTables) -> Result<BoundReport> {
    let at = u64::try_from(z).unwrap_or(u64::MAX);
    let mut report = BoundReport::new("lemma1", (at, at));
    if z < 4 {
        return Ok(report);
    }
    let zu = tables.check_range_u128(z)?;
    let log_z = libm::log(z as f64);
    for k in 2..=ilog_floor(z, 2) {
        let y = solve_y_k(z, k)?;
        let tol = tolerance(y.upper);
        report.strict(at, "bracket lower", y.lower, y.y, tol);
        report.strict(at, "bracket upper", y.y, y.upper, tol);
        let res_ok = y.residual.abs() <= YK_RESIDUAL * z as f64;
        report.observe(
            at,
            "residual",
            YK_RESIDUAL * z as f64 - y.residual.abs(),
            res_ok,
        );

        let theta_root = tables.theta(iroot(zu, k))?;
        let theta_y = tables.theta(floor_y_k(z, k)?)?;
        let tol = tolerance(theta_root + log_z);
        report.non_strict(
            at,
            "theta lower",
            theta_root - log_z / k as f64,
            theta_y,
            tol,
        );
        report.non_strict(at, "theta upper", theta_y, theta_root, tol);
    }
    Ok(report)
}

/// `⌊log z_m/log p⌋ − 1 <= k_p <= ⌊log z_m/log p⌋` for every prime `p < z_m`.
pub fn check_lemma2(state: &LrState, tables: &SieveTables) -> Result<BoundReport> {
    let (_, z) = last_element(state)?;
    let zu = tables.check_range_u128(z)?;
    let m = state.m();
    let mut report = BoundReport::new("lemma2", (m, m));
    let below = tables.primes_up_to(zu.saturating_sub(1));
    for (p, k) in exponents_along(below, state) {
        let j = ilog_floor(z, p) as i64;
        let k = k as i64;
        let slack = (k - (j - 1)).min(j - k);
        report.observe(
            m,
            if k < j - 1 { "lower" } else { "upper" },
            slack as f64,
            slack >= 0,
        );
    }
    Ok(report)
}

/// `k_p = k` exactly when `y_{k+1} < p <= y_k` (with `y_1 = z_m`), and
/// `k_p = 0` for `p > z_m`. When several elements share the value `z_m`,
/// those ordered after the `m`-th (smaller primes) have not been consumed
/// yet, so their exponent is one lower.
///
/// Thresholds come from [`solve_y_k`]; a prime within `1e−9` relative of a
/// threshold is placed by the exact test `p + … + p^k <= z_m`. The reported
/// slack is the smallest relative distance between a prime and a threshold
/// it was compared with (zero where the exact test decided).
pub fn check_theorem2(state: &LrState, tables: &SieveTables) -> Result<BoundReport> {
    let (q_m, z) = last_element(state)?;
    let zu = tables.check_range_u128(z)?;
    let m = state.m();
    let mut report = BoundReport::new("theorem2", (m, m));

    let top_k = ilog_floor(z, 2);
    // thresholds[k] = y_k for 1 <= k <= top_k
    let mut thresholds = alloc::vec![z as f64; top_k as usize + 1];
    for k in 2..=top_k {
        thresholds[k as usize] = solve_y_k(z, k)?.y;
    }

    let mut min_gap = f64::INFINITY;
    let mut at_most = |p: u64, k: u32| -> Result<bool> {
        if k == 1 {
            return Ok(p as u128 <= z);
        }
        let y = thresholds[k as usize];
        let gap = (p as f64 - y).abs() / y;
        if gap > 1e-9 {
            min_gap = min_gap.min(gap);
            Ok((p as f64) < y)
        } else {
            min_gap = 0.0;
            Ok(z_value(p, k)? <= z)
        }
    };

    for (p, actual) in exponents_along(tables.primes_up_to(zu), state) {
        let mut predicted = 0;
        while predicted < top_k && at_most(p, predicted + 1)? {
            predicted += 1;
        }
        if predicted > 0 && z_value(p, predicted)? == z && p < q_m {
            predicted -= 1;
        }
        let diff = (actual as i64 - predicted as i64).abs() as f64;
        report.observe(m, "exponent", -diff, diff == 0.0);
    }
    if let Some((&p, _)) = state.exponents().iter().next_back() {
        if p as u128 > z {
            report.observe(m, "prime above z_m", -1.0, false);
        }
    }
    if report.pass() {
        report.worst_slack = min_gap;
    }
    Ok(report)
}

/// `Σ 1/z_i − W₁ < log ρ(n_m) < Σ 1/z_i − W₁ + 1/(2z_m)`, evaluated at the
/// unfavourable end of the `W₁` interval on each side.
pub fn check_theorem4(state: &LrState, w1: &ConstantEstimate) -> Result<BoundReport> {
    let (_, z) = last_element(state)?;
    let m = state.m();
    let mut report = BoundReport::new("theorem4", (m, m));
    let log_rho = state.log_rho();
    let recip = state.sum_recip_z().value();
    let err = state.sum_delta().error_bound()
        + state.sum_recip_z().error_bound()
        + 4.0 * f64::EPSILON * (recip + log_rho + w1.value);
    report.strict(m, "lower", recip - w1.lower(), log_rho, err);
    report.strict(
        m,
        "upper",
        log_rho,
        recip - w1.upper() + 1.0 / (2.0 * z as f64),
        err,
    );
    Ok(report)
}

/// `θ(z) + Σ_{k=2}^K kθ(z^{1/k}) − (log z)²/log 2 <= ψ_Z(z)` and
/// `ψ_Z(z) < θ(z) + Σ_{k=2}^K kθ(z^{1/k}) + 2 log z log log z/log 2`, with
/// `K = ⌊log z/log 2⌋`, for `z = z_m`, `m >= 2` (so `z >= 3`). Also
/// reports `ψ_Z(z) − θ(z) − 2√z` as the residual.
pub fn check_theorem6(z: u128, tables: &SieveTables) -> Result<BoundReport> {
    if z < 3 {
        return Err(Error::InvalidArgument("psi_Z bounds need z >= 3"));
    }
    let zu = tables.check_range_u128(z)?;
    let mut report = BoundReport::new("theorem6", (zu, zu));
    let mut base = CompensatedSum::new();
    let theta_z = tables.theta(zu)?;
    base.add(theta_z);
    for k in 2..=ilog_floor(z, 2) {
        base.add(k as f64 * tables.theta(iroot(zu, k))?);
    }
    let base = base.value();
    let psi_z = tables.psi_z(zu)?;
    let log_z = libm::log(zu as f64);
    let lower = base - log_z * log_z / core::f64::consts::LN_2;
    let upper = base + 2.0 * log_z * libm::log(log_z) / core::f64::consts::LN_2;
    let tol = tolerance(base + psi_z + log_z * log_z);
    report.non_strict(zu, "lower", lower, psi_z, tol);
    report.strict(zu, "upper", psi_z, upper, tol);
    report.residual = Some(psi_z - theta_z - 2.0 * libm::sqrt(zu as f64));
    Ok(report)
}

/// `ψ(z_m) − log z_m · log log z_m < log n_m <= ψ(z_m)`.
pub fn check_theorem7(state: &LrState, tables: &SieveTables) -> Result<BoundReport> {
    let (_, z) = last_element(state)?;
    let zu = tables.check_range_u128(z)?;
    let m = state.m();
    let mut report = BoundReport::new("theorem7", (m, m));
    let psi = tables.psi(zu)?;
    let log_n = state.log_n();
    let log_z = libm::log(zu as f64);
    let tol = state.sum_log_q().error_bound() + tolerance(psi + log_n);
    report.strict(m, "lower", psi - log_z * libm::log(log_z), log_n, tol);
    report.non_strict(m, "upper", log_n, psi, tol);
    Ok(report)
}

fn dusart_bound(x: f64) -> f64 {
    let l = libm::log(x);
    0.2 * x / (l * l)
}

/// `|θ(x) − x| < 0.2x/log²x` on `points` evenly spaced integers in `[lo, hi]`.
pub fn check_dusart(tables: &SieveTables, lo: u64, hi: u64, points: u64) -> Result<BoundReport> {
    if lo < DUSART_START || hi < lo || points < 2 {
        return Err(Error::InvalidArgument(
            "dusart grid needs 3594641 <= lo <= hi and at least 2 points",
        ));
    }
    tables.check_range(hi)?;
    let mut report = BoundReport::new("dusart", (lo, hi));
    let span = (hi - lo) as u128;
    for i in 0..points {
        let x = lo + (span * i as u128 / (points - 1) as u128) as u64;
        let theta = tables.theta(x)?;
        let xf = x as f64;
        report.strict(
            x,
            "grid",
            (theta - xf).abs(),
            dusart_bound(xf),
            tolerance(xf),
        );
    }
    Ok(report)
}

/// `|θ(x) − x| < 0.2x/log²x` for every real `x` in `[lo, hi]`.
///
/// `θ` is constant (`= T`) on each gap `[a, b)` between consecutive primes
/// while the bound `f` increases, so `T − a < f(a)` covers the overshoot side
/// and `b − T <= f(b)` the deficit side (`x − T − f(x)` increases in `x`).
pub fn check_dusart_continuous(tables: &SieveTables, lo: u64, hi: u64) -> Result<BoundReport> {
    if lo < DUSART_START || hi < lo {
        return Err(Error::InvalidArgument(
            "dusart range needs 3594641 <= lo <= hi",
        ));
    }
    tables.check_range(hi)?;
    let mut report = BoundReport::new("dusart", (lo, hi));
    let mut breaks: Vec<u64> = Vec::new();
    breaks.push(lo);
    breaks.extend(tables.primes_up_to(hi).iter().copied().filter(|&p| p > lo));
    let edges = breaks
        .iter()
        .copied()
        .zip(breaks.iter().copied().skip(1).chain([hi]));
    for (a, b) in edges {
        let t = tables.theta(a)?;
        let (af, bf) = (a as f64, b as f64);
        report.strict(a, "overshoot", t - af, dusart_bound(af), tolerance(af));
        report.non_strict(b, "deficit", bf - t, dusart_bound(bf), tolerance(bf));
    }
    Ok(report)
}

/// `Σ_{q<=y} 1/q < log log y + 0.8666` for every real `y` in `[2, y_max]`.
/// Between consecutive primes the left side is constant and the right side
/// increases, so checking `y` at each prime is exhaustive.
pub fn check_mertens_sum(tables: &SieveTables, y_max: u64) -> Result<BoundReport> {
    tables.check_range(y_max)?;
    let mut report = BoundReport::new("mertens", (2, y_max));
    let mut sum = CompensatedSum::new();
    for &q in tables.primes_up_to(y_max) {
        sum.add(1.0 / q as f64);
        let rhs = libm::log(libm::log(q as f64)) + MERTENS_OFFSET;
        report.strict(
            q,
            "prime sum",
            sum.value(),
            rhs,
            tolerance(sum.value() + 1.0),
        );
    }
    Ok(report)
}
