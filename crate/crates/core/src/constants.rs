//! `W₁`, `W₂` and the Meissel–Mertens constant `M`, each as a truncated sum
//! with an explicit bound on the discarded tail.
//!
//! * `W₁ = Σ_{z∈Z} (1/z − log(1 + 1/z))`
//! * `M  = γ + Σ_p (log(1 − 1/p) + 1/p)`
//! * `W₂ = M + Σ_{z∈Z, z not prime} 1/z`
//!
//! and `W₂ − W₁ = γ`.

use crate::primes::{isqrt, primes_up_to};
use crate::sum::CompensatedSum;
use crate::zstream::z_value;
use crate::{Error, Result, EULER_GAMMA};

/// A truncated constant: the true value lies in `value ± tail_bound`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantEstimate {
    pub value: f64,
    pub tail_bound: f64,
    pub terms_used: u64,
}

impl ConstantEstimate {
    pub fn lower(&self) -> f64 {
        self.value - self.tail_bound
    }

    pub fn upper(&self) -> f64 {
        self.value + self.tail_bound
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        self.lower() <= other.upper() && other.lower() <= self.upper()
    }
}

/// `x − log(1 + x)` without cancellation for small `x`.
fn x_minus_log1p(x: f64) -> f64 {
    if x < 1e-4 {
        let x2 = x * x;
        x2 * (0.5 - x * (1.0 / 3.0 - x * (0.25 - x / 5.0)))
    } else {
        x - libm::log1p(x)
    }
}

/// `log(1 − x) + x` without cancellation for small `x`.
fn log1m_plus_x(x: f64) -> f64 {
    if x < 1e-4 {
        let x2 = x * x;
        -x2 * (0.5 + x * (1.0 / 3.0 + x * (0.25 + x / 5.0)))
    } else {
        libm::log1p(-x) + x
    }
}

/// Calls `f(z)` for every non-prime element of `Z` up to `max_z`
/// (`z_{q,k}` with `k >= 2`; those are all multiples of `q` above `q`).
fn for_each_composite_z(max_z: u64, mut f: impl FnMut(u128)) {
    for q in primes_up_to(isqrt(max_z)) {
        let mut k = 2;
        while let Ok(z) = z_value(q, k) {
            if z > max_z as u128 {
                break;
            }
            f(z);
            k += 1;
        }
    }
}

/// `W₁` truncated to `z <= max_z`.
///
/// Every term lies in `(0, 1/(2z²))`, so the tail is below
/// `Σ_{z > max_z} 1/(2z²) < ∫_{max_z}^∞ dt/(2t²) = 1/(2·max_z)`.
pub fn compute_w1(max_z: u64) -> Result<ConstantEstimate> {
    if max_z < 30 {
        return Err(Error::InvalidArgument("compute_w1 needs max_z >= 30"));
    }
    let mut sum = CompensatedSum::new();
    for p in primes_up_to(max_z) {
        sum.add(x_minus_log1p(1.0 / p as f64));
    }
    for_each_composite_z(max_z, |z| sum.add(x_minus_log1p(1.0 / z as f64)));
    Ok(ConstantEstimate {
        value: sum.value(),
        tail_bound: 1.0 / (2.0 * max_z as f64),
        terms_used: sum.terms(),
    })
}

/// `M` truncated to primes `p <= max_p`.
///
/// Each term is `−(1/(2p²) + 1/(3p³) + …)`, at most `1/p²` in size for
/// `p >= 2`, so the tail is below `Σ_{n > max_p} 1/n² < 1/max_p`.
pub fn compute_m_constant(max_p: u64) -> Result<ConstantEstimate> {
    if max_p < 100 {
        return Err(Error::InvalidArgument(
            "compute_m_constant needs max_p >= 100",
        ));
    }
    let mut sum = CompensatedSum::new();
    sum.add(EULER_GAMMA);
    for p in primes_up_to(max_p) {
        sum.add(log1m_plus_x(1.0 / p as f64));
    }
    Ok(ConstantEstimate {
        value: sum.value(),
        tail_bound: 1.0 / max_p as f64,
        terms_used: sum.terms() - 1,
    })
}

/// `W₂` truncated to `z <= max_z` (and `M` to `p <= max_z`).
///
/// Tail of the composite sum, with `x = max_z >= 900`: consecutive `z_{q,k}`
/// grow by a factor above `q >= 2`, so each prime's discarded chain sums to
/// less than twice its first discarded term. The fewer than `√x/2` primes
/// `q <= √x` each lose less than `2/x`, in total below `1/√x`. For `q > √x`
/// the whole chain from `z_{q,2} > q²` is discarded, and `Σ 2/q²` over odd
/// `q > √x` is below `1/√x + 2/x`. Together this stays under `3/√x`; the
/// tail of `M` is added on top.
pub fn compute_w2(max_z: u64) -> Result<ConstantEstimate> {
    if max_z < 900 {
        return Err(Error::InvalidArgument("compute_w2 needs max_z >= 900"));
    }
    let m = compute_m_constant(max_z)?;
    let mut sum = CompensatedSum::new();
    sum.add(m.value);
    for_each_composite_z(max_z, |z| sum.add(1.0 / z as f64));
    Ok(ConstantEstimate {
        value: sum.value(),
        tail_bound: m.tail_bound + 3.0 / libm::sqrt(max_z as f64),
        terms_used: m.terms_used + sum.terms() - 1,
    })
}

/// Check of `W₂ − W₁ = γ` for two truncated estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem3Report {
    /// `W₂ − W₁`.
    pub difference: f64,
    /// `|(W₂ − W₁) − γ|`.
    pub residual: f64,
    /// `tail(W₁) + tail(W₂)`.
    pub combined_tail: f64,
    pub pass: bool,
}

pub fn verify_theorem3(w1: &ConstantEstimate, w2: &ConstantEstimate) -> Theorem3Report {
    let difference = w2.value - w1.value;
    let residual = (difference - EULER_GAMMA).abs();
    let combined_tail = w1.tail_bound + w2.tail_bound;
    Theorem3Report {
        difference,
        residual,
        combined_tail,
        pass: residual <= combined_tail + 10.0 * f64::EPSILON,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_branches_agree_with_direct_forms() {
        for &x in &[2e-4, 1.5e-4, 1.01e-4] {
            let direct = x - libm::log1p(x);
            assert!((x_minus_log1p(x * 0.999_999) / direct - 1.0).abs() < 1e-4);
            let direct = libm::log1p(-x) + x;
            assert!((log1m_plus_x(x * 0.999_999) / direct - 1.0).abs() < 1e-4);
        }
        let x = 1e-9;
        assert!((x_minus_log1p(x) / (0.5e-18 - 1e-27 / 3.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn w1_small_truncation() {
        let w = compute_w1(30).unwrap();
        assert_eq!(w.terms_used, 15);
        assert!((w.value - 0.20208).abs() < 1.0 / 60.0);
        assert!(compute_w1(29).is_err());
    }

    #[test]
    fn w1_grows_with_max_z() {
        let a = compute_w1(100_000).unwrap();
        let b = compute_w1(1_000_000).unwrap();
        assert!(a.value < b.value);
        assert!(a.overlaps(&b));
        assert!(b.tail_bound < a.tail_bound);
    }

    #[test]
    fn m_shrinks_with_max_p() {
        let a = compute_m_constant(10_000).unwrap();
        let b = compute_m_constant(100_000).unwrap();
        assert!(b.value < a.value);
        assert!(a.overlaps(&b));
        assert!(compute_m_constant(99).is_err());
    }

    #[test]
    fn w2_first_composite_terms() {
        // 6, 12, 14 are the smallest non-prime elements of Z
        let m = compute_m_constant(1000).unwrap();
        let w = compute_w2(1000).unwrap();
        let mut first = alloc::vec::Vec::new();
        for_each_composite_z(1000, |z| first.push(z));
        first.sort_unstable();
        assert_eq!(&first[..6], &[6, 12, 14, 30, 30, 39]);
        assert!(w.value > m.value + 1.0 / 6.0 + 1.0 / 12.0 + 1.0 / 14.0);
        assert!(compute_w2(899).is_err());
    }

    #[test]
    fn theorem3_with_printed_values() {
        let w1 = ConstantEstimate {
            value: 0.20208,
            tail_bound: 1e-5,
            terms_used: 0,
        };
        let w2 = ConstantEstimate {
            value: 0.77929,
            tail_bound: 1e-5,
            terms_used: 0,
        };
        let r = verify_theorem3(&w1, &w2);
        assert!((r.difference - 0.57721).abs() < 1e-12);
        assert!(r.pass);
    }
}
