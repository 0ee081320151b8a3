//! Text renderings of records and of `n_m`.

use std::collections::BTreeMap;
use std::fmt::Write;

use lr_core::engine::Record;
use lr_core::exact::{factorization_string, materialize, ExponentMap};
use lr_core::primes::PrimeStream;

pub const CSV_HEADER: &str = "m,q,k,z,delta,rho,log_n,G,verdict";
pub const DEFAULT_PRECISION: usize = 4;
pub const MAX_PRECISION: usize = 15;

/// `n_m` is printed in full only below this many decimal digits.
pub const MAX_DECIMAL_DIGITS: usize = 40;

pub fn csv_row(r: &Record, precision: usize) -> String {
    let p = precision;
    format!(
        "{},{},{},{},{:.p$},{:.p$},{:.p$},{:.p$},{}",
        r.m, r.q, r.k, r.z, r.delta, r.rho, r.log_n, r.g, r.verdict.status
    )
}

/// One JSON object per line, same field names as the CSV header. Numbers
/// keep the fixed number of decimals.
pub fn json_row(r: &Record, precision: usize) -> String {
    let p = precision;
    format!(
        "{{\"m\":{},\"q\":{},\"k\":{},\"z\":{},\"delta\":{:.p$},\"rho\":{:.p$},\"log_n\":{:.p$},\"G\":{:.p$},\"verdict\":\"{}\"}}",
        r.m, r.q, r.k, r.z, r.delta, r.rho, r.log_n, r.g, r.verdict.status
    )
}

/// Primorial form such as `(29#)(5#)2^2`, valid when the primes present
/// are exactly 2, 3, 5, … up to some bound with non-increasing exponents.
/// Returns `None` for any other shape.
pub fn primorial_string(exponents: &BTreeMap<u64, u32>) -> Option<String> {
    let mut prev = u32::MAX;
    for ((&p, &k), expected) in exponents.iter().zip(PrimeStream::new()) {
        if p != expected || k > prev || k == 0 {
            return None;
        }
        prev = k;
    }
    let top = exponents.values().copied().max().unwrap_or(0);
    // largest prime carrying exponent >= j, for j = 1..=top
    let levels: Vec<u64> = (1..=top)
        .map(|j| {
            exponents
                .iter()
                .rev()
                .find(|&(_, &k)| k >= j)
                .map(|(&p, _)| p)
                .unwrap()
        })
        .collect();
    let mut out = String::new();
    let mut i = 0;
    while i < levels.len() {
        let p = levels[i];
        let run = levels[i..].iter().take_while(|&&x| x == p).count();
        let base = if p == 2 {
            "2".to_string()
        } else {
            format!("({p}#)")
        };
        // keep `(3#)^4` and a following `2` apart
        if out.ends_with(|c: char| c.is_ascii_digit()) {
            out.push('·');
        }
        if run == 1 {
            out.push_str(&base);
        } else {
            let _ = write!(out, "{base}^{run}");
        }
        i += run;
    }
    if out.is_empty() {
        out.push('1');
    }
    Some(out)
}

/// Decimal digits of `n`, if it has at most [`MAX_DECIMAL_DIGITS`].
pub fn decimal_if_small(exponents: &BTreeMap<u64, u32>, log_n: f64) -> Option<String> {
    if log_n > (MAX_DECIMAL_DIGITS as f64 + 1.0) * std::f64::consts::LN_10 {
        return None;
    }
    let digits = materialize(&ExponentMap::from_lr(exponents)).to_string();
    (digits.len() <= MAX_DECIMAL_DIGITS).then_some(digits)
}

/// `primorial = factorization = decimal`, dropping parts that do not apply.
/// The factorization is skipped beyond `max_factors` distinct primes.
pub fn describe_n(exponents: &BTreeMap<u64, u32>, log_n: f64, max_factors: usize) -> String {
    let mut parts = Vec::new();
    if let Some(s) = primorial_string(exponents) {
        parts.push(s);
    }
    if exponents.len() <= max_factors {
        let f = factorization_string(&ExponentMap::from_lr(exponents));
        if parts.first() != Some(&f) {
            parts.push(f);
        }
    } else {
        parts.push(format!("[{} distinct primes]", exponents.len()));
    }
    if let Some(d) = decimal_if_small(exponents, log_n) {
        if parts.last() != Some(&d) {
            parts.push(d);
        }
    }
    parts.join(" = ")
}
