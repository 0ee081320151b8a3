//! Compensated (Neumaier) summation with a running error bound.

/// Neumaier accumulator that also tracks `Σ|x_i|` so callers can bound the
/// accumulated rounding error.
///
/// The reported bound is `2·(ε·(Σ|x_i| + |S|) + n·ε²·Σ|x_i|)` for `n` terms:
/// one ulp of error in each term as handed in, plus the Neumaier bound
/// `2u|S| + O(n u²)Σ|x_i|` for the summation itself, doubled.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
    abs_sum: f64,
    terms: u64,
}

impl CompensatedSum {
    pub const fn new() -> Self {
        Self {
            sum: 0.0,
            compensation: 0.0,
            abs_sum: 0.0,
            terms: 0,
        }
    }

    /// Rebuilds an accumulator from its raw parts (checkpoint restore).
    pub const fn from_parts(sum: f64, compensation: f64, abs_sum: f64, terms: u64) -> Self {
        Self {
            sum,
            compensation,
            abs_sum,
            terms,
        }
    }

    /// Raw parts `(sum, compensation, abs_sum, terms)`.
    pub const fn parts(&self) -> (f64, f64, f64, u64) {
        (self.sum, self.compensation, self.abs_sum, self.terms)
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs_sum += x.abs();
        self.terms += 1;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }

    pub fn terms(&self) -> u64 {
        self.terms
    }

    pub fn abs_sum(&self) -> f64 {
        self.abs_sum
    }

    pub fn error_bound(&self) -> f64 {
        let eps = f64::EPSILON;
        2.0 * (eps * (self.abs_sum + self.value().abs())
            + self.terms as f64 * eps * eps * self.abs_sum)
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        s.extend(iter);
        s
    }
}
