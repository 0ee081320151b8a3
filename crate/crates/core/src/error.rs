use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// `q + … + q^k` does not fit in 128 bits.
    #[error("z value for q={q}, k={k} overflows 128 bits")]
    Overflow { q: u64, k: u32 },

    #[error("out-of-order stream element: expected ordinal {expected_ordinal} with k={expected_k} for q={q}, got ordinal {ordinal} with k={k}")]
    OutOfOrder {
        q: u64,
        k: u32,
        ordinal: u64,
        expected_ordinal: u64,
        expected_k: u32,
    },

    #[error("{what} requires m >= 1")]
    EmptyState { what: &'static str },

    #[error("log log n is too close to zero to divide by ({0})")]
    DegenerateLogLog(f64),

    #[error("argument {x} exceeds the sieve limit {limit}")]
    BeyondSieve { x: u64, limit: u64 },

    #[error("m={m} is outside the brute-force range 1..={max}")]
    OracleRange { m: usize, max: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    #[error("inconsistent stream state: {0}")]
    BadStreamState(&'static str),
}
