//! Selberg enveloping-sieve toolkit.
//!
//! The library builds the Selberg majorant `beta_R` for a product of integer
//! linear forms and exercises it from three directions:
//!
//! * exact sieve identities and Fourier expansions ([`selberg`], [`gy`]),
//! * spectral measurements of exponential sums over prime tuples ([`spectra`]),
//! * Bohr-set transference and Chen-prime progression scans ([`transfer`],
//!   [`chen`]).
//!
//! Kit tables (`h`, `G`, `lambda`, `alpha`, `beta`) are exact rationals;
//! large scans and all Fourier work run in `f64`. Scans split into fixed
//! blocks before any threading decision (see [`exec`]), so results do not
//! depend on thread count or on the `parallel` feature.

pub mod arith;
pub mod chen;
pub mod forms;
pub mod gy;
pub mod selberg;
pub mod spectra;
pub mod suite;
pub mod report;
pub mod transfer;
pub mod exec;

/// Exact rational used for all kit tables.
pub type Rat = num::BigRational;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed input: form strings, fractions, files.
    #[error("parse error: {0}")]
    Parse(String),
    /// A stated hypothesis of the computation does not hold.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    /// Input outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// The form has a vanishing local density, so no sieve kit exists.
    #[error("degenerate form: {0}")]
    Degenerate(String),
    /// Work or memory beyond the configured budget.
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code: 2 bad input, 3 violated hypothesis, 4 blown budget.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) => 2,
            Error::Hypothesis(_) | Error::Domain(_) | Error::Degenerate(_) => 3,
            Error::Budget(_) => 4,
            Error::Io(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Scan budget: `SELBERG_BUDGET` when set, else the caller's default.
/// Guards factoring scans, sieve limits, and transform grid sizes.
pub fn budget_or(default: u64) -> u64 {
    std::env::var("SELBERG_BUDGET")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(default)
}

/// Cache directory: `SELBERG_CACHE_DIR` when set, else `./.cache`.
pub fn cache_dir() -> std::path::PathBuf {
    std::env::var_os("SELBERG_CACHE_DIR")
        .map(Into::into)
        .unwrap_or_else(|| std::path::PathBuf::from("./.cache"))
}
