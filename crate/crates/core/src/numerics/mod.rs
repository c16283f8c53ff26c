//! Exact and rigorous arithmetic: big integers and rationals (GMP), outward
//! rounded intervals (MPFR), dense rational polynomials and Sturm chains.

pub mod interval;
pub mod poly;
pub mod sturm;

use std::sync::atomic::{AtomicU32, Ordering};

pub use interval::{decimal_digits, parse_rational, Interval};
pub use poly::RationalPolynomial;
pub use rug::{Integer, Rational};
pub use sturm::{isolate_roots, sturm_count, RootCount, SturmChain};

use crate::error::{Error, Result};

/// Arbitrary-precision nonnegative integer used for labeling counts.
pub type BigNat = Integer;

pub const DEFAULT_PRECISION: u32 = 256;
pub const MIN_PRECISION: u32 = 64;

static PRECISION: AtomicU32 = AtomicU32::new(DEFAULT_PRECISION);

/// Mantissa bits used by every interval computation that does not take an explicit precision.
pub fn working_precision() -> u32 {
    PRECISION.load(Ordering::Relaxed)
}

pub fn set_working_precision(bits: u32) -> Result<()> {
    if bits < MIN_PRECISION {
        return Err(Error::arg(format!(
            "precision must be at least {MIN_PRECISION} bits, got {bits}"
        )));
    }
    PRECISION.store(bits, Ordering::Relaxed);
    Ok(())
}

/// `(k^(n+1) - 1) / (k - 1)`, the number of nodes of the depth-`n` ball of the k-tree.
pub fn delta_size(k: u32, n: u32) -> Integer {
    let mut total = Integer::new();
    let mut row = Integer::from(1);
    for _ in 0..=n {
        total += &row;
        row *= k;
    }
    total
}
