//! Log-domain combinatorics and the Gaussian tail function shared by every
//! bound.
//!
//! All combinatorics stay in the natural-log domain; conversion to bits
//! (division by `ln 2`) happens only at reporting boundaries. This keeps
//! multinomials for block lengths in the hundreds far away from overflow.

use crate::{Error, Result};

/// A non-negative quantity stored as its natural logarithm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogValue(pub f64);

impl LogValue {
    /// The stored value, in nats.
    pub fn nats(self) -> f64 {
        self.0
    }

    /// The stored value converted to a base-2 logarithm.
    pub fn bits(self) -> f64 {
        self.0 / std::f64::consts::LN_2
    }

    /// `exp` of the stored value. May overflow to infinity for large inputs;
    /// callers that need the linear value are expected to know it is small.
    pub fn to_linear(self) -> f64 {
        self.0.exp()
    }
}

/// Gaussian tail probability `Q(x) = P(Z > x)` for standard normal `Z`,
/// evaluated through the complementary error function.
///
/// Monotone decreasing, `Q(0) = 1/2`, and underflows gracefully to `0.0` for
/// arguments beyond the double-precision tail (around `x = 38`).
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// `ln(k!)`, exact integer arithmetic for `k <= 20`, log-gamma beyond.
pub fn log_factorial(k: u64) -> LogValue {
    if k <= 20 {
        let mut acc: u64 = 1;
        for i in 2..=k {
            acc *= i;
        }
        LogValue((acc as f64).ln())
    } else {
        LogValue(libm::lgamma(k as f64 + 1.0))
    }
}

/// `ln(n! / prod_i counts_i!)` — the number of distinct arrangements of a
/// multiset with the given composition.
pub fn log_multinomial(n: u64, counts: &[u64]) -> Result<LogValue> {
    let total: u64 = counts.iter().sum();
    if total != n {
        return Err(Error::CountMismatch {
            expected: n,
            got: total,
        });
    }
    let mut v = log_factorial(n).0;
    for &c in counts {
        v -= log_factorial(c).0;
    }
    Ok(LogValue(v))
}

/// Shannon entropy of a pmf in nats, with the convention `0 ln 0 = 0`.
pub fn entropy_nats(p: &[f64]) -> Result<f64> {
    validate_pmf(p)?;
    let mut h = 0.0;
    for &x in p {
        if x > 0.0 {
            h -= x * x.ln();
        }
    }
    Ok(h)
}

/// Checks entries are non-negative and sum to one within `1e-12`.
pub fn validate_pmf(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::NotAPmf("empty vector".into()));
    }
    if let Some(x) = p.iter().find(|&&x| x.is_nan() || x < 0.0) {
        return Err(Error::NotAPmf(format!("negative or NaN entry {x}")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::NotAPmf(format!("entries sum to {sum}")));
    }
    Ok(())
}
