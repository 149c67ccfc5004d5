//! Small numeric helpers shared by the analysis and distribution code.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

/// `num / den` as `f64`, accurate to a few ulps for arbitrarily large operands.
pub(crate) fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    assert!(!den.is_zero(), "division by zero");
    if num.is_zero() {
        return 0.0;
    }
    let shift = den.bits() as i64 - num.bits() as i64 + 64;
    let scaled = if shift >= 0 {
        num << (shift as u64)
    } else {
        num >> ((-shift) as u64)
    };
    let quotient = (scaled / den).to_f64().unwrap_or(f64::INFINITY);
    quotient * 2f64.powi(-(shift as i32))
}

/// Base-2 logarithm of a positive big integer.
pub(crate) fn log2_big(x: &BigUint) -> f64 {
    assert!(!x.is_zero(), "log2 of zero");
    let bits = x.bits();
    if bits <= 64 {
        return x.to_f64().unwrap().log2();
    }
    let top = (x >> (bits - 64)).to_f64().unwrap();
    top.log2() + (bits - 64) as f64
}

/// `floor(log2 x)` for positive `x`.
pub(crate) fn floor_log2(x: &BigUint) -> u64 {
    x.bits().saturating_sub(1)
}

pub(crate) fn entropy_bits(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}
