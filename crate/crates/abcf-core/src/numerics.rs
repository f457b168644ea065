//! Scalar special functions backing the measure computations: the digamma
//! function, the real dilogarithm, a closed-form logarithmic integral, and
//! a natural logarithm for big integers.

// Domain guards are written as `!(x > 0.0)` so a NaN argument fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use num_bigint::{BigInt, Sign};
use num_traits::ToPrimitive;

use crate::error::{AbcfError, Result};

/// Euler's constant, the negative of `digamma(1)`.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const PI2_6: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;

/// Digamma function for positive arguments: the ascending recurrence pushes
/// the argument past 10, then the Bernoulli asymptotic series applies.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(AbcfError::FormulaDomainError(format!(
            "digamma needs a positive argument, got {x}"
        )));
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // Nested coefficients are B_{2n} / (2n) in magnitude.
    let series = inv2
        * (1.0 / 12.0
            - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 / 132.0))));
    Ok(acc + x.ln() - 0.5 * inv - series)
}

fn dilog_series(x: f64) -> f64 {
    debug_assert!(x.abs() <= 0.5 + 1e-12);
    let mut term = x;
    let mut sum = 0.0;
    let mut k = 1u32;
    while term.abs() > 1e-18 && k < 200 {
        sum += term / f64::from(k * k);
        term *= x;
        k += 1;
    }
    sum
}

/// Real dilogarithm on `(-inf, 1]`, combining the defining series with the
/// reflection, Landen, and inversion identities.
pub fn dilog(x: f64) -> Result<f64> {
    if x > 1.0 {
        return Err(AbcfError::FormulaDomainError(format!(
            "real dilogarithm is defined for arguments at most 1, got {x}"
        )));
    }
    if x == 1.0 {
        return Ok(PI2_6);
    }
    if (-0.5..=0.5).contains(&x) {
        Ok(dilog_series(x))
    } else if x > 0.5 {
        Ok(PI2_6 - x.ln() * (1.0 - x).ln() - dilog_series(1.0 - x))
    } else if x >= -1.0 {
        Ok(-dilog_series(x / (x - 1.0)) - 0.5 * (1.0 - x).ln().powi(2))
    } else {
        Ok(-PI2_6 - 0.5 * (-x).ln().powi(2) - dilog(1.0 / x)?)
    }
}

/// The integral of `ln t / (t + c)` over `(0, x)` for positive `x` and `c`,
/// in closed form through the dilogarithm.
pub fn log_integral_over_shifted(x: f64, c: f64) -> Result<f64> {
    if !(x > 0.0) || !(c > 0.0) {
        return Err(AbcfError::FormulaDomainError(format!(
            "log integral needs positive bound and shift, got bound {x}, shift {c}"
        )));
    }
    Ok(x.ln() * (1.0 + x / c).ln() + dilog(-x / c)?)
}

/// The integral of `ln t / (c - t)` over `(0, x)` for `0 < x < c`, in
/// closed form through the dilogarithm.
pub fn log_integral_over_reflected(x: f64, c: f64) -> Result<f64> {
    if !(x > 0.0) || !(c > x) {
        return Err(AbcfError::FormulaDomainError(format!(
            "reflected log integral needs 0 < bound < shift, got bound {x}, shift {c}"
        )));
    }
    Ok(-x.ln() * (1.0 - x / c).ln() - dilog(x / c)?)
}

/// Natural logarithm of a positive big integer, exact to working precision
/// even when the integer overflows `f64`.
pub fn big_ln(n: &BigInt) -> Result<f64> {
    if n.sign() != Sign::Plus {
        return Err(AbcfError::FormulaDomainError(format!(
            "logarithm of a non-positive integer {n}"
        )));
    }
    let bits = n.bits();
    if bits <= 53 {
        return Ok(n.to_f64().unwrap().ln());
    }
    let shift = (bits - 53) as usize;
    let top = (n >> shift).to_f64().unwrap();
    Ok(top.ln() + (bits - 53) as f64 * std::f64::consts::LN_2)
}
