//! Truncated Euler products with explicit tail bounds.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, primes_up_to, Rational};
use crate::error::{Error, Result};

/// `|(1 - u)^7 (1 + 7u + u^2) - 1| <= 27 u^2` for `0 < u <= 1/2`; one unit
/// of slack is added.
pub const OMEGA_H_TAIL_CONSTANT: f64 = 28.0;

/// `|(1 - u)^2 (1 + 2u) - 1| = 3u^2 - 2u^3 <= 3 u^2`.
pub const UPSILON_TAIL_CONSTANT: f64 = 3.0;

/// `omega_p = 1 + 7/p + 1/p^2`.
pub fn omega_p(p: u64) -> Result<Rational> {
    if !is_prime(p) {
        return Err(Error::OutOfRange(format!("{p} is not prime")));
    }
    let p2 = BigInt::from(p) * BigInt::from(p);
    Ok(Rational::new(&p2 + BigInt::from(7 * p) + 1, p2))
}

/// A partial Euler product over `p <= cutoff` and a bound on `|full - value|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EulerProduct {
    pub cutoff: u64,
    pub value: f64,
    pub tail: f64,
}

fn truncated<F: Fn(f64) -> f64>(cutoff: u64, local: F, c: f64) -> Result<EulerProduct> {
    if cutoff < 2 {
        return Err(Error::OutOfRange(format!("prime cutoff must be at least 2, got {cutoff}")));
    }
    let primes = primes_up_to(cutoff)?;
    let value = primes.iter().fold(1.0, |acc, &p| acc * local(p as f64));
    // sum_{p > P} c/p^2 <= c/(P - 1); the log of each factor is at most eps/(1-eps)
    let eps_max = c / ((cutoff + 1) as f64).powi(2);
    let tail = if eps_max < 0.5 {
        let log_bound = c / ((cutoff - 1) as f64) / (1.0 - eps_max);
        value * log_bound.exp_m1()
    } else {
        f64::INFINITY
    };
    Ok(EulerProduct { cutoff, value, tail })
}

/// `prod_{p <= P} (1 - 1/p)^7 omega_p`.
pub fn euler_product_omega_h(cutoff: u64) -> Result<EulerProduct> {
    truncated(
        cutoff,
        |p| {
            let u = 1.0 / p;
            (1.0 - u).powi(7) * (1.0 + 7.0 * u + u * u)
        },
        OMEGA_H_TAIL_CONSTANT,
    )
}

/// `Upsilon = prod_p (1 - 1/p)^2 (1 + 2/p)`, truncated at `P`.
pub fn upsilon(cutoff: u64) -> Result<EulerProduct> {
    truncated(
        cutoff,
        |p| {
            let u = 1.0 / p;
            (1.0 - u).powi(2) * (1.0 + 2.0 * u)
        },
        UPSILON_TAIL_CONSTANT,
    )
}
