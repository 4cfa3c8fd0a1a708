//! Lattice-point counts in congruence classes: exponential sums, rectangle
//! and region counts, and the error functionals that bound their deviation
//! from the averaged counts.

mod bounds;
mod counts;
mod exp_sum;
mod region;

pub use bounds::{
    affine_error_bound, count_quadratic_interval, dyadic_error_sum, error_e, error_e0,
    error_e0_for, error_e1, error_e2, heath_brown_bound, heath_brown_count,
    quadratic_interval_bound, DyadicReport, PrimitiveVectorQuery, E0_MAX_MODULUS,
};
pub use counts::{
    count_d, count_d_star, count_n, count_n_brute, count_n_star, main_term_d, IntegerRange,
};
pub use exp_sum::{exp_sum_s_closed, exp_sum_s_direct, ClosedSum, DirectSum};
pub use region::RegionS;

use crate::arith::{gcd, rad};
use crate::error::{Error, Result};

/// A congruence `a1 u + a2 v ≡ b (mod q)` with `gcd(a1 a2, q) = 1` and
/// `rad(q) | b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CongruenceInstance {
    q: u64,
    a1: i64,
    a2: i64,
    b: i64,
    b_mod: u64,
}

impl CongruenceInstance {
    pub fn new(q: u64, a1: i64, a2: i64, b: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidInstance("q must be at least 1".into()));
        }
        if a1 == 0 || a2 == 0 {
            return Err(Error::InvalidInstance("a1 and a2 must be nonzero".into()));
        }
        if gcd(a1.unsigned_abs(), q) != 1 || gcd(a2.unsigned_abs(), q) != 1 {
            return Err(Error::InvalidInstance(format!(
                "gcd(a1 a2, q) != 1 for a = ({a1}, {a2}), q = {q}"
            )));
        }
        if b.unsigned_abs() % rad(q) != 0 {
            return Err(Error::InvalidInstance(format!("rad({q}) does not divide b = {b}")));
        }
        let b_mod = (b as i128).rem_euclid(q as i128) as u64;
        Ok(CongruenceInstance { q, a1, a2, b, b_mod })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn a1(&self) -> i64 {
        self.a1
    }

    pub fn a2(&self) -> i64 {
        self.a2
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    /// `b` reduced into `[0, q)`.
    pub fn b_mod(&self) -> u64 {
        self.b_mod
    }

    /// Whether `(u, v)` satisfies the congruence (coprimality not checked).
    pub fn satisfies(&self, u: i64, v: i64) -> bool {
        let q = self.q as i128;
        (self.a1 as i128 * u as i128 + self.a2 as i128 * v as i128 - self.b_mod as i128)
            .rem_euclid(q)
            == 0
    }

    /// Every valid instance with `1 <= |a_i| <= q` and `b` a multiple of
    /// `rad(q)` in `[0, q)`.
    pub fn all_for_modulus(q: u64) -> Vec<CongruenceInstance> {
        let qi = q as i64;
        let r = rad(q) as i64;
        let units: Vec<i64> = (-qi..=qi)
            .filter(|&a| a != 0 && gcd(a.unsigned_abs(), q) == 1)
            .collect();
        let mut out = Vec::new();
        for &a1 in &units {
            for &a2 in &units {
                let mut b = 0;
                while b < qi {
                    out.push(CongruenceInstance::new(q, a1, a2, b).expect("valid by construction"));
                    b += r;
                }
            }
        }
        out
    }
}
