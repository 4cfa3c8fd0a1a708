//! Exact integer arithmetic and the multiplicative functions used by the
//! congruence, density and torsor modules.
//!
//! Rational-valued functions return exact [`Rational`]s; callers convert to
//! floating point with [`to_f64`] when they need to.

mod factor;
mod primes;

pub use factor::{factor, is_prime, Factorization, SMALL_LIMIT};
pub use primes::{primes_up_to, CACHE_DIR_ENV};

pub(crate) use factor::factor_unchecked;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational value (always reduced, positive denominator).
pub type Rational = BigRational;

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

pub fn gcd_i(a: i128, b: i128) -> u128 {
    num_integer::gcd(a.unsigned_abs(), b.unsigned_abs())
}

/// Product of the distinct primes dividing `n`.
pub fn rad(n: u64) -> u64 {
    factor_unchecked(n).primes().product()
}

/// The `s` with `s^2 | n` and `n / s^2` squarefree.
pub fn sq(n: u64) -> u64 {
    factor_unchecked(n)
        .factors()
        .iter()
        .map(|&(p, e)| p.pow(e / 2))
        .product()
}

pub fn mu(n: u64) -> i8 {
    let f = factor_unchecked(n);
    if !f.is_squarefree() {
        0
    } else if f.factors().len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn euler_phi(n: u64) -> u64 {
    factor_unchecked(n)
        .factors()
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}

/// Number of divisors.
pub fn tau(n: u64) -> u64 {
    factor_unchecked(n)
        .factors()
        .iter()
        .map(|&(_, e)| e as u64 + 1)
        .product()
}

/// Number of distinct prime divisors.
pub fn omega_count(n: u64) -> u32 {
    factor_unchecked(n).factors().len() as u32
}

/// `sum_{k | n} k^(-lambda)`, evaluated through its Euler factors.
pub fn sigma_neg(lambda: f64, n: u64) -> f64 {
    factor_unchecked(n)
        .factors()
        .iter()
        .map(|&(p, e)| {
            let x = (p as f64).powf(-lambda);
            let mut acc = 1.0;
            let mut pw = 1.0;
            for _ in 0..e {
                pw *= x;
                acc += pw;
            }
            acc
        })
        .product()
}

/// `prod_{p | n} (1 - 1/p)`.
pub fn phi_star(n: u64) -> Rational {
    factor_unchecked(n)
        .primes()
        .map(|p| Rational::new(BigInt::from(p - 1), BigInt::from(p)))
        .fold(Rational::one(), |acc, x| acc * x)
}

/// `prod_{p | n} (1 - 1/p)^-2 (1 + 2/p)^-1 = prod p^3 / ((p-1)^2 (p+2))`.
pub fn phi_curlyvee(n: u64) -> Rational {
    factor_unchecked(n)
        .primes()
        .map(|p| {
            let p = BigInt::from(p);
            let pm1 = &p - 1;
            Rational::new(&p * &p * &p, &pm1 * &pm1 * (&p + 2))
        })
        .fold(Rational::one(), |acc, x| acc * x)
}

/// `prod_{p | n, p ∤ a} (1 - 1/p)^2 (1 - 1/(p-1)) = prod (p-1)(p-2)/p^2`.
pub fn psi(a: u64, n: u64) -> Rational {
    factor_unchecked(n)
        .primes()
        .filter(|&p| a % p != 0)
        .map(|p| {
            let pb = BigInt::from(p);
            Rational::new(
                BigInt::from(p - 1) * BigInt::from(p - 2),
                &pb * &pb,
            )
        })
        .fold(Rational::one(), |acc, x| acc * x)
}

/// `psi(a, n)` when `gcd(n, b) = 1`, zero otherwise.
pub fn psi_ab(a: u64, b: u64, n: u64) -> Rational {
    if gcd(n, b) > 1 {
        Rational::zero()
    } else {
        psi(a, n)
    }
}

/// Ramanujan sum via `c_q(n) = sum_{d | gcd(q, n)} mu(q/d) d`, with `gcd(q, 0) = q`.
pub fn ramanujan_c(q: u64, n: i64) -> i64 {
    assert!(q >= 1, "ramanujan_c: q must be positive");
    let g = gcd(q, n.unsigned_abs());
    factor_unchecked(g)
        .divisors()
        .into_iter()
        .map(|d| mu(q / d) as i64 * d as i64)
        .sum()
}

/// `e_q(k) = exp(2 pi i k / q)` with `k` reduced modulo `q` first.
pub fn e_q(k: i128, q: u64) -> Complex64 {
    let r = k.rem_euclid(q as i128) as f64;
    let theta = std::f64::consts::TAU * r / q as f64;
    Complex64::new(theta.cos(), theta.sin())
}

/// Ramanujan sum by its defining exponential sum over units modulo `q`.
pub fn ramanujan_c_direct(q: u64, n: i64) -> Complex64 {
    (1..=q)
        .filter(|&a| gcd(a, q) == 1)
        .map(|a| e_q(n as i128 * a as i128, q))
        .sum()
}

/// Inverse of `a` modulo `q`, returned in `[1, q]` (so `q = 1` yields 1).
pub fn mod_inverse(a: i128, q: u64) -> Result<u64> {
    if q == 0 {
        return Err(Error::OutOfRange("modulus must be positive".into()));
    }
    if q == 1 {
        return Ok(1);
    }
    let m = q as i128;
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let t = r0 / r1;
        (r0, r1) = (r1, r0 - t * r1);
        (s0, s1) = (s1, s0 - t * s1);
    }
    if r0 != 1 {
        return Err(Error::NotInvertible { a, q });
    }
    Ok(s0.rem_euclid(m) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rad_and_sq_examples() {
        assert_eq!((rad(12), sq(12)), (6, 2));
        assert_eq!((rad(1), sq(1)), (1, 1));
        assert_eq!((rad(360), sq(360)), (30, 6));
        assert_eq!(mu(360 / 36), 1);
    }

    #[test]
    fn classical_functions() {
        assert_eq!(mu(6), 1);
        assert_eq!(mu(4), 0);
        assert_eq!(mu(30), -1);
        assert_eq!(tau(12), 6);
        assert_eq!(omega_count(360), 3);
        assert_eq!(euler_phi(36), 12);
        assert!((sigma_neg(1.0, 4) - 1.75).abs() < 1e-15);
        assert_eq!(sigma_neg(0.5, 1), 1.0);
    }

    #[test]
    fn sigma_neg_matches_divisor_sum() {
        for n in 1..300u64 {
            let direct: f64 = (1..=n)
                .filter(|k| n % k == 0)
                .map(|k| (k as f64).powf(-0.5))
                .sum();
            assert!((sigma_neg(0.5, n) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn phi_star_examples() {
        assert_eq!(phi_star(12), rational(1, 3));
        assert_eq!(phi_star(1), rational(1, 1));
        assert_eq!(phi_star(30), rational(4, 15));
    }

    #[test]
    fn phi_curlyvee_examples() {
        assert_eq!(phi_curlyvee(2), rational(2, 1));
        assert_eq!(phi_curlyvee(1), rational(1, 1));
        assert_eq!(phi_curlyvee(6), rational(27, 10));
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi(1, 3), rational(2, 9));
        assert_eq!(psi(6, 6), rational(1, 1));
        assert_eq!(psi_ab(1, 2, 6), rational(0, 1));
        // the p = 2 factor vanishes when 2 does not divide a
        assert_eq!(psi(3, 10), rational(0, 1));
    }

    #[test]
    fn ramanujan_examples() {
        assert_eq!(ramanujan_c(5, 5), 4);
        assert_eq!(ramanujan_c(5, 1), -1);
        assert_eq!(ramanujan_c(4, 2), -2);
        assert_eq!(ramanujan_c(6, 0), 2);
        let z = ramanujan_c_direct(1, 7);
        assert!((z.re - 1.0).abs() < 1e-12 && z.im.abs() < 1e-12);
        let z = ramanujan_c_direct(12, 8);
        assert!((z.re - ramanujan_c(12, 8) as f64).abs() < 1e-9 && z.im.abs() < 1e-9);
    }

    #[test]
    fn ramanujan_formula_matches_direct_sum() {
        for q in 1..=60u64 {
            for n in -60..=60i64 {
                let z = ramanujan_c_direct(q, n);
                assert!(z.im.abs() < 1e-9, "q={q} n={n}");
                assert_eq!(z.re.round() as i64, ramanujan_c(q, n), "q={q} n={n}");
            }
        }
    }

    #[test]
    fn mod_inverse_examples() {
        assert_eq!(mod_inverse(3, 7).unwrap(), 5);
        assert_eq!(mod_inverse(1, 9).unwrap(), 1);
        assert_eq!(mod_inverse(10, 17).unwrap(), 12);
        assert_eq!(mod_inverse(-3, 7).unwrap(), 2);
        assert!(matches!(mod_inverse(4, 6), Err(Error::NotInvertible { .. })));
    }

    #[test]
    fn multiplicativity_on_coprime_pairs() {
        for m in 1..=100u64 {
            for n in 1..=100u64 {
                if gcd(m, n) != 1 {
                    continue;
                }
                assert_eq!(rad(m * n), rad(m) * rad(n));
                assert_eq!(sq(m * n), sq(m) * sq(n));
                assert_eq!(phi_star(m * n), phi_star(m) * phi_star(n));
                for k in [-7i64, 0, 1, 6, 12, 30] {
                    assert_eq!(
                        ramanujan_c(m * n, k),
                        ramanujan_c(m, k) * ramanujan_c(n, k)
                    );
                }
            }
        }
    }

    #[test]
    fn euler_phi_is_n_times_phi_star() {
        for n in 1..=10_000u64 {
            assert_eq!(rational(euler_phi(n) as i64, 1), rational(n as i64, 1) * phi_star(n));
        }
    }

    proptest! {
        #[test]
        fn psi_in_unit_interval_and_curlyvee_at_least_one(a in 1u64..5000, n in 1u64..5000) {
            let p = psi(a, n);
            prop_assert!(p >= Rational::zero() && p <= Rational::one());
            prop_assert!(phi_curlyvee(n) >= Rational::one());
            prop_assert!(phi_star(n) <= Rational::one());
        }

        #[test]
        fn factorization_invariants(n in 1u64..(i64::MAX as u64)) {
            let f = factor(n).unwrap();
            let prod: u128 = f.factors().iter().map(|&(p, e)| (p as u128).pow(e)).product();
            prop_assert_eq!(prod, n as u128);
            for w in f.factors().windows(2) {
                prop_assert!(w[0].0 < w[1].0);
            }
            for &(p, e) in f.factors() {
                prop_assert!(e >= 1 && is_prime(p));
            }
        }

        #[test]
        fn inverse_is_inverse(a in -1000i128..1000, q in 2u64..500) {
            match mod_inverse(a, q) {
                Ok(inv) => {
                    prop_assert!(inv >= 1 && inv <= q);
                    prop_assert_eq!((a * inv as i128).rem_euclid(q as i128), 1);
                }
                Err(_) => prop_assert!(gcd_i(a, q as i128) != 1),
            }
        }
    }
}
