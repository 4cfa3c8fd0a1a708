use once_cell::sync::Lazy;

use crate::error::{Error, Result};

/// Smallest-prime-factor table bound; factorizations below it are table lookups.
pub const SMALL_LIMIT: u64 = 1_000_000;

const MAX_INPUT: u64 = i64::MAX as u64;

static SPF: Lazy<Vec<u32>> = Lazy::new(|| {
    let n = SMALL_LIMIT as usize;
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
});

static SMALL_PRIMES: Lazy<Vec<u64>> = Lazy::new(|| {
    (2..=SMALL_LIMIT)
        .filter(|&i| SPF[i as usize] as u64 == i)
        .collect()
});

/// Prime factorization of a positive integer below 2^63.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn value(&self) -> u64 {
        self.value
    }

    /// `(prime, exponent)` pairs with strictly increasing primes.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// All positive divisors, in increasing order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let len = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

/// Factor `n`, rejecting `0` and anything above `2^63 - 1`.
pub fn factor(n: u64) -> Result<Factorization> {
    if n == 0 || n > MAX_INPUT {
        return Err(Error::OutOfRange(format!(
            "factor() expects 1 <= n <= 2^63-1, got {n}"
        )));
    }
    let mut primes = Vec::new();
    let mut m = n;
    if m <= SMALL_LIMIT {
        split_small(m, &mut primes);
    } else {
        for &p in SMALL_PRIMES.iter() {
            if p * p > m {
                break;
            }
            while m % p == 0 {
                primes.push(p);
                m /= p;
            }
            if m <= SMALL_LIMIT {
                break;
            }
        }
        if m <= SMALL_LIMIT {
            split_small(m, &mut primes);
        } else {
            split_large(m, &mut primes);
        }
    }
    primes.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(Factorization { value: n, factors })
}

/// Factorization for callers whose input is known to be in range.
pub(crate) fn factor_unchecked(n: u64) -> Factorization {
    factor(n).expect("argument within factor() range")
}

fn split_small(mut m: u64, out: &mut Vec<u64>) {
    while m > 1 {
        let p = SPF[m as usize] as u64;
        out.push(p);
        m /= p;
    }
}

// `m` has no prime factor below SMALL_LIMIT.
fn split_large(m: u64, out: &mut Vec<u64>) {
    if m == 1 {
        return;
    }
    if is_prime(m) {
        out.push(m);
        return;
    }
    let d = pollard_rho(m);
    split_large(d, out);
    split_large(m / d, out);
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n <= SMALL_LIMIT {
        return SPF[n as usize] as u64 == n;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

// Brent's variant; `n` is odd, composite, and free of small factors.
fn pollard_rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut q = 1u64;
        let mut ys = 2u64;
        let mut r = 1u64;
        const BATCH: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = num_integer::gcd(q, n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = num_integer::gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_factorizations() {
        assert!(factor(1).unwrap().factors().is_empty());
        assert_eq!(factor(12).unwrap().factors(), &[(2, 2), (3, 1)]);
        assert_eq!(factor(360).unwrap().factors(), &[(2, 3), (3, 2), (5, 1)]);
    }

    #[test]
    fn mersenne_61_is_prime() {
        let m61 = (1u64 << 61) - 1;
        assert!(is_prime(m61));
        assert_eq!(factor(m61).unwrap().factors(), &[(m61, 1)]);
    }

    #[test]
    fn large_semiprime_and_prime_powers() {
        let p = 1_000_003u64;
        let q = 998_244_353u64;
        assert_eq!(factor(p * q).unwrap().factors(), &[(p, 1), (q, 1)]);
        assert_eq!(factor(p * p * 7).unwrap().factors(), &[(7, 1), (p, 2)]);
        let big = 4_611_686_014_132_420_609u64; // (2^31 - 1)^2
        assert_eq!(factor(big).unwrap().factors(), &[(2_147_483_647, 2)]);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(factor(0).is_err());
        assert!(factor(1u64 << 63).is_err());
        assert!(factor(i64::MAX as u64).is_ok());
    }

    #[test]
    fn primality_matches_trial_division() {
        for n in (SMALL_LIMIT - 2000)..(SMALL_LIMIT + 2000) {
            let trial = n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0);
            assert_eq!(is_prime(n), trial, "n = {n}");
        }
    }

    #[test]
    fn divisors_are_sorted() {
        assert_eq!(factor(12).unwrap().divisors(), vec![1, 2, 3, 4, 6, 12]);
    }
}
