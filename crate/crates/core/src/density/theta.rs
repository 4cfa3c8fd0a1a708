//! The arithmetic weights of the fiber sums and their local factors.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};

use super::euler::upsilon;
use crate::arith::{
    factor_unchecked, gcd, is_prime, phi_curlyvee, phi_star, psi, sigma_neg, to_f64, Rational,
};
use crate::error::{Error, Result};

/// `theta1(eta1, eta2 eta3 eta4) = psi_{eta2 eta3 eta4}(eta1)`.
pub fn theta1(eta1: u64, eta234: u64) -> Rational {
    psi(eta234, eta1)
}

fn primes_of(args: &[u64]) -> Vec<u64> {
    let mut out: Vec<u64> = args.iter().flat_map(|&n| factor_unchecked(n).primes().collect::<Vec<_>>()).collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn phi_star_of(primes: &[u64]) -> Rational {
    primes
        .iter()
        .map(|&p| Rational::new(BigInt::from(p - 1), BigInt::from(p)))
        .fold(Rational::one(), |acc, x| acc * x)
}

fn phi_curlyvee_of(primes: &[u64]) -> Rational {
    primes.iter().fold(Rational::one(), |acc, &p| acc * phi_curlyvee(p))
}

/// `phi*(eta2 eta3 eta4) phi*(eta2 ... eta7)`.
pub fn theta2(e: [u64; 6]) -> Rational {
    phi_star_of(&primes_of(&e[..3])) * phi_star_of(&primes_of(&e))
}

fn share_prime(a: &[u64], b: &[u64]) -> bool {
    a.iter().any(|&x| b.iter().any(|&y| gcd(x, y) > 1))
}

/// `Theta(eta2, ..., eta7)`, set to zero unless `gcd(eta2 eta5, eta3 eta4 eta6 eta7) = 1`
/// and `gcd(eta3 eta6, eta4 eta7) = 1`.
pub fn big_theta(e: [u64; 6]) -> Rational {
    let [e2, e3, e4, e5, e6, e7] = e;
    if share_prime(&[e2, e5], &[e3, e4, e6, e7]) || share_prime(&[e3, e6], &[e4, e7]) {
        return Rational::zero();
    }
    let all = primes_of(&e);
    phi_star_of(&primes_of(&[e2, e3, e4]))
        * phi_star_of(&all)
        * phi_star_of(&primes_of(&[e5, e6, e7]))
        * phi_curlyvee_of(&all)
}

/// `Theta` at prime powers depends only on which exponents are positive.
/// Bit `i` of `mask` stands for `eta_{i+2}`.
fn pattern_theta(p: u64, mask: u32) -> Rational {
    let e: [u64; 6] = std::array::from_fn(|i| if mask >> i & 1 == 1 { p } else { 1 });
    big_theta(e)
}

fn pattern_sum(p: u64, g: &Rational) -> Rational {
    (0u32..64)
        .map(|mask| {
            let mut term = pattern_theta(p, mask);
            for _ in 0..mask.count_ones() {
                term *= g;
            }
            term
        })
        .fold(Rational::zero(), |acc, x| acc + x)
}

/// `sum_{k in N^6} Theta(p^k2, ..., p^k7) / p^(k2 + ... + k7)`, exactly.
pub fn local_factor_theta_exact(p: u64) -> Result<Rational> {
    if !is_prime(p) {
        return Err(Error::OutOfRange(format!("{p} is not prime")));
    }
    Ok(pattern_sum(p, &Rational::new(BigInt::one(), BigInt::from(p - 1))))
}

/// `phi_curlyvee(p) (1 - 1/p) (1 + 7/p + 1/p^2)`.
pub fn local_factor_closed(p: u64) -> Result<Rational> {
    let omega = super::omega_p(p)?;
    Ok(phi_curlyvee(p) * phi_star(p) * omega)
}

/// Largest accepted truncation error in [`local_factor_theta`].
pub const LOCAL_FACTOR_TAIL: f64 = 1e-14;

/// The same sum with every exponent capped at `kmax`.
pub fn local_factor_theta(p: u64, kmax: u32) -> Result<f64> {
    if !is_prime(p) {
        return Err(Error::OutOfRange(format!("{p} is not prime")));
    }
    if kmax < 20 {
        return Err(Error::Precondition(format!("kmax must be at least 20, got {kmax}")));
    }
    let pf = p as f64;
    let g_full = 1.0 / (pf - 1.0);
    let g = g_full * (1.0 - pf.powi(-(kmax as i32)));
    let weights: Vec<f64> = (0u32..64).map(|m| to_f64(&pattern_theta(p, m))).collect();
    // F(g) has nonnegative coefficients, so F(g_full) - F(g) <= F'(g_full) (g_full - g)
    let slope: f64 = (0u32..64)
        .filter(|m| m.count_ones() > 0)
        .map(|m| weights[m as usize] * m.count_ones() as f64 * g_full.powi(m.count_ones() as i32 - 1))
        .sum();
    let tail = slope * (g_full - g);
    if tail >= LOCAL_FACTOR_TAIL {
        return Err(Error::Precondition(format!(
            "truncation at kmax = {kmax} leaves a tail of {tail:e} for p = {p}"
        )));
    }
    Ok((0u32..64).map(|m| weights[m as usize] * g.powi(m.count_ones() as i32)).sum())
}

/// Exact truncated sum over all `(k2, ..., k7)` in `[0, kmax]^6`, term by term.
pub fn local_factor_theta_literal(p: u64, kmax: u32) -> Rational {
    let n = kmax as usize + 1;
    let mut total = Rational::zero();
    for idx in 0..n.pow(6) {
        let mut rest = idx;
        let ks: [u32; 6] = std::array::from_fn(|_| {
            let k = (rest % n) as u32;
            rest /= n;
            k
        });
        let e = ks.map(|k| p.pow(k));
        let weight = Rational::new(BigInt::one(), BigInt::from(p).pow(ks.iter().sum::<u32>()));
        total += big_theta(e) * weight;
    }
    total
}

/// A piecewise linear function through the given knots, constant beyond them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TabulatedFunction {
    knots: Vec<(f64, f64)>,
}

impl TabulatedFunction {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::Precondition("need at least two knots".into()));
        }
        if knots.windows(2).any(|w| !(w[0].0 < w[1].0)) || knots.iter().any(|k| !k.1.is_finite()) {
            return Err(Error::Precondition("knots must be finite with increasing abscissae".into()));
        }
        Ok(TabulatedFunction { knots })
    }

    pub fn constant(value: f64, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![(lo, value), (hi, value)])
    }

    pub fn eval(&self, t: f64) -> f64 {
        let k = &self.knots;
        if t <= k[0].0 {
            return k[0].1;
        }
        if t >= k[k.len() - 1].0 {
            return k[k.len() - 1].1;
        }
        let i = k.partition_point(|&(x, _)| x <= t) - 1;
        let (x0, y0) = k[i];
        let (x1, y1) = k[i + 1];
        y0 + (y1 - y0) * (t - x0) / (x1 - x0)
    }

    /// Breakpoints of the piecewise description inside `(a, b)`, with the ends.
    fn nodes(&self, a: f64, b: f64) -> Vec<f64> {
        let mut pts = vec![a];
        pts.extend(self.knots.iter().map(|k| k.0).filter(|&x| x > a && x < b));
        pts.push(b);
        pts
    }

    /// Exact integral over `[a, b]`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if !(a < b) {
            return 0.0;
        }
        self.nodes(a, b)
            .windows(2)
            .map(|w| 0.5 * (w[1] - w[0]) * (self.eval(w[0]) + self.eval(w[1])))
            .sum()
    }

    /// Number of sign changes of the derivative on `[a, b]`.
    pub fn derivative_sign_changes(&self, a: f64, b: f64) -> u32 {
        let signs: Vec<f64> = self
            .nodes(a, b)
            .windows(2)
            .map(|w| self.eval(w[1]) - self.eval(w[0]))
            .filter(|&d| d != 0.0)
            .map(f64::signum)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count() as u32
    }

    pub fn sup_abs(&self, a: f64, b: f64) -> f64 {
        self.nodes(a, b).into_iter().map(|x| self.eval(x).abs()).fold(0.0, f64::max)
    }
}

/// `Upsilon` truncated at `10^6`; the tail is below `3 * 10^-6` relative.
pub static UPSILON: Lazy<f64> =
    Lazy::new(|| upsilon(1_000_000).expect("sieve to 10^6").value);

/// Both sides of the weighted sum estimate for `psi_{a,b}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiSumReport {
    pub lhs: f64,
    pub main: f64,
    pub envelope: f64,
    pub ratio: f64,
}

fn psi_ab_f64(a: u64, b: u64, n: u64) -> f64 {
    if gcd(n, b) > 1 {
        return 0.0;
    }
    factor_unchecked(n)
        .primes()
        .filter(|&p| a % p != 0)
        .map(|p| {
            let pf = p as f64;
            (pf - 1.0) * (pf - 2.0) / (pf * pf)
        })
        .product()
}

/// Compares `sum_{n in [t1, t2]} psi_{a,b}(n) g(n)` with
/// `Upsilon Psi(a, b) integral_I g`, relative to the envelope
/// `sigma_{-gamma/2}(ab) t2^gamma (1 + R_g(I)) sup_I |g|`.
pub fn psi_weighted_sum_check(
    a: u64,
    b: u64,
    t1: f64,
    t2: f64,
    g: &TabulatedFunction,
    gamma: f64,
) -> Result<PsiSumReport> {
    if a == 0 || b == 0 {
        return Err(Error::Precondition("a and b must be positive".into()));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::Precondition(format!("gamma must lie in (0, 1], got {gamma}")));
    }
    if !(t1 >= 0.0 && t1 < t2) {
        return Ok(PsiSumReport { lhs: 0.0, main: 0.0, envelope: 0.0, ratio: 0.0 });
    }
    let first = (t1.ceil() as u64).max(1);
    let last = t2.floor() as u64;
    let lhs: f64 = (first..=last).map(|n| psi_ab_f64(a, b, n) * g.eval(n as f64)).sum();
    let big_psi = to_f64(&(phi_star(b) * phi_curlyvee(a * b)));
    let main = *UPSILON * big_psi * g.integral(t1, t2);
    let m_i = (1.0 + g.derivative_sign_changes(t1, t2) as f64) * g.sup_abs(t1, t2);
    let envelope = sigma_neg(gamma / 2.0, a * b) * t2.powf(gamma) * m_i;
    let ratio = if envelope > 0.0 { (lhs - main).abs() / envelope } else { 0.0 };
    Ok(PsiSumReport { lhs, main, envelope, ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{psi_ab, rational};

    #[test]
    fn theta_examples() {
        assert_eq!(theta1(1, 17), rational(1, 1));
        assert_eq!(theta1(3, 1), rational(2, 9));
        assert_eq!(theta1(6, 6), rational(1, 1));
        assert_eq!(theta2([1; 6]), rational(1, 1));
        assert_eq!(theta2([2, 1, 1, 1, 1, 1]), rational(1, 4));
        assert_eq!(theta2([2, 3, 1, 1, 1, 5]), rational(4, 45));
        assert_eq!(big_theta([1; 6]), rational(1, 1));
        assert_eq!(big_theta([2, 2, 1, 1, 1, 1]), rational(0, 1));
        assert_eq!(big_theta([2, 1, 1, 1, 1, 1]), rational(1, 2));
    }

    #[test]
    fn theta_gate_patterns() {
        // 64 support patterns; the gate keeps only those avoiding both conflicts
        let live = (0u32..64).filter(|&m| pattern_theta(2, m) != Rational::zero()).count();
        let expect = (0u32..64)
            .filter(|&m| {
                let has = |i: u32| m >> (i - 2) & 1 == 1;
                let left = has(2) || has(5);
                let right = has(3) || has(4) || has(6) || has(7);
                !(left && right) && !((has(3) || has(6)) && (has(4) || has(7)))
            })
            .count();
        assert_eq!(live, expect);
        assert!(live < 64);
    }

    #[test]
    fn local_factor_closed_form() {
        assert_eq!(local_factor_closed(2).unwrap(), rational(19, 4));
        assert_eq!(
            local_factor_closed(3).unwrap(),
            rational(27, 20) * rational(2, 3) * rational(31, 9)
        );
        for p in [2u64, 3, 5, 7, 11, 13, 101] {
            assert_eq!(local_factor_theta_exact(p).unwrap(), local_factor_closed(p).unwrap());
        }
    }

    #[test]
    fn truncated_sum_matches_literal_enumeration() {
        for (p, kmax) in [(2u64, 4u32), (3, 3), (5, 2)] {
            let g = {
                let pb = BigInt::from(p);
                (1..=kmax).fold(Rational::zero(), |acc, k| acc + Rational::new(BigInt::one(), pb.pow(k)))
            };
            assert_eq!(local_factor_theta_literal(p, kmax), pattern_sum(p, &g));
        }
    }

    #[test]
    fn truncated_sum_within_tolerance() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            let v = local_factor_theta(p, 64).unwrap();
            let closed = to_f64(&local_factor_closed(p).unwrap());
            assert!((v - closed).abs() < 1e-10, "p = {p}");
        }
        assert!(local_factor_theta(2, 20).is_err());
        assert!(local_factor_theta(2, 10).is_err());
        assert!(local_factor_theta(4, 40).is_err());
    }

    #[test]
    fn sum2_alignment_per_prime() {
        for p in [2u64, 3, 5, 7, 11, 13, 97] {
            let u = phi_star(p);
            let lhs = (0..6).fold(Rational::one(), |acc, _| acc * &u)
                * local_factor_theta_exact(p).unwrap()
                / phi_curlyvee(p);
            let rhs = (0..7).fold(Rational::one(), |acc, _| acc * &u) * super::super::omega_p(p).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn tabulated_function() {
        let g = TabulatedFunction::new(vec![(0.0, 0.0), (1.0, 2.0), (3.0, -2.0)]).unwrap();
        assert_eq!(g.eval(0.5), 1.0);
        assert_eq!(g.eval(2.0), 0.0);
        assert_eq!(g.eval(10.0), -2.0);
        assert!((g.integral(0.0, 3.0) - 1.0).abs() < 1e-15);
        assert_eq!(g.derivative_sign_changes(0.0, 3.0), 1);
        assert_eq!(g.derivative_sign_changes(1.5, 3.0), 0);
        assert_eq!(g.sup_abs(0.0, 3.0), 2.0);
        assert!(TabulatedFunction::new(vec![(1.0, 0.0), (1.0, 1.0)]).is_err());
    }

    #[test]
    fn psi_sum_examples() {
        let one = TabulatedFunction::constant(1.0, 0.0, 1e4).unwrap();
        let empty = psi_weighted_sum_check(1, 1, 5.0, 5.0, &one, 0.5).unwrap();
        assert_eq!((empty.lhs, empty.main), (0.0, 0.0));
        let r = psi_weighted_sum_check(3, 2, 0.0, 1000.0, &one, 0.5).unwrap();
        let exact: f64 = (1..=1000u64).map(|n| to_f64(&psi_ab(3, 2, n))).sum();
        assert!((r.lhs - exact).abs() < 1e-9);
        assert!(r.ratio.is_finite());
        let r = psi_weighted_sum_check(6, 1, 1.0, 1e4, &one, 0.5).unwrap();
        assert!(r.ratio < 1.0);
        assert!((r.lhs / r.main - 1.0).abs() < 0.01);
    }
}
