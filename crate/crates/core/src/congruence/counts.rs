use num_bigint::BigInt;

use super::{CongruenceInstance, RegionS};
use crate::arith::{euler_phi, gcd, mod_inverse, Rational};
use crate::density::{g2, QuadratureConfig};
use crate::error::{Error, Result};

/// A real interval with per-endpoint openness; only its integer points matter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegerRange {
    lo: f64,
    hi: f64,
    lo_open: bool,
    hi_open: bool,
}

impl IntegerRange {
    pub fn new(lo: f64, hi: f64, lo_open: bool, hi_open: bool) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::OutOfRange("range endpoints must be finite".into()));
        }
        if lo > hi {
            return Err(Error::OutOfRange(format!("empty range: {lo} > {hi}")));
        }
        Ok(IntegerRange { lo, hi, lo_open, hi_open })
    }

    /// `[lo, hi]`.
    pub fn closed(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, false, false)
    }

    /// `]lo, hi]`.
    pub fn left_open(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, true, false)
    }

    /// First and last integers in the range, if any.
    pub fn integer_bounds(&self) -> Option<(i64, i64)> {
        let first = if self.lo_open { self.lo.floor() as i64 + 1 } else { self.lo.ceil() as i64 };
        let last = if self.hi_open { self.hi.ceil() as i64 - 1 } else { self.hi.floor() as i64 };
        (first <= last).then_some((first, last))
    }

    pub fn contains(&self, x: i64) -> bool {
        self.integer_bounds().is_some_and(|(a, b)| a <= x && x <= b)
    }

    pub fn len(&self) -> u64 {
        self.integer_bounds().map_or(0, |(a, b)| (b - a + 1) as u64)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `N(I, J; q, a, b)`: `v` runs over `J` and `u` over its residue class.
pub fn count_n(i: &IntegerRange, j: &IntegerRange, inst: &CongruenceInstance) -> u64 {
    let (Some((u0, u1)), Some((v0, v1))) = (i.integer_bounds(), j.integer_bounds()) else {
        return 0;
    };
    let q = inst.q() as i128;
    let inv1 = mod_inverse(inst.a1() as i128, inst.q()).expect("a1 is a unit") as i128;
    let mut total = 0u64;
    for v in v0..=v1 {
        if gcd(v.unsigned_abs(), inst.q()) != 1 {
            continue;
        }
        let target = (inv1 * (inst.b_mod() as i128 - inst.a2() as i128 * v as i128)).rem_euclid(q);
        total += progression_len(u0 as i128, u1 as i128, target, q);
    }
    total
}

/// Number of integers in `[lo, hi]` congruent to `r` modulo `q`.
pub(crate) fn progression_len(lo: i128, hi: i128, r: i128, q: i128) -> u64 {
    if lo > hi {
        return 0;
    }
    let first = lo + (r - lo).rem_euclid(q);
    if first > hi {
        0
    } else {
        ((hi - first) / q + 1) as u64
    }
}

/// Literal double loop over `I x J`; `check_u_gcd = false` drops the
/// `gcd(u, q) = 1` filter.
pub fn count_n_brute(
    i: &IntegerRange,
    j: &IntegerRange,
    inst: &CongruenceInstance,
    check_u_gcd: bool,
) -> u64 {
    let (Some((u0, u1)), Some((v0, v1))) = (i.integer_bounds(), j.integer_bounds()) else {
        return 0;
    };
    let q = inst.q();
    let mut total = 0;
    for u in u0..=u1 {
        if check_u_gcd && gcd(u.unsigned_abs(), q) != 1 {
            continue;
        }
        for v in v0..=v1 {
            if gcd(v.unsigned_abs(), q) == 1 && inst.satisfies(u, v) {
                total += 1;
            }
        }
    }
    total
}

fn coprime_count(lo: i64, hi: i64, q: u64) -> u64 {
    (lo..=hi).filter(|x| gcd(x.unsigned_abs(), q) == 1).count() as u64
}

/// `N*(I, J; q) = #{(u, v) coprime to q} / phi(q)`.
pub fn count_n_star(i: &IntegerRange, j: &IntegerRange, q: u64) -> Rational {
    let (Some((u0, u1)), Some((v0, v1))) = (i.integer_bounds(), j.integer_bounds()) else {
        return Rational::from_integer(BigInt::from(0));
    };
    let pairs = coprime_count(u0, u1, q) as u128 * coprime_count(v0, v1, q) as u128;
    Rational::new(BigInt::from(pairs), BigInt::from(euler_phi(q)))
}

/// `D(S; q, a, b)`: nonzero lattice points of the region in the class.
pub fn count_d(region: &RegionS, inst: &CongruenceInstance) -> u64 {
    let (umax, vmax) = region.box_bounds();
    let q = inst.q() as i128;
    let inv1 = mod_inverse(inst.a1() as i128, inst.q()).expect("a1 is a unit") as i128;
    let mut total = 0;
    for v in -vmax..=vmax {
        if v == 0 || gcd(v.unsigned_abs(), inst.q()) != 1 {
            continue;
        }
        let target = (inv1 * (inst.b_mod() as i128 - inst.a2() as i128 * v as i128)).rem_euclid(q);
        let mut u = -(umax as i128) + (target + umax as i128).rem_euclid(q);
        while u <= umax as i128 {
            if u != 0 && region.contains(u as f64, v as f64) {
                total += 1;
            }
            u += q;
        }
    }
    total
}

/// `D*(S; q)`: coprime nonzero lattice points of the region over `phi(q)`.
pub fn count_d_star(region: &RegionS, q: u64) -> Rational {
    let (umax, vmax) = region.box_bounds();
    let mut total = 0u64;
    for v in -vmax..=vmax {
        if v == 0 || gcd(v.unsigned_abs(), q) != 1 {
            continue;
        }
        for u in -umax..=umax {
            if u != 0 && gcd(u.unsigned_abs(), q) == 1 && region.contains(u as f64, v as f64) {
                total += 1;
            }
        }
    }
    Rational::new(BigInt::from(total), BigInt::from(euler_phi(q)))
}

/// `phi(q)/q^2 * X^(2/3) T^(4/3) / (A1 A2) * g2((T/X)^(1/3))`.
pub fn main_term_d(region: &RegionS, q: u64, cfg: &QuadratureConfig) -> Result<f64> {
    let (x, t) = (region.x(), region.t());
    let qf = q as f64;
    let g = g2((t / x).cbrt(), cfg)?;
    Ok(euler_phi(q) as f64 / (qf * qf) * x.powf(2.0 / 3.0) * t.powf(4.0 / 3.0)
        / (region.a1() * region.a2())
        * g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational;

    #[test]
    fn range_endpoints() {
        let r = IntegerRange::new(1.0, 3.0, true, false).unwrap();
        assert_eq!(r.integer_bounds(), Some((2, 3)));
        let r = IntegerRange::new(-2.5, 2.5, false, true).unwrap();
        assert_eq!(r.integer_bounds(), Some((-2, 2)));
        let r = IntegerRange::new(2.0, 2.0, true, false).unwrap();
        assert_eq!(r.integer_bounds(), None);
        assert!(IntegerRange::closed(3.0, 1.0).is_err());
    }

    #[test]
    fn n_examples() {
        let r = IntegerRange::closed(1.0, 3.0).unwrap();
        let inst = CongruenceInstance::new(3, 1, 1, 3).unwrap();
        assert_eq!(count_n(&r, &r, &inst), 2);
        assert_eq!(count_n_star(&r, &r, 3), rational(2, 1));
        let r5 = IntegerRange::closed(1.0, 5.0).unwrap();
        let trivial = CongruenceInstance::new(1, 1, 1, 0).unwrap();
        assert_eq!(count_n(&r5, &r5, &trivial), 25);
        assert_eq!(count_n_star(&r5, &r5, 1), rational(25, 1));
        let empty = IntegerRange::new(0.2, 0.8, false, false).unwrap();
        assert_eq!(count_n(&empty, &r5, &inst), 0);
        assert_eq!(count_n_star(&empty, &r5, 3), rational(0, 1));
    }

    #[test]
    fn fast_count_matches_literal_loop() {
        for q in 1..=20u64 {
            for inst in CongruenceInstance::all_for_modulus(q).into_iter().step_by(5) {
                let i = IntegerRange::new(-7.5, 13.0, true, false).unwrap();
                let j = IntegerRange::new(-3.0, 9.0, false, true).unwrap();
                assert_eq!(count_n(&i, &j, &inst), count_n_brute(&i, &j, &inst, true));
            }
        }
    }

    #[test]
    fn d_vanishes_on_small_box() {
        let region = RegionS::new(1.5, 1.0, 2.0, 2.0).unwrap();
        let inst = CongruenceInstance::new(1, 1, 1, 0).unwrap();
        assert_eq!(count_d(&region, &inst), 0);
    }

    #[test]
    fn d_trivial_modulus_counts_region() {
        let region = RegionS::new(20.0, 10.0, 1.0, 1.0).unwrap();
        let inst = CongruenceInstance::new(1, 1, 1, 0).unwrap();
        let mut brute = 0;
        for u in -20i64..=20 {
            for v in -20i64..=20 {
                if u != 0 && v != 0 && region.contains(u as f64, v as f64) {
                    brute += 1;
                }
            }
        }
        assert_eq!(count_d(&region, &inst), brute);
        assert_eq!(count_d_star(&region, 1), rational(brute as i64, 1));
    }

    #[test]
    fn d_matches_filtering_oracle() {
        let region = RegionS::new(20.0, 10.0, 1.0, 1.0).unwrap();
        let inst = CongruenceInstance::new(3, 1, 1, 3).unwrap();
        let mut brute = 0;
        for u in -20i64..=20 {
            for v in -20i64..=20 {
                if u != 0
                    && v != 0
                    && u % 3 != 0
                    && v % 3 != 0
                    && (u + v) % 3 == 0
                    && region.contains(u as f64, v as f64)
                {
                    brute += 1;
                }
            }
        }
        assert!(brute > 0);
        assert_eq!(count_d(&region, &inst), brute);
    }
}
