//! Enumeration of the torsor points of bounded height.
//!
//! The outer loops run over `eta1..eta7` in the region
//! `eta1^3 eta2^2 eta3^2 eta4^2 eta5 eta6 eta7 <= 3B` with the coprimality
//! conditions among them applied as soon as both sides are fixed. For each
//! such tuple the fiber `q8 eta8 + q9 eta9 + q10 eta10 = eta1 ... eta7` is
//! solved for the three remaining coordinates.

use rayon::prelude::*;

use super::points::{prefix_coprime, tail_moduli, Monomials, TorsorPoint};
use crate::arith::{gcd, mod_inverse, to_f64};
use crate::density::{g2, t_max, theta1, theta2, QuadratureConfig};
use crate::error::{Error, Result};

/// `eta1..eta7` with everything needed to solve its fiber.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Fiber {
    pub eta: [u64; 7],
    m: Monomials,
    /// `|eta_{8+k}| <= bound[k]` from the individual height conditions.
    bound: [i128; 3],
    moduli: [u64; 3],
    b: i128,
}

impl Fiber {
    pub fn new(eta: [u64; 7], b: u64) -> Result<Self> {
        let m = Monomials::new(&eta)?;
        let bi = b as i128;
        Ok(Fiber { eta, m, bound: m.weight.map(|w| bi / w), moduli: tail_moduli(&eta), b: bi })
    }

    fn accept(&self, tail: [i128; 3]) -> bool {
        tail.iter().zip(&self.bound).all(|(t, bd)| *t != 0 && t.abs() <= *bd)
            && (tail[0] * tail[1]).checked_mul(tail[2]).is_some_and(|p| p.abs() <= self.b)
            && tail.iter().zip(&self.moduli).all(|(t, &m)| gcd(m, t.unsigned_abs() as u64) == 1)
    }

    /// Calls `visit` on every `(eta8, eta9, eta10)` completing the fiber.
    ///
    /// The coordinate with the largest coefficient is the outer loop; for each
    /// of its values the product condition confines the next coordinate to at
    /// most two intervals, which are walked in the residue class that makes
    /// the last coordinate integral.
    pub fn solve(&self, mut visit: impl FnMut([i64; 3])) -> Result<()> {
        let q = self.m.q;
        let i = (0..3).max_by_key(|&k| (q[k], std::cmp::Reverse(k))).expect("three coordinates");
        let (j, k) = match i {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let (qi, qj, qk) = (q[i], q[j], q[k]);
        let inv = mod_inverse(qj, qk as u64)? as i128;
        let span_k = qk * self.bound[k];
        for a in -self.bound[i]..=self.bound[i] {
            if a == 0 || gcd(self.moduli[i], a.unsigned_abs() as u64) != 1 {
                continue;
            }
            let rest = self.m.product - qi * a;
            // |x (rest - qj x)| <= qk floor(B / |a|)
            let cap = qk * (self.b / a.abs());
            let mut lo = (-self.bound[j]).max(div_ceil(rest - span_k, qj));
            let mut hi = self.bound[j].min(div_floor(rest + span_k, qj));
            let (m, qjf, capf) = (rest as f64, qj as f64, cap as f64);
            let outer = (m * m + 4.0 * qjf * capf).sqrt();
            lo = lo.max(((m - outer) / (2.0 * qjf)).floor() as i128 - 1);
            hi = hi.min(((m + outer) / (2.0 * qjf)).ceil() as i128 + 1);
            if lo > hi {
                continue;
            }
            let disc = m * m - 4.0 * qjf * capf;
            let hole = if disc > 0.0 {
                let inner = disc.sqrt();
                let h_lo = ((m - inner) / (2.0 * qjf)).floor() as i128 + 2;
                let h_hi = ((m + inner) / (2.0 * qjf)).ceil() as i128 - 2;
                (h_lo <= h_hi).then_some((h_lo, h_hi))
            } else {
                None
            };
            let pieces = match hole {
                Some((h_lo, h_hi)) => [(lo, hi.min(h_lo - 1)), (lo.max(h_hi + 1), hi)],
                None => [(lo, hi), (1, 0)],
            };
            let residue = (rest.rem_euclid(qk) * inv).rem_euclid(qk);
            for (p_lo, p_hi) in pieces {
                if p_lo > p_hi {
                    continue;
                }
                let mut x = p_lo + (residue - p_lo).rem_euclid(qk);
                while x <= p_hi {
                    let y = (rest - qj * x) / qk;
                    let mut tail = [0i128; 3];
                    tail[i] = a;
                    tail[j] = x;
                    tail[k] = y;
                    if self.accept(tail) {
                        visit(tail.map(|t| t as i64));
                    }
                    x += qk;
                }
            }
        }
        Ok(())
    }

    /// The fiber count by the plain double loop over `eta8` and `eta9`.
    pub fn count_literal(&self) -> Result<u64> {
        let [q8, q9, q10] = self.m.q;
        let inv = mod_inverse(q9, q10 as u64)? as i128;
        let mut n = 0;
        for e8 in -self.bound[0]..=self.bound[0] {
            if e8 == 0 {
                continue;
            }
            let rest = self.m.product - q8 * e8;
            let residue = (rest.rem_euclid(q10) * inv).rem_euclid(q10);
            let lo = -self.bound[1];
            let mut e9 = lo + (residue - lo).rem_euclid(q10);
            while e9 <= self.bound[1] {
                let e10 = (rest - q9 * e9) / q10;
                if self.accept([e8, e9, e10]) {
                    n += 1;
                }
                e9 += q10;
            }
        }
        Ok(n)
    }
}

fn div_floor(a: i128, b: i128) -> i128 {
    a.div_euclid(b)
}

fn div_ceil(a: i128, b: i128) -> i128 {
    -((-a).div_euclid(b))
}

/// Calls `visit` on every `eta1..eta7` in the region that satisfies the
/// coprimality conditions among them, with `eta1..eta5` fixed to `prefix`.
fn for_each_tail67(prefix: [u64; 5], three_b: u64, mut visit: impl FnMut([u64; 7])) {
    let [e1, e2, e3, e4, e5] = prefix;
    let base = e1.pow(3) * (e2 * e3 * e4).pow(2) * e5;
    let mut e6 = 1;
    while base * e6 <= three_b {
        if gcd(e6, e1 * e2 * e5 * e4) == 1 {
            let mut e7 = 1;
            while base * e6 * e7 <= three_b {
                if gcd(e7, e1 * e2 * e5 * e3 * e6) == 1 {
                    visit([e1, e2, e3, e4, e5, e6, e7]);
                }
                e7 += 1;
            }
        }
        e6 += 1;
    }
}

/// All `eta1..eta5` prefixes that can start a tuple in the region, in
/// lexicographic order. These are the units of parallel work.
fn prefixes(three_b: u64) -> Vec<[u64; 5]> {
    let mut out = Vec::new();
    let mut e1 = 1u64;
    while e1.pow(3) <= three_b {
        let mut e2 = 1;
        while e1.pow(3) * e2 * e2 <= three_b {
            let mut e3 = 1;
            while e1.pow(3) * (e2 * e3).pow(2) <= three_b {
                if gcd(e2, e3) == 1 {
                    let mut e4 = 1;
                    let c4 = e1.pow(3) * (e2 * e3).pow(2);
                    while c4 * e4 * e4 <= three_b {
                        if gcd(e2, e4) == 1 && gcd(e3, e4) == 1 {
                            let mut e5 = 1;
                            while c4 * e4 * e4 * e5 <= three_b {
                                if gcd(e5, e1 * e3 * e4) == 1 {
                                    out.push([e1, e2, e3, e4, e5]);
                                }
                                e5 += 1;
                            }
                        }
                        e4 += 1;
                    }
                }
                e3 += 1;
            }
            e2 += 1;
        }
        e1 += 1;
    }
    out
}

fn check_height(b: u64) -> Result<u64> {
    if b == 0 {
        return Err(Error::OutOfRange("height must be at least 1".into()));
    }
    b.checked_mul(3).filter(|t| *t < 1 << 40).ok_or(Error::Overflow("height bound"))
}

/// Calls `visit` on every tuple `eta1..eta7` in the region satisfying the
/// coprimality conditions among `eta1..eta7`, sequentially and in
/// lexicographic order.
pub fn for_each_fiber_tuple(b: u64, mut visit: impl FnMut([u64; 7])) -> Result<()> {
    let three_b = check_height(b)?;
    for p in prefixes(three_b) {
        for_each_tail67(p, three_b, &mut visit);
    }
    Ok(())
}

fn fold_prefixes<T: Send>(
    b: u64,
    per_tuple: impl Fn(&Fiber, &mut T) -> Result<()> + Sync,
    init: impl Fn() -> T + Sync,
) -> Result<Vec<T>> {
    let three_b = check_height(b)?;
    prefixes(three_b)
        .into_par_iter()
        .map(|p| {
            let mut acc = init();
            let mut err = None;
            for_each_tail67(p, three_b, |eta| {
                if err.is_none() {
                    if let Err(e) = Fiber::new(eta, b).and_then(|f| per_tuple(&f, &mut acc)) {
                        err = Some(e);
                    }
                }
            });
            err.map_or(Ok(acc), Err)
        })
        .collect()
}

/// Number of torsor points of height at most `b`.
pub fn torsor_count(b: u64) -> Result<u64> {
    torsor_count_where(b, |_| true)
}

/// Torsor count restricted to tuples `eta1..eta7` accepted by `keep`.
pub fn torsor_count_where(b: u64, keep: impl Fn(&[u64; 7]) -> bool + Sync) -> Result<u64> {
    let parts = fold_prefixes(
        b,
        |f, n: &mut u64| {
            if keep(&f.eta) {
                f.solve(|_| *n += 1)?;
            }
            Ok(())
        },
        || 0,
    )?;
    Ok(parts.into_iter().sum())
}

/// Sum of [`fiber_count`] over every tuple `eta1..eta7`; equals
/// [`torsor_count`] when the fibers partition the torsor points.
pub fn fiber_count_total(b: u64) -> Result<u64> {
    let parts = fold_prefixes(
        b,
        |f, n: &mut u64| {
            *n += f.count_literal()?;
            Ok(())
        },
        || 0,
    )?;
    Ok(parts.into_iter().sum())
}

/// All torsor points of height at most `b`, sorted.
pub fn torsor_points(b: u64) -> Result<Vec<TorsorPoint>> {
    let parts = fold_prefixes(
        b,
        |f, out: &mut Vec<TorsorPoint>| f.solve(|tail| out.push(TorsorPoint { eta: f.eta, tail })),
        Vec::new,
    )?;
    let mut all: Vec<TorsorPoint> = parts.into_iter().flatten().collect();
    all.sort_unstable();
    Ok(all)
}

/// Torsor points with `q8 = q10` or `q9 = q10`.
pub fn degenerate_count(b: u64) -> Result<u64> {
    torsor_count_where(b, |e| {
        let [_, e2, e3, e4, e5, e6, e7] = *e;
        let q10 = e4 * e7 * e7;
        e2 * e5 * e5 == q10 || e3 * e6 * e6 == q10
    })
}

/// `eta2..eta7` together with the quantities the fiber estimates are phrased in.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiberContext {
    pub eta: [u64; 6],
    pub height: u64,
    /// `B / (eta2 eta3 eta4)`
    pub y: f64,
    /// `B^(1/3) / (eta2 eta3 eta4)^(2/3) (eta5 eta6 eta7)^(1/3)`
    pub z1: f64,
    pub q8: u64,
    pub q9: u64,
    pub q10: u64,
}

impl FiberContext {
    pub fn new(eta: [u64; 6], height: u64) -> Result<Self> {
        if eta.contains(&0) || height == 0 {
            return Err(Error::OutOfRange(format!("fiber context needs positive entries, got {eta:?}, B = {height}")));
        }
        let [e2, e3, e4, e5, e6, e7] = eta;
        let b = height as f64;
        let inner = (e2 * e3 * e4) as f64;
        let outer = (e5 * e6 * e7) as f64;
        Ok(FiberContext {
            eta,
            height,
            y: b / inner,
            z1: b.cbrt() / (inner * inner * outer).cbrt(),
            q8: e2 * e5 * e5,
            q9: e3 * e6 * e6,
            q10: e4 * e7 * e7,
        })
    }

    /// Membership in the region where the fiber estimate is proved:
    /// `Y (log log B)^(2/3) >= q Z1^2` for `q = q8, q9`, `Z1 >= 3^(-1/3)`,
    /// and `q8, q9 >= q10`.
    pub fn in_region(&self) -> bool {
        let ll = (self.height as f64).ln().ln();
        if !(ll > 0.0) {
            return false;
        }
        let lhs = self.y * ll.powf(2.0 / 3.0);
        let z2 = self.z1 * self.z1;
        lhs >= self.q8 as f64 * z2
            && lhs >= self.q9 as f64 * z2
            && self.z1 >= 3f64.cbrt().recip()
            && self.q8 >= self.q10
            && self.q9 >= self.q10
    }

    fn tuple(&self, e1: u64) -> [u64; 7] {
        let [e2, e3, e4, e5, e6, e7] = self.eta;
        [e1, e2, e3, e4, e5, e6, e7]
    }

    fn checked_tuple(&self, e1: u64) -> Result<[u64; 7]> {
        let t = self.tuple(e1);
        if e1 == 0 || !prefix_coprime(&t) {
            return Err(Error::Precondition(format!("{t:?} fails a coprimality condition on eta1..eta7")));
        }
        Ok(t)
    }
}

/// Number of `(eta8, eta9, eta10)` completing `eta1` and `ctx` to a torsor
/// point of height at most `B`, by the plain double loop.
pub fn fiber_count(ctx: &FiberContext, e1: u64) -> Result<u64> {
    Fiber::new(ctx.checked_tuple(e1)?, ctx.height)?.count_literal()
}

/// The expected size of a fiber:
/// `B^(2/3) / eta^(1/3,1/3,1/3,2/3,2/3,2/3) g2(eta1 / Z1) theta1 theta2`.
pub fn fiber_main_term(ctx: &FiberContext, e1: u64, cfg: &QuadratureConfig) -> Result<f64> {
    ctx.checked_tuple(e1)?;
    let t = e1 as f64 / ctx.z1;
    if t >= t_max() {
        return Ok(0.0);
    }
    let [e2, e3, e4, e5, e6, e7] = ctx.eta;
    let inner = (e2 * e3 * e4) as f64;
    let outer = (e5 * e6 * e7) as f64;
    let scale = (ctx.height as f64).powf(2.0 / 3.0) / (inner * outer * outer).cbrt();
    let weight = to_f64(&(theta1(e1, e2 * e3 * e4) * theta2(ctx.eta)));
    Ok(scale * g2(t, cfg)? * weight)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_heights() {
        assert_eq!(torsor_count(1).unwrap(), 3);
        assert!(torsor_count(0).is_err());
        let pts = torsor_points(1).unwrap();
        assert!(pts.iter().all(|p| p.eta == [1; 7]));
    }

    #[test]
    fn fast_solver_matches_double_loop() {
        for b in [1u64, 7, 30, 120] {
            for_each_fiber_tuple(b, |eta| {
                let f = Fiber::new(eta, b).unwrap();
                let mut fast = Vec::new();
                f.solve(|t| fast.push(t)).unwrap();
                assert_eq!(fast.len() as u64, f.count_literal().unwrap(), "{eta:?} at B = {b}");
                for tail in fast {
                    TorsorPoint::new(eta, tail, b).unwrap();
                }
            })
            .unwrap();
        }
    }

    #[test]
    fn solver_coefficients_are_coprime() {
        for_each_fiber_tuple(300, |eta| {
            let m = Monomials::new(&eta).unwrap();
            for (a, b) in [(0, 1), (0, 2), (1, 2)] {
                assert!(mod_inverse(m.q[a], m.q[b] as u64).is_ok(), "{eta:?}");
            }
        })
        .unwrap();
    }

    #[test]
    fn monotone_in_height() {
        let counts: Vec<u64> = (1..=60).map(|b| torsor_count(b).unwrap()).collect();
        assert!(counts.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn fiber_context_checks() {
        let ctx = FiberContext::new([2, 1, 1, 1, 2, 1], 100).unwrap();
        assert!(matches!(fiber_count(&ctx, 1), Err(Error::Precondition(_))));
        let ctx = FiberContext::new([1; 6], 1).unwrap();
        assert_eq!(fiber_count(&ctx, 1).unwrap(), 3);
        assert_eq!(fiber_count(&ctx, 2).unwrap(), 0);
        let far = FiberContext::new([1; 6], 1000).unwrap();
        assert_eq!(fiber_main_term(&far, 15, &QuadratureConfig::default()).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_tuples_at_height_one() {
        assert_eq!(degenerate_count(1).unwrap(), 3);
        assert!(degenerate_count(0).is_err());
    }
}
