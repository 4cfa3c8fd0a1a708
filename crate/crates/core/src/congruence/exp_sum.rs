use num_complex::Complex64;

use super::CongruenceInstance;
use crate::arith::{e_q, gcd, mod_inverse, ramanujan_c};
use crate::error::{Error, Result};

/// The solution pairs `(alpha, beta)` of one instance, reused across many
/// frequencies `(r, s)`.
pub struct DirectSum {
    q: u64,
    pairs: Vec<(u64, u64)>,
    roots: Vec<Complex64>,
}

impl DirectSum {
    pub fn new(inst: &CongruenceInstance) -> Self {
        let q = inst.q();
        let mut pairs = Vec::new();
        for alpha in 1..=q {
            if gcd(alpha, q) != 1 {
                continue;
            }
            for beta in 1..=q {
                if gcd(beta, q) == 1 && inst.satisfies(alpha as i64, beta as i64) {
                    pairs.push((alpha, beta));
                }
            }
        }
        let roots = (0..q).map(|k| e_q(k as i128, q)).collect();
        DirectSum { q, pairs, roots }
    }

    pub fn pairs(&self) -> &[(u64, u64)] {
        &self.pairs
    }

    pub fn eval(&self, r: i64, s: i64) -> Complex64 {
        let q = self.q;
        let (r, s) = (reduce(r, q), reduce(s, q));
        self.pairs.iter().map(|&(a, b)| self.roots[((r * a + s * b) % q) as usize]).sum()
    }
}

fn reduce(x: i64, q: u64) -> u64 {
    (x as i128).rem_euclid(q as i128) as u64
}

/// `S_q(r, s, a, b)` summed literally over `alpha, beta` in `[1, q]`.
pub fn exp_sum_s_direct(inst: &CongruenceInstance, r: i64, s: i64) -> Complex64 {
    DirectSum::new(inst).eval(r, s)
}

/// The closed form `e_q(r a1^-1 b) c_q(a1 s - a2 r)` of one instance, with
/// the Ramanujan sums modulo `q` tabulated once.
pub struct ClosedSum {
    q: u64,
    a1: u64,
    a2: u64,
    b: u64,
    inv1: u64,
    inv2: u64,
    ramanujan: Vec<f64>,
    roots: Vec<Complex64>,
}

impl ClosedSum {
    pub fn new(inst: &CongruenceInstance) -> Result<Self> {
        let q = inst.q();
        Ok(ClosedSum {
            q,
            a1: reduce(inst.a1(), q),
            a2: reduce(inst.a2(), q),
            b: inst.b_mod(),
            inv1: mod_inverse(inst.a1() as i128, q)? % q,
            inv2: mod_inverse(inst.a2() as i128, q)? % q,
            ramanujan: (0..q).map(|m| ramanujan_c(q, m as i64) as f64).collect(),
            roots: (0..q).map(|k| e_q(k as i128, q)).collect(),
        })
    }

    /// Evaluates the closed form and checks it against the symmetric form
    /// `e_q(s a2^-1 b) c_q(a2 r - a1 s)`.
    pub fn eval(&self, r: i64, s: i64) -> Result<Complex64> {
        let q = self.q;
        let (r, s) = (reduce(r, q), reduce(s, q));
        // all operands are below q, so the products stay far below 2^64
        let m = (self.a1 * s + (q - self.a2) * r) % q;
        let c1 = self.ramanujan[m as usize];
        let c2 = self.ramanujan[((q - m) % q) as usize];
        let first = self.roots[(r * self.inv1 % q * self.b % q) as usize] * c1;
        let second = self.roots[(s * self.inv2 % q * self.b % q) as usize] * c2;
        if (first - second).norm() > 1e-9 {
            return Err(Error::Disagreement(format!(
                "symmetric forms of S_q differ: {first} vs {second} (q = {q})"
            )));
        }
        Ok(first)
    }
}

/// Closed form of `S_q(r, s, a, b)`; see [`ClosedSum`].
pub fn exp_sum_s_closed(inst: &CongruenceInstance, r: i64, s: i64) -> Result<Complex64> {
    ClosedSum::new(inst)?.eval(r, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ramanujan_c;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-9
    }

    #[test]
    fn trivial_modulus() {
        let inst = CongruenceInstance::new(1, 1, 1, 0).unwrap();
        assert!(close(exp_sum_s_direct(&inst, 3, -2), Complex64::new(1.0, 0.0)));
        assert!(close(exp_sum_s_closed(&inst, 3, -2).unwrap(), Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn prime_modulus_example() {
        let inst = CongruenceInstance::new(5, 1, 1, 5).unwrap();
        let direct = exp_sum_s_direct(&inst, 5, 5);
        assert!(close(direct, Complex64::new(4.0, 0.0)));
        assert!(close(exp_sum_s_closed(&inst, 5, 5).unwrap(), direct));
    }

    #[test]
    fn composite_example() {
        let inst = CongruenceInstance::new(6, 1, 5, 6).unwrap();
        let direct = exp_sum_s_direct(&inst, 2, 3);
        assert!(close(exp_sum_s_closed(&inst, 2, 3).unwrap(), direct));
    }

    #[test]
    fn r_equal_q_gives_ramanujan_sum() {
        for q in 1..=30u64 {
            for inst in CongruenceInstance::all_for_modulus(q).into_iter().step_by(7) {
                let closed = ClosedSum::new(&inst).unwrap();
                for s in -5..=q as i64 {
                    let v = closed.eval(q as i64, s).unwrap();
                    assert!(close(v, Complex64::new(ramanujan_c(q, s) as f64, 0.0)));
                    let w = closed.eval(s, q as i64).unwrap();
                    assert!(close(w, Complex64::new(ramanujan_c(q, s) as f64, 0.0)));
                }
            }
        }
    }

    #[test]
    fn closed_matches_direct_small_moduli() {
        for q in 1..=16u64 {
            for inst in CongruenceInstance::all_for_modulus(q) {
                let direct = DirectSum::new(&inst);
                let closed = ClosedSum::new(&inst).unwrap();
                for r in 1..=q as i64 {
                    for s in 1..=q as i64 {
                        let c = closed.eval(r, s).unwrap();
                        assert!((c - direct.eval(r, s)).norm() < 1e-8, "{inst:?} r={r} s={s}");
                    }
                }
            }
        }
    }
}
