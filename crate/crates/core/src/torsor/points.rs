//! Points on the surface and on its universal torsor, and the map between them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{gcd, gcd_i, sq};
use crate::error::{Error, Result};

/// A rational point of `x0 (x1 + x2 + x3)^2 = x1 x2 x3` in canonical form:
/// primitive, with first nonzero coordinate positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub x: [i128; 4],
}

fn on_surface(x: &[i128; 4]) -> Option<bool> {
    let s = x[1].checked_add(x[2])?.checked_add(x[3])?;
    let lhs = x[0].checked_mul(s.checked_mul(s)?)?;
    let rhs = x[1].checked_mul(x[2])?.checked_mul(x[3])?;
    Some(lhs == rhs)
}

impl SurfacePoint {
    /// Canonical representative of the projective point `x`.
    pub fn new(x: [i128; 4]) -> Result<Self> {
        let g = x.iter().fold(0u128, |g, &c| gcd_i(g as i128, c));
        if g == 0 {
            return Err(Error::OutOfRange("the zero vector is not a projective point".into()));
        }
        let mut x = x.map(|c| c / g as i128);
        if x.iter().find(|&&c| c != 0).is_some_and(|&c| c < 0) {
            x = x.map(|c| -c);
        }
        match on_surface(&x) {
            Some(true) => Ok(SurfacePoint { x }),
            Some(false) => Err(Error::OutOfRange(format!("{x:?} is not on the surface"))),
            None => Err(Error::Overflow("surface equation")),
        }
    }

    pub fn height(&self) -> u128 {
        self.x.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    /// Off the six lines `x0 = xi = 0` and `x1 + x2 + x3 = xi = 0`.
    pub fn in_open_subset(&self) -> bool {
        let [_, a, b, c] = self.x;
        a != 0 && b != 0 && c != 0 && a + b + c != 0
    }
}

impl fmt::Display for SurfacePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.x;
        write!(f, "({a}:{b}:{c}:{d})")
    }
}

/// An integral point `(eta1, ..., eta10)` of the torsor with `eta1..eta7 > 0`
/// and `eta8, eta9, eta10` nonzero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TorsorPoint {
    pub eta: [u64; 7],
    pub tail: [i64; 3],
}

pub(crate) fn mul(xs: &[i128]) -> Result<i128> {
    xs.iter()
        .try_fold(1i128, |acc, &x| acc.checked_mul(x))
        .ok_or(Error::Overflow("torsor monomial"))
}

/// Monomials attached to `eta1..eta7`: the coefficients `q8, q9, q10` of the
/// torsor equation, its constant term, and the height weights of `eta8..eta10`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Monomials {
    pub q: [i128; 3],
    pub product: i128,
    pub weight: [i128; 3],
    /// `eta1^3 eta2^2 eta3^2 eta4^2 eta5 eta6 eta7`
    pub size: i128,
}

impl Monomials {
    pub fn new(eta: &[u64; 7]) -> Result<Self> {
        let [e1, e2, e3, e4, e5, e6, e7] = eta.map(|e| e as i128);
        let base = mul(&[e1, e1, e2, e3, e4])?;
        Ok(Monomials {
            q: [mul(&[e2, e5, e5])?, mul(&[e3, e6, e6])?, mul(&[e4, e7, e7])?],
            product: mul(&[e1, e2, e3, e4, e5, e6, e7])?,
            weight: [
                mul(&[base, e2, e5, e5])?,
                mul(&[base, e3, e6, e6])?,
                mul(&[base, e4, e7, e7])?,
            ],
            size: mul(&[e1, e1, e1, e2, e2, e3, e3, e4, e4, e5, e6, e7])?,
        })
    }
}

/// The coprimality conditions that involve only `eta1..eta7`.
pub fn prefix_coprime(eta: &[u64; 7]) -> bool {
    let [e1, e2, e3, e4, e5, e6, e7] = *eta;
    gcd(e1, e5 * e6 * e7) == 1 && gcd(e2 * e5, e3 * e4 * e6 * e7) == 1 && gcd(e3 * e6, e4 * e7) == 1
}

/// Products that `eta8`, `eta9`, `eta10` must be coprime to.
pub(crate) fn tail_moduli(eta: &[u64; 7]) -> [u64; 3] {
    let [e1, e2, e3, e4, e5, e6, e7] = *eta;
    let c = e1 * e2 * e3 * e4;
    [c * e6 * e7, c * e5 * e7, c * e5 * e6]
}

impl TorsorPoint {
    /// Checks the torsor equation, the coprimality conditions and the four
    /// height conditions for `b`.
    pub fn new(eta: [u64; 7], tail: [i64; 3], b: u64) -> Result<Self> {
        let p = TorsorPoint { eta, tail };
        if eta.contains(&0) || tail.contains(&0) {
            return Err(Error::Precondition(format!("{p:?} has a zero coordinate")));
        }
        if !p.satisfies_equation()? {
            return Err(Error::Precondition(format!("{p:?} is off the torsor")));
        }
        if !p.is_coprime() {
            return Err(Error::Precondition(format!("{p:?} fails a coprimality condition")));
        }
        if !p.within_height(b)? {
            return Err(Error::Precondition(format!("{p:?} exceeds height {b}")));
        }
        Ok(p)
    }

    pub fn satisfies_equation(&self) -> Result<bool> {
        let m = Monomials::new(&self.eta)?;
        let mut lhs = 0i128;
        for k in 0..3 {
            lhs = m.q[k]
                .checked_mul(self.tail[k] as i128)
                .and_then(|t| lhs.checked_add(t))
                .ok_or(Error::Overflow("torsor equation"))?;
        }
        Ok(lhs == m.product)
    }

    pub fn is_coprime(&self) -> bool {
        prefix_coprime(&self.eta)
            && tail_moduli(&self.eta)
                .iter()
                .zip(self.tail)
                .all(|(&m, t)| gcd(m, t.unsigned_abs()) == 1)
    }

    pub fn within_height(&self, b: u64) -> Result<bool> {
        let m = Monomials::new(&self.eta)?;
        let b = b as i128;
        let [t8, t9, t10] = self.tail.map(|t| t as i128);
        if mul(&[t8, t9, t10])?.abs() > b {
            return Ok(false);
        }
        for k in 0..3 {
            if mul(&[m.weight[k], self.tail[k] as i128])?.abs() > b {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `eta1, ..., eta10` as a flat row.
    pub fn coordinates(&self) -> [i64; 10] {
        let mut out = [0i64; 10];
        for (o, &e) in out.iter_mut().zip(&self.eta) {
            *o = e as i64;
        }
        out[7..].copy_from_slice(&self.tail);
        out
    }
}

/// Image of a torsor point on the surface:
/// `(eta8 eta9 eta10 : w8 eta8 : w9 eta9 : w10 eta10)` with `w` the height weights.
///
/// Fails if the image is not primitive, off the surface, on a line, or if the
/// height conditions disagree with the height of the image.
pub fn torsor_to_point(t: &TorsorPoint) -> Result<SurfacePoint> {
    let m = Monomials::new(&t.eta)?;
    let [t8, t9, t10] = t.tail.map(|v| v as i128);
    let raw = [
        mul(&[t8, t9, t10])?,
        mul(&[m.weight[0], t8])?,
        mul(&[m.weight[1], t9])?,
        mul(&[m.weight[2], t10])?,
    ];
    let g = raw.iter().fold(0u128, |g, &c| gcd_i(g as i128, c));
    if g != 1 {
        return Err(Error::TorsorMap(format!("image of {t:?} has content {g}")));
    }
    let pt = SurfacePoint::new(raw).map_err(|e| Error::TorsorMap(format!("image of {t:?}: {e}")))?;
    if !pt.in_open_subset() {
        return Err(Error::TorsorMap(format!("image of {t:?} lies on a line")));
    }
    Ok(pt)
}

/// Moves the square part of `eta2, eta3, eta4` onto `eta5, eta6, eta7` and
/// `eta1`; the torsor equation and the height monomials are unchanged.
pub fn squarefree_renormalize(eta: [u64; 7]) -> [u64; 7] {
    let [e1, e2, e3, e4, e5, e6, e7] = eta;
    let (s2, s3, s4) = (sq(e2), sq(e3), sq(e4));
    [
        e1 * s2 * s3 * s4,
        e2 / (s2 * s2),
        e3 / (s3 * s3),
        e4 / (s4 * s4),
        e5 * s2,
        e6 * s3,
        e7 * s4,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_form() {
        let p = SurfacePoint::new([2, -2, -2, 2]).unwrap();
        assert_eq!(p.x, [1, -1, -1, 1]);
        let p = SurfacePoint::new([0, 0, -3, 6]).unwrap();
        assert_eq!(p.x, [0, 0, 1, -2]);
        assert!(!p.in_open_subset());
        assert!(SurfacePoint::new([1, 1, 1, 1]).is_err());
    }

    #[test]
    fn unit_torsor_point() {
        let t = TorsorPoint::new([1; 7], [1, 1, -1], 1).unwrap();
        assert_eq!(torsor_to_point(&t).unwrap().x, [1, -1, -1, 1]);
        assert!(TorsorPoint::new([1; 7], [1, 1, 1], 1).is_err());
        assert!(TorsorPoint::new([1; 7], [1, 1, -1], 0).is_err());
    }

    #[test]
    fn renormalize_examples() {
        assert_eq!(squarefree_renormalize([5, 4, 1, 1, 3, 1, 1]), [10, 1, 1, 1, 6, 1, 1]);
        assert_eq!(squarefree_renormalize([1, 12, 9, 1, 1, 1, 1]), [6, 3, 1, 1, 2, 3, 1]);
        let e = [2, 3, 5, 7, 11, 13, 1];
        assert_eq!(squarefree_renormalize(e), e);
    }

    proptest! {
        #![proptest_config(ProptestConfig { max_global_rejects: 100_000, ..ProptestConfig::default() })]
        #[test]
        fn renormalize_invariants(e in prop::array::uniform7(1u64..60)) {
            // the coprimality conditions make eta2, eta3, eta4 pairwise coprime
            prop_assume!(gcd(e[1], e[2]) == 1 && gcd(e[1], e[3]) == 1 && gcd(e[2], e[3]) == 1);
            let r = squarefree_renormalize(e);
            let (a, b) = (Monomials::new(&e).unwrap(), Monomials::new(&r).unwrap());
            prop_assert_eq!(a, b);
            prop_assert_eq!(sq(r[1] * r[2] * r[3]), 1);
            prop_assert_eq!(squarefree_renormalize(r), r);
        }

        #[test]
        fn image_satisfies_surface_equation(
            e in prop::array::uniform7(prop::sample::select(vec![1u64, 1, 1, 1, 2, 3, 5, 7])),
            t8 in -40i64..40,
            k in -4i64..4,
        ) {
            prop_assume!(prefix_coprime(&e) && t8 != 0);
            let m = Monomials::new(&e).unwrap();
            // pick eta9 so that eta10 is integral
            let rest = m.product - m.q[0] * t8 as i128;
            let inv = crate::arith::mod_inverse(m.q[1], m.q[2] as u64).unwrap() as i128;
            let t9 = (rest * inv).rem_euclid(m.q[2]) + k as i128 * m.q[2];
            let t10 = (rest - m.q[1] * t9) / m.q[2];
            prop_assume!(t9 != 0 && t10 != 0);
            let t = TorsorPoint { eta: e, tail: [t8, t9 as i64, t10 as i64] };
            prop_assume!(t.is_coprime());
            let p = torsor_to_point(&t).unwrap();
            prop_assert!(p.in_open_subset());
            for b in [1u64, 10, 1000, 100_000] {
                prop_assert_eq!(t.within_height(b).unwrap(), p.height() <= b as u128);
            }
        }
    }
}
