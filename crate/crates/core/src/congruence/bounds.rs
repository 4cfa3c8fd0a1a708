use super::{CongruenceInstance, RegionS};
use crate::arith::{euler_phi, factor_unchecked, gcd, mu, omega_count, sigma_neg, tau};
use crate::error::{Error, Result};

/// Largest modulus accepted by the literal `E0` double sum.
pub const E0_MAX_MODULUS: u64 = 2000;

/// `E0(q, a) = sum_{d|q} |mu(q/d)| d sum_{0<|r|,|s|<=q/2, a1 s ≡ a2 r (d)} 1/|rs|`.
pub fn error_e0(inst: &CongruenceInstance) -> Result<f64> {
    error_e0_for(inst.q(), inst.a1(), inst.a2())
}

/// `E0` for an arbitrary pair `(a1, a2)`; `b` plays no role.
pub fn error_e0_for(q: u64, a1: i64, a2: i64) -> Result<f64> {
    if q == 0 || q > E0_MAX_MODULUS {
        return Err(Error::OutOfRange(format!(
            "E0 is evaluated literally only for 1 <= q <= {E0_MAX_MODULUS}, got {q}"
        )));
    }
    let half = (q / 2) as i64;
    let mut total = 0.0;
    for d in factor_unchecked(q).divisors() {
        if mu(q / d) == 0 {
            continue;
        }
        let di = d as i128;
        let mut inner = 0.0;
        for r in (-half..=half).filter(|&r| r != 0) {
            for s in (-half..=half).filter(|&s| s != 0) {
                if (a1 as i128 * s as i128 - a2 as i128 * r as i128).rem_euclid(di) == 0 {
                    inner += 1.0 / (r.unsigned_abs() * s.unsigned_abs()) as f64;
                }
            }
        }
        total += d as f64 * inner;
    }
    Ok(total)
}

/// `E1(q) = (q/phi(q))^3 log(q)^2`, so `E1(1) = 0`.
pub fn error_e1(q: u64) -> f64 {
    let ratio = q as f64 / euler_phi(q) as f64;
    let l = (q as f64).ln();
    ratio.powi(3) * l * l
}

pub fn error_e(inst: &CongruenceInstance) -> Result<f64> {
    Ok(error_e0(inst)? + error_e1(inst.q()))
}

/// `E2(q) = (q/phi(q)) sigma_{-1/2}(q) sigma_{-1}(q)`.
pub fn error_e2(q: u64) -> f64 {
    q as f64 / euler_phi(q) as f64 * sigma_neg(0.5, q) * sigma_neg(1.0, q)
}

/// Error envelope for `D(S; q, a, b)` against its volume main term, valid
/// when `X / calL <= T`.
pub fn affine_error_bound(
    region: &RegionS,
    inst: &CongruenceInstance,
    l: f64,
    cal_l: f64,
) -> Result<f64> {
    if !(l >= 1.0 && cal_l >= 1.0) {
        return Err(Error::Precondition(format!("need L, calL >= 1, got {l}, {cal_l}")));
    }
    let (x, t, a1, a2) = (region.x(), region.t(), region.a1(), region.a2());
    if x / cal_l > t {
        return Err(Error::Precondition(format!("X/calL = {} exceeds T = {t}", x / cal_l)));
    }
    let q = inst.q();
    let log2x = (2.0 * x).ln();
    let first = l.powi(4) * log2x * log2x * error_e(inst)?;
    let second = x.powf(2.0 / 3.0) * t.powf(4.0 / 3.0) / (a1 * a2 * q as f64)
        * cal_l.powf(4.0 / 3.0)
        * (cal_l / l + a1.sqrt() / x.sqrt() + a2.sqrt() / x.sqrt())
        * error_e2(q);
    Ok(first + second)
}

/// Number of integers `y` with `Yp < |y^2 + 2 A y| <= Y`.
pub fn count_quadratic_interval(yp: f64, y: f64, a: f64) -> u64 {
    if y <= 0.0 {
        return 0;
    }
    // |y^2 + 2Ay| <= Y forces (y + A)^2 <= Y + A^2
    let radius = (y + a * a).sqrt();
    let lo = (-a - radius).floor() as i64 - 1;
    let hi = (-a + radius).ceil() as i64 + 1;
    (lo..=hi)
        .filter(|&n| {
            let n = n as f64;
            let v = (n * n + 2.0 * a * n).abs();
            yp < v && v <= y
        })
        .count() as u64
}

/// `nu^(1/2) M0^2 / M + 1` with `M = max(|A|, Y^(1/2))`.
pub fn quadratic_interval_bound(nu: f64, m0: f64, y: f64, a: f64) -> f64 {
    let m = a.abs().max(y.sqrt());
    nu.sqrt() * m0 * m0 / m + 1.0
}

/// A primitive vector `v` with box sizes `W_i >= 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrimitiveVectorQuery {
    v: [i64; 3],
    w: [f64; 3],
}

impl PrimitiveVectorQuery {
    pub fn new(v: [i64; 3], w: [f64; 3]) -> Result<Self> {
        let g = gcd(gcd(v[0].unsigned_abs(), v[1].unsigned_abs()), v[2].unsigned_abs());
        if g != 1 {
            return Err(Error::Precondition(format!("{v:?} is not primitive")));
        }
        if w.iter().any(|&x| !(x >= 1.0 && x.is_finite())) {
            return Err(Error::Precondition(format!("box sizes must be >= 1, got {w:?}")));
        }
        Ok(PrimitiveVectorQuery { v, w })
    }

    pub fn v(&self) -> [i64; 3] {
        self.v
    }

    pub fn w(&self) -> [f64; 3] {
        self.w
    }
}

/// Primitive `w` with `|w_i| <= W_i` and `v . w = 0`, counted exhaustively.
pub fn heath_brown_count(query: &PrimitiveVectorQuery) -> u64 {
    let v = query.v;
    let lim = query.w.map(|x| x.floor() as i64);
    // solve for the coordinate with the largest |v_k|
    let k = (0..3).max_by_key(|&i| v[i].unsigned_abs()).unwrap();
    let (i, j) = match k {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let mut count = 0;
    for wi in -lim[i]..=lim[i] {
        for wj in -lim[j]..=lim[j] {
            let rest = -(v[i] as i128 * wi as i128 + v[j] as i128 * wj as i128);
            if rest % v[k] as i128 != 0 {
                continue;
            }
            let wk = rest / v[k] as i128;
            if wk.unsigned_abs() > lim[k] as u128 {
                continue;
            }
            let g = gcd(gcd(wi.unsigned_abs(), wj.unsigned_abs()), wk.unsigned_abs() as u64);
            if g == 1 {
                count += 1;
            }
        }
    }
    count
}

/// `12 pi W1 W2 W3 / max |v_i| W_i + 4`.
pub fn heath_brown_bound(query: &PrimitiveVectorQuery) -> f64 {
    let [w1, w2, w3] = query.w;
    let m = (0..3)
        .map(|i| query.v[i].unsigned_abs() as f64 * query.w[i])
        .fold(0.0, f64::max);
    12.0 * std::f64::consts::PI * w1 * w2 * w3 / m + 4.0
}

/// Both sides of the dyadic estimate for `E(q, (b1 c1^2, b2 c2^2))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DyadicReport {
    pub lhs: f64,
    pub bound: f64,
    pub terms: u64,
}

impl DyadicReport {
    pub fn ratio(&self) -> f64 {
        if self.bound == 0.0 {
            0.0
        } else {
            self.lhs / self.bound
        }
    }
}

pub fn dyadic_error_sum(c1: f64, c2: f64, q: u64, b1: u64, b2: u64) -> Result<DyadicReport> {
    if !(c1 >= 0.5 && c2 >= 0.5) {
        return Err(Error::Precondition(format!("need C1, C2 >= 1/2, got {c1}, {c2}")));
    }
    if q == 0 || b1 == 0 || b2 == 0 || gcd(b1 * b2, q) != 1 {
        return Err(Error::Precondition(format!("need gcd(b1 b2, q) = 1, got b = ({b1}, {b2}), q = {q}")));
    }
    let range = |c: f64| (c.floor() as i64 + 1)..=((2.0 * c).floor() as i64);
    let qi = q as i128;
    let e1 = error_e1(q);
    let mut lhs = 0.0;
    let mut terms = 0;
    for x1 in range(c1) {
        if gcd(x1 as u64, q) != 1 {
            continue;
        }
        for x2 in range(c2) {
            if gcd(x2 as u64, q) != 1 || gcd(x1 as u64, x2 as u64) != 1 {
                continue;
            }
            // E0 depends on a only modulo q
            let a1 = (b1 as i128 * x1 as i128 * x1 as i128).rem_euclid(qi) as i64;
            let a2 = (b2 as i128 * x2 as i128 * x2 as i128).rem_euclid(qi) as i64;
            lhs += error_e0_for(q, a1, a2)? + e1;
            terms += 1;
        }
    }
    let bound = (c1 * c2 * tau(q) as f64 + q as f64) * 2f64.powi(omega_count(q) as i32) * e1;
    Ok(DyadicReport { lhs, bound, terms })
}
