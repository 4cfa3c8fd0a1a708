//! The real density: `h`, the slice measures `g1`, `g2`, and `omega_inf`.

use std::cell::RefCell;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quadrature::integrate;
use super::QuadratureConfig;
use crate::error::{Error, Result};

/// `3^(1/3)`: `g2` vanishes beyond this point.
pub fn t_max() -> f64 {
    3f64.cbrt()
}

/// A value together with an error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn relative_error(&self) -> f64 {
        (self.error / self.value).abs()
    }
}

/// `max{|xy||x+y-t|, t^2|x|, t^2|y|, t^2|x+y-t|}`.
pub fn h(x: f64, y: f64, t: f64) -> f64 {
    let z = x + y - t;
    let t2 = t * t;
    (x * y * z).abs().max(t2 * x.abs()).max(t2 * y.abs()).max(t2 * z.abs())
}

/// Length of `{x : h(x, y, t) <= 1}`.
///
/// For fixed `(y, t)` the set is an intersection of intervals minus at most
/// one open interval, all with explicit endpoints.
pub fn g1(y: f64, t: f64) -> f64 {
    g1_with_shape(y, t).0
}

/// `g1` together with a code for which constraints are active; `g1` is
/// smooth in `y` wherever the code is locally constant.
fn g1_with_shape(y: f64, t: f64) -> (f64, u32) {
    if !(t > 0.0) {
        return (0.0, 0);
    }
    let r = 1.0 / (t * t);
    if y.abs() > r {
        return (0.0, 1);
    }
    let c = t - y;
    let pick = |vals: [f64; 3], lower: bool| {
        let mut best = 0;
        for k in 1..3 {
            if (lower && vals[k] > vals[best]) || (!lower && vals[k] < vals[best]) {
                best = k;
            }
        }
        (vals[best], best as u32)
    };
    if y == 0.0 {
        let (lo, _) = pick([-r, c - r, f64::NEG_INFINITY], true);
        let (hi, _) = pick([r, c + r, f64::INFINITY], false);
        return ((hi - lo).max(0.0), 2);
    }
    // |x (x - c)| <= k; roots are taken in the cancellation-free form since
    // for large |y| one root of each pair is tiny and the pieces are thin
    let k = 1.0 / y.abs();
    let half = 0.5 * c;
    let sgn = if half < 0.0 { -1.0 } else { 1.0 };
    let d = (half * half + k).sqrt();
    let far = half + sgn * d;
    let near = -k / far;
    let (d_lo, d_hi) = if sgn > 0.0 { (near, far) } else { (far, near) };
    let (lo, lo_code) = pick([-r, c - r, d_lo], true);
    let (hi, hi_code) = pick([r, c + r, d_hi], false);
    let mut code = 4 + lo_code * 3 + hi_code + 16 * (y > 0.0) as u32;
    if hi <= lo {
        return (0.0, 3);
    }
    let mut len = if lo_code == 2 && hi_code == 2 { 2.0 * d } else { hi - lo };
    if half * half > k {
        let e = (half * half - k).sqrt();
        let far = half + sgn * e;
        let near = k / far;
        let (s1, s2) = if sgn > 0.0 { (near, far) } else { (far, near) };
        // e < d, so the inner roots sit strictly inside the outer ones; use that
        // instead of comparing floats that agree to the last bit
        let s1_in = lo_code == 2 || s1 > lo;
        let s1_out = hi_code != 2 && s1 > hi;
        let s2_in = hi_code == 2 || s2 < hi;
        let s2_out = lo_code != 2 && s2 < lo;
        code += 32 * (1 + s1_in as u32 + 2 * s1_out as u32 + 4 * !s2_out as u32 + 8 * !s2_in as u32);
        // distance between same-side roots of the two quadratics
        let gap = 2.0 * k / (d + e);
        let left = if !s1_in {
            0.0
        } else if s1_out {
            len
        } else if lo_code == 2 {
            gap
        } else {
            s1 - lo
        };
        let right = if !s2_in {
            0.0
        } else if s2_out {
            len
        } else if hi_code == 2 {
            gap
        } else {
            hi - s2
        };
        len = if s2_out { right } else if s1_out { left } else { left + right };
    }
    (len.max(0.0), code)
}

// Real roots in [lo, hi] of a polynomial of degree at most three, given by
// coefficients in increasing degree. The interval is split at critical points
// and each monotone piece is bisected to full precision.
fn poly_roots(p: [f64; 4], lo: f64, hi: f64) -> Vec<f64> {
    let eval = |y: f64| ((p[3] * y + p[2]) * y + p[1]) * y + p[0];
    let (a, b, c) = (3.0 * p[3], 2.0 * p[2], p[1]);
    let mut cuts = vec![lo, hi];
    if a != 0.0 {
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            let q = -0.5 * (b + b.signum() * disc.sqrt());
            if q != 0.0 {
                cuts.extend([q / a, c / q]);
            } else {
                cuts.push(0.0);
            }
        }
    } else if b != 0.0 {
        cuts.push(-c / b);
    }
    cuts.retain(|y| *y >= lo && *y <= hi);
    cuts.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let (mut u, mut v) = (w[0], w[1]);
        let (fu, fv) = (eval(u), eval(v));
        if fu == 0.0 {
            out.push(u);
        }
        if fu.signum() == fv.signum() || fv == 0.0 {
            continue;
        }
        loop {
            let m = 0.5 * (u + v);
            if m <= u || m >= v {
                break;
            }
            if eval(m).signum() == fu.signum() {
                u = m;
            } else {
                v = m;
            }
        }
        out.extend([u, v]);
    }
    out
}

// Values of y where two of the constraints defining g1 trade places: a box
// endpoint meeting a root of x(x - c) = +-1/|y|, or the inner quadratic
// acquiring real roots.
fn switch_points(t: f64) -> Vec<f64> {
    let r = 1.0 / (t * t);
    let mut out = Vec::new();
    for s in [1.0, -1.0] {
        let (lo, hi) = if s > 0.0 { (0.0, r) } else { (-r, 0.0) };
        for e in [1.0, -1.0] {
            for dl in [1.0, -1.0] {
                let sr = s * dl * r;
                out.extend(poly_roots([-e, sr * (dl * r - t), sr, 0.0], lo, hi));
                out.extend(poly_roots([-e, sr * (t + dl * r), -sr, 0.0], lo, hi));
            }
        }
        out.extend(poly_roots([-4.0, s * t * t, -2.0 * s * t, s], lo, hi));
    }
    out
}

/// Number of uniform probes per unit of `g2_breaks`' scan.
const SHAPE_SCAN: usize = 4096;

/// Points in `y` where `g1(., t)` is not smooth.
///
/// A geometric grid resolves the scales between `10^-9` and `1/t^2`; a
/// uniform scan then brackets every change of active constraint, and each
/// bracket is bisected down to `root_tol`.
fn g2_breaks(t: f64, root_tol: f64) -> Vec<f64> {
    let r = 1.0 / (t * t);
    let mut grid = vec![-r, 0.0, t, t - 2.0 * r, t + 2.0 * r, r];
    let top = r.log10().ceil() as i32;
    for e in -9..=top {
        let s = 10f64.powi(e);
        grid.extend([s, -s, t + s, t - s]);
    }
    grid.extend(switch_points(t));
    grid.extend((1..SHAPE_SCAN).map(|i| -r + 2.0 * r * i as f64 / SHAPE_SCAN as f64));
    grid.retain(|y| y.abs() <= r);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    // a window may hide several changes, so rescan until every window is uniform
    for _ in 0..8 {
        let mut added = Vec::new();
        for w in grid.windows(2) {
            let (mut a, mut b) = (w[0], w[1]);
            let code_a = g1_with_shape(a, t).1;
            if code_a == g1_with_shape(b, t).1 || b - a <= root_tol {
                continue;
            }
            while b - a > root_tol {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                if g1_with_shape(m, t).1 == code_a {
                    a = m;
                } else {
                    b = m;
                }
            }
            added.extend([a, b]);
        }
        if added.is_empty() {
            break;
        }
        grid.extend(added);
        grid.sort_by(f64::total_cmp);
        grid.dedup();
    }
    let mut out = grid;
    out.retain(|y| y.abs() < r);
    out
}

/// `g2(t) = integral of g1(y, t) dy`, with its error estimate.
pub fn g2_estimate(t: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    if !(t > 0.0) {
        return Err(Error::OutOfRange(format!("g2 needs t > 0, got {t}")));
    }
    if t >= t_max() {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let r = 1.0 / (t * t);
    let res = integrate(|y| g1(y, t), -r, r, &g2_breaks(t, cfg.root_tol), cfg.quad_tol)?;
    Ok(Estimate { value: res.value, error: res.error })
}

pub fn g2(t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    g2_estimate(t, cfg).map(|e| e.value)
}

/// `3 * integral_0^(3^(1/3)) g2(t) dt`.
pub fn omega_infinity_quadrature(cfg: &QuadratureConfig) -> Result<Estimate> {
    let inner = QuadratureConfig { quad_tol: cfg.quad_tol / 10.0, ..*cfg };
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let worst_inner = RefCell::new(0.0f64);
    let outer = integrate(
        |t| match g2_estimate(t, &inner) {
            Ok(e) => {
                let mut w = worst_inner.borrow_mut();
                *w = w.max(e.error);
                e.value
            }
            Err(err) => {
                failure.borrow_mut().get_or_insert(err);
                0.0
            }
        },
        0.0,
        t_max(),
        &[0.5, 1.0],
        cfg.quad_tol,
    )?;
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    let error = outer.error + t_max() * worst_inner.into_inner();
    Ok(Estimate { value: 3.0 * outer.value, error: 3.0 * error })
}

/// Number of independently shifted point sets in the quasi–Monte Carlo
/// estimate; their spread gives the error bar.
pub const QMC_SHIFTS: usize = 16;

// Kronecker steps from the real root of x^4 = x + 1, as 64-bit fractions.
fn kronecker_steps() -> [u64; 3] {
    let mut phi = 1.5f64;
    for _ in 0..100 {
        phi = (1.0 + phi).powf(0.25);
    }
    let frac = |x: f64| ((x - x.floor()) * 2f64.powi(64)) as u64;
    [frac(1.0 / phi), frac(1.0 / (phi * phi)), frac(1.0 / (phi * phi * phi))]
}

/// Weighted indicator of one sample of the unit cube.
///
/// The region `h <= 1` over all real `t` is split by which of `|x|`, `|y|`,
/// `|z| = |t - x - y|` is smallest; the three pieces have equal volume. On
/// the piece where `|x|` is smallest, `|t| <= 3^(1/3)`, and `|x| <= 1` or,
/// once `|y| >= 4`, `|x| <= 3 / y^2`. The `y` axis is compactified by
/// `y = ±4 / (5 - |b|)` for `4 < |b| < 5`.
fn sample_weight(u: [f64; 3]) -> f64 {
    let tm = t_max();
    let t = tm * (2.0 * u[0] - 1.0);
    let b = 5.0 * (2.0 * u[1] - 1.0);
    let (y, jy) = if b.abs() <= 4.0 {
        (b, 1.0)
    } else {
        let y = 4.0 / (5.0 - b.abs()) * b.signum();
        (y, y * y / 4.0)
    };
    if !y.is_finite() {
        return 0.0;
    }
    let m = if y.abs() < 4.0 { 1.0 } else { 3.0 / (y * y) };
    let x = m * (2.0 * u[2] - 1.0);
    let z = t - x - y;
    if x.abs() > y.abs() || x.abs() > z.abs() || h(x, y, t) > 1.0 {
        return 0.0;
    }
    (2.0 * tm) * 10.0 * jy * (2.0 * m)
}

/// `(3/2) vol{(x, y, t) : h <= 1}` by randomly shifted Kronecker points.
pub fn omega_infinity_monte_carlo(cfg: &QuadratureConfig) -> Result<Estimate> {
    cfg.validate()?;
    let steps = kronecker_steps();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let shifts: Vec<[u64; 3]> = (0..QMC_SHIFTS)
        .map(|_| [rng.next_u64(), rng.next_u64(), rng.next_u64()])
        .collect();
    let per_shift = (cfg.mc_samples as usize).div_ceil(QMC_SHIFTS) as u64;
    let scale = 2f64.powi(-64);
    let means: Vec<f64> = shifts
        .par_iter()
        .map(|shift| {
            let mut acc = 0.0;
            let mut block = 0.0;
            for n in 0..per_shift {
                let mut u = [0.0; 3];
                for k in 0..3 {
                    let v = shift[k].wrapping_add(n.wrapping_mul(steps[k]));
                    u[k] = (v as f64 * scale).min(1.0 - f64::EPSILON);
                }
                block += sample_weight(u);
                if n % 4096 == 4095 {
                    acc += block;
                    block = 0.0;
                }
            }
            (acc + block) / per_shift as f64
        })
        .collect();
    let k = means.len() as f64;
    let mean = means.iter().sum::<f64>() / k;
    let var = means.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / (k - 1.0);
    // three pieces, then the factor 3/2 for the symmetric range of t
    let factor = 4.5;
    Ok(Estimate { value: factor * mean, error: factor * 3.0 * (var / k).sqrt() })
}

/// Both evaluations of `omega_inf` and their agreement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaInfinity {
    pub quadrature: Estimate,
    pub monte_carlo: Estimate,
    pub relative_difference: f64,
}

/// Largest accepted relative gap between the two evaluations.
pub const OMEGA_AGREEMENT: f64 = 0.005;

impl OmegaInfinity {
    /// The quadrature value, which carries the smaller error.
    pub fn estimate(&self) -> Estimate {
        self.quadrature
    }
}

pub fn omega_infinity(cfg: &QuadratureConfig) -> Result<OmegaInfinity> {
    let quadrature = omega_infinity_quadrature(cfg)?;
    let monte_carlo = omega_infinity_monte_carlo(cfg)?;
    let relative_difference = ((quadrature.value - monte_carlo.value) / quadrature.value).abs();
    if relative_difference > OMEGA_AGREEMENT {
        return Err(Error::Disagreement(format!(
            "omega_inf: quadrature {} vs Monte Carlo {} (relative gap {relative_difference:.3e})",
            quadrature.value, monte_carlo.value
        )));
    }
    Ok(OmegaInfinity { quadrature, monte_carlo, relative_difference })
}
