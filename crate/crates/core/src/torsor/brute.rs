//! Direct enumeration of surface points of bounded height.

use std::collections::BTreeSet;

use rayon::prelude::*;

use super::points::SurfacePoint;
use crate::arith::{gcd, gcd_i};
use crate::error::{Error, Result};

/// Largest height accepted by the exhaustive enumeration.
pub const BRUTE_FORCE_CAP: u64 = 500;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteForce {
    pub count: u64,
    /// Sorted canonical points, when requested.
    pub points: Option<Vec<SurfacePoint>>,
}

// Every point of U is (x1 x2 x3 : x1 s^2 : x2 s^2 : x3 s^2) with s = x1 + x2 + x3
// for a triple that is unique up to scaling. Taking the triple primitive with
// x1 > 0 picks exactly one per point, and then |xi| <= H(point).
fn triple_image(x1: i64, x2: i64, x3: i64, b: u64) -> Option<[i128; 4]> {
    let s = x1 + x2 + x3;
    if x2 == 0 || x3 == 0 || s == 0 || gcd(gcd(x1 as u64, x2.unsigned_abs()), x3.unsigned_abs()) != 1 {
        return None;
    }
    let (x1, x2, x3, s) = (x1 as i128, x2 as i128, x3 as i128, s as i128);
    let x0 = x1 * x2 * x3;
    let g = gcd_i(x0, s * s) as i128;
    let s2 = s * s / g;
    let x = [x0 / g, x1 * s2, x2 * s2, x3 * s2];
    if x.iter().any(|c| c.unsigned_abs() > b as u128) {
        return None;
    }
    Some(x)
}

/// Number of points of height at most `b`, off the six lines unless
/// `include_lines` is set.
pub fn brute_force_count(b: u64, include_lines: bool, with_points: bool) -> Result<BruteForce> {
    brute_force_count_capped(b, include_lines, with_points, BRUTE_FORCE_CAP)
}

pub fn brute_force_count_capped(b: u64, include_lines: bool, with_points: bool, cap: u64) -> Result<BruteForce> {
    if b == 0 {
        return Err(Error::OutOfRange("height must be at least 1".into()));
    }
    if b > cap {
        return Err(Error::CapExceeded { height: b, cap });
    }
    let bi = b as i64;
    let per_x1: Vec<Vec<[i128; 4]>> = (1..=bi)
        .into_par_iter()
        .map(|x1| {
            let mut found = Vec::new();
            for x2 in -bi..=bi {
                for x3 in -bi..=bi {
                    if let Some(x) = triple_image(x1, x2, x3, b) {
                        found.push(x);
                    }
                }
            }
            found
        })
        .collect();
    let mut count: u64 = per_x1.iter().map(|v| v.len() as u64).sum();
    let mut points = with_points.then(|| {
        per_x1
            .into_iter()
            .flatten()
            .map(|x| SurfacePoint::new(x).expect("triple image lies on the surface"))
            .collect::<Vec<_>>()
    });
    if include_lines {
        let lines = line_points(b);
        count += lines.len() as u64;
        if let Some(p) = points.as_mut() {
            p.extend(lines);
        }
    }
    if let Some(p) = points.as_mut() {
        p.sort_unstable();
    }
    Ok(BruteForce { count, points })
}

/// Points of height at most `b` on the six lines.
pub fn line_points(b: u64) -> BTreeSet<SurfacePoint> {
    let bi = b as i128;
    let mut out = BTreeSet::new();
    for u in -bi..=bi {
        for v in -bi..=bi {
            if gcd_i(u, v) != 1 {
                continue;
            }
            for i in 1..4 {
                // x0 = xi = 0
                let mut x = [0i128; 4];
                let others: Vec<usize> = (1..4).filter(|&j| j != i).collect();
                x[others[0]] = u;
                x[others[1]] = v;
                out.insert(SurfacePoint::new(x).expect("line point"));
                // x1 + x2 + x3 = xi = 0
                let mut y = [0i128; 4];
                y[0] = u;
                y[others[0]] = v;
                y[others[1]] = -v;
                out.insert(SurfacePoint::new(y).expect("line point"));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn height_one() {
        let r = brute_force_count(1, false, true).unwrap();
        assert_eq!(r.count, 3);
        let pts: Vec<[i128; 4]> = r.points.unwrap().iter().map(|p| p.x).collect();
        assert_eq!(pts, vec![[1, -1, -1, 1], [1, -1, 1, -1], [1, 1, -1, -1]]);
    }

    #[test]
    fn invalid_heights() {
        assert!(brute_force_count(0, false, false).is_err());
        assert!(matches!(
            brute_force_count(501, false, false),
            Err(Error::CapExceeded { height: 501, cap: 500 })
        ));
    }

    // the plain procedure: every triple, canonicalize, deduplicate in a set
    fn hashed(b: u64) -> HashSet<SurfacePoint> {
        let bi = b as i128;
        let mut set = HashSet::new();
        for x1 in -bi..=bi {
            for x2 in -bi..=bi {
                for x3 in -bi..=bi {
                    let s = x1 + x2 + x3;
                    if x1 == 0 || x2 == 0 || x3 == 0 || s == 0 {
                        continue;
                    }
                    let p = SurfacePoint::new([x1 * x2 * x3, x1 * s * s, x2 * s * s, x3 * s * s]).unwrap();
                    if p.height() <= b as u128 {
                        set.insert(p);
                    }
                }
            }
        }
        set
    }

    #[test]
    fn matches_hash_set_deduplication() {
        for b in [1, 2, 7, 20, 40] {
            let r = brute_force_count(b, false, true).unwrap();
            let pts = r.points.unwrap();
            assert_eq!(pts.len() as u64, r.count);
            let set: HashSet<_> = pts.iter().copied().collect();
            assert_eq!(set.len(), pts.len());
            assert_eq!(set, hashed(b), "b = {b}");
        }
    }

    #[test]
    fn lines_counted_separately() {
        let open = brute_force_count(10, false, false).unwrap().count;
        let all = brute_force_count(10, true, true).unwrap();
        let lines = line_points(10);
        assert_eq!(all.count, open + lines.len() as u64);
        assert!(lines.iter().all(|p| !p.in_open_subset() && p.height() <= 10));
        // (1:0:0:0) lies on all three lines through the singular point
        assert!(lines.contains(&SurfacePoint::new([1, 0, 0, 0]).unwrap()));
    }
}
