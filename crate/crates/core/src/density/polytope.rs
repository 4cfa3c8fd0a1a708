//! Exact volumes of bounded polytopes given by half-spaces.
//!
//! Vertices come from all `d`-subsets of the constraints; the volume comes
//! from a pulling triangulation along the face lattice. Everything is done
//! in exact rational arithmetic.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::Rational;
use crate::error::{Error, Result};

/// `normal . t <= bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Halfspace {
    pub normal: Vec<Rational>,
    pub bound: Rational,
}

impl Halfspace {
    pub fn from_ints(normal: &[i64], bound: i64) -> Self {
        Halfspace {
            normal: normal.iter().map(|&a| Rational::from_integer(BigInt::from(a))).collect(),
            bound: Rational::from_integer(BigInt::from(bound)),
        }
    }

    fn slack(&self, x: &[Rational]) -> Rational {
        let dot = self.normal.iter().zip(x).fold(Rational::zero(), |acc, (a, b)| acc + a * b);
        &self.bound - dot
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polytope {
    dim: usize,
    halfspaces: Vec<Halfspace>,
}

impl Polytope {
    pub fn new(dim: usize, halfspaces: Vec<Halfspace>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Polytope("dimension must be positive".into()));
        }
        if halfspaces.iter().any(|h| h.normal.len() != dim) {
            return Err(Error::Polytope(format!("every normal must have {dim} coordinates")));
        }
        Ok(Polytope { dim, halfspaces })
    }

    /// The polytope in `(t2, ..., t7)` whose volume is the constant `alpha`.
    pub fn alpha() -> Self {
        let mut hs = vec![
            Halfspace::from_ints(&[2, -1, -1, 4, -2, -2], 1),
            Halfspace::from_ints(&[-1, 2, -1, -2, 4, -2], 1),
            Halfspace::from_ints(&[2, 2, 2, 1, 1, 1], 1),
            Halfspace::from_ints(&[-1, 0, 1, -2, 0, 2], 0),
            Halfspace::from_ints(&[0, -1, 1, 0, -2, 2], 0),
        ];
        hs.extend(nonnegativity(6));
        Polytope { dim: 6, halfspaces: hs }
    }

    /// `[0, 1]^dim`.
    pub fn unit_cube(dim: usize) -> Self {
        let mut hs = nonnegativity(dim);
        for i in 0..dim {
            let mut a = vec![0; dim];
            a[i] = 1;
            hs.push(Halfspace::from_ints(&a, 1));
        }
        Polytope { dim, halfspaces: hs }
    }

    /// `t_i >= 0, sum t_i <= 1`.
    pub fn standard_simplex(dim: usize) -> Self {
        let mut hs = nonnegativity(dim);
        hs.push(Halfspace::from_ints(&vec![1; dim], 1));
        Polytope { dim, halfspaces: hs }
    }

    /// The simplex spanned by `dim + 1` affinely independent points.
    pub fn simplex_from_vertices(vertices: &[Vec<Rational>]) -> Result<Self> {
        let dim = vertices.len().saturating_sub(1);
        if dim == 0 || vertices.iter().any(|v| v.len() != dim) {
            return Err(Error::Polytope("need d + 1 points in dimension d".into()));
        }
        let mut hs = Vec::new();
        for skip in 0..=dim {
            let face: Vec<&Vec<Rational>> =
                vertices.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, v)| v).collect();
            let rows: Vec<Vec<Rational>> = face[1..]
                .iter()
                .map(|v| v.iter().zip(face[0]).map(|(a, b)| a - b).collect())
                .collect();
            let normal = null_vector(&rows, dim)
                .ok_or_else(|| Error::Polytope("points are affinely dependent".into()))?;
            let dot = |x: &Vec<Rational>| normal.iter().zip(x).fold(Rational::zero(), |acc, (a, b)| acc + a * b);
            let bound = dot(face[0]);
            let other = dot(&vertices[skip]);
            if other == bound {
                return Err(Error::Polytope("points are affinely dependent".into()));
            }
            if other < bound {
                hs.push(Halfspace { normal, bound });
            } else {
                hs.push(Halfspace { normal: normal.iter().map(|a| -a).collect(), bound: -bound });
            }
        }
        Polytope::new(dim, hs)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    /// All vertices, sorted lexicographically.
    pub fn vertices(&self) -> Vec<Vec<Rational>> {
        let d = self.dim;
        let mut found = BTreeSet::new();
        for subset in combinations(self.halfspaces.len(), d) {
            let a: Vec<Vec<Rational>> = subset.iter().map(|&i| self.halfspaces[i].normal.clone()).collect();
            let b: Vec<Rational> = subset.iter().map(|&i| self.halfspaces[i].bound.clone()).collect();
            if let Some(x) = solve(a, b) {
                if self.halfspaces.iter().all(|h| !h.slack(&x).is_negative()) {
                    found.insert(x);
                }
            }
        }
        found.into_iter().collect()
    }

    /// A nonzero direction `r` with `normal . r <= 0` for every constraint, if any.
    fn recession_ray(&self) -> Option<Vec<Rational>> {
        let d = self.dim;
        let normals: Vec<Vec<Rational>> = self.halfspaces.iter().map(|h| h.normal.clone()).collect();
        if rank(normals.clone()) < d {
            return null_vector(&normals, d);
        }
        for subset in combinations(normals.len(), d - 1) {
            let rows: Vec<Vec<Rational>> = subset.iter().map(|&i| normals[i].clone()).collect();
            if rank(rows.clone()) != d - 1 {
                continue;
            }
            let r = null_vector(&rows, d).expect("corank one");
            for cand in [r.clone(), r.iter().map(|a| -a).collect::<Vec<_>>()] {
                let ok = normals.iter().all(|n| {
                    !n.iter().zip(&cand).fold(Rational::zero(), |acc, (a, b)| acc + a * b).is_positive()
                });
                if ok {
                    return Some(cand);
                }
            }
        }
        None
    }
}

fn nonnegativity(dim: usize) -> Vec<Halfspace> {
    (0..dim)
        .map(|i| {
            let mut a = vec![0; dim];
            a[i] = -1;
            Halfspace::from_ints(&a, 0)
        })
        .collect()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Row-reduces in place and returns the pivot columns.
fn row_reduce(m: &mut [Vec<Rational>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = Rational::one() / &m[row][col];
        for c in col..m[row].len() {
            m[row][c] = &m[row][c] * &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..m[r].len() {
                    let delta = &f * &m[row][c];
                    m[r][c] -= delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    pivots
}

fn rank(mut m: Vec<Vec<Rational>>) -> usize {
    if m.is_empty() {
        return 0;
    }
    let cols = m[0].len();
    row_reduce(&mut m, cols).len()
}

/// Unique solution of the square system `a x = b`, if it exists.
fn solve(a: Vec<Vec<Rational>>, b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a.into_iter().zip(b).map(|(mut row, bi)| {
        row.push(bi);
        row
    }).collect();
    if row_reduce(&mut m, n).len() < n {
        return None;
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

/// Some nonzero vector in the kernel of `rows` (each of length `cols`).
fn null_vector(rows: &[Vec<Rational>], cols: usize) -> Option<Vec<Rational>> {
    let mut m = rows.to_vec();
    let pivots = if m.is_empty() { Vec::new() } else { row_reduce(&mut m, cols) };
    let free = (0..cols).find(|c| !pivots.contains(c))?;
    let mut x = vec![Rational::zero(); cols];
    x[free] = Rational::one();
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = -m[r][free].clone();
    }
    Some(x)
}

fn affine_dim(points: &[usize], verts: &[Vec<Rational>]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let base = &verts[points[0]];
    rank(points[1..]
        .iter()
        .map(|&i| verts[i].iter().zip(base).map(|(a, b)| a - b).collect())
        .collect())
}

struct Triangulator<'a> {
    verts: &'a [Vec<Rational>],
    tight: Vec<Vec<usize>>,
    memo: HashMap<Vec<usize>, Vec<Vec<usize>>>,
}

impl Triangulator<'_> {
    /// Simplices (as vertex index lists) covering the face with vertex set
    /// `face` of dimension `dim`.
    fn run(&mut self, face: Vec<usize>, dim: usize) -> Vec<Vec<usize>> {
        if dim == 0 {
            return vec![face];
        }
        if let Some(hit) = self.memo.get(&face) {
            return hit.clone();
        }
        let apex = face[0];
        let mut subfaces = BTreeSet::new();
        for tight in &self.tight {
            let sub: Vec<usize> = face.iter().copied().filter(|v| tight.binary_search(v).is_ok()).collect();
            if sub.len() < dim || sub.len() == face.len() || sub.contains(&apex) {
                continue;
            }
            if affine_dim(&sub, self.verts) == dim - 1 {
                subfaces.insert(sub);
            }
        }
        let mut out = Vec::new();
        for sub in subfaces {
            for mut simplex in self.run(sub, dim - 1) {
                simplex.push(apex);
                out.push(simplex);
            }
        }
        self.memo.insert(face, out.clone());
        out
    }
}

fn determinant(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rational::zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        det *= &m[col][col];
        for r in col + 1..n {
            if !m[r][col].is_zero() {
                let f = &m[r][col] / &m[col][col];
                for c in col..n {
                    let delta = &f * &m[col][c];
                    m[r][c] -= delta;
                }
            }
        }
    }
    det
}

/// `|det(v1 - v0, ..., vd - v0)| / d!`.
pub fn simplex_volume(vertices: &[Vec<Rational>]) -> Rational {
    let d = vertices.len() - 1;
    let base = &vertices[0];
    let m = vertices[1..]
        .iter()
        .map(|v| v.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    let fact: u64 = (1..=d as u64).product();
    determinant(m).abs() / Rational::from_integer(BigInt::from(fact))
}

/// Exact volume of a bounded full-dimensional polytope.
pub fn alpha_volume(p: &Polytope) -> Result<Rational> {
    let d = p.dim;
    if let Some(ray) = p.recession_ray() {
        return Err(Error::Polytope(format!("unbounded (recession direction {ray:?})")));
    }
    let verts = p.vertices();
    if verts.is_empty() {
        return Err(Error::Polytope("empty".into()));
    }
    let all: Vec<usize> = (0..verts.len()).collect();
    let actual = affine_dim(&all, &verts);
    if actual < d {
        return Err(Error::Polytope(format!("degenerate: dimension {actual} < {d}")));
    }
    let tight: Vec<Vec<usize>> = p
        .halfspaces
        .iter()
        .map(|h| all.iter().copied().filter(|&i| h.slack(&verts[i]).is_zero()).collect())
        .collect();
    let mut tri = Triangulator { verts: &verts, tight, memo: HashMap::new() };
    let simplices = tri.run(all, d);
    Ok(simplices.iter().fold(Rational::zero(), |acc, s| {
        let pts: Vec<Vec<Rational>> = s.iter().map(|&i| verts[i].clone()).collect();
        acc + simplex_volume(&pts)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(11, 6).len(), 462);
        assert_eq!(combinations(4, 0).len(), 1);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn unit_cube_and_simplex() {
        assert_eq!(alpha_volume(&Polytope::unit_cube(3)).unwrap(), rational(1, 1));
        assert_eq!(alpha_volume(&Polytope::unit_cube(6)).unwrap(), rational(1, 1));
        assert_eq!(alpha_volume(&Polytope::standard_simplex(6)).unwrap(), rational(1, 720));
        assert_eq!(alpha_volume(&Polytope::standard_simplex(2)).unwrap(), rational(1, 2));
    }

    #[test]
    fn alpha_polytope() {
        let p = Polytope::alpha();
        assert_eq!(p.vertices().len(), 24);
        assert_eq!(alpha_volume(&p).unwrap(), rational(1, 23040));
    }

    #[test]
    fn rejects_unbounded_and_degenerate() {
        let open = Polytope::new(2, vec![
            Halfspace::from_ints(&[-1, 0], 0),
            Halfspace::from_ints(&[0, -1], 0),
            Halfspace::from_ints(&[1, -1], 1),
        ])
        .unwrap();
        assert!(matches!(alpha_volume(&open), Err(Error::Polytope(_))));
        let flat = Polytope::new(2, vec![
            Halfspace::from_ints(&[-1, 0], 0),
            Halfspace::from_ints(&[1, 0], 0),
            Halfspace::from_ints(&[0, -1], 0),
            Halfspace::from_ints(&[0, 1], 1),
        ])
        .unwrap();
        assert!(matches!(alpha_volume(&flat), Err(Error::Polytope(_))));
        let empty = Polytope::new(1, vec![
            Halfspace::from_ints(&[1], -1),
            Halfspace::from_ints(&[-1], -1),
        ])
        .unwrap();
        assert!(alpha_volume(&empty).is_err());
    }

    #[test]
    fn random_simplices_match_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut done = 0;
        while done < 20 {
            let pts: Vec<Vec<Rational>> = (0..7)
                .map(|_| (0..6).map(|_| rational(rng.gen_range(-20..=20), rng.gen_range(1..=5))).collect())
                .collect();
            let expect = simplex_volume(&pts);
            if expect.is_zero() {
                continue;
            }
            let poly = Polytope::simplex_from_vertices(&pts).unwrap();
            assert_eq!(alpha_volume(&poly).unwrap(), expect);
            done += 1;
        }
    }
}
