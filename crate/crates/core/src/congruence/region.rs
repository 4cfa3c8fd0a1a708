use crate::density::h;
use crate::error::{Error, Result};

/// The region `S(X, T, A1, A2)` of pairs `(x, y)` with
/// `A1|x| A2|y| |A1 x + A2 y - T| <= T^2 X`, `|A1 x + A2 y - T| <= X`,
/// `A1|x| <= X` and `A2|y| <= X`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionS {
    x: f64,
    t: f64,
    a1: f64,
    a2: f64,
}

impl RegionS {
    pub fn new(x: f64, t: f64, a1: f64, a2: f64) -> Result<Self> {
        for (name, v) in [("X", x), ("T", t), ("A1", a1), ("A2", a2)] {
            if !(v.is_finite() && v >= 1.0) {
                return Err(Error::OutOfRange(format!("{name} must be a finite real >= 1, got {v}")));
            }
        }
        Ok(RegionS { x, t, a1, a2 })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn a2(&self) -> f64 {
        self.a2
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let l = (self.a1 * x + self.a2 * y - self.t).abs();
        self.a1 * x.abs() * self.a2 * y.abs() * l <= self.t * self.t * self.x
            && l <= self.x
            && self.a1 * x.abs() <= self.x
            && self.a2 * y.abs() <= self.x
    }

    /// The same region written through `h` in rescaled coordinates.
    pub fn h_form(&self, x: f64, y: f64) -> f64 {
        let k = self.x.cbrt() * self.t.powf(2.0 / 3.0);
        h(self.a1 * x / k, self.a2 * y / k, (self.t / self.x).cbrt())
    }

    /// Integer half-widths of the bounding box `|u| <= X/A1`, `|v| <= X/A2`.
    pub fn box_bounds(&self) -> (i64, i64) {
        ((self.x / self.a1).floor() as i64, (self.x / self.a2).floor() as i64)
    }
}
