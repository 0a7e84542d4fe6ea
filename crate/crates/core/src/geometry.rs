//! Dimension constants, points, balls and the radial kernel.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::ext::ExtendedReal;

/// Highest dimension for which points, measures and potentials exist.
pub const MAX_POINT_DIM: usize = 3;

/// Geometric constants shared by every functional in dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionContext {
    d: usize,
    d_hat: usize,
    sphere_area: f64,
}

impl DimensionContext {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::UnsupportedDimension(d));
        }
        Ok(Self {
            d,
            d_hat: d.saturating_sub(2).max(1),
            sphere_area: unit_sphere_area(d),
        })
    }

    pub fn planar() -> Self {
        Self::new(2).unwrap()
    }

    pub fn spatial() -> Self {
        Self::new(3).unwrap()
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    /// `max{1, d − 2}`.
    #[inline]
    pub fn d_hat(&self) -> usize {
        self.d_hat
    }

    /// Surface area of the unit sphere in `R^d`.
    #[inline]
    pub fn sphere_area(&self) -> f64 {
        self.sphere_area
    }

    /// Volume of the unit ball, `s_{d−1} / d`.
    pub fn ball_volume(&self) -> f64 {
        self.sphere_area / self.d as f64
    }

    /// Whether points and measures can be built in this dimension.
    pub fn has_points(&self) -> bool {
        self.d <= MAX_POINT_DIM
    }

    pub fn require_points(&self) -> Result<()> {
        if self.has_points() {
            Ok(())
        } else {
            Err(Error::UnsupportedDimension(self.d))
        }
    }

    /// The kernel `ln t` (d = 2) or `−t^{2−d}` (d > 2), with value −∞ at 0.
    pub fn kernel(&self, t: f64) -> Result<ExtendedReal> {
        if t.is_nan() || t < 0.0 {
            return Err(domain(format!("kernel argument must be >= 0, got {t}")));
        }
        Ok(ExtendedReal::from_f64(self.kernel_unchecked(t)))
    }

    /// Kernel for a known non-negative argument; returns −∞ at 0.
    #[inline]
    pub fn kernel_unchecked(&self, t: f64) -> f64 {
        if t == 0.0 {
            f64::NEG_INFINITY
        } else if self.d == 2 {
            t.ln()
        } else if self.d == 3 {
            -1.0 / t
        } else {
            -t.powi(2 - self.d as i32)
        }
    }

    pub fn kernel_inverse(&self, v: ExtendedReal) -> Result<f64> {
        if v.is_neg_inf() {
            return Ok(0.0);
        }
        let x = v.value();
        if self.d == 2 {
            if v.is_pos_inf() {
                return Err(domain("kernel_inverse: +inf is outside the kernel range"));
            }
            Ok(x.exp())
        } else {
            if !(x < 0.0) {
                return Err(domain(format!(
                    "kernel_inverse: value {x} is not below the kernel supremum 0"
                )));
            }
            Ok((-x).powf(-1.0 / (self.d as f64 - 2.0)))
        }
    }
}

fn gamma_half_integer(twice: usize) -> f64 {
    // Γ(twice / 2) for twice >= 1.
    let (mut acc, mut x) = if twice.is_multiple_of(2) { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    let target = twice as f64 / 2.0;
    while x < target - 1e-9 {
        acc *= x;
        x += 1.0;
    }
    acc
}

/// `2 π^{d/2} / Γ(d/2)`.
pub fn unit_sphere_area(d: usize) -> f64 {
    2.0 * PI.powf(d as f64 / 2.0) / gamma_half_integer(d)
}

/// A point of `R^d`, d ≤ 3, stored with trailing zero coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point(pub [f64; 3]);

impl Point {
    pub const ORIGIN: Point = Point([0.0; 3]);

    pub fn new2(x: f64, y: f64) -> Self {
        Point([x, y, 0.0])
    }

    pub fn new3(x: f64, y: f64, z: f64) -> Self {
        Point([x, y, z])
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        if coords.len() > MAX_POINT_DIM || coords.is_empty() {
            return Err(Error::UnsupportedDimension(coords.len()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(domain("point coordinates must be finite"));
        }
        let mut p = [0.0; 3];
        p[..coords.len()].copy_from_slice(coords);
        Ok(Point(p))
    }

    pub fn coords(&self, d: usize) -> &[f64] {
        &self.0[..d.min(3)]
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.0[0]
    }

    #[inline]
    pub fn y(&self) -> f64 {
        self.0[1]
    }

    #[inline]
    pub fn z(&self) -> f64 {
        self.0[2]
    }

    #[inline]
    pub fn dot(&self, o: &Point) -> f64 {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    #[inline]
    pub fn dist(&self, o: &Point) -> f64 {
        (*self - *o).norm()
    }

    /// Polar angle of the planar projection, in `(−π, π]`.
    pub fn arg(&self) -> f64 {
        self.0[1].atan2(self.0[0])
    }

    /// Whether the coordinates beyond the first `d` vanish.
    pub fn lies_in(&self, d: usize) -> bool {
        self.0.iter().skip(d).all(|&c| c == 0.0)
    }
}

impl Add for Point {
    type Output = Point;
    #[inline]
    fn add(self, o: Point) -> Point {
        Point([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for Point {
    type Output = Point;
    #[inline]
    fn sub(self, o: Point) -> Point {
        Point([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Mul<Point> for f64 {
    type Output = Point;
    #[inline]
    fn mul(self, p: Point) -> Point {
        Point([self * p.0[0], self * p.0[1], self * p.0[2]])
    }
}

/// Ball `B_x(r)` (open) or `B̄_x(r)` (closed). The open ball of radius 0 is empty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
    pub closed: bool,
}

impl Ball {
    pub fn closed(center: Point, radius: f64) -> Result<Self> {
        Self::build(center, radius, true)
    }

    pub fn open(center: Point, radius: f64) -> Result<Self> {
        Self::build(center, radius, false)
    }

    fn build(center: Point, radius: f64, closed: bool) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(domain(format!("ball radius must be finite and >= 0, got {radius}")));
        }
        Ok(Self { center, radius, closed })
    }

    pub fn contains(&self, p: &Point) -> bool {
        let dist = self.center.dist(p);
        if self.closed {
            dist <= self.radius
        } else {
            dist < self.radius
        }
    }

    pub fn is_empty(&self) -> bool {
        !self.closed && self.radius == 0.0
    }
}
