//! Planar primitives shared by every other module.

use core::f64::consts::{PI, TAU};
use core::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::float;
use crate::vm::VerifierConfig;

/// Closed-triangle boundary tolerance, relative to the longest edge.
pub const BOUNDARY_TOLERANCE: f64 = 1e-9;

/// A triangle whose area is below `DEGENERACY_RATIO * longest_edge^2` is
/// rejected.
pub const DEGENERACY_RATIO: f64 = 1e-12;

/// A planar position. Both coordinates are always finite.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    x: f64,
    y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Result<Point> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::NonFinite("point coordinate"));
        }
        Ok(Point { x, y })
    }

    /// Unchecked constructor for values derived from already-valid points.
    #[inline]
    pub(crate) const fn raw(x: f64, y: f64) -> Point {
        Point { x, y }
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.x
    }

    #[inline]
    pub fn y(&self) -> f64 {
        self.y
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        float::hypot(self.x, self.y)
    }

    #[inline]
    pub fn norm_squared(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    #[inline]
    pub fn dot(&self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 2-D cross product.
    #[inline]
    pub fn cross(&self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    /// Rotates counter-clockwise by `angle` around `center`.
    pub fn rotate_about(&self, center: Point, angle: f64) -> Point {
        let (s, c) = (float::sin(angle), float::cos(angle));
        let d = *self - center;
        center + Point::raw(c * d.x - s * d.y, s * d.x + c * d.y)
    }

    /// Mirrors across the line through `origin` with direction angle `axis`.
    pub fn reflect_across(&self, origin: Point, axis: f64) -> Point {
        let (s, c) = (float::sin(2.0 * axis), float::cos(2.0 * axis));
        let d = *self - origin;
        origin + Point::raw(c * d.x + s * d.y, s * d.x - c * d.y)
    }
}

impl Add for Point {
    type Output = Point;
    #[inline]
    fn add(self, rhs: Point) -> Point {
        Point::raw(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    #[inline]
    fn sub(self, rhs: Point) -> Point {
        Point::raw(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    #[inline]
    fn mul(self, k: f64) -> Point {
        Point::raw(self.x * k, self.y * k)
    }
}

/// Pole-relative polar coordinates; `theta` is kept in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    rho: f64,
    theta: f64,
}

impl PolarPoint {
    pub fn new(rho: f64, theta: f64) -> Result<PolarPoint> {
        if !rho.is_finite() || !theta.is_finite() {
            return Err(Error::NonFinite("polar coordinate"));
        }
        if rho < 0.0 {
            return Err(Error::Negative("rho"));
        }
        Ok(PolarPoint {
            rho,
            theta: float::wrap(theta, TAU),
        })
    }

    #[inline]
    pub fn rho(&self) -> f64 {
        self.rho
    }

    #[inline]
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `theta` mapped into `(-π, π]`.
    pub fn signed_theta(&self) -> f64 {
        if self.theta > PI {
            self.theta - TAU
        } else {
            self.theta
        }
    }
}

#[inline]
pub fn distance(p: Point, q: Point) -> f64 {
    float::hypot(p.x - q.x, p.y - q.y)
}

#[inline]
pub fn distance_squared(p: Point, q: Point) -> f64 {
    (p - q).norm_squared()
}

/// Polar coordinates of `p` around `pole`, with `theta` measured from the
/// direction `axis_theta`.
pub fn to_polar(p: Point, pole: Point, axis_theta: f64) -> PolarPoint {
    let d = p - pole;
    let rho = d.norm();
    let theta = if rho == 0.0 {
        0.0
    } else {
        float::wrap(float::atan2(d.y, d.x) - axis_theta, TAU)
    };
    PolarPoint { rho, theta }
}

pub fn from_polar(polar: PolarPoint, pole: Point, axis_theta: f64) -> Point {
    let angle = polar.theta + axis_theta;
    pole + Point::raw(polar.rho * float::cos(angle), polar.rho * float::sin(angle))
}

/// A non-degenerate triangle, stored counter-clockwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    a: Point,
    b: Point,
    c: Point,
}

impl Triangle {
    pub fn new(a: Point, b: Point, c: Point) -> Result<Triangle> {
        let longest = longest_of(a, b, c);
        let twice_area = (b - a).cross(c - a);
        let area = twice_area.abs() * 0.5;
        if area.is_nan() || area <= DEGENERACY_RATIO * longest * longest {
            return Err(Error::DegenerateTriangle);
        }
        if twice_area > 0.0 {
            Ok(Triangle { a, b, c })
        } else {
            Ok(Triangle { a, b: c, c: b })
        }
    }

    pub fn vertices(&self) -> [Point; 3] {
        [self.a, self.b, self.c]
    }

    pub fn area(&self) -> f64 {
        0.5 * (self.b - self.a).cross(self.c - self.a)
    }

    pub fn longest_edge(&self) -> f64 {
        longest_of(self.a, self.b, self.c)
    }

    pub fn centroid(&self) -> Point {
        (self.a + self.b + self.c) * (1.0 / 3.0)
    }

    /// Intersection of the three altitudes.
    pub fn orthocenter(&self) -> Point {
        // H = A + B + C - 2O where O is the circumcenter.
        let o = self.circumcenter();
        self.a + self.b + self.c - o * 2.0
    }

    pub fn circumcenter(&self) -> Point {
        let (a, b, c) = (self.a, self.b, self.c);
        let d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
        let (a2, b2, c2) = (a.norm_squared(), b.norm_squared(), c.norm_squared());
        Point::raw(
            (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d,
            (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d,
        )
    }

    /// Smallest signed distance from `p` to the three edge lines; positive
    /// inside, negative outside.
    pub fn signed_clearance(&self, p: Point) -> f64 {
        let edges = [(self.a, self.b), (self.b, self.c), (self.c, self.a)];
        edges
            .iter()
            .map(|&(s, e)| {
                let dir = e - s;
                dir.cross(p - s) / dir.norm()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Closed-set membership: boundary points within tolerance count as inside.
    pub fn contains(&self, p: Point) -> bool {
        self.signed_clearance(p) >= -BOUNDARY_TOLERANCE * self.longest_edge()
    }
}

fn longest_of(a: Point, b: Point, c: Point) -> f64 {
    distance(a, b).max(distance(b, c)).max(distance(c, a))
}

/// Whether `p` lies in the closed triangle `t`.
pub fn point_in_triangle(p: Point, t: &Triangle) -> bool {
    t.contains(p)
}

/// Three verifiers on an equilateral triangle of the given edge centred on
/// `center`, the first one at angle `alpha`.
pub fn equilateral_verifiers(
    center: Point,
    edge: f64,
    alpha: f64,
    range: f64,
) -> Result<VerifierConfig> {
    if !edge.is_finite() || !alpha.is_finite() || !range.is_finite() {
        return Err(Error::NonFinite("equilateral parameters"));
    }
    if edge <= 0.0 {
        return Err(Error::NonPositive("edge"));
    }
    let circumradius = edge / float::sqrt(3.0);
    let verifiers = (0..3)
        .map(|k| {
            let angle = alpha + k as f64 * TAU / 3.0;
            center
                + Point::raw(
                    circumradius * float::cos(angle),
                    circumradius * float::sin(angle),
                )
        })
        .collect();
    VerifierConfig::new(verifiers, range)
}
