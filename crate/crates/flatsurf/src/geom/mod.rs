//! Exact planar geometry over the rationals.

pub mod polygon;
pub mod saddle;
pub mod trace;
pub mod surface;

pub mod triangulation;
pub mod turning;

use crate::num::{cross, dot, norm_sq, rat_to_f64, Rat};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A point or displacement in the developing plane, exact rational.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: Rat,
    pub y: Rat,
}

impl fmt::Debug for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Vec2 {
    pub fn new(x: Rat, y: Rat) -> Self {
        Vec2 { x, y }
    }

    pub fn zero() -> Self {
        Vec2 {
            x: Rat::zero(),
            y: Rat::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn norm_sq(&self) -> Rat {
        norm_sq(&self.x, &self.y)
    }

    pub fn cross(&self, other: &Vec2) -> Rat {
        cross(&self.x, &self.y, &other.x, &other.y)
    }

    pub fn dot(&self, other: &Vec2) -> Rat {
        dot(&self.x, &self.y, &other.x, &other.y)
    }

    pub fn scale(&self, s: &Rat) -> Vec2 {
        Vec2::new(&self.x * s, &self.y * s)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (rat_to_f64(&self.x), rat_to_f64(&self.y))
    }

    /// Strictly positive multiple of the other vector?
    pub fn same_direction(&self, other: &Vec2) -> bool {
        self.cross(other).is_zero() && self.dot(other).is_positive()
    }
}

impl Add for &Vec2 {
    type Output = Vec2;
    fn add(self, rhs: &Vec2) -> Vec2 {
        Vec2::new(&self.x + &rhs.x, &self.y + &rhs.y)
    }
}

impl Sub for &Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: &Vec2) -> Vec2 {
        Vec2::new(&self.x - &rhs.x, &self.y - &rhs.y)
    }
}

impl Neg for &Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-&self.x, -&self.y)
    }
}

impl Mul<&Rat> for &Vec2 {
    type Output = Vec2;
    fn mul(self, s: &Rat) -> Vec2 {
        self.scale(s)
    }
}

/// Orientation of the triangle (a, b, c): positive = counterclockwise.
pub fn orient2d(a: &Vec2, b: &Vec2, c: &Vec2) -> std::cmp::Ordering {
    let u = b - a;
    let v = c - a;
    u.cross(&v).cmp(&Rat::zero())
}

/// Exact in-circle predicate: is `d` strictly inside the circumcircle of the
/// ccw triangle (a, b, c)?
pub fn in_circle(a: &Vec2, b: &Vec2, c: &Vec2, d: &Vec2) -> std::cmp::Ordering {
    let adx = &a.x - &d.x;
    let ady = &a.y - &d.y;
    let bdx = &b.x - &d.x;
    let bdy = &b.y - &d.y;
    let cdx = &c.x - &d.x;
    let cdy = &c.y - &d.y;
    let ad = &adx * &adx + &ady * &ady;
    let bd = &bdx * &bdx + &bdy * &bdy;
    let cd = &cdx * &cdx + &cdy * &cdy;
    let det = &ad * (&bdx * &cdy - &bdy * &cdx) - &bd * (&adx * &cdy - &ady * &cdx)
        + &cd * (&adx * &bdy - &ady * &bdx);
    det.cmp(&Rat::zero())
}

/// An orientation-preserving isometry of the plane, `z -> sign*z + t` with
/// `sign` in `{+1, -1}`. These are exactly the transition maps of a
/// half-translation structure.
#[derive(Clone, PartialEq, Eq)]
pub struct HalfTranslation {
    pub sign: i8,
    pub t: Vec2,
}

impl fmt::Debug for HalfTranslation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}z + {:?}]", self.sign, self.t)
    }
}

impl HalfTranslation {
    pub fn identity() -> Self {
        HalfTranslation {
            sign: 1,
            t: Vec2::zero(),
        }
    }

    pub fn new(sign: i8, t: Vec2) -> Self {
        assert!(sign == 1 || sign == -1);
        HalfTranslation { sign, t }
    }

    pub fn apply(&self, p: &Vec2) -> Vec2 {
        if self.sign == 1 {
            &self.t + p
        } else {
            &self.t - p
        }
    }

    pub fn apply_vec(&self, v: &Vec2) -> Vec2 {
        if self.sign == 1 {
            v.clone()
        } else {
            -v
        }
    }

    /// Composition `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &HalfTranslation) -> HalfTranslation {
        HalfTranslation {
            sign: self.sign * other.sign,
            t: &self.t + &self.apply_vec(&other.t),
        }
    }

    pub fn inverse(&self) -> HalfTranslation {
        // z -> s(z - t) ; for s = -1: -z + t works too since -(-z+t)+t... check:
        // self: w = s z + t  =>  z = s(w - t) = s w - s t.
        HalfTranslation {
            sign: self.sign,
            t: if self.sign == 1 {
                -&self.t
            } else {
                self.t.clone()
            },
        }
    }

    pub fn is_identity(&self) -> bool {
        self.sign == 1 && self.t.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{rat, rat_int};

    fn v(x: i64, y: i64) -> Vec2 {
        Vec2::new(rat_int(x), rat_int(y))
    }

    #[test]
    fn isometry_compose_inverse() {
        let g = HalfTranslation::new(-1, v(3, 1));
        let h = HalfTranslation::new(1, v(-2, 5));
        let p = Vec2::new(rat(1, 2), rat(7, 3));
        let gh = g.compose(&h);
        assert_eq!(gh.apply(&p), g.apply(&h.apply(&p)));
        let inv = g.inverse();
        assert_eq!(inv.apply(&g.apply(&p)), p);
        assert!(g.compose(&inv).is_identity());
    }

    #[test]
    fn incircle_square() {
        // Unit square corners; center strictly inside circumcircle.
        let a = v(0, 0);
        let b = v(1, 0);
        let c = v(1, 1);
        let center = Vec2::new(rat(1, 2), rat(1, 2));
        assert_eq!(in_circle(&a, &b, &c, &center), std::cmp::Ordering::Greater);
        // Fourth corner is on the circle.
        assert_eq!(in_circle(&a, &b, &c, &v(0, 1)), std::cmp::Ordering::Equal);
        assert_eq!(in_circle(&a, &b, &c, &v(2, 2)), std::cmp::Ordering::Less);
    }
}
