//! Exact accumulation of angles between rational vectors.
//!
//! Angles on a cone surface are sums of corner angles, each strictly between
//! 0 and 2π. We track a running total as `half_turns * π + arg(residual)`
//! where the residual is an exact rational complex number with argument in
//! `[0, π)`. Every comparison against a multiple of π is then exact.

use crate::geom::Vec2;
use crate::num::{rat_to_f64, Rat};
use num_traits::{Signed, Zero};
use std::cmp::Ordering;

/// Residual rotation: a nonzero rational complex number, meaningful up to
/// positive scaling, with argument normalized to `[0, π)`.
#[derive(Clone, Debug)]
pub struct AngleAccumulator {
    half_turns: i64,
    // Residual (re, im) with arg in [0, π): im > 0, or im == 0 && re > 0.
    re: Rat,
    im: Rat,
}

/// Argument class of a nonzero (re, im) within [0, 2π): which half-plane,
/// for exact comparison purposes.
fn half_plane(re: &Rat, im: &Rat) -> u8 {
    // 0 if arg in [0, π), 1 if arg in [π, 2π).
    if im.is_positive() {
        0
    } else if im.is_negative() {
        1
    } else if re.is_positive() {
        0
    } else {
        1
    }
}

/// Exact comparison of arguments in [0, 2π) of two nonzero rational complex
/// numbers.
fn cmp_arg(are: &Rat, aim: &Rat, bre: &Rat, bim: &Rat) -> Ordering {
    let ha = half_plane(are, aim);
    let hb = half_plane(bre, bim);
    if ha != hb {
        return ha.cmp(&hb);
    }
    // Same open half-plane: compare by cross product sign.
    let cr = are * bim - aim * bre;
    if cr.is_positive() {
        Ordering::Less
    } else if cr.is_negative() {
        Ordering::Greater
    } else {
        Ordering::Equal
    }
}

impl AngleAccumulator {
    pub fn new() -> Self {
        AngleAccumulator {
            half_turns: 0,
            re: Rat::from_integer(1.into()),
            im: Rat::zero(),
        }
    }

    /// Add the angle of the corner spanned from direction `from` to direction
    /// `to`, measured counterclockwise, taken in the open interval (0, 2π).
    ///
    /// Panics if `from` and `to` are positively parallel (angle 0 or 2π is
    /// not a valid polygon corner).
    pub fn add_corner(&mut self, from: &Vec2, to: &Vec2) {
        assert!(!from.is_zero() && !to.is_zero(), "zero direction");
        // Rotation taking `from` to `to`: z_c = to * conj(from).
        let zre = &to.x * &from.x + &to.y * &from.y;
        let zim = &to.y * &from.x - &to.x * &from.y;
        assert!(
            !(zim.is_zero() && zre.is_positive()),
            "degenerate zero-angle corner"
        );
        self.add_rotation(&zre, &zim);
    }

    /// Multiply in a rotation with argument in (0, 2π).
    fn add_rotation(&mut self, zre: &Rat, zim: &Rat) {
        let old_re = self.re.clone();
        let old_im = self.im.clone();
        let nre = &old_re * zre - &old_im * zim;
        let nim = &old_re * zim + &old_im * zre;
        // New total = old + theta, theta in (0, 2π). The product determines
        // it mod 2π; pick the representative in (old_arg, old_arg + 2π).
        // old_arg is in [0, π); the new accumulated arg c is in (old, old+2π).
        // c mod 2π = arg(n). c = arg(n) if arg(n) > old_arg else arg(n)+2π.
        let wrapped = match cmp_arg(&nre, &nim, &old_re, &old_im) {
            Ordering::Greater => 0,
            _ => 1, // equal impossible (theta != 0, 2π)
        };
        self.half_turns += 2 * wrapped + half_plane(&nre, &nim) as i64;
        self.re = nre;
        self.im = nim;
        // normalize() flips into [0, π) and would double count: add_rotation
        // already accounted for the half-plane, so flip without incrementing.
        if half_plane(&self.re, &self.im) == 1 {
            self.re = -&self.re;
            self.im = -&self.im;
        }
        let scale = self.re.abs() + self.im.abs();
        if !scale.is_zero() {
            self.re = &self.re / &scale;
            self.im = &self.im / &scale;
        }
    }

    /// The total angle is an exact multiple of π?
    pub fn is_multiple_of_pi(&self) -> bool {
        self.im.is_zero()
    }

    /// If the total is `m * π` exactly, return `m`.
    pub fn pi_multiple(&self) -> Option<i64> {
        if self.is_multiple_of_pi() {
            Some(self.half_turns)
        } else {
            None
        }
    }

    /// Compare the accumulated angle to `m * π` exactly.
    pub fn cmp_pi_multiple(&self, m: i64) -> Ordering {
        match self.half_turns.cmp(&m) {
            Ordering::Equal => {
                if self.im.is_zero() {
                    Ordering::Equal
                } else {
                    // residual arg strictly in (0, π)
                    Ordering::Greater
                }
            }
            other => other,
        }
    }

    /// Exact comparison of two accumulated angles.
    pub fn cmp_accumulated(&self, other: &AngleAccumulator) -> Ordering {
        match self.half_turns.cmp(&other.half_turns) {
            Ordering::Equal => {
                // Residual args both in [0, pi): compare by cross product.
                let cr = &self.re * &other.im - &self.im * &other.re;
                if cr.is_positive() {
                    Ordering::Less
                } else if cr.is_negative() {
                    Ordering::Greater
                } else {
                    Ordering::Equal
                }
            }
            o => o,
        }
    }

    /// Approximate value in radians.
    pub fn to_f64(&self) -> f64 {
        let resid = rat_to_f64(&self.im).atan2(rat_to_f64(&self.re));
        self.half_turns as f64 * std::f64::consts::PI + resid
    }
}

impl Default for AngleAccumulator {
    fn default() -> Self {
        Self::new()
    }
}

/// Corner angle of a ccw polygon at a vertex with incoming edge vector `u`
/// (pointing into the vertex) and outgoing edge vector `w`: the interior
/// angle, ccw from `w` to `-u`, in (0, 2π).
pub fn interior_corner(acc: &mut AngleAccumulator, incoming: &Vec2, outgoing: &Vec2) {
    let back = -incoming;
    acc.add_corner(outgoing, &back);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat_int;

    fn v(x: i64, y: i64) -> Vec2 {
        Vec2::new(rat_int(x), rat_int(y))
    }

    #[test]
    fn right_angles_sum() {
        // Four quarter turns = 2π.
        let mut acc = AngleAccumulator::new();
        for _ in 0..4 {
            acc.add_corner(&v(1, 0), &v(0, 1));
        }
        assert_eq!(acc.pi_multiple(), Some(2));
    }

    #[test]
    fn square_interior_angles() {
        // Interior angles of the unit square: each π/2, total 2π.
        let edges = [v(1, 0), v(0, 1), v(-1, 0), v(0, -1)];
        let mut acc = AngleAccumulator::new();
        for i in 0..4 {
            interior_corner(&mut acc, &edges[(i + 3) % 4], &edges[i]);
        }
        assert_eq!(acc.pi_multiple(), Some(2));
    }

    #[test]
    fn reflex_corner() {
        // L-shape reflex corner: incoming (-1,0), outgoing (0,1): 3π/2.
        let mut acc = AngleAccumulator::new();
        interior_corner(&mut acc, &v(-1, 0), &v(0, 1));
        // 3π/2 is not a multiple of π and lies strictly between π and 2π.
        assert!(!acc.is_multiple_of_pi());
        assert_eq!(acc.cmp_pi_multiple(1), Ordering::Greater);
        assert_eq!(acc.cmp_pi_multiple(2), Ordering::Less);
        assert!((acc.to_f64() - 3.0 * std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn six_pi_cone() {
        // Three full squares' worth of corners: 12 right angles = 6π... no,
        // 12 * π/2 = 6π.
        let mut acc = AngleAccumulator::new();
        for _ in 0..12 {
            acc.add_corner(&v(1, 0), &v(0, 1));
        }
        assert_eq!(acc.pi_multiple(), Some(6));
    }

    #[test]
    fn cmp_pi_boundary() {
        let mut acc = AngleAccumulator::new();
        acc.add_corner(&v(1, 0), &v(-1, 0)); // exactly π
        assert_eq!(acc.cmp_pi_multiple(1), Ordering::Equal);
        acc.add_corner(&v(1, 0), &v(1, 1)); // + π/4
        assert_eq!(acc.cmp_pi_multiple(1), Ordering::Greater);
        assert_eq!(acc.cmp_pi_multiple(2), Ordering::Less);
    }
}
