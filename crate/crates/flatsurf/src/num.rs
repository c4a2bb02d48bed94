//! Exact rational scalars and the few numeric helpers the geometry needs.
//!
//! All combinatorial decisions (orientation, incircle, angle comparisons) are
//! made on exact rationals. Square roots appear only when a length is
//! reported; those are tracked as an `ApproxLen` carrying the exact square.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    assert!(d != 0, "zero denominator");
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Fall back on a widening division for extreme operands.
        let n = x.numer().to_f64().unwrap_or(f64::MAX);
        let d = x.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}

pub fn rat_from_f64(x: f64) -> Option<Rat> {
    Rat::from_f64(x)
}

/// A nonnegative length known exactly by its square.
///
/// `value` is the rounded double; the true length differs from it by at most
/// a few ulps since the only inexact step is one square root.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxLen {
    pub sq: Rat,
    pub value: f64,
}

impl ApproxLen {
    pub fn from_sq(sq: Rat) -> Self {
        assert!(!sq.is_negative(), "negative squared length");
        let value = rat_to_f64(&sq).sqrt();
        ApproxLen { sq, value }
    }

    pub fn zero() -> Self {
        ApproxLen {
            sq: Rat::zero(),
            value: 0.0,
        }
    }

    /// Exact comparison of two lengths via their squares.
    pub fn cmp_exact(&self, other: &ApproxLen) -> Ordering {
        self.sq.cmp(&other.sq)
    }

    /// Compare this length against an exact rational bound.
    pub fn cmp_rat(&self, bound: &Rat) -> Ordering {
        if bound.is_negative() {
            return Ordering::Greater;
        }
        self.sq.cmp(&(bound * bound))
    }
}

/// Exact squared Euclidean norm of a rational vector.
pub fn norm_sq(dx: &Rat, dy: &Rat) -> Rat {
    dx * dx + dy * dy
}

/// `floor(sqrt(x))` for a nonnegative rational, as a BigInt.
pub fn floor_sqrt(x: &Rat) -> BigInt {
    assert!(!x.is_negative());
    if x.is_zero() {
        return BigInt::zero();
    }
    // Integer sqrt of floor(x) then fix up.
    let fl = x.to_integer();
    let mut r = fl.sqrt();
    while (&r + 1u32) * (&r + 1u32) <= fl {
        r += 1u32;
    }
    while &r * &r > fl {
        r -= 1u32;
    }
    // r = floor(sqrt(floor(x))) = floor(sqrt(x)) since r^2 <= floor(x) <= x
    // and (r+1)^2 > floor(x) implies (r+1)^2 > x only when (r+1)^2 > x; check:
    let rp = &r + 1u32;
    if Rat::from_integer(&rp * &rp) <= *x {
        return rp;
    }
    r
}

/// Bracket `sqrt(x)` in a rational interval of width `<= tol`.
pub fn sqrt_interval(x: &Rat, tol: &Rat) -> (Rat, Rat) {
    assert!(!x.is_negative() && tol.is_positive());
    if x.is_zero() {
        return (Rat::zero(), Rat::zero());
    }
    let mut lo = Rat::from_integer(floor_sqrt(x));
    let mut hi = &lo + Rat::one();
    if lo.is_zero() {
        // x < 1; start from (0, 1).
        hi = Rat::one();
    }
    while &hi - &lo > *tol {
        let mid = (&lo + &hi) / rat_int(2);
        if &mid * &mid <= *x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Orientation of the ordered pair of vectors (`cross product sign`).
pub fn cross(ax: &Rat, ay: &Rat, bx: &Rat, by: &Rat) -> Rat {
    ax * by - ay * bx
}

pub fn dot(ax: &Rat, ay: &Rat, bx: &Rat, by: &Rat) -> Rat {
    ax * bx + ay * by
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_interval_brackets() {
        let x = rat(2, 1);
        let (lo, hi) = sqrt_interval(&x, &rat(1, 1_000_000));
        assert!(&lo * &lo <= x && &hi * &hi >= x);
        assert!(&hi - &lo <= rat(1, 1_000_000));
    }

    #[test]
    fn floor_sqrt_values() {
        assert_eq!(floor_sqrt(&rat_int(0)), BigInt::from(0));
        assert_eq!(floor_sqrt(&rat_int(1)), BigInt::from(1));
        assert_eq!(floor_sqrt(&rat_int(2)), BigInt::from(1));
        assert_eq!(floor_sqrt(&rat_int(4)), BigInt::from(2));
        assert_eq!(floor_sqrt(&rat(17, 4)), BigInt::from(2));
        assert_eq!(floor_sqrt(&rat(1, 4)), BigInt::from(0));
    }

    #[test]
    fn approx_len_compare() {
        let a = ApproxLen::from_sq(rat_int(2));
        assert_eq!(a.cmp_rat(&rat(3, 2)), Ordering::Less);
        assert_eq!(a.cmp_rat(&rat(7, 5)), Ordering::Greater);
        assert!((a.value - 2f64.sqrt()).abs() < 1e-15);
    }
}
