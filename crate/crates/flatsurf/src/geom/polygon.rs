//! Simple polygons given by their cyclic lists of edge vectors.

use crate::geom::Vec2;
use crate::num::Rat;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;

/// A simple, positively oriented polygon stored as edge vectors in boundary
/// order. Vertices are recovered as partial sums from the origin; only
/// differences of vertices are ever meaningful.
#[derive(Clone, Debug)]
pub struct Polygon {
    pub edges: Vec<Vec2>,
    pub vertices: Vec<Vec2>,
    pub area: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolygonError {
    TooFewEdges,
    ZeroEdge(usize),
    NotClosed,
    CollinearCorner(usize),
    NotPositivelyOriented,
    SelfIntersecting(usize, usize),
}

impl std::fmt::Display for PolygonError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PolygonError::TooFewEdges => write!(f, "polygon needs at least 3 edges"),
            PolygonError::ZeroEdge(i) => write!(f, "edge {i} has zero length"),
            PolygonError::NotClosed => write!(f, "edge vectors do not sum to zero"),
            PolygonError::CollinearCorner(i) => {
                write!(f, "corner {i} is collinear or a cusp")
            }
            PolygonError::NotPositivelyOriented => {
                write!(f, "polygon is not positively oriented")
            }
            PolygonError::SelfIntersecting(i, j) => {
                write!(f, "edges {i} and {j} intersect")
            }
        }
    }
}

fn seg_intersect_proper(a: &Vec2, b: &Vec2, c: &Vec2, d: &Vec2) -> bool {
    // Closed-segment intersection test, exact.
    let d1 = (b - a).cross(&(c - a));
    let d2 = (b - a).cross(&(d - a));
    let d3 = (d - c).cross(&(a - c));
    let d4 = (d - c).cross(&(b - c));
    let s1 = d1.cmp(&Rat::zero());
    let s2 = d2.cmp(&Rat::zero());
    let s3 = d3.cmp(&Rat::zero());
    let s4 = d4.cmp(&Rat::zero());
    let straddle =
        |p: Ordering, q: Ordering| (p != q) || (p == Ordering::Equal && q == Ordering::Equal);
    if straddle(s1, s2) && straddle(s3, s4) {
        // Handle the fully collinear case: overlap iff projections overlap.
        if s1 == Ordering::Equal && s2 == Ordering::Equal {
            let dir = b - a;
            let ta = Rat::zero();
            let tb = dir.dot(&(b - a));
            let tc = dir.dot(&(c - a));
            let td = dir.dot(&(d - a));
            let (lo1, hi1) = if ta <= tb { (ta, tb) } else { (tb, ta) };
            let (lo2, hi2) = if tc <= td {
                (tc.clone(), td.clone())
            } else {
                (td.clone(), tc.clone())
            };
            return lo1 <= hi2 && lo2 <= hi1;
        }
        return true;
    }
    false
}

impl Polygon {
    pub fn from_edges(edges: Vec<Vec2>) -> Result<Polygon, PolygonError> {
        if edges.len() < 3 {
            return Err(PolygonError::TooFewEdges);
        }
        for (i, e) in edges.iter().enumerate() {
            if e.is_zero() {
                return Err(PolygonError::ZeroEdge(i));
            }
        }
        let mut sum = Vec2::zero();
        for e in &edges {
            sum = &sum + e;
        }
        if !sum.is_zero() {
            return Err(PolygonError::NotClosed);
        }
        let n = edges.len();
        for i in 0..n {
            let prev = &edges[(i + n - 1) % n];
            if prev.cross(&edges[i]).is_zero() {
                return Err(PolygonError::CollinearCorner(i));
            }
        }
        let mut vertices = Vec::with_capacity(n);
        let mut p = Vec2::zero();
        for e in &edges {
            vertices.push(p.clone());
            p = &p + e;
        }
        // Shoelace over the vertex loop.
        let mut twice_area = Rat::zero();
        for i in 0..n {
            let a = &vertices[i];
            let b = &vertices[(i + 1) % n];
            twice_area += a.cross(b);
        }
        if !twice_area.is_positive() {
            return Err(PolygonError::NotPositivelyOriented);
        }
        // Simplicity: non-adjacent closed edges must not meet.
        for i in 0..n {
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    continue;
                }
                let a = &vertices[i];
                let b = &vertices[(i + 1) % n];
                let c = &vertices[j];
                let d = &vertices[(j + 1) % n];
                if seg_intersect_proper(a, b, c, d) {
                    return Err(PolygonError::SelfIntersecting(i, j));
                }
            }
        }
        Ok(Polygon {
            edges,
            vertices,
            area: twice_area / Rat::from_integer(2.into()),
        })
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat_int;

    fn v(x: i64, y: i64) -> Vec2 {
        Vec2::new(rat_int(x), rat_int(y))
    }

    #[test]
    fn unit_square() {
        let p = Polygon::from_edges(vec![v(1, 0), v(0, 1), v(-1, 0), v(0, -1)]).unwrap();
        assert_eq!(p.area, rat_int(1));
        assert_eq!(p.vertices[2], v(1, 1));
    }

    #[test]
    fn l_shape_area() {
        // L-shaped hexagon outline, no collinear corners.
        let p = Polygon::from_edges(vec![
            v(2, 0),
            v(0, 1),
            v(-1, 0),
            v(0, 1),
            v(-1, 0),
            v(0, -2),
        ])
        .unwrap();
        assert_eq!(p.area, rat_int(3));
    }

    #[test]
    fn rejects_clockwise() {
        let r = Polygon::from_edges(vec![v(0, 1), v(1, 0), v(0, -1), v(-1, 0)]);
        assert_eq!(r.unwrap_err(), PolygonError::NotPositivelyOriented);
    }

    #[test]
    fn rejects_open() {
        let r = Polygon::from_edges(vec![v(1, 0), v(0, 1), v(-1, 0)]);
        assert_eq!(r.unwrap_err(), PolygonError::NotClosed);
    }

    #[test]
    fn rejects_self_intersection() {
        // Positive-area pentagon whose last two edges cross the bottom edge.
        let r = Polygon::from_edges(vec![v(4, 0), v(0, 4), v(-2, -5), v(-2, 5), v(0, -4)]);
        assert!(matches!(r, Err(PolygonError::SelfIntersecting(..))));
    }

    #[test]
    fn rejects_collinear() {
        let r = Polygon::from_edges(vec![v(1, 0), v(1, 0), v(0, 1), v(-2, 0), v(0, -1)]);
        assert_eq!(r.unwrap_err(), PolygonError::CollinearCorner(1));
    }
}
