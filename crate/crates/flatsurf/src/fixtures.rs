//! Packaged reference surfaces used by the test suites, the examples and the
//! shipped data files.

use crate::geom::polygon::Polygon;
use crate::geom::surface::{Gluing, HalfTranslationSurface, Slot, SurfaceSpec};
use crate::geom::Vec2;
use crate::num::rat_int;

fn v(x: i64, y: i64) -> Vec2 {
    Vec2::new(rat_int(x), rat_int(y))
}

pub fn unit_square() -> Polygon {
    Polygon::from_edges(vec![v(1, 0), v(0, 1), v(-1, 0), v(0, -1)]).unwrap()
}

/// Unit-square flat torus with one marked point (test mode only).
pub fn torus() -> HalfTranslationSurface {
    HalfTranslationSurface::build(
        vec![unit_square()],
        vec![
            Gluing {
                a: (0, 0),
                b: (0, 2),
                sign: 1,
            },
            Gluing {
                a: (0, 1),
                b: (0, 3),
                sign: 1,
            },
        ],
        &[(0, 0)],
        true,
    )
    .unwrap()
}

/// Three-unit-square L-shaped genus-2 surface: squares at (0,0), (1,0) and
/// (0,1), opposite sides glued by translation. One cone point of angle 6pi.
pub fn l_shape() -> HalfTranslationSurface {
    let polys = vec![unit_square(), unit_square(), unit_square()];
    let g = |a: Slot, b: Slot| Gluing { a, b, sign: 1 };
    // Edge indices per square: 0 bottom, 1 right, 2 top, 3 left.
    // Square 0 at origin, square 1 to its right, square 2 above it.
    let gluings = vec![
        g((0, 1), (1, 3)), // interior vertical seam
        g((0, 2), (2, 0)), // interior horizontal seam
        g((0, 0), (2, 2)), // bottom of column 0 ~ top of column 0
        g((1, 0), (1, 2)), // bottom of column 1 ~ top of column 1
        g((0, 3), (1, 1)), // left of row 0 ~ right of row 0
        g((2, 3), (2, 1)), // left of row 1 ~ right of row 1
    ];
    HalfTranslationSurface::build(polys, gluings, &[], false).unwrap()
}

/// The torus as a surface description file payload.
pub fn torus_spec() -> SurfaceSpec {
    SurfaceSpec {
        polygons: vec![vec![
            [1, 1, 0, 1],
            [0, 1, 1, 1],
            [-1, 1, 0, 1],
            [0, 1, -1, 1],
        ]],
        gluings: vec![([0, 0], [0, 2], 1), ([0, 1], [0, 3], 1)],
        marked_points: vec![[0, 0]],
        test_mode: true,
    }
}

/// The L-shaped surface as a surface description file payload.
pub fn l_shape_spec() -> SurfaceSpec {
    let sq = vec![
        [1, 1, 0, 1],
        [0, 1, 1, 1],
        [-1, 1, 0, 1],
        [0, 1, -1, 1],
    ];
    SurfaceSpec {
        polygons: vec![sq.clone(), sq.clone(), sq],
        gluings: vec![
            ([0, 1], [1, 3], 1),
            ([0, 2], [2, 0], 1),
            ([0, 0], [2, 2], 1),
            ([1, 0], [1, 2], 1),
            ([0, 3], [1, 1], 1),
            ([2, 3], [2, 1], 1),
        ],
        marked_points: vec![],
        test_mode: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::surface::HalfTranslationSurface;

    #[test]
    fn specs_roundtrip_through_builder() {
        let t = HalfTranslationSurface::from_spec(&torus_spec()).unwrap();
        assert_eq!(t.genus, 1);
        let l = HalfTranslationSurface::from_spec(&l_shape_spec()).unwrap();
        assert_eq!(l.genus, 2);
        assert_eq!(l.vertex_classes[0].angle_pi, 6);
    }
}
