//! Half-translation surfaces from polygon gluings.
//!
//! Storage convention: each polygon is a ccw loop of edge vectors. A gluing
//! `[[p, i], [q, j], sign]` identifies edge slot `(p, i)` with `(q, j)` by the
//! orientation-preserving isometry `z -> sign*z + c`; `sign = +1` is a
//! translation, `sign = -1` the half-translation flip. Identification always
//! reverses boundary direction, so on the stored (ccw) vectors the
//! compatibility condition reads `v_q = -sign * v_p`: equivalently, measured
//! along the identification direction the glued vector is `sign * v_p`.

use crate::geom::polygon::{Polygon, PolygonError};
use crate::geom::turning::{interior_corner, AngleAccumulator};
use crate::geom::Vec2;
use crate::num::Rat;
use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

/// Edge slot: polygon index and edge index within it.
pub type Slot = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gluing {
    pub a: Slot,
    pub b: Slot,
    pub sign: i8,
}

#[derive(Debug, Error)]
pub enum SurfaceError {
    #[error("polygon {0}: {1}")]
    Polygon(usize, PolygonError),
    #[error("edge slot ({0}, {1}) is not matched exactly once")]
    UnmatchedEdge(usize, usize),
    #[error("gluing of ({0:?}) and ({1:?}): stored vectors violate v' = -sign*v")]
    VectorMismatch(Slot, Slot),
    #[error("gluing sign must be +1 or -1")]
    BadSign,
    #[error("vertex class {0}: cone angle is not an integer multiple of pi")]
    IrrationalConeAngle(usize),
    #[error("vertex class {0}: cone angle {1}*pi is invalid (needs marked 2pi or >= 3pi)")]
    BadConeAngle(usize, i64),
    #[error("marked point ({0}, {1}) does not have angle exactly 2pi")]
    BadMarkedPoint(usize, usize),
    #[error("surface is not connected")]
    Disconnected,
    #[error("surface has non-positive area")]
    NonPositiveArea,
    #[error("genus {0} surface requires test_mode")]
    GenusRequiresTestMode(u32),
    #[error("slot reference ({0}, {1}) out of range")]
    BadSlotRef(usize, usize),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Raw file format. Edge vectors are `[dx_num, dx_den, dy_num, dy_den]`.
#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpec {
    pub polygons: Vec<Vec<[i64; 4]>>,
    pub gluings: Vec<GluingSpec>,
    #[serde(default)]
    pub marked_points: Vec<[usize; 2]>,
    #[serde(default)]
    pub test_mode: bool,
}

pub type GluingSpec = ([usize; 2], [usize; 2], i8);

#[derive(Debug, Clone)]
pub struct VertexClass {
    /// Corners (polygon, vertex index) in this class. Vertex `i` of a polygon
    /// is the start of edge `i`.
    pub corners: Vec<Slot>,
    /// Cone angle as an exact multiple of pi.
    pub angle_pi: i64,
    /// Singularity order: angle = (k + 2) * pi.
    pub order: i64,
    pub marked: bool,
}

#[derive(Clone)]
pub struct HalfTranslationSurface {
    pub polygons: Vec<Polygon>,
    pub gluings: Vec<Gluing>,
    pub vertex_classes: Vec<VertexClass>,
    /// class index of each corner, addressed by slot.
    corner_class: Vec<Vec<usize>>,
    /// partner slot and sign of each edge slot.
    partner: Vec<Vec<(Slot, i8)>>,
    pub genus: u32,
    pub area: Rat,
    pub test_mode: bool,
}

impl std::fmt::Debug for HalfTranslationSurface {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "HalfTranslationSurface(genus {}, {} polygons, {} vertex classes, area {})",
            self.genus,
            self.polygons.len(),
            self.vertex_classes.len(),
            self.area
        )
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }
    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
        }
        self.parent[x]
    }
    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

impl HalfTranslationSurface {
    pub fn from_spec(spec: &SurfaceSpec) -> Result<Self, SurfaceError> {
        let mut polygons = Vec::with_capacity(spec.polygons.len());
        for (pi, poly) in spec.polygons.iter().enumerate() {
            let edges: Result<Vec<Vec2>, SurfaceError> = poly
                .iter()
                .map(|[nx, dx, ny, dy]| {
                    if *dx == 0 || *dy == 0 {
                        return Err(SurfaceError::Parse(format!(
                            "polygon {pi}: zero denominator in edge vector"
                        )));
                    }
                    Ok(Vec2::new(
                        Rat::new(BigInt::from(*nx), BigInt::from(*dx)),
                        Rat::new(BigInt::from(*ny), BigInt::from(*dy)),
                    ))
                })
                .collect();
            let poly =
                Polygon::from_edges(edges?).map_err(|e| SurfaceError::Polygon(pi, e))?;
            polygons.push(poly);
        }
        let gluings: Vec<Gluing> = spec
            .gluings
            .iter()
            .map(|(a, b, s)| Gluing {
                a: (a[0], a[1]),
                b: (b[0], b[1]),
                sign: *s,
            })
            .collect();
        let marked: Vec<Slot> = spec.marked_points.iter().map(|[p, c]| (*p, *c)).collect();
        Self::build(polygons, gluings, &marked, spec.test_mode)
    }

    pub fn build(
        polygons: Vec<Polygon>,
        gluings: Vec<Gluing>,
        marked_points: &[Slot],
        test_mode: bool,
    ) -> Result<Self, SurfaceError> {
        // Slot bookkeeping.
        let n_polys = polygons.len();
        if n_polys == 0 {
            return Err(SurfaceError::NonPositiveArea);
        }
        let sizes: Vec<usize> = polygons.iter().map(|p| p.len()).collect();
        let check_slot = |s: Slot| -> Result<(), SurfaceError> {
            if s.0 >= n_polys || s.1 >= sizes[s.0] {
                Err(SurfaceError::BadSlotRef(s.0, s.1))
            } else {
                Ok(())
            }
        };

        let mut partner: Vec<Vec<Option<(Slot, i8)>>> =
            sizes.iter().map(|&n| vec![None; n]).collect();
        for g in &gluings {
            check_slot(g.a)?;
            check_slot(g.b)?;
            if g.sign != 1 && g.sign != -1 {
                return Err(SurfaceError::BadSign);
            }
            if g.a == g.b {
                return Err(SurfaceError::UnmatchedEdge(g.a.0, g.a.1));
            }
            for (s, t) in [(g.a, g.b), (g.b, g.a)] {
                let cell = &mut partner[s.0][s.1];
                if cell.is_some() {
                    return Err(SurfaceError::UnmatchedEdge(s.0, s.1));
                }
                *cell = Some((t, g.sign));
            }
        }
        let mut partner_full: Vec<Vec<(Slot, i8)>> = Vec::with_capacity(n_polys);
        for (p, row) in partner.into_iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for (i, cell) in row.into_iter().enumerate() {
                match cell {
                    Some(v) => out.push(v),
                    None => return Err(SurfaceError::UnmatchedEdge(p, i)),
                }
            }
            partner_full.push(out);
        }

        // Vector compatibility: stored ccw vectors of glued slots satisfy
        // v_b = -sign * v_a exactly.
        for g in &gluings {
            let va = &polygons[g.a.0].edges[g.a.1];
            let vb = &polygons[g.b.0].edges[g.b.1];
            let expected = if g.sign == 1 { -va } else { va.clone() };
            if *vb != expected {
                return Err(SurfaceError::VectorMismatch(g.a, g.b));
            }
        }

        // Connectivity over polygons.
        let mut uf_poly = UnionFind::new(n_polys);
        for g in &gluings {
            uf_poly.union(g.a.0, g.b.0);
        }
        let root = uf_poly.find(0);
        for p in 1..n_polys {
            if uf_poly.find(p) != root {
                return Err(SurfaceError::Disconnected);
            }
        }

        // Corner classes. Corner (p, i) = start of edge i. The identification
        // of slot a with slot b maps start(a) to end(b) and end(a) to start(b).
        let corner_offset: Vec<usize> = sizes
            .iter()
            .scan(0, |acc, &n| {
                let o = *acc;
                *acc += n;
                Some(o)
            })
            .collect();
        let total_corners: usize = sizes.iter().sum();
        let cid = |s: Slot| corner_offset[s.0] + s.1;
        let mut uf = UnionFind::new(total_corners);
        for g in &gluings {
            let (p, i) = g.a;
            let (q, j) = g.b;
            let start_a = (p, i);
            let end_a = (p, (i + 1) % sizes[p]);
            let start_b = (q, j);
            let end_b = (q, (j + 1) % sizes[q]);
            uf.union(cid(start_a), cid(end_b));
            uf.union(cid(end_a), cid(start_b));
        }

        // Collect classes.
        let mut class_index: Vec<Option<usize>> = vec![None; total_corners];
        let mut classes: Vec<Vec<Slot>> = Vec::new();
        for p in 0..n_polys {
            for i in 0..sizes[p] {
                let r = uf.find(cid((p, i)));
                let idx = match class_index[r] {
                    Some(idx) => idx,
                    None => {
                        classes.push(Vec::new());
                        class_index[r] = Some(classes.len() - 1);
                        classes.len() - 1
                    }
                };
                classes[idx].push((p, i));
            }
        }

        let marked_set: BTreeSet<usize> = marked_points
            .iter()
            .map(|&s| {
                check_slot(s)?;
                Ok(class_index[uf.find(cid(s))].unwrap())
            })
            .collect::<Result<_, _>>()?;

        // Cone angles, exactly.
        let mut vertex_classes = Vec::with_capacity(classes.len());
        for (ci, corners) in classes.iter().enumerate() {
            let mut acc = AngleAccumulator::new();
            for &(p, i) in corners {
                let n = sizes[p];
                let incoming = &polygons[p].edges[(i + n - 1) % n];
                let outgoing = &polygons[p].edges[i];
                interior_corner(&mut acc, incoming, outgoing);
            }
            let m = acc
                .pi_multiple()
                .ok_or(SurfaceError::IrrationalConeAngle(ci))?;
            let marked = marked_set.contains(&ci);
            if marked {
                if m != 2 {
                    let &(p, i) = &corners[0];
                    return Err(SurfaceError::BadMarkedPoint(p, i));
                }
            } else if m < 3 {
                // Unmarked classes must be genuine singularities (>= 3pi);
                // angle 2pi without a marking and anything below is rejected.
                return Err(SurfaceError::BadConeAngle(ci, m));
            }
            vertex_classes.push(VertexClass {
                corners: corners.clone(),
                angle_pi: m,
                order: m - 2,
                marked,
            });
        }

        // Euler characteristic and genus. Angle validation already forces
        // chi <= 0 and closed orientable gluings have even chi.
        let v = vertex_classes.len() as i64;
        let e = gluings.len() as i64;
        let f = n_polys as i64;
        let chi = v - e + f;
        assert!(chi <= 0 && chi % 2 == 0, "impossible Euler characteristic");
        let genus = ((2 - chi) / 2) as u32;
        if genus < 2 && !test_mode {
            return Err(SurfaceError::GenusRequiresTestMode(genus));
        }

        // Gauss-Bonnet: sum of orders must equal 4g - 4. This is implied by
        // the angle bookkeeping; assert it as a hard internal invariant.
        let order_sum: i64 = vertex_classes.iter().map(|c| c.order).sum();
        assert_eq!(order_sum, 4 * genus as i64 - 4, "Gauss-Bonnet violated");

        let area: Rat = polygons.iter().map(|p| p.area.clone()).sum();
        if !area.is_positive() {
            return Err(SurfaceError::NonPositiveArea);
        }

        let mut corner_class: Vec<Vec<usize>> = sizes.iter().map(|&n| vec![0; n]).collect();
        for (ci, corners) in classes.iter().enumerate() {
            for &(p, i) in corners {
                corner_class[p][i] = ci;
            }
        }

        Ok(HalfTranslationSurface {
            polygons,
            gluings,
            vertex_classes,
            corner_class,
            partner: partner_full,
            genus,
            area,
            test_mode,
        })
    }

    pub fn partner_of(&self, s: Slot) -> (Slot, i8) {
        self.partner[s.0][s.1].clone()
    }

    pub fn class_of_corner(&self, s: Slot) -> usize {
        self.corner_class[s.0][s.1]
    }

    /// Sum of singularity orders (= 4g - 4).
    pub fn total_order(&self) -> i64 {
        self.vertex_classes.iter().map(|c| c.order).sum()
    }

    /// Scale all coordinates by a positive rational factor.
    pub fn scaled(&self, factor: &Rat) -> HalfTranslationSurface {
        assert!(factor.is_positive());
        let polygons = self
            .polygons
            .iter()
            .map(|p| {
                Polygon::from_edges(p.edges.iter().map(|e| e.scale(factor)).collect())
                    .expect("scaling preserves polygon validity")
            })
            .collect();
        let marked: Vec<Slot> = self
            .vertex_classes
            .iter()
            .filter(|c| c.marked)
            .map(|c| c.corners[0])
            .collect();
        HalfTranslationSurface::build(polygons, self.gluings.clone(), &marked, self.test_mode)
            .expect("scaling preserves surface validity")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat_int;

    fn v(x: i64, y: i64) -> Vec2 {
        Vec2::new(rat_int(x), rat_int(y))
    }

    fn square() -> Polygon {
        Polygon::from_edges(vec![v(1, 0), v(0, 1), v(-1, 0), v(0, -1)]).unwrap()
    }

    #[test]
    fn flat_torus() {
        let t = crate::fixtures::torus();
        assert_eq!(t.genus, 1);
        assert_eq!(t.area, rat_int(1));
        assert_eq!(t.vertex_classes.len(), 1);
        assert_eq!(t.vertex_classes[0].angle_pi, 2);
        assert!(t.vertex_classes[0].marked);
        assert_eq!(t.total_order(), 0);
    }

    #[test]
    fn torus_requires_test_mode() {
        let r = HalfTranslationSurface::build(
            vec![square()],
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
            false,
        );
        assert!(matches!(r, Err(SurfaceError::GenusRequiresTestMode(1))));
    }

    #[test]
    fn torus_without_marking_rejected() {
        let r = HalfTranslationSurface::build(
            vec![square()],
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
            &[],
            true,
        );
        assert!(matches!(r, Err(SurfaceError::BadConeAngle(_, 2))));
    }

    #[test]
    fn vector_mismatch_rejected() {
        // Glue bottom to right side: lengths match but directions are wrong.
        let r = HalfTranslationSurface::build(
            vec![square()],
            vec![
                Gluing {
                    a: (0, 0),
                    b: (0, 1),
                    sign: 1,
                },
                Gluing {
                    a: (0, 2),
                    b: (0, 3),
                    sign: 1,
                },
            ],
            &[],
            true,
        );
        assert!(matches!(r, Err(SurfaceError::VectorMismatch(..))));
    }

    #[test]
    fn l_shape_genus_two() {
        let s = crate::fixtures::l_shape();
        assert_eq!(s.genus, 2);
        assert_eq!(s.area, rat_int(3));
        assert_eq!(s.vertex_classes.len(), 1);
        assert_eq!(s.vertex_classes[0].angle_pi, 6);
        assert_eq!(s.vertex_classes[0].order, 4);
        assert_eq!(s.total_order(), 4);
    }

    #[test]
    fn pillowcase_flip_rejected() {
        // Two squares forming a 2x1 pillowcase: fold the bottoms and tops
        // onto themselves with flips. The four corners get cone angle pi,
        // which is below every legal angle: rejected.
        let polys = vec![square(), square()];
        let r = HalfTranslationSurface::build(
            polys,
            vec![
                Gluing {
                    a: (0, 1),
                    b: (1, 3),
                    sign: 1,
                },
                Gluing {
                    a: (0, 0),
                    b: (1, 0),
                    sign: -1,
                },
                Gluing {
                    a: (0, 2),
                    b: (1, 2),
                    sign: -1,
                },
                Gluing {
                    a: (0, 3),
                    b: (1, 1),
                    sign: 1,
                },
            ],
            &[],
            true,
        );
        assert!(matches!(r, Err(SurfaceError::BadConeAngle(_, 1))));
    }

    #[test]
    fn unmatched_edge_rejected() {
        let r = HalfTranslationSurface::build(
            vec![square()],
            vec![Gluing {
                a: (0, 0),
                b: (0, 2),
                sign: 1,
            }],
            &[],
            true,
        );
        assert!(matches!(r, Err(SurfaceError::UnmatchedEdge(..))));
    }
}
