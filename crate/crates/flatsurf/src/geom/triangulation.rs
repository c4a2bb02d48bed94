//! Triangulations of a half-translation surface with vertices at the cone
//! points and marked points.
//!
//! Halfedge layout: triangle `t` owns halfedges `3t, 3t+1, 3t+2`, ccw. Each
//! halfedge stores its edge vector in the owning triangle's chart; the three
//! vectors of a triangle sum to zero. Crossing halfedge `h` into the
//! neighboring triangle composes with the transition `z -> sign[h]*z + c`.

use crate::geom::surface::HalfTranslationSurface;
use crate::geom::{in_circle, HalfTranslation, Vec2};
use crate::num::Rat;
use num_traits::Signed;
use std::cmp::Ordering;
use std::collections::HashMap;

#[derive(Clone, Debug)]
pub struct VertexInfo {
    pub angle_pi: i64,
    pub marked: bool,
}

/// Per-triangle placement inside an original polygon (present only on the
/// unflipped base triangulation; tracing uses it for point location).
#[derive(Clone, Debug)]
pub struct Embedding {
    pub tri_polygon: Vec<usize>,
    pub tri_corner_pos: Vec<[Vec2; 3]>,
}

#[derive(Clone)]
pub struct Triangulation {
    pub vecs: Vec<Vec2>,
    pub twin: Vec<usize>,
    pub sign: Vec<i8>,
    /// Vertex class at the start corner of each halfedge.
    pub vstart: Vec<usize>,
    pub vertex_info: Vec<VertexInfo>,
    pub delaunay: bool,
    pub embedding: Option<Embedding>,
    pub area: Rat,
}

impl std::fmt::Debug for Triangulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Triangulation({} triangles, {} vertices, delaunay={})",
            self.n_triangles(),
            self.vertex_info.len(),
            self.delaunay
        )
    }
}

#[inline]
pub fn tri_of(h: usize) -> usize {
    h / 3
}

#[inline]
pub fn next_he(h: usize) -> usize {
    3 * (h / 3) + (h + 1) % 3
}

#[inline]
pub fn prev_he(h: usize) -> usize {
    3 * (h / 3) + (h + 2) % 3
}

impl Triangulation {
    pub fn n_halfedges(&self) -> usize {
        self.vecs.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.vecs.len() / 3
    }

    pub fn n_vertices(&self) -> usize {
        self.vertex_info.len()
    }

    pub fn n_edges(&self) -> usize {
        self.vecs.len() / 2
    }

    /// Corner position of `start(h)` in the chart of `tri_of(h)`.
    pub fn corner_pos(&self, h: usize) -> Vec2 {
        let t = tri_of(h);
        match h % 3 {
            0 => Vec2::zero(),
            1 => self.vecs[3 * t].clone(),
            _ => &self.vecs[3 * t] + &self.vecs[3 * t + 1],
        }
    }

    /// Transition mapping the chart of `tri_of(twin(h))` into the chart of
    /// `tri_of(h)`, gluing edge `twin(h)` onto `h` reversed.
    pub fn transition_into(&self, h: usize) -> HalfTranslation {
        let s = self.sign[h];
        let tw = self.twin[h];
        let target = self.corner_pos(next_he(h));
        let source = self.corner_pos(tw);
        let st = HalfTranslation::new(s, Vec2::zero());
        let c = &target - &st.apply_vec(&source);
        HalfTranslation::new(s, c)
    }

    /// Exact interior-edge Delaunay test: does the unfolded apex of the twin
    /// triangle lie strictly inside the circumcircle of `tri_of(h)`?
    pub fn edge_needs_flip(&self, h: usize) -> bool {
        let t = tri_of(h);
        let a = self.corner_pos(3 * t);
        let b = self.corner_pos(3 * t + 1);
        let c = self.corner_pos(3 * t + 2);
        let tw = self.twin[h];
        let apex_src = self.corner_pos(prev_he(tw));
        let g = self.transition_into(h);
        let q = g.apply(&apex_src);
        in_circle(&a, &b, &c, &q) == Ordering::Greater
    }

    /// Flip edge `h`. Caller must ensure the flip quad is strictly convex
    /// (true whenever `edge_needs_flip(h)`), and that the edge is not glued
    /// to its own triangle.
    fn flip(&mut self, h: usize) {
        let tw = self.twin[h];
        let t1 = tri_of(h);
        let t2 = tri_of(tw);
        assert_ne!(t1, t2, "cannot flip an edge glued to its own triangle");
        let h1 = next_he(h);
        let h2 = prev_he(h);
        let k1 = next_he(tw);
        let k2 = prev_he(tw);
        let s = self.sign[h];

        // Geometry in the chart of t1.
        let x0 = self.corner_pos(h);
        let x2 = self.corner_pos(h2);
        let g = self.transition_into(h);
        let q = g.apply(&self.corner_pos(k2));

        // Old outer-edge data (twin, sign).
        let (tw_k1, sg_k1) = (self.twin[k1], self.sign[k1]);
        let (tw_k2, sg_k2) = (self.twin[k2], self.sign[k2]);
        let (tw_h1, sg_h1) = (self.twin[h1], self.sign[h1]);
        let (tw_h2, sg_h2) = (self.twin[h2], self.sign[h2]);
        let v_x0 = self.vstart[h];
        let v_x1 = self.vstart[h1];
        let v_x2 = self.vstart[h2];
        let v_q = self.vstart[k2];
        let vec_h1 = self.vecs[h1].clone();
        let vec_h2 = self.vecs[h2].clone();

        // Slot movement: outer edges k1 -> 3t1, h2 -> 3t1+2 (stays), k2 ->
        // 3t2, h1 -> 3t2+1. The new diagonal occupies 3t1+1 and 3t2+2.
        let relocate = |e: usize| -> usize {
            if e == k1 {
                3 * t1
            } else if e == h2 {
                3 * t1 + 2
            } else if e == k2 {
                3 * t2
            } else if e == h1 {
                3 * t2 + 1
            } else {
                e
            }
        };

        // Triangle A = (X0, Q, X2) on t1's slots.
        self.vecs[3 * t1] = &q - &x0;
        self.vecs[3 * t1 + 1] = &x2 - &q;
        self.vecs[3 * t1 + 2] = vec_h2;
        self.vstart[3 * t1] = v_x0;
        self.vstart[3 * t1 + 1] = v_q;
        self.vstart[3 * t1 + 2] = v_x2;
        self.twin[3 * t1] = relocate(tw_k1);
        self.sign[3 * t1] = sg_k1 * s;
        self.twin[3 * t1 + 1] = 3 * t2 + 2;
        self.sign[3 * t1 + 1] = 1;
        self.twin[3 * t1 + 2] = relocate(tw_h2);
        self.sign[3 * t1 + 2] = sg_h2;

        // Triangle B = (Q, X1, X2) on t2's slots, in the same developing
        // frame as A: Q->X1 = -(X1->X2) - (X2->Q).
        let vec_x2_to_q = -&self.vecs[3 * t1 + 1];
        let vec_q_to_x1 = -&(&vec_h1 + &vec_x2_to_q);
        self.vecs[3 * t2] = vec_q_to_x1;
        self.vecs[3 * t2 + 1] = vec_h1;
        self.vecs[3 * t2 + 2] = vec_x2_to_q;
        self.vstart[3 * t2] = v_q;
        self.vstart[3 * t2 + 1] = v_x1;
        self.vstart[3 * t2 + 2] = v_x2;
        self.twin[3 * t2] = relocate(tw_k2);
        self.sign[3 * t2] = sg_k2 * s;
        self.twin[3 * t2 + 1] = relocate(tw_h1);
        self.sign[3 * t2 + 1] = sg_h1;
        self.twin[3 * t2 + 2] = 3 * t1 + 1;
        self.sign[3 * t2 + 2] = 1;

        // Fix back-pointers of the outer partners (after relocation they may
        // themselves be one of the slots just rewritten).
        for (new_slot, old_partner, sg) in [
            (3 * t1, tw_k1, sg_k1 * s),
            (3 * t1 + 2, tw_h2, sg_h2),
            (3 * t2, tw_k2, sg_k2 * s),
            (3 * t2 + 1, tw_h1, sg_h1),
        ] {
            let p = relocate(old_partner);
            self.twin[p] = new_slot;
            self.sign[p] = sg;
        }

        self.embedding = None;
        debug_assert!(self.check_consistency());
    }

    /// Flip saturation. Returns the number of flips performed.
    pub fn make_delaunay(&mut self) -> usize {
        let mut flips = 0usize;
        let budget = 1_000_000usize;
        let mut queue: Vec<usize> = (0..self.n_halfedges()).collect();
        let mut in_queue = vec![true; self.n_halfedges()];
        while let Some(h) = queue.pop() {
            in_queue[h] = false;
            if tri_of(self.twin[h]) == tri_of(h) {
                continue;
            }
            if !self.edge_needs_flip(h) {
                continue;
            }
            self.flip(h);
            flips += 1;
            assert!(flips < budget, "Delaunay flip budget exceeded");
            let t1 = tri_of(h);
            let t2 = tri_of(self.twin[3 * t1 + 1]);
            for e in [
                3 * t1,
                3 * t1 + 1,
                3 * t1 + 2,
                3 * t2,
                3 * t2 + 1,
                3 * t2 + 2,
            ] {
                if !in_queue[e] {
                    in_queue[e] = true;
                    queue.push(e);
                }
            }
        }
        self.delaunay = true;
        flips
    }

    /// Count the interior edges failing the strict empty-circumcircle test.
    pub fn count_non_delaunay(&self) -> usize {
        (0..self.n_halfedges())
            .filter(|&h| h < self.twin[h])
            .filter(|&h| tri_of(self.twin[h]) != tri_of(h) && self.edge_needs_flip(h))
            .count()
    }

    /// Structural invariants: twins are involutive with matching vectors and
    /// signs, triangles close up and are positively oriented, vertex classes
    /// agree across identifications.
    pub fn check_consistency(&self) -> bool {
        for t in 0..self.n_triangles() {
            let sum = &(&self.vecs[3 * t] + &self.vecs[3 * t + 1]) + &self.vecs[3 * t + 2];
            if !sum.is_zero() {
                return false;
            }
            if !self.vecs[3 * t].cross(&self.vecs[3 * t + 1]).is_positive() {
                return false;
            }
        }
        for h in 0..self.n_halfedges() {
            let tw = self.twin[h];
            if self.twin[tw] != h || self.sign[tw] != self.sign[h] {
                return false;
            }
            let expected = if self.sign[h] == 1 {
                -&self.vecs[h]
            } else {
                self.vecs[h].clone()
            };
            if self.vecs[tw] != expected {
                return false;
            }
            if self.vstart[next_he(h)] != self.vstart[tw] {
                return false;
            }
        }
        true
    }

    /// Squared length of the shortest triangulation edge.
    pub fn min_edge_sq(&self) -> Rat {
        (0..self.n_halfedges())
            .map(|h| self.vecs[h].norm_sq())
            .min()
            .expect("nonempty triangulation")
    }
}

/// Ear-clip one polygon (given by its vertex loop). Returns triangles as
/// corner-index triples, ccw.
fn ear_clip(vertices: &[Vec2]) -> Vec<[usize; 3]> {
    let n = vertices.len();
    assert!(n >= 3);
    let mut alive: Vec<usize> = (0..n).collect();
    let mut triangles = Vec::with_capacity(n - 2);
    let orient = |a: &Vec2, b: &Vec2, c: &Vec2| (b - a).cross(&(c - a));
    while alive.len() > 3 {
        let m = alive.len();
        let mut clipped = false;
        for i in 0..m {
            let ia = alive[(i + m - 1) % m];
            let ib = alive[i];
            let ic = alive[(i + 1) % m];
            let (a, b, c) = (&vertices[ia], &vertices[ib], &vertices[ic]);
            if !orient(a, b, c).is_positive() {
                continue;
            }
            let mut ok = true;
            for &iw in &alive {
                if iw == ia || iw == ib || iw == ic {
                    continue;
                }
                let w = &vertices[iw];
                if !orient(a, b, w).is_negative()
                    && !orient(b, c, w).is_negative()
                    && !orient(c, a, w).is_negative()
                {
                    ok = false;
                    break;
                }
            }
            if ok {
                triangles.push([ia, ib, ic]);
                alive.remove(i);
                clipped = true;
                break;
            }
        }
        assert!(clipped, "ear clipping failed on a simple polygon");
    }
    triangles.push([alive[0], alive[1], alive[2]]);
    triangles
}

/// Build the base triangulation of a surface: ear-clip every polygon, pair
/// interior diagonals, and wire boundary halfedges through the gluings.
pub fn triangulate(surface: &HalfTranslationSurface) -> Triangulation {
    let mut vecs: Vec<Vec2> = Vec::new();
    let mut vstart: Vec<usize> = Vec::new();
    let mut tri_polygon: Vec<usize> = Vec::new();
    let mut tri_corner_pos: Vec<[Vec2; 3]> = Vec::new();
    // (polygon, corner_from, corner_to) -> halfedge, for twin wiring.
    let mut seg_to_he: HashMap<(usize, usize, usize), usize> = HashMap::new();

    for (p, poly) in surface.polygons.iter().enumerate() {
        let tris = ear_clip(&poly.vertices);
        for tri in tris {
            let t = vecs.len() / 3;
            tri_polygon.push(p);
            tri_corner_pos.push([
                poly.vertices[tri[0]].clone(),
                poly.vertices[tri[1]].clone(),
                poly.vertices[tri[2]].clone(),
            ]);
            for k in 0..3 {
                let from = tri[k];
                let to = tri[(k + 1) % 3];
                vecs.push(&poly.vertices[to] - &poly.vertices[from]);
                vstart.push(surface.class_of_corner((p, from)));
                seg_to_he.insert((p, from, to), 3 * t + k);
            }
        }
    }

    let n_he = vecs.len();
    let mut twin = vec![usize::MAX; n_he];
    let mut sign = vec![0i8; n_he];

    // Interior diagonals: both (p, a, b) and (p, b, a) are present.
    for (&(p, a, b), &h) in &seg_to_he {
        if let Some(&h2) = seg_to_he.get(&(p, b, a)) {
            twin[h] = h2;
            sign[h] = 1;
        }
    }
    // Boundary edges through gluings. Polygon edge i runs corner i -> i+1.
    for g in &surface.gluings {
        let (p, i) = g.a;
        let (q, j) = g.b;
        let np = surface.polygons[p].len();
        let nq = surface.polygons[q].len();
        let ha = seg_to_he[&(p, i, (i + 1) % np)];
        let hb = seg_to_he[&(q, j, (j + 1) % nq)];
        twin[ha] = hb;
        twin[hb] = ha;
        sign[ha] = g.sign;
        sign[hb] = g.sign;
    }
    assert!(
        twin.iter().all(|&t| t != usize::MAX),
        "unpaired halfedge after wiring"
    );

    let vertex_info = surface
        .vertex_classes
        .iter()
        .map(|c| VertexInfo {
            angle_pi: c.angle_pi,
            marked: c.marked,
        })
        .collect();

    let tri = Triangulation {
        vecs,
        twin,
        sign,
        vstart,
        vertex_info,
        delaunay: false,
        embedding: Some(Embedding {
            tri_polygon,
            tri_corner_pos,
        }),
        area: surface.area.clone(),
    };
    assert!(tri.check_consistency(), "inconsistent base triangulation");
    debug_assert_eq!(tri_area_sum(&tri), surface.area);
    tri
}

/// Delaunay triangulation: base triangulation followed by flip saturation.
/// Returns the triangulation and the number of flips performed.
pub fn triangulate_delaunay(surface: &HalfTranslationSurface) -> (Triangulation, usize) {
    let mut t = triangulate(surface);
    let flips = t.make_delaunay();
    (t, flips)
}

pub fn tri_area_sum(t: &Triangulation) -> Rat {
    let two = Rat::from_integer(2.into());
    (0..t.n_triangles())
        .map(|i| t.vecs[3 * i].cross(&t.vecs[3 * i + 1]) / &two)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{l_shape, torus};
    use crate::num::rat_int;

    #[test]
    fn torus_two_triangles() {
        let s = torus();
        let t = triangulate(&s);
        assert_eq!(t.n_triangles(), 2);
        assert_eq!(t.n_edges(), 3);
        assert_eq!(t.n_vertices(), 1);
        assert_eq!(tri_area_sum(&t), rat_int(1));
        assert!(t.check_consistency());
    }

    #[test]
    fn l_shape_counts() {
        let s = l_shape();
        let t = triangulate(&s);
        assert_eq!(t.n_triangles(), 6);
        assert_eq!(t.n_edges(), 9);
        assert_eq!(t.n_vertices(), 1);
        // chi = V - E + F = 1 - 9 + 6 = -2 = 2 - 2g.
        assert_eq!(tri_area_sum(&t), rat_int(3));
    }

    #[test]
    fn delaunay_idempotent() {
        for s in [torus(), l_shape()] {
            let (mut t, _) = triangulate_delaunay(&s);
            assert_eq!(t.count_non_delaunay(), 0);
            let again = t.make_delaunay();
            assert_eq!(again, 0, "re-running flips must be a fixed point");
            assert!(t.check_consistency());
        }
    }

    #[test]
    fn area_preserved_by_flips() {
        let s = l_shape();
        let (t, _) = triangulate_delaunay(&s);
        assert_eq!(tri_area_sum(&t), rat_int(3));
    }
}
