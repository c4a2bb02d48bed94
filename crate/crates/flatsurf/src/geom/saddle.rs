//! Saddle connection enumeration by sector search, and the systole as the
//! shortest legal closed concatenation of saddle connections.
//!
//! From every triangle corner, triangles are unfolded into the plane with
//! the corner's vertex at the origin; each search state carries a half-open
//! angular sector and the developed edge it must cross next. Pruning is by
//! the exact squared distance from the origin to the sector-clipped edge.

use crate::geom::triangulation::{next_he, prev_he, Triangulation};
use crate::geom::turning::AngleAccumulator;
use crate::geom::{HalfTranslation, Vec2};
use crate::num::{rat_to_f64, Rat};
use num_traits::{Signed, Zero};
use std::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SaddleError {
    #[error("saddle connection search budget exceeded")]
    BudgetExceeded,
    #[error("no essential closed geodesic found")]
    NoClosedGeodesic,
}

/// An unoriented saddle connection, stored in its canonical orientation.
#[derive(Clone, Debug)]
pub struct SaddleConnection {
    /// Corner halfedge whose wedge contains the outgoing direction.
    pub start_corner: usize,
    /// Displacement in the chart of the start corner's triangle.
    pub displacement: Vec2,
    /// Corner halfedge at the arrival vertex containing the return ray.
    pub end_corner: usize,
    /// Return displacement in the end corner's chart.
    pub rev_displacement: Vec2,
    pub length_sq: Rat,
}

impl SaddleConnection {
    pub fn start_vertex(&self, tri: &Triangulation) -> usize {
        tri.vstart[self.start_corner]
    }
    pub fn end_vertex(&self, tri: &Triangulation) -> usize {
        tri.vstart[self.end_corner]
    }
    pub fn length(&self) -> f64 {
        rat_to_f64(&self.length_sq).sqrt()
    }
}

fn vec_cmp(a: &Vec2, b: &Vec2) -> Ordering {
    a.x.cmp(&b.x).then_with(|| a.y.cmp(&b.y))
}

struct Sector {
    a: Vec2,
    a_closed: bool,
    b: Vec2,
}

impl Sector {
    fn contains(&self, d: &Vec2) -> bool {
        let ca = self.a.cross(d);
        let cb = d.cross(&self.b);
        if ca.is_positive() && cb.is_positive() {
            return true;
        }
        if self.a_closed && ca.is_zero() && self.a.dot(d).is_positive() && cb.is_positive() {
            return true;
        }
        false
    }

    fn is_empty(&self) -> bool {
        let c = self.a.cross(&self.b);
        if c.is_positive() {
            return false;
        }
        // Parallel bounds: nonempty only if closed at `a` (a single ray),
        // which we treat as empty for further crossing purposes.
        true
    }
}

struct State {
    cross_he: usize,
    place: HalfTranslation,
    sector: Sector,
}

/// Minimal squared distance from the origin to the part of segment [p, q]
/// with direction inside the sector.
fn clipped_min_dist_sq(p: &Vec2, q: &Vec2, sec: &Sector) -> Option<Rat> {
    // Clip parameters along the segment for each boundary ray.
    let seg = q - p;
    let mut t_lo = Rat::zero();
    let mut t_hi = Rat::from_integer(1.into());
    // Ray a: points with cross(a, x) >= 0 are on or ccw of a.
    let ca_p = sec.a.cross(p);
    let ca_q = sec.a.cross(q);
    if ca_p.is_negative() || ca_q.is_negative() {
        let denom = &ca_p - &ca_q;
        if !denom.is_zero() {
            let t = &ca_p / &denom;
            if ca_p.is_negative() {
                t_lo = t_lo.max(t);
            } else {
                t_hi = t_hi.min(t);
            }
        } else if ca_p.is_negative() {
            return None;
        }
    }
    // Ray b: need cross(x, b) >= 0, i.e. cross(b, x) <= 0.
    let cb_p = sec.b.cross(p);
    let cb_q = sec.b.cross(q);
    if cb_p.is_positive() || cb_q.is_positive() {
        let denom = &cb_p - &cb_q;
        if !denom.is_zero() {
            let t = &cb_p / &denom;
            if cb_p.is_positive() {
                t_lo = t_lo.max(t);
            } else {
                t_hi = t_hi.min(t);
            }
        } else if cb_p.is_positive() {
            return None;
        }
    }
    if t_lo > t_hi {
        return None;
    }
    let x_lo = p + &seg.scale(&t_lo);
    let x_hi = p + &seg.scale(&t_hi);
    let mut best = x_lo.norm_sq().min(x_hi.norm_sq());
    // Perpendicular foot into the clipped range.
    let seg_sq = seg.norm_sq();
    if !seg_sq.is_zero() {
        let t_foot = -&p.dot(&seg) / &seg_sq;
        if t_foot > t_lo && t_foot < t_hi {
            let x = p + &seg.scale(&t_foot);
            best = best.min(x.norm_sq());
        }
    }
    Some(best)
}

/// Locate the corner wedge at a vertex containing direction `d`, starting
/// the star walk from `corner_hint` (whose chart `d` is expressed in).
/// Returns the corner halfedge and `d` transported into its chart.
pub fn wedge_at(tri: &Triangulation, corner_hint: usize, d: &Vec2) -> (usize, Vec2) {
    let mut corner = corner_hint;
    let mut dir = d.clone();
    for _ in 0..256 {
        let ray1 = &tri.vecs[corner];
        let ray2 = -&tri.vecs[prev_he(corner)];
        let c1 = ray1.cross(&dir);
        let c2 = dir.cross(&ray2);
        let on_ray1 = c1.is_zero() && ray1.dot(&dir).is_positive();
        if (c1.is_positive() && c2.is_positive()) || on_ray1 {
            return (corner, dir);
        }
        let t_next = tri.twin[prev_he(corner)];
        let g = tri.transition_into(t_next);
        dir = g.apply_vec(&dir);
        corner = t_next;
    }
    panic!("wedge walk did not terminate");
}

/// All unoriented saddle connections of length <= sqrt(l_sq_bound), each
/// once, sorted by squared length then canonical key.
pub fn saddle_connections(
    tri: &Triangulation,
    l_sq_bound: &Rat,
    node_budget: usize,
) -> Result<Vec<SaddleConnection>, SaddleError> {
    let mut found: Vec<SaddleConnection> = Vec::new();
    let mut nodes = 0usize;

    for root in 0..tri.n_halfedges() {
        // Root corner: vertex at start(root), wedge [vecs[root], -vecs[prev]).
        let a = tri.vecs[root].clone();
        let b = -&tri.vecs[prev_he(root)];
        // The triangulation edge along `a` is itself a saddle connection.
        let edge_sq = a.norm_sq();
        if edge_sq <= *l_sq_bound {
            let rev = &tri.vecs[tri.twin[root]];
            let (end_corner, rev_d) = wedge_at(tri, tri.twin[root], rev);
            record(
                &mut found,
                SaddleConnection {
                    start_corner: root,
                    displacement: a.clone(),
                    end_corner,
                    rev_displacement: rev_d,
                    length_sq: edge_sq,
                },
            );
        }
        // Initial state: cross the opposite edge of the root triangle, in
        // the chart translated so the root vertex is at the origin. The
        // sector is open along the edge direction: the edge's far endpoint
        // blocks that ray, and the edge itself was recorded above.
        let base = HalfTranslation::new(1, -&tri.corner_pos(root));
        let mut stack = vec![State {
            cross_he: next_he(root),
            place: base,
            sector: Sector {
                a,
                a_closed: false,
                b,
            },
        }];
        while let Some(st) = stack.pop() {
            nodes += 1;
            if nodes > node_budget {
                return Err(SaddleError::BudgetExceeded);
            }
            if st.sector.is_empty() {
                continue;
            }
            let e = st.cross_he;
            let p = st.place.apply(&tri.corner_pos(e));
            let q = st.place.apply(&tri.corner_pos(next_he(e)));
            match clipped_min_dist_sq(&p, &q, &st.sector) {
                Some(d2) if d2 <= *l_sq_bound => {}
                _ => continue,
            }
            // Unfold across e.
            let tw = tri.twin[e];
            let g = tri.transition_into(e).inverse();
            // transition_into(e): chart(tri(tw)) -> chart(tri(e)); we walk
            // outward from tri(e) into tri(tw), so compose the forward map.
            let g_fwd = tri.transition_into(e);
            let place2 = st.place.compose(&g_fwd);
            let _ = g;
            let apex_corner = prev_he(tw);
            let w = place2.apply(&tri.corner_pos(apex_corner));
            let w_sq = w.norm_sq();
            if st.sector.contains(&w) && w_sq <= *l_sq_bound && !w.is_zero() {
                // Reverse identity: return ray in the apex corner's chart.
                let back = place2.inverse().apply_vec(&(-&w));
                let (end_corner, rev_d) = wedge_at(tri, apex_corner, &back);
                record(
                    &mut found,
                    SaddleConnection {
                        start_corner: root,
                        displacement: w.clone(),
                        end_corner,
                        rev_displacement: rev_d,
                        length_sq: w_sq,
                    },
                );
            }
            // Split the sector at the apex direction.
            let left = Sector {
                a: st.sector.a.clone(),
                a_closed: st.sector.a_closed,
                b: w.clone(),
            };
            let right = Sector {
                a: w.clone(),
                a_closed: false,
                b: st.sector.b.clone(),
            };
            // Left sub-edge P -> apex is next(tw); right is prev(tw).
            let clip = |s: &Sector| -> Sector {
                // Intersect with the original sector bounds.
                let mut a = s.a.clone();
                let mut a_closed = s.a_closed;
                if st.sector.a.cross(&a).is_negative() {
                    a = st.sector.a.clone();
                    a_closed = st.sector.a_closed;
                }
                let mut b = s.b.clone();
                if b.cross(&st.sector.b).is_negative() {
                    b = st.sector.b.clone();
                }
                Sector { a, a_closed, b }
            };
            stack.push(State {
                cross_he: next_he(tw),
                place: place2.clone(),
                sector: clip(&left),
            });
            stack.push(State {
                cross_he: prev_he(tw),
                place: place2,
                sector: clip(&right),
            });
        }
    }

    found.sort_by(|x, y| {
        x.length_sq
            .cmp(&y.length_sq)
            .then_with(|| x.start_corner.cmp(&y.start_corner))
            .then_with(|| vec_cmp(&x.displacement, &y.displacement))
    });
    Ok(found)
}

/// Keep only the canonical orientation of each unoriented connection.
fn record(found: &mut Vec<SaddleConnection>, sc: SaddleConnection) {
    let self_key = (sc.start_corner, sc.displacement.clone());
    let rev_key = (sc.end_corner, sc.rev_displacement.clone());
    let keep = match self_key.0.cmp(&rev_key.0) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => match vec_cmp(&self_key.1, &rev_key.1) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => {
                unreachable!("a saddle connection cannot be its own reverse")
            }
        },
    };
    if keep {
        found.push(sc);
    }
}

/// Counterclockwise angle from link point (corner1, dir1) to (corner2,
/// dir2) around their common vertex.
pub fn link_angle_pub(
    tri: &Triangulation,
    corner1: usize,
    dir1: &Vec2,
    corner2: usize,
    dir2: &Vec2,
) -> AngleAccumulator {
    link_angle(tri, corner1, dir1, corner2, dir2)
}

fn link_angle(
    tri: &Triangulation,
    corner1: usize,
    dir1: &Vec2,
    corner2: usize,
    dir2: &Vec2,
) -> AngleAccumulator {
    debug_assert_eq!(tri.vstart[corner1], tri.vstart[corner2]);
    let mut acc = AngleAccumulator::new();
    if corner1 == corner2 {
        let c = dir1.cross(dir2);
        if c.is_positive() || (c.is_zero() && !dir1.dot(dir2).is_positive()) {
            acc.add_corner(dir1, dir2);
            return acc;
        }
        if c.is_zero() && dir1.dot(dir2).is_positive() {
            return acc; // same ray: zero angle
        }
        // dir2 is cw of dir1 within the same wedge: go all the way around.
    }
    // Walk ccw from corner1 to corner2.
    let mut corner = corner1;
    let mut prev_ray = dir1.clone();
    for _ in 0..512 {
        // Angle to the end of this wedge.
        let ray2 = -&tri.vecs[prev_he(corner)];
        let cross = prev_ray.cross(&ray2);
        if !(cross.is_zero() && prev_ray.dot(&ray2).is_positive()) {
            acc.add_corner(&prev_ray, &ray2);
        }
        // Step ccw.
        let nxt = tri.twin[prev_he(corner)];
        let g = tri.transition_into(nxt);
        let ray_in_next = g.apply_vec(&ray2);
        corner = nxt;
        prev_ray = ray_in_next;
        if corner == corner2 {
            let cross = prev_ray.cross(dir2);
            if !(cross.is_zero() && prev_ray.dot(dir2).is_positive()) {
                acc.add_corner(&prev_ray, dir2);
            }
            return acc;
        }
    }
    panic!("link walk did not terminate");
}

/// Shortest essential closed flat geodesic: the minimum-length closed walk
/// in the saddle-connection graph whose junction angles are >= pi on both
/// sides. Returns the length.
pub fn systole(tri: &Triangulation, node_budget: usize) -> Result<f64, SaddleError> {
    let mut bound_sq = tri.min_edge_sq();
    for _ in 0..24 {
        let scs = saddle_connections(tri, &bound_sq, node_budget)?;
        if let Some(best) = shortest_closed_concat(tri, &scs) {
            // Certified if every connection of a shorter geodesic is within
            // the enumerated bound.
            if best * best <= rat_to_f64(&bound_sq) + 1e-12 {
                return Ok(best);
            }
            // Re-enumerate up to the found length and redo.
            bound_sq = crate::num::rat_from_f64(best * best * 1.0000001).unwrap();
            let scs = saddle_connections(tri, &bound_sq, node_budget)?;
            if let Some(best2) = shortest_closed_concat(tri, &scs) {
                return Ok(best2);
            }
        }
        bound_sq = bound_sq * Rat::from_integer(4.into());
    }
    Err(SaddleError::NoClosedGeodesic)
}

/// Oriented copies of each connection with legal-junction adjacency.
fn shortest_closed_concat(tri: &Triangulation, scs: &[SaddleConnection]) -> Option<f64> {
    // Oriented connection i in {0..2n}: even = canonical, odd = reversed.
    let n = scs.len();
    if n == 0 {
        return None;
    }
    let start_of = |i: usize| {
        let sc = &scs[i / 2];
        if i % 2 == 0 {
            (sc.start_corner, sc.displacement.clone())
        } else {
            (sc.end_corner, sc.rev_displacement.clone())
        }
    };
    let end_of = |i: usize| {
        let sc = &scs[i / 2];
        if i % 2 == 0 {
            (sc.end_corner, sc.rev_displacement.clone())
        } else {
            (sc.start_corner, sc.displacement.clone())
        }
    };
    let len_of = |i: usize| scs[i / 2].length();

    // Adjacency: end of i meets start of j at the same vertex with both
    // link arcs >= pi.
    let m = 2 * n;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); m];
    for i in 0..m {
        let (ec, ed) = end_of(i);
        let ev = tri.vstart[ec];
        let theta = tri.vertex_info[ev].angle_pi;
        for j in 0..m {
            let (sc_corner, sd) = start_of(j);
            if tri.vstart[sc_corner] != ev {
                continue;
            }
            // ccw angle from the return ray of i to the outgoing ray of j
            // must lie in [pi, (theta-1) pi].
            let acc = link_angle(tri, ec, &ed, sc_corner, &sd);
            let lo = acc.cmp_pi_multiple(1) != Ordering::Less;
            let hi = acc.cmp_pi_multiple(theta - 1) != Ordering::Greater;
            if lo && hi {
                adj[i].push(j);
            }
        }
    }

    // Shortest closed walk: Dijkstra from each oriented connection back to
    // itself (the walk i -> ... -> i includes i's own length once).
    let mut best: Option<f64> = None;
    for s in 0..m {
        // dist[j] = shortest (sum of lengths, counting each connection as it
        // is entered) walk starting by traversing s, then jumps, ending
        // ready to re-enter j.
        let mut dist = vec![f64::INFINITY; m];
        let mut heap = std::collections::BinaryHeap::new();
        #[derive(PartialEq)]
        struct Item(f64, usize);
        impl Eq for Item {}
        impl Ord for Item {
            fn cmp(&self, other: &Self) -> Ordering {
                other.0.partial_cmp(&self.0).unwrap_or(Ordering::Equal)
            }
        }
        impl PartialOrd for Item {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }
        dist[s] = len_of(s);
        heap.push(Item(dist[s], s));
        while let Some(Item(d, i)) = heap.pop() {
            if d > dist[i] {
                continue;
            }
            if let Some(b) = best {
                if d >= b {
                    break;
                }
            }
            for &j in &adj[i] {
                if j == s {
                    let total = d;
                    if best.map_or(true, |b| total < b) {
                        best = Some(total);
                    }
                    continue;
                }
                let nd = d + len_of(j);
                if nd < dist[j] {
                    dist[j] = nd;
                    heap.push(Item(nd, j));
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{l_shape, torus};
    use crate::geom::triangulation::triangulate;
    use crate::num::rat_int;

    #[test]
    fn torus_saddle_connections_are_primitive_vectors() {
        let s = torus();
        let tri = triangulate(&s);
        // Up to length sqrt(5): vectors (+-1,0),(0,+-1),(+-1,+-1),(2,1)...
        let scs = saddle_connections(&tri, &rat_int(5), 1_000_000).unwrap();
        // Primitive vectors with norm^2 <= 5, up to sign: (1,0),(0,1),
        // (1,1),(1,-1),(2,1),(2,-1),(1,2),(1,-2) = 8.
        assert_eq!(scs.len(), 8);
        let mut lens: Vec<i64> = scs
            .iter()
            .map(|s| {
                use num_traits::ToPrimitive;
                s.length_sq.to_integer().to_i64().unwrap()
            })
            .collect();
        lens.sort();
        assert_eq!(lens, vec![1, 1, 2, 2, 5, 5, 5, 5]);
    }

    #[test]
    fn l_shape_unit_saddles() {
        let s = l_shape();
        let tri = triangulate(&s);
        let scs = saddle_connections(&tri, &rat_int(1), 1_000_000).unwrap();
        // All unit-length connections run along horizontal/vertical unit
        // edges of the square tiling. Oracle count: each of the three
        // squares contributes one horizontal and one vertical edge on the
        // glued surface (tops and rights are identified away), giving 6.
        assert_eq!(scs.len(), 6);
        assert!(scs.iter().all(|c| c.length_sq == rat_int(1)));
        // 3 horizontal + 3 vertical.
        let horiz = scs
            .iter()
            .filter(|c| c.displacement.y.is_zero())
            .count();
        assert_eq!(horiz, 3);
    }

    #[test]
    fn monotone_in_bound() {
        let s = l_shape();
        let tri = triangulate(&s);
        let small = saddle_connections(&tri, &rat_int(1), 1_000_000).unwrap();
        let large = saddle_connections(&tri, &rat_int(4), 1_000_000).unwrap();
        assert!(large.len() >= small.len());
        // Every short one is still present.
        for sc in &small {
            assert!(large.iter().any(|c| c.start_corner == sc.start_corner
                && c.displacement == sc.displacement));
        }
    }

    #[test]
    fn systole_values() {
        let t = triangulate(&torus());
        assert!((systole(&t, 1_000_000).unwrap() - 1.0).abs() < 1e-9);
        let l = triangulate(&l_shape());
        assert!((systole(&l, 1_000_000).unwrap() - 1.0).abs() < 1e-9);
    }
}
