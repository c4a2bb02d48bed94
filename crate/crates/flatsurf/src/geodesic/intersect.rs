//! Geometric intersection numbers of simple closed curves, from tightened
//! representatives with symbolic resolution at shared cone points.

use crate::geodesic::segments::{rep_segments, TriSegment};
use crate::geodesic::strip::Side;
use crate::geodesic::tighten::{GeodesicRep, TightenError, Tightener};
use crate::geodesic::curve::CurveClass;
use crate::geom::triangulation::{next_he, Triangulation};
use crate::geom::turning::AngleAccumulator;
use crate::geom::Vec2;
use crate::num::Rat;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IntersectError {
    #[error("tightening failed: {0}")]
    Tighten(#[from] TightenError),
    #[error("representatives share a segment; not supported for this pair")]
    SharedSegment,
}

/// A pass of a representative through a cone point: the two rays at the
/// vertex, each as (corner halfedge, direction in its chart).
#[derive(Clone, Debug)]
struct ConePass {
    out_corner: usize,
    out_dir: Vec2,
    back_corner: usize,
    back_dir: Vec2,
}

fn cone_passes(tri: &Triangulation, rep: &GeodesicRep) -> Vec<ConePass> {
    use crate::geodesic::strip::Strip;
    use crate::geom::saddle::wedge_at;
    if rep.is_cylinder_core {
        return Vec::new();
    }
    let strip = Strip::unfold(tri, &rep.word);
    let n = strip.word.len();
    let g_inv = rep.holonomy.inverse();
    let m = rep.pivots.len();
    let mut passes = Vec::new();
    for (i, piv) in rep.pivots.iter().enumerate() {
        // Chord directions at this pivot (base chart; the anchor pivot is
        // stored at its holonomy image, so both neighbors exist).
        let prev_pos = if i == 0 {
            rep.pivots[m - 1].pos.clone()
        } else if i == 1 {
            g_inv.apply(&rep.pivots[0].pos)
        } else {
            rep.pivots[i - 1].pos.clone()
        };
        let next_pos = if i == m - 1 && m > 1 {
            rep.pivots[0].pos.clone()
        } else if m == 1 {
            rep.holonomy.apply(&piv.pos)
        } else {
            rep.pivots[i + 1].pos.clone()
        };
        let d_in = &piv.pos - &prev_pos;
        let d_out = &next_pos - &piv.pos;
        // Corner halfedge of the pivot occurrence: portal run_lo has this
        // endpoint; the corner is the start (left) or end (right) of the
        // crossed halfedge.
        let he = strip.word[(piv.run_lo + 1) % n];
        let corner = match piv.side {
            Side::Left => he,
            Side::Right => next_he(he),
        };
        // Transport directions into the corner's chart: the portal fan was
        // placed by placement of S_{ext_idx+1}; map base vectors back.
        let place = if piv.run_lo + 1 < n {
            strip.placements[piv.run_lo + 1].clone()
        } else {
            let j = piv.run_lo + 1 - n;
            strip.holonomy.compose(&strip.placements[j % n])
        };
        let inv = place.inverse();
        let out_local = inv.apply_vec(&d_out);
        let back_local = inv.apply_vec(&(-&d_in));
        let (oc, od) = wedge_at(tri, corner, &out_local);
        let (bc, bd) = wedge_at(tri, corner, &back_local);
        passes.push(ConePass {
            out_corner: oc,
            out_dir: od,
            back_corner: bc,
            back_dir: bd,
        });
    }
    passes
}

/// Accumulated ccw angle from link point 1 to link point 2 around their
/// common vertex, as a comparison against the full angle: returns a value
/// in [0, theta*pi).
fn link_position(
    tri: &Triangulation,
    ref_corner: usize,
    ref_dir: &Vec2,
    corner: usize,
    dir: &Vec2,
) -> AngleAccumulator {
    // Reuse the saddle module's walk by building it inline: ccw from
    // (ref_corner, ref_dir) to (corner, dir).
    crate::geom::saddle::link_angle_pub(tri, ref_corner, ref_dir, corner, dir)
}

/// Do two secants of the vertex link circle interleave?
fn passes_cross(tri: &Triangulation, a: &ConePass, b: &ConePass) -> bool {
    // Positions of a.back (reference 0), a.out, b.out, b.back around the
    // circle; b's points must separate {0, pos(a.out)}.
    let pa = link_position(tri, a.back_corner, &a.back_dir, a.out_corner, &a.out_dir);
    let p1 = link_position(tri, a.back_corner, &a.back_dir, b.out_corner, &b.out_dir);
    let p2 = link_position(tri, a.back_corner, &a.back_dir, b.back_corner, &b.back_dir);
    // Interleave iff exactly one of p1, p2 lies strictly inside (0, pa).
    let inside = |p: &AngleAccumulator| -> bool {
        // 0 < p < pa, exact: compare accumulated angles.
        cmp_acc(p, &AngleAccumulator::new()) == Ordering::Greater
            && cmp_acc(p, &pa) == Ordering::Less
    };
    inside(&p1) != inside(&p2)
}

fn cmp_acc(a: &AngleAccumulator, b: &AngleAccumulator) -> Ordering {
    // Compare two accumulated angles exactly: both are half_turn counts
    // plus residual args in [0, pi). Compare counts then residuals.
    a.cmp_accumulated(b)
}

/// Proper crossing test for two exact segments in a common triangle chart.
/// Returns the crossing point when the interiors cross transversally (the
/// point may lie on segment endpoints only if those endpoints are interior
/// to the other segment), `Overlap` for collinear overlap, `None` otherwise.
enum SegCross {
    None,
    /// Transversal crossing with parameters along both segments.
    Proper(Rat, Rat, Vec2),
    /// Meeting exactly at endpoints of both segments (portal cut points or
    /// cone points; the caller distinguishes).
    MutualEndpoint(Rat, Rat, Vec2),
    Overlap,
}

fn seg_cross(a1: &Vec2, a2: &Vec2, b1: &Vec2, b2: &Vec2) -> SegCross {
    let da = a2 - a1;
    let db = b2 - b1;
    let denom = da.cross(&db);
    if denom.is_zero() {
        // Parallel: overlap iff collinear with overlapping open spans.
        if da.cross(&(b1 - a1)).is_zero() {
            let t1 = da.dot(&(b1 - a1));
            let t2 = da.dot(&(b2 - a1));
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            let len = da.norm_sq();
            if hi.is_positive() && lo < len {
                return SegCross::Overlap;
            }
        }
        return SegCross::None;
    }
    // a1 + s da = b1 + t db.
    let w = b1 - a1;
    let s = w.cross(&db) / &denom;
    let t = w.cross(&da) / &denom;
    let zero = Rat::zero();
    let one = Rat::from_integer(1.into());
    if s < zero || s > one || t < zero || t > one {
        return SegCross::None;
    }
    let at_a_end = s == zero || s == one;
    let at_b_end = t == zero || t == one;
    let p = a1 + &da.scale(&s);
    if at_a_end && at_b_end {
        return SegCross::MutualEndpoint(s, t, p);
    }
    SegCross::Proper(s, t, p)
}

/// Geometric intersection number of two simple classes from their
/// representatives. Crossings are identified by their exact arc parameters
/// along both representatives, so coincident crossing points (triple points
/// and crossings on triangulation edges) are counted correctly.
pub fn intersection_of_reps(
    tri: &Triangulation,
    rep1: &GeodesicRep,
    rep2: &GeodesicRep,
) -> Result<u64, IntersectError> {
    if reps_equal(rep1, rep2) {
        return Ok(0);
    }
    let segs1 = rep_segments(tri, rep1);

    // When one side is a core line, re-anchor it until every contact with
    // the other side is a proper transversal crossing; generic corridor
    // offsets avoid all degenerate coincidences.
    let (segs2, swapped) = if rep2.is_cylinder_core {
        (generic_core_segments(tri, &segs1, rep2)?, false)
    } else if rep1.is_cylinder_core {
        (generic_core_segments(tri, &segs2_of(tri, rep2), rep1)?, true)
    } else {
        (rep_segments(tri, rep2), false)
    };
    let (segs_a, segs_b) = if swapped {
        (rep_segments(tri, rep2), segs2)
    } else {
        (segs1, segs2)
    };

    count_crossings(tri, &segs_a, &segs_b).map(|transversal| {
        let mut count = transversal;
        // Shared cone points: resolved on the vertex link.
        let passes1 = cone_passes(tri, rep1);
        let passes2 = cone_passes(tri, rep2);
        for p1 in &passes1 {
            let v1 = tri.vstart[p1.out_corner];
            for p2 in &passes2 {
                if tri.vstart[p2.out_corner] != v1 {
                    continue;
                }
                if passes_cross(tri, p1, p2) {
                    count += 1;
                }
            }
        }
        count
    })
}

fn segs2_of(tri: &Triangulation, rep: &GeodesicRep) -> Vec<TriSegment> {
    rep_segments(tri, rep)
}

/// Normalized arc parameter: piece index plus an interior fraction; a hit at
/// a piece end is the start of the next piece.
fn norm_param(idx: usize, t: &Rat, len: usize) -> (usize, Rat) {
    if *t == Rat::from_integer(1.into()) {
        ((idx + 1) % len, Rat::zero())
    } else {
        (idx, t.clone())
    }
}

fn count_crossings(
    tri: &Triangulation,
    segs1: &[TriSegment],
    segs2: &[TriSegment],
) -> Result<u64, IntersectError> {
    let is_corner = |t: usize, p: &Vec2| -> bool {
        (0..3).any(|k| tri.corner_pos(3 * t + k) == *p)
    };
    let mut keys: Vec<((usize, Rat), (usize, Rat))> = Vec::new();
    for (i1, s1) in segs1.iter().enumerate() {
        for (i2, s2) in segs2.iter().enumerate() {
            if s1.tri != s2.tri {
                continue;
            }
            match seg_cross(&s1.a, &s1.b, &s2.a, &s2.b) {
                SegCross::None => {}
                SegCross::Overlap => return Err(IntersectError::SharedSegment),
                SegCross::Proper(s, t, _p) => {
                    keys.push((
                        norm_param(i1, &s, segs1.len()),
                        norm_param(i2, &t, segs2.len()),
                    ));
                }
                SegCross::MutualEndpoint(s, t, p) => {
                    if !is_corner(s1.tri, &p) {
                        keys.push((
                            norm_param(i1, &s, segs1.len()),
                            norm_param(i2, &t, segs2.len()),
                        ));
                    }
                }
            }
        }
    }
    keys.sort_by(|a, b| {
        a.0 .0
            .cmp(&b.0 .0)
            .then_with(|| a.0 .1.cmp(&b.0 .1))
            .then_with(|| a.1 .0.cmp(&b.1 .0))
            .then_with(|| a.1 .1.cmp(&b.1 .1))
    });
    keys.dedup();
    // Group by the parameter on rep1 alone: a crossing seen from both sides
    // of a triangulation edge yields two keys with equal rep1 parameters and
    // equal rep2 parameters, already deduped above. Distinct crossings have
    // distinct rep1 parameters unless rep1 passes twice through the same
    // point, which the rep2 parameter distinguishes.
    Ok(keys.len() as u64)
}

/// Core-line segments re-anchored until all contacts with `other` are
/// proper interior crossings.
fn generic_core_segments(
    tri: &Triangulation,
    other: &[TriSegment],
    core: &GeodesicRep,
) -> Result<Vec<TriSegment>, IntersectError> {
    let clean = |segs: &[TriSegment]| -> bool {
        for s1 in other {
            for s2 in segs.iter().filter(|s| s.tri == s1.tri) {
                match seg_cross(&s1.a, &s1.b, &s2.a, &s2.b) {
                    SegCross::Overlap | SegCross::MutualEndpoint(..) => return false,
                    _ => {}
                }
            }
        }
        true
    };
    let base = rep_segments(tri, core);
    if clean(&base) {
        return Ok(base);
    }
    let (lo, hi) = core
        .corridor
        .clone()
        .expect("core representatives carry their corridor");
    let c = core.holonomy.t.clone();
    use crate::geodesic::strip::Strip;
    let strip = Strip::unfold(tri, &core.word);
    for k in 1..64u32 {
        let frac = Rat::new((2 * k - 1).into(), (1u32 << (k.min(20) + 1)).into());
        let target = &lo + &(&(&hi - &lo) * &frac);
        if target <= lo || target >= hi {
            continue;
        }
        let p0 = &strip.portals[0];
        let span = &p0.right - &p0.left;
        let denom = c.cross(&span);
        if denom.is_zero() {
            continue;
        }
        let t = (&target - &c.cross(&p0.left)) / &denom;
        let anchor = &p0.left + &span.scale(&t);
        let mut r2 = core.clone();
        r2.anchor_pos = anchor;
        let segs = rep_segments(tri, &r2);
        if clean(&segs) {
            return Ok(segs);
        }
    }
    Err(IntersectError::SharedSegment)
}

fn reps_equal(a: &GeodesicRep, b: &GeodesicRep) -> bool {
    if a.is_cylinder_core != b.is_cylinder_core {
        return false;
    }
    if a.is_cylinder_core {
        // Same cylinder: same corridor in the same word-strip.
        return a.word.canonical_rotation() == b.word.canonical_rotation()
            && a.holonomy == b.holonomy;
    }
    // Broken geodesics are unique in their class: compare pivot vertex
    // sequences and chord length multisets.
    if a.pivots.len() != b.pivots.len() || a.chords_sq.len() != b.chords_sq.len() {
        return false;
    }
    let va: Vec<usize> = a.pivots.iter().map(|p| p.vertex).collect();
    let vb: Vec<usize> = b.pivots.iter().map(|p| p.vertex).collect();
    let mut ca = a.chords_sq.clone();
    let mut cb = b.chords_sq.clone();
    ca.sort();
    cb.sort();
    if ca != cb {
        return false;
    }
    // Cyclic equality of vertex sequences.
    let n = va.len();
    (0..n).any(|s| (0..n).all(|i| va[(s + i) % n] == vb[i]))
        && a.word.canonical_rotation() == b.word.canonical_rotation()
}

/// Tighten both curves and count their geometric intersection number.
pub fn geometric_intersection(
    tri: &Triangulation,
    c1: &CurveClass,
    c2: &CurveClass,
) -> Result<u64, IntersectError> {
    let tn = Tightener::new(tri);
    let r1 = tn.tighten(c1)?;
    let r2 = tn.tighten(c2)?;
    intersection_of_reps(tri, &r1, &r2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{l_shape, torus};
    use crate::geom::trace::trace_line_closed;
    use crate::geom::triangulation::triangulate;
    use crate::num::{rat, rat_int};

    fn line(tri: &Triangulation, poly: usize, x: (i64, i64), y: (i64, i64), d: (i64, i64)) -> CurveClass {
        trace_line_closed(
            tri,
            poly,
            &Vec2::new(rat(x.0, x.1), rat(y.0, y.1)),
            &Vec2::new(rat_int(d.0), rat_int(d.1)),
        )
        .unwrap()
    }

    #[test]
    fn torus_basis_curves_cross_once() {
        let tri = triangulate(&torus());
        let a = line(&tri, 0, (1, 3), (1, 5), (1, 0));
        let b = line(&tri, 0, (1, 3), (1, 5), (0, 1));
        assert_eq!(geometric_intersection(&tri, &a, &b).unwrap(), 1);
    }

    #[test]
    fn torus_self_intersection_zero() {
        let tri = triangulate(&torus());
        let a = line(&tri, 0, (1, 3), (1, 5), (1, 0));
        assert_eq!(geometric_intersection(&tri, &a, &a).unwrap(), 0);
    }

    #[test]
    fn torus_pq_intersections() {
        // i((1,0), (p,q)) = |q|, i((0,1),(p,q)) = |p|.
        let tri = triangulate(&torus());
        let h = line(&tri, 0, (1, 3), (1, 5), (1, 0));
        let v = line(&tri, 0, (1, 3), (1, 5), (0, 1));
        let pq = line(&tri, 0, (1, 3), (1, 5), (3, 4));
        assert_eq!(geometric_intersection(&tri, &h, &pq).unwrap(), 4);
        assert_eq!(geometric_intersection(&tri, &v, &pq).unwrap(), 3);
        let d = line(&tri, 0, (1, 3), (1, 5), (1, 1));
        assert_eq!(geometric_intersection(&tri, &d, &pq).unwrap(), 1);
    }

    #[test]
    fn l_shape_disjoint_cylinder_cores() {
        let tri = triangulate(&l_shape());
        let wide = line(&tri, 0, (1, 3), (1, 2), (1, 0));
        let narrow = line(&tri, 2, (1, 3), (1, 2), (1, 0));
        assert_eq!(geometric_intersection(&tri, &wide, &narrow).unwrap(), 0);
    }

    #[test]
    fn l_shape_vertical_crosses_wide() {
        let tri = triangulate(&l_shape());
        let wide = line(&tri, 0, (1, 3), (1, 2), (1, 0));
        // Vertical through column 0: crosses both horizontal cylinders... it
        // crosses the wide core once.
        let vert = line(&tri, 0, (1, 3), (1, 5), (0, 1));
        assert_eq!(geometric_intersection(&tri, &wide, &vert).unwrap(), 1);
    }
}
