//! Dehn twists of multicurves about simple closed curves, as polyline
//! surgery on tightened representatives.

use crate::geodesic::curve::CurveClass;
use crate::geodesic::segments::{rep_segments, TriSegment};
use crate::geodesic::tighten::{GeodesicRep, TightenError, Tightener};
use crate::geom::trace::{trace_polyline_closed, PolyStep, TraceError};
use crate::geom::triangulation::Triangulation;
use crate::geom::Vec2;
use crate::num::Rat;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TwistError {
    #[error("tightening failed: {0}")]
    Tighten(#[from] TightenError),
    #[error("tracing the twisted polyline failed: {0}")]
    Trace(#[from] TraceError),
    #[error("degenerate contact between the curve and the twisting curve")]
    DegenerateContact,
}

/// The about-loop based at parameter (segment j, point p), as polyline steps
/// starting and ending at p. `forward` chooses the traversal orientation.
fn loop_steps(
    tri: &Triangulation,
    segs: &[TriSegment],
    j: usize,
    p: &Vec2,
    forward: bool,
) -> Vec<PolyStep> {
    let emb = tri.embedding.as_ref().unwrap();
    let m = segs.len();
    let to_poly = |seg: &TriSegment, v: &Vec2| -> (usize, Vec2) {
        let poly = emb.tri_polygon[seg.tri];
        let off = &emb.tri_corner_pos[seg.tri][0];
        (poly, v + off)
    };
    let mut steps: Vec<PolyStep> = Vec::new();
    let push_pt = |steps: &mut Vec<PolyStep>, pp: (usize, Vec2)| {
        if let Some(PolyStep::Point(lp, lv)) = steps.last() {
            if *lp == pp.0 && *lv == pp.1 {
                return;
            }
        }
        steps.push(PolyStep::Point(pp.0, pp.1));
    };
    let jump_if_needed = |steps: &mut Vec<PolyStep>, next: &(usize, Vec2)| -> bool {
        if let Some(PolyStep::Point(lp, lv)) = steps.last() {
            if *lp != next.0 || *lv != next.1 {
                steps.push(PolyStep::Jump);
                return true;
            }
        }
        false
    };
    let start = to_poly(&segs[j], p);
    push_pt(&mut steps, start.clone());
    if forward {
        // Rest of segment j, then j+1, ..., then start of segment j up to p.
        push_pt(&mut steps, to_poly(&segs[j], &segs[j].b));
        for k in 1..=m {
            let seg = &segs[(j + k) % m];
            let a = to_poly(seg, &seg.a);
            if jump_if_needed(&mut steps, &a) {
                push_pt(&mut steps, a);
            }
            if (j + k) % m == j {
                push_pt(&mut steps, to_poly(seg, p));
                break;
            }
            push_pt(&mut steps, to_poly(seg, &seg.b));
        }
    } else {
        push_pt(&mut steps, to_poly(&segs[j], &segs[j].a));
        for k in 1..=m {
            let idx = (j + m - k) % m;
            let seg = &segs[idx];
            let b = to_poly(seg, &seg.b);
            if jump_if_needed(&mut steps, &b) {
                push_pt(&mut steps, b);
            }
            if idx == j {
                push_pt(&mut steps, to_poly(seg, p));
                break;
            }
            push_pt(&mut steps, to_poly(seg, &seg.a));
        }
    }
    steps
}

/// Apply the `power`-fold Dehn twist about `about` to `target`, returning a
/// crossing word of the image class.
pub fn dehn_twist(
    tri: &Triangulation,
    target: &CurveClass,
    about: &CurveClass,
    power: i64,
) -> Result<CurveClass, TwistError> {
    if power == 0 {
        return Ok(target.reduced(tri));
    }
    let tn = Tightener::new(tri);
    let rep_t = tn.tighten(target)?;
    let rep_a = tn.tighten(about)?;
    let segs_t = rep_segments(tri, &rep_t);
    // Generic core offset for the about-curve when possible.
    let segs_a = generic_about_segments(tri, &segs_t, &rep_a)?;

    // Crossings ordered along the target.
    struct Crossing {
        t_idx: usize,
        t_par: Rat,
        a_idx: usize,
        p_local: Vec2,
        turn_left_is_forward: bool,
    }
    let mut crossings: Vec<Crossing> = Vec::new();
    for (ti, st) in segs_t.iter().enumerate() {
        for (ai, sa) in segs_a.iter().enumerate() {
            if st.tri != sa.tri {
                continue;
            }
            let da = &st.b - &st.a;
            let db = &sa.b - &sa.a;
            let denom = da.cross(&db);
            if denom.is_zero() {
                if da.cross(&(&sa.a - &st.a)).is_zero() {
                    return Err(TwistError::DegenerateContact);
                }
                continue;
            }
            let w = &sa.a - &st.a;
            let s = w.cross(&db) / &denom;
            let t = w.cross(&da) / &denom;
            if !s.is_positive() || s >= Rat::one() || !t.is_positive() || t >= Rat::one() {
                // Require strictly interior crossings on both sides; the
                // generic about-offset arranges this.
                if (s >= Rat::zero() && s <= Rat::one()) && (t >= Rat::zero() && t <= Rat::one())
                {
                    if s.is_zero() || s == Rat::one() || t.is_zero() || t == Rat::one() {
                        return Err(TwistError::DegenerateContact);
                    }
                }
                continue;
            }
            let p = &st.a + &da.scale(&s);
            // Positive twists turn left onto the about-curve: traverse it in
            // the direction e with cross(d_target, e) > 0.
            let left_forward = da.cross(&db).is_positive();
            crossings.push(Crossing {
                t_idx: ti,
                t_par: s,
                a_idx: ai,
                p_local: p,
                turn_left_is_forward: left_forward,
            });
        }
    }
    if crossings.is_empty() {
        return Ok(target.reduced(tri));
    }
    crossings.sort_by(|x, y| x.t_idx.cmp(&y.t_idx).then_with(|| x.t_par.cmp(&y.t_par)));

    // Build the composite polyline.
    let emb = tri.embedding.as_ref().unwrap();
    let to_poly = |seg: &TriSegment, v: &Vec2| -> (usize, Vec2) {
        let poly = emb.tri_polygon[seg.tri];
        let off = &emb.tri_corner_pos[seg.tri][0];
        (poly, v + off)
    };
    let mut steps: Vec<PolyStep> = Vec::new();
    let push_pt = |steps: &mut Vec<PolyStep>, pp: (usize, Vec2)| {
        if let Some(PolyStep::Point(lp, lv)) = steps.last() {
            if *lp == pp.0 && *lv == pp.1 {
                return;
            }
        }
        steps.push(PolyStep::Point(pp.0, pp.1));
    };
    let jump_to = |steps: &mut Vec<PolyStep>, next: &(usize, Vec2)| {
        if let Some(PolyStep::Point(lp, lv)) = steps.last() {
            if *lp != next.0 || *lv != next.1 {
                steps.push(PolyStep::Jump);
            }
        }
    };
    for (ti, seg) in segs_t.iter().enumerate() {
        let a = to_poly(seg, &seg.a);
        jump_to(&mut steps, &a);
        push_pt(&mut steps, a);
        for cr in crossings.iter().filter(|c| c.t_idx == ti) {
            push_pt(&mut steps, to_poly(seg, &cr.p_local));
            let forward = if power > 0 {
                cr.turn_left_is_forward
            } else {
                !cr.turn_left_is_forward
            };
            let one_loop = loop_steps(tri, &segs_a, cr.a_idx, &cr.p_local, forward);
            for _ in 0..power.unsigned_abs() {
                // Skip the loop's first point (already emitted).
                for st in one_loop.iter().skip(1) {
                    match st {
                        PolyStep::Point(p, v) => push_pt(&mut steps, (*p, v.clone())),
                        PolyStep::Jump => steps.push(PolyStep::Jump),
                    }
                }
            }
        }
        push_pt(&mut steps, to_poly(seg, &seg.b));
    }
    // Close.
    if let Some(PolyStep::Point(fp, fv)) = steps.first().cloned() {
        jump_to(&mut steps, &(fp, fv.clone()));
        push_pt(&mut steps, (fp, fv));
    }
    Ok(trace_polyline_closed(tri, &steps)?)
}

/// Segments of the about-curve, re-anchored when it is a core so that every
/// contact with the target is strictly transversal.
fn generic_about_segments(
    tri: &Triangulation,
    target: &[TriSegment],
    about: &GeodesicRep,
) -> Result<Vec<TriSegment>, TwistError> {
    let clean = |segs: &[TriSegment]| -> bool {
        for s1 in target {
            for s2 in segs.iter().filter(|s| s.tri == s1.tri) {
                let da = &s1.b - &s1.a;
                let db = &s2.b - &s2.a;
                let denom = da.cross(&db);
                if denom.is_zero() {
                    if da.cross(&(&s2.a - &s1.a)).is_zero() {
                        return false;
                    }
                    continue;
                }
                let w = &s2.a - &s1.a;
                let s = w.cross(&db) / &denom;
                let t = w.cross(&da) / &denom;
                let zero = Rat::zero();
                let one = Rat::one();
                let on_a = s >= zero && s <= one;
                let on_b = t >= zero && t <= one;
                if on_a && on_b && (s.is_zero() || s == one || t.is_zero() || t == one) {
                    return false;
                }
            }
        }
        true
    };
    let base = rep_segments(tri, about);
    if clean(&base) {
        return Ok(base);
    }
    if !about.is_cylinder_core {
        return Err(TwistError::DegenerateContact);
    }
    let (lo, hi) = about.corridor.clone().expect("cores carry corridors");
    let c = about.holonomy.t.clone();
    use crate::geodesic::strip::Strip;
    let strip = Strip::unfold(tri, &about.word);
    for k in 1..64u32 {
        let frac = Rat::new((2 * k - 1).into(), (1u32 << (k.min(20) + 1)).into());
        let target_sigma = &lo + &(&(&hi - &lo) * &frac);
        if target_sigma <= lo || target_sigma >= hi {
            continue;
        }
        let p0 = &strip.portals[0];
        let span = &p0.right - &p0.left;
        let denom = c.cross(&span);
        if denom.is_zero() {
            continue;
        }
        let t = (&target_sigma - &c.cross(&p0.left)) / &denom;
        let anchor = &p0.left + &span.scale(&t);
        let mut r2 = about.clone();
        r2.anchor_pos = anchor;
        let segs = rep_segments(tri, &r2);
        if clean(&segs) {
            return Ok(segs);
        }
    }
    Err(TwistError::DegenerateContact)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::torus;
    use crate::geom::trace::trace_line_closed;
    use crate::geom::triangulation::triangulate;
    use crate::num::{rat, rat_int};
    use crate::geodesic::intersect::geometric_intersection;

    fn line(tri: &Triangulation, d: (i64, i64)) -> CurveClass {
        trace_line_closed(
            tri,
            0,
            &Vec2::new(rat(1, 3), rat(1, 5)),
            &Vec2::new(rat_int(d.0), rat_int(d.1)),
        )
        .unwrap()
    }

    #[test]
    fn torus_sl2z_action() {
        let tri = triangulate(&torus());
        let tn = Tightener::new(&tri);
        let a = line(&tri, (1, 0));
        let b = line(&tri, (0, 1));
        // Twisting (0,1) about (1,0): the result is (1,1) or (-1,1); both
        // have length sqrt(2) and cross both basis curves once.
        let tw = dehn_twist(&tri, &b, &a, 1).unwrap();
        let rep = tn.tighten(&tw).unwrap();
        assert!((rep.length - 2f64.sqrt()).abs() < 1e-9);
        assert_eq!(geometric_intersection(&tri, &tw, &a).unwrap(), 1);
        assert_eq!(geometric_intersection(&tri, &tw, &b).unwrap(), 1);
        // Twist then inverse twist is the identity on classes: back is b
        // again (length 1, crossing a once, disjoint from b itself).
        let back = dehn_twist(&tri, &tw, &a, -1).unwrap();
        let rb = tn.tighten(&back).unwrap();
        assert!((rb.length - 1.0).abs() < 1e-9);
        assert_eq!(geometric_intersection(&tri, &back, &a).unwrap(), 1);
        assert_eq!(geometric_intersection(&tri, &back, &b).unwrap(), 0);
        // Power 2: (2,1) has length sqrt(5).
        let tw2 = dehn_twist(&tri, &b, &a, 2).unwrap();
        let rep2 = tn.tighten(&tw2).unwrap();
        assert!((rep2.length - 5f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn power_zero_identity() {
        let tri = triangulate(&torus());
        let b = line(&tri, (0, 1));
        let tw = dehn_twist(&tri, &b, &line(&tri, (1, 0)), 0).unwrap();
        assert_eq!(tw.canonical_rotation().word, b.reduced(&tri).canonical_rotation().word);
    }

    #[test]
    fn intersection_preserved() {
        // i(T_a(b), a) == i(b, a).
        let tri = triangulate(&torus());
        let a = line(&tri, (1, 0));
        let pq = line(&tri, (3, 4));
        let tw = dehn_twist(&tri, &pq, &a, 1).unwrap();
        assert_eq!(
            geometric_intersection(&tri, &tw, &a).unwrap(),
            geometric_intersection(&tri, &pq, &a).unwrap()
        );
    }
}
