//! One period of a geodesic representative as exact per-triangle segments,
//! for intersection counting and clearance estimates.

use crate::geodesic::strip::Strip;
use crate::geodesic::tighten::GeodesicRep;
use crate::geom::triangulation::{tri_of, Triangulation};
use crate::geom::{HalfTranslation, Vec2};
use crate::num::Rat;
use num_traits::{One, Signed, Zero};

/// A maximal straight piece of the representative inside one triangle, in
/// that triangle's own chart.
#[derive(Clone, Debug)]
pub struct TriSegment {
    pub tri: usize,
    pub a: Vec2,
    pub b: Vec2,
}

/// Placement of strip triangle `S_i` (two periods) into the base chart.
fn placement_ext(strip: &Strip, i: usize) -> HalfTranslation {
    let n = strip.word.len();
    let mut g = strip.placements[i % n].clone();
    let mut periods = i / n;
    while periods > 0 {
        g = strip.holonomy.compose(&g);
        periods -= 1;
    }
    g
}

/// Cut one chord (in base-chart coordinates) into per-triangle segments.
/// The chord's interior crosses exactly the extended portals in
/// `portal_range`, in order; the piece before the first crossing lies in
/// strip triangle `S_{portal_range.start}` and the last piece in
/// `S_{portal_range.end}` (one past the final crossed portal).
fn cut_chord(
    tri: &Triangulation,
    strip: &Strip,
    chord_a: &Vec2,
    chord_b: &Vec2,
    portal_range: std::ops::Range<usize>,
    out: &mut Vec<TriSegment>,
) {
    let n = strip.word.len();
    let dir = chord_b - chord_a;
    if dir.is_zero() {
        return;
    }
    let mut cuts: Vec<(Rat, usize)> = Vec::new();
    for j in portal_range.clone() {
        let (l, r) = portal_endpoints_ext(strip, j);
        let e = &r - &l;
        let denom = e.cross(&dir);
        if denom.is_zero() {
            continue;
        }
        let t = e.cross(&(&l - chord_a)) / &denom;
        if !t.is_positive() || t >= Rat::one() {
            continue;
        }
        cuts.push((t, j));
    }
    cuts.sort_by(|a, b| a.0.cmp(&b.0));
    let mut t_prev = Rat::zero();
    // First piece sits in the triangle entered at `portal_range.start - 1`,
    // i.e. S_{portal_range.start}; after crossing portal j the walk is in
    // S_{j + 1}.
    let mut cur_tri = portal_range.start;
    let mut pieces: Vec<(Rat, Rat, usize)> = Vec::new();
    for (t, j) in cuts {
        pieces.push((t_prev.clone(), t.clone(), cur_tri));
        t_prev = t;
        cur_tri = j + 1;
    }
    pieces.push((t_prev, Rat::one(), cur_tri));
    for (t0, t1, s_idx) in pieces {
        if t0 == t1 {
            continue;
        }
        let pa = chord_a + &dir.scale(&t0);
        let pb = chord_a + &dir.scale(&t1);
        let place = placement_ext(strip, s_idx);
        let inv = place.inverse();
        let t_real = tri_of(strip.word[s_idx % n]);
        out.push(TriSegment {
            tri: t_real,
            a: inv.apply(&pa),
            b: inv.apply(&pb),
        });
    }
    let _ = tri;
}

/// Endpoints of extended portal `j` in base coordinates.
fn portal_endpoints_ext(strip: &Strip, j: usize) -> (Vec2, Vec2) {
    let n = strip.portals.len();
    let p = &strip.portals[j % n];
    if j < n {
        (p.left.clone(), p.right.clone())
    } else {
        (
            strip.holonomy.apply(&p.left),
            strip.holonomy.apply(&p.right),
        )
    }
}

/// One full period of the representative as per-triangle segments.
///
/// Portal indexing: portal `j` of the strip is crossed entering strip
/// triangle `S_{j+1}`; the rep's chords cover portals `k+1 .. k+n-1` where
/// `k` is the anchor portal.
pub fn rep_segments(tri: &Triangulation, rep: &GeodesicRep) -> Vec<TriSegment> {
    let strip = Strip::unfold(tri, &rep.word);
    let n = strip.word.len();
    let mut out = Vec::new();
    if rep.is_cylinder_core {
        // Straight line from the anchor (on portal 0) through one period.
        let a = rep.anchor_pos.clone();
        let b = strip.holonomy.apply(&a);
        cut_chord(tri, &strip, &a, &b, 1..n, &mut out);
        return out;
    }
    // Node cycle: anchor position pulled back one period, interior pivots,
    // then the anchor image. The chord from pivot i to pivot i+1 crosses
    // exactly the portals strictly between their fans.
    let g_inv = rep.holonomy.inverse();
    let m = rep.pivots.len();
    let mut nodes: Vec<(Vec2, usize, usize)> = Vec::new(); // pos, run_lo, run_hi
    // Anchor at the start of the period: runs shifted back by n.
    let a0 = &rep.pivots[0];
    nodes.push((g_inv.apply(&a0.pos), a0.run_lo.saturating_sub(n), a0.run_hi - n));
    for p in &rep.pivots[1..] {
        nodes.push((p.pos.clone(), p.run_lo, p.run_hi));
    }
    nodes.push((a0.pos.clone(), a0.run_lo, a0.run_hi));
    let _ = m;
    for w in nodes.windows(2) {
        let (pa, _, hi_a) = &w[0];
        let (pb, lo_b, _) = &w[1];
        let range = (hi_a + 1)..*lo_b;
        if range.start > range.end {
            // Adjacent fans: the chord lives inside a single triangle,
            // S_{hi_a + 1}.
            cut_chord(tri, &strip, pa, pb, (hi_a + 1)..(hi_a + 1), &mut out);
            continue;
        }
        cut_chord(tri, &strip, pa, pb, range, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{l_shape, torus};
    use crate::geodesic::tighten::Tightener;
    use crate::geom::trace::trace_line_closed;
    use crate::geom::triangulation::triangulate;
    use crate::num::{rat, rat_int, rat_to_f64};

    fn total_len(segs: &[TriSegment]) -> f64 {
        segs.iter()
            .map(|s| rat_to_f64(&(&s.b - &s.a).norm_sq()).sqrt())
            .sum()
    }

    #[test]
    fn core_segments_cover_one_period() {
        let tri = triangulate(&torus());
        let tn = Tightener::new(&tri);
        let w = trace_line_closed(
            &tri,
            0,
            &Vec2::new(rat(1, 3), rat(1, 5)),
            &Vec2::new(rat_int(3), rat_int(4)),
        )
        .unwrap();
        let rep = tn.tighten(&w).unwrap();
        let segs = rep_segments(&tri, &rep);
        assert!((total_len(&segs) - 5.0).abs() < 1e-9);
        // Every segment inside its triangle (closed containment).
        for s in &segs {
            for p in [&s.a, &s.b] {
                for kk in 0..3 {
                    let h = 3 * s.tri + kk;
                    let a = tri.corner_pos(h);
                    assert!(
                        !tri.vecs[h].cross(&(p - &a)).is_negative(),
                        "segment endpoint outside its triangle"
                    );
                }
            }
        }
    }

    #[test]
    fn broken_rep_segments_length_matches() {
        // A class on the L-shape whose geodesic is broken: the (1,1) line.
        let tri = triangulate(&l_shape());
        let tn = Tightener::new(&tri);
        let w = trace_line_closed(
            &tri,
            0,
            &Vec2::new(rat(1, 3), rat(1, 5)),
            &Vec2::new(rat_int(1), rat_int(1)),
        )
        .unwrap();
        let rep = tn.tighten(&w).unwrap();
        let segs = rep_segments(&tri, &rep);
        assert!(
            (total_len(&segs) - rep.length).abs() < 1e-9,
            "{} vs {}",
            total_len(&segs),
            rep.length
        );
    }
}
