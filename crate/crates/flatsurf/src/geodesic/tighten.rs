//! Tightening a crossing word to its flat geodesic representative.
//!
//! The loop: pull the cycle taut inside the unfolded strip of the current
//! word (funnel through the portals, anchored at a touched vertex); check
//! the cone-angle condition at every touched vertex on the surface; where
//! the off-strip angle is below pi, slide the word across that vertex and
//! repeat. A translation holonomy whose corridor admits a straight line is a
//! regular closed geodesic in a flat cylinder.

use crate::geodesic::curve::{CurveClass, CurveError};
use crate::geodesic::strip::{funnel, Portal, Side, Strip, TautPath};
use crate::geom::triangulation::{next_he, prev_he, Triangulation};
use crate::geom::turning::AngleAccumulator;
use crate::geom::{HalfTranslation, Vec2};
use crate::num::{rat_to_f64, Rat};
use num_traits::{Signed, Zero};
use std::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TightenError {
    #[error("curve is null-homotopic")]
    NullHomotopic,
    #[error("tightening budget exceeded")]
    BudgetExceeded,
    #[error("invalid curve word: {0}")]
    InvalidWord(CurveError),
}

#[derive(Clone, Debug)]
pub struct PivotData {
    pub pos: Vec2,
    pub vertex: usize,
    /// Extended-portal fan of this occurrence: every portal in
    /// `run_lo..=run_hi` has the pivot as its `side` endpoint.
    pub run_lo: usize,
    pub run_hi: usize,
    pub side: Side,
    /// Visible-side angle exceeds pi strictly (false = exactly pi, i.e. the
    /// path runs straight through this vertex in the chart).
    pub visible_gt_pi: bool,
    /// Off-strip angle exceeds pi strictly (false = exactly pi).
    pub other_gt_pi: bool,
}

/// A geodesic representative of a free homotopy class.
#[derive(Clone, Debug)]
pub struct GeodesicRep {
    /// Crossing word of the final representative.
    pub word: CurveClass,
    /// Squared chord lengths (single entry `|c|^2` for a cylinder core).
    pub chords_sq: Vec<Rat>,
    pub length: f64,
    /// Holonomy of the final strip.
    pub holonomy: HalfTranslation,
    /// Touched cone points (empty for a regular core).
    pub pivots: Vec<PivotData>,
    /// Regular closed geodesic strictly inside a flat cylinder.
    pub is_cylinder_core: bool,
    /// All pivot angles on the travel-left (resp. right) side are exactly pi.
    pub flat_left: bool,
    pub flat_right: bool,
    /// Corridor offset bounds of the final strip for the core case, as
    /// `cross(c, .)` values: the line was placed at the midpoint.
    pub corridor: Option<(Rat, Rat)>,
    /// Base-chart positions of the representative polyline, one period:
    /// pivot positions for a broken geodesic; for a core, a point of the
    /// straight line.
    pub anchor_pos: Vec2,
    /// For a broken rep: the extended-portal index the cycle was anchored
    /// at; the chords cover portals `anchor_portal+1 .. anchor_portal+n-1`.
    /// For a core: the line starts on portal 0.
    pub anchor_portal: usize,
}

impl GeodesicRep {
    pub fn length_sq_total(&self) -> Option<&Rat> {
        if self.chords_sq.len() == 1 {
            Some(&self.chords_sq[0])
        } else {
            None
        }
    }
}

fn sigma(c: &Vec2, p: &Vec2) -> Rat {
    c.cross(p)
}

/// Corridor test: offsets `s` with `lo < s < hi` admit a straight closed
/// line in direction `c` through every portal.
fn corridor_bounds(c: &Vec2, portals: &[Portal]) -> Option<(Rat, Rat)> {
    let mut lo: Option<Rat> = None;
    let mut hi: Option<Rat> = None;
    for p in portals {
        let a = sigma(c, &p.left);
        let b = sigma(c, &p.right);
        let (mn, mx) = if a <= b { (a, b) } else { (b, a) };
        lo = Some(match lo {
            None => mn,
            Some(v) => v.max(mn),
        });
        hi = Some(match hi {
            None => mx,
            Some(v) => v.min(mx),
        });
    }
    match (lo, hi) {
        (Some(l), Some(h)) if l < h => Some((l, h)),
        _ => None,
    }
}

struct Occurrence {
    pos: Vec2,
    vertex: usize,
    side: Side,
    run_lo: usize,
    run_hi: usize,
    d_in: Vec2,
    d_out: Vec2,
}

/// Maximal run of consecutive extended portals sharing the endpoint of the
/// given side at `idx`, as a combinatorial fan around the vertex. Portal `j`
/// crosses `word[(j+1) % n]`; consecutive portals share their left corner
/// exactly when the strip exits through `prev(entry)`, and their right
/// corner when it exits through `next(entry)`. Position equality alone is
/// not enough: distinct vertex occurrences may develop to the same point.
fn expand_run(
    tri: &Triangulation,
    word: &[usize],
    ext: &[Portal],
    idx: usize,
    side: Side,
    pos: &Vec2,
) -> (usize, usize) {
    let n = word.len();
    let he_of = |j: usize| word[(j + 1) % n];
    let adjacent = |j: usize| -> bool {
        // Portals j and j+1 share the `side` corner?
        let e_in = he_of(j);
        let e_out = tri.twin[he_of(j + 1)];
        match side {
            Side::Left => e_out == prev_he(e_in),
            Side::Right => e_out == next_he(e_in),
        }
    };
    let mut lo = idx;
    while lo > 0 && adjacent(lo - 1) && ext[lo - 1].endpoint(side) == pos {
        lo -= 1;
    }
    let mut hi = idx;
    while hi + 1 < ext.len() && adjacent(hi) && ext[hi + 1].endpoint(side) == pos {
        hi += 1;
    }
    (lo, hi)
}

/// Visible-side angle at an occurrence, accumulated exactly. For a left
/// pivot the visible side is the travel-right side, swept ccw from the
/// incoming back-direction to the outgoing direction through the portal fan;
/// mirrored for right pivots.
fn visible_angle(ext: &[Portal], occ: &Occurrence) -> AngleAccumulator {
    let mut acc = AngleAccumulator::new();
    let v = &occ.pos;
    let back = -&occ.d_in;
    // Pieces of angle zero occur when a chord runs exactly along a portal
    // ray; they contribute nothing.
    let add = |acc: &mut AngleAccumulator, from: &Vec2, to: &Vec2| {
        assert!(!from.is_zero() && !to.is_zero(), "zero ray at a pivot fan");
        let parallel = from.cross(to).is_zero() && from.dot(to).is_positive();
        if !parallel {
            acc.add_corner(from, to);
        }
    };
    match occ.side {
        Side::Left => {
            let mut prev_ray = back;
            for j in occ.run_lo..=occ.run_hi {
                let ray = &ext[j].right - v;
                add(&mut acc, &prev_ray, &ray);
                prev_ray = ray;
            }
            add(&mut acc, &prev_ray, &occ.d_out);
        }
        Side::Right => {
            let mut prev_ray = occ.d_out.clone();
            for j in (occ.run_lo..=occ.run_hi).rev() {
                let ray = &ext[j].left - v;
                add(&mut acc, &prev_ray, &ray);
                prev_ray = ray;
            }
            add(&mut acc, &prev_ray, &back);
        }
    }
    acc
}

/// Rebuild the word after sliding across the vertex of an occurrence: the
/// crossings of the occurrence's portal run are replaced by the complement
/// of the vertex star.
fn slide_word(
    tri: &Triangulation,
    word: &[usize],
    occ: &Occurrence,
    n: usize,
) -> Result<Vec<usize>, TightenError> {
    // Portal j crosses word[(j+1) % n].
    let first = (occ.run_lo + 1) % n;
    let run_len = occ.run_hi - occ.run_lo + 1;
    if run_len >= n {
        // The whole word wraps this vertex: contractible around it.
        return Err(TightenError::NullHomotopic);
    }

    // Corner of the triangle before the run, at the pivot vertex.
    let w_first = word[first];
    let (start_corner, fan_is_ccw) = match occ.side {
        // v = start(w_first) ~ end(twin(w_first)).
        Side::Left => (next_he(tri.twin[w_first]), true),
        // v = end(w_first) ~ start(twin(w_first)).
        Side::Right => (tri.twin[w_first], false),
    };
    // Target corner in the triangle after the run.
    let w_last = word[(occ.run_lo + run_len) % n];
    let target_corner = match occ.side {
        Side::Left => w_last,
        Side::Right => next_he(w_last),
    };
    debug_assert_eq!(tri.vstart[start_corner], occ.vertex);
    debug_assert_eq!(tri.vstart[target_corner], occ.vertex);

    // Walk the star of the vertex on the complementary side. For a left
    // pivot the fan is the ccw direction, so slide cw; vice versa.
    let mut replacement = Vec::new();
    let mut corner = start_corner;
    let budget = 4 * tri.n_halfedges();
    for step in 0.. {
        if corner == target_corner {
            break;
        }
        if step > budget {
            return Err(TightenError::BudgetExceeded);
        }
        if fan_is_ccw {
            // cw star step: cross edge `corner` itself.
            let crossed = tri.twin[corner];
            replacement.push(crossed);
            corner = next_he(crossed);
        } else {
            // ccw star step: cross edge `prev(corner)`.
            let crossed = tri.twin[prev_he(corner)];
            replacement.push(crossed);
            corner = crossed;
        }
        debug_assert_eq!(tri.vstart[corner], occ.vertex);
    }

    // Rotate the word so the run occupies the tail, then splice.
    // Run portal indices run_lo..run_hi cross word positions first..first+run_len-1 (mod n).
    let mut out = Vec::with_capacity(n - run_len + replacement.len());
    let mut k = (first + run_len) % n;
    for _ in 0..(n - run_len) {
        out.push(word[k]);
        k = (k + 1) % n;
    }
    out.extend(replacement);
    Ok(out)
}

pub struct Tightener<'a> {
    pub tri: &'a Triangulation,
    pub max_slides: usize,
    pub max_anchor_iters: usize,
}

impl<'a> Tightener<'a> {
    pub fn new(tri: &'a Triangulation) -> Self {
        Tightener {
            tri,
            max_slides: 4000,
            max_anchor_iters: 64,
        }
    }

    pub fn tighten(&self, curve: &CurveClass) -> Result<GeodesicRep, TightenError> {
        let stats = std::env::var("TIGHTEN_STATS").is_ok();
        let t0 = std::time::Instant::now();
        let r = self.tighten_inner(curve, stats);
        if stats {
            if let Ok(rep) = &r {
                eprintln!(
                    "tighten: word {} -> {} in {:?}",
                    curve.word.len(),
                    rep.word.word.len(),
                    t0.elapsed()
                );
            }
        }
        r
    }

    fn tighten_inner(
        &self,
        curve: &CurveClass,
        stats: bool,
    ) -> Result<GeodesicRep, TightenError> {
        curve
            .validate(self.tri)
            .map_err(TightenError::InvalidWord)?;
        let mut word = curve.reduced(self.tri);
        if word.is_empty() {
            return Err(TightenError::NullHomotopic);
        }

        for slide_round in 0..self.max_slides {
            if stats && slide_round > 0 && slide_round % 50 == 0 {
                eprintln!("tighten: slide round {slide_round}, word {}", word.word.len());
            }
            let strip = Strip::unfold(self.tri, &word);
            let n = strip.portals.len();
            let g = &strip.holonomy;

            // Regular geodesic: translation holonomy with an open corridor.
            if g.sign == 1 && !g.t.is_zero() {
                if let Some((lo, hi)) = corridor_bounds(&g.t, &strip.portals) {
                    let c = g.t.clone();
                    let len_sq = c.norm_sq();
                    // A point on the core line at the corridor midpoint:
                    // solve cross(c, p) = mid with p on the first portal.
                    let mid = (&lo + &hi) / Rat::from_integer(2.into());
                    let p0 = &strip.portals[0];
                    let span = &p0.right - &p0.left;
                    let denom = sigma(&c, &span);
                    let t = (&mid - &sigma(&c, &p0.left)) / &denom;
                    let anchor = &p0.left + &span.scale(&t);
                    return Ok(GeodesicRep {
                        word,
                        chords_sq: vec![len_sq.clone()],
                        length: rat_to_f64(&len_sq).sqrt(),
                        holonomy: g.clone(),
                        pivots: Vec::new(),
                        is_cylinder_core: true,
                        flat_left: true,
                        flat_right: true,
                        corridor: Some((lo, hi)),
                        anchor_pos: anchor,
                        anchor_portal: 0,
                    });
                }
            }

            // Extended portals: three periods so every fan fits.
            let ext = {
                let mut out = Vec::with_capacity(3 * n);
                out.extend(strip.portals.iter().cloned());
                for p in &strip.portals {
                    out.push(Portal {
                        left: g.apply(&p.left),
                        right: g.apply(&p.right),
                        word_idx: p.word_idx,
                        left_vertex: p.left_vertex,
                        right_vertex: p.right_vertex,
                    });
                }
                let g2 = g.compose(g);
                for p in &strip.portals {
                    out.push(Portal {
                        left: g2.apply(&p.left),
                        right: g2.apply(&p.right),
                        word_idx: p.word_idx,
                        left_vertex: p.left_vertex,
                        right_vertex: p.right_vertex,
                    });
                }
                out
            };

            // Locally taut cycle through some anchor.
            let cycle = match self.taut_cycle(&word.word, &ext, g, n)? {
                Some(c) => c,
                None => return Err(TightenError::NullHomotopic),
            };

            // Surface geodesic check at every occurrence; slide at the first
            // failure.
            let mut all_good = true;
            let mut flat_left = true;
            let mut flat_right = true;
            let mut pivots = Vec::new();
            for occ in &cycle.occurrences {
                let acc = visible_angle(&ext, occ);
                let theta = self.tri.vertex_info[occ.vertex].angle_pi;
                // Visible side must be >= pi (tautness), other side likewise.
                let vis_vs_pi = acc.cmp_pi_multiple(1);
                if vis_vs_pi == Ordering::Less {
                    // The anchor was not on the true taut cycle; this can
                    // only happen at the closure. Slide is not warranted;
                    // retry from a different anchor is handled inside
                    // taut_cycle, so reaching here means an inconsistent
                    // state.
                    all_good = false;
                }
                let other_vs_pi = {
                    // other = theta*pi - visible; other >= pi  <=>
                    // visible <= (theta-1)*pi.
                    match acc.cmp_pi_multiple(theta - 1) {
                        Ordering::Greater => Ordering::Less,
                        Ordering::Equal => Ordering::Equal,
                        Ordering::Less => Ordering::Greater,
                    }
                };
                if other_vs_pi == Ordering::Less {
                    // Slide across this vertex.
                    let new_word = slide_word(self.tri, &word.word, occ, n)?;
                    word = CurveClass::new(new_word).reduced(self.tri);
                    if word.is_empty() {
                        return Err(TightenError::NullHomotopic);
                    }
                    all_good = false;
                    break;
                }
                let visible_gt_pi = vis_vs_pi == Ordering::Greater;
                let other_gt_pi = other_vs_pi == Ordering::Greater;
                let (lgt, rgt) = match occ.side {
                    Side::Left => (other_gt_pi, visible_gt_pi),
                    Side::Right => (visible_gt_pi, other_gt_pi),
                };
                flat_left &= !lgt;
                flat_right &= !rgt;
                pivots.push(PivotData {
                    pos: occ.pos.clone(),
                    vertex: occ.vertex,
                    run_lo: occ.run_lo,
                    run_hi: occ.run_hi,
                    side: occ.side,
                    visible_gt_pi,
                    other_gt_pi,
                });
            }
            if !all_good {
                continue;
            }

            let length = cycle
                .chords_sq
                .iter()
                .map(|s| rat_to_f64(s).sqrt())
                .sum();
            return Ok(GeodesicRep {
                word,
                chords_sq: cycle.chords_sq,
                length,
                holonomy: g.clone(),
                anchor_pos: pivots
                    .first()
                    .map(|p| p.pos.clone())
                    .unwrap_or_else(Vec2::zero),
                pivots,
                is_cylinder_core: false,
                flat_left,
                flat_right,
                corridor: None,
                anchor_portal: cycle.anchor_portal,
            });
        }
        Err(TightenError::BudgetExceeded)
    }

    /// Locally taut cycle in the strip annulus: funnel from an anchor
    /// occurrence to its holonomy image, re-anchoring until stable. Returns
    /// `None` for a zero-length cycle (null-homotopic class).
    fn taut_cycle(
        &self,
        word: &[usize],
        ext: &[Portal],
        g: &HalfTranslation,
        n: usize,
    ) -> Result<Option<Cycle>, TightenError> {
        let mut anchor = (0usize, Side::Left);
        let mut tried: Vec<(usize, Side)> = Vec::new();
        for anchor_iter in 0..self.max_anchor_iters {
            if std::env::var("TIGHTEN_STATS").is_ok() && anchor_iter > 8 {
                eprintln!("tighten: anchor iter {anchor_iter} (n={n})");
            }
            tried.push(anchor);
            let (k, side) = anchor;
            let start = ext[k].endpoint(side).clone();
            let end = g.apply(&start);
            let path = funnel(&start, &ext[k + 1..k + n], &end);
            if path
                .chords_sq
                .iter()
                .all(|s| s.is_zero())
            {
                return Ok(None);
            }
            let cycle = build_cycle(self.tri, word, ext, g, n, k, side, &path);
            // Closure quality at the anchor: visible side of the anchor
            // occurrence must be >= pi; otherwise the taut cycle avoids this
            // anchor, so re-anchor at an interior pivot if there is one.
            let anchor_occ = &cycle.occurrences[0];
            let acc = visible_angle(ext, anchor_occ);
            if acc.cmp_pi_multiple(1) != Ordering::Less {
                return Ok(Some(cycle));
            }
            // Re-anchor at an interior pivot not yet tried.
            let mut next: Option<(usize, Side)> = None;
            for node in &path.nodes[1..path.nodes.len() - 1] {
                if let Some((rel, s)) = node.portal {
                    let abs = (k + 1 + rel) % n;
                    if !tried.contains(&(abs, s)) {
                        next = Some((abs, s));
                        break;
                    }
                }
            }
            match next {
                Some(a) => anchor = a,
                None => {
                    // Exhaustive fallback over all occurrences.
                    if std::env::var("TIGHTEN_STATS").is_ok() {
                        eprintln!("tighten: exhaustive fallback, n={n}, tried={}", tried.len());
                    }
                    return self.taut_cycle_exhaustive(word, ext, g, n, &tried);
                }
            }
        }
        Err(TightenError::BudgetExceeded)
    }

    fn taut_cycle_exhaustive(
        &self,
        word: &[usize],
        ext: &[Portal],
        g: &HalfTranslation,
        n: usize,
        tried: &[(usize, Side)],
    ) -> Result<Option<Cycle>, TightenError> {
        let mut best: Option<(f64, Cycle)> = None;
        for k in 0..n {
            for side in [Side::Left, Side::Right] {
                let start = ext[k].endpoint(side).clone();
                let end = g.apply(&start);
                let path = funnel(&start, &ext[k + 1..k + n], &end);
                if path.chords_sq.iter().all(|s| s.is_zero()) {
                    return Ok(None);
                }
                let len: f64 = path.chords_sq.iter().map(|s| rat_to_f64(s).sqrt()).sum();
                if best.as_ref().map_or(true, |(b, _)| len < *b) {
                    let cycle = build_cycle(self.tri, word, ext, g, n, k, side, &path);
                    best = Some((len, cycle));
                }
            }
        }
        let _ = tried;
        Ok(best.map(|(_, c)| c))
    }
}

struct Cycle {
    occurrences: Vec<Occurrence>,
    chords_sq: Vec<Rat>,
    anchor_portal: usize,
}

/// Assemble occurrence data (fan runs, chord directions) from a funnel path
/// anchored at extended portal `k` on `side`.
fn build_cycle(
    tri: &Triangulation,
    word: &[usize],
    ext: &[Portal],
    g: &HalfTranslation,
    n: usize,
    k: usize,
    side: Side,
    path: &TautPath,
) -> Cycle {
    // Drop interior nodes that coincide with a neighbor: the funnel can
    // corner at a portal endpoint lying exactly at the anchor image or at
    // the previous corner, producing zero chords.
    let mut nodes: Vec<&crate::geodesic::strip::PathNode> = Vec::new();
    for (i, nd) in path.nodes.iter().enumerate() {
        if i == 0 || i == path.nodes.len() - 1 {
            nodes.push(nd);
            continue;
        }
        if nd.pos == path.nodes[0].pos
            || nd.pos == path.nodes[path.nodes.len() - 1].pos
            || nodes.last().map(|p| p.pos == nd.pos).unwrap_or(false)
        {
            continue;
        }
        nodes.push(nd);
    }
    let m = nodes.len();
    debug_assert!(m >= 2);
    let mut occurrences = Vec::new();

    // Anchor occurrence, analyzed at its holonomy image (extended index
    // k + n) where both the incoming and outgoing fans are materialized.
    {
        let end_pos = &nodes[m - 1].pos;
        let d_in = end_pos - &nodes[m - 2].pos;
        let first_dir = &nodes[1].pos - &nodes[0].pos;
        let d_out = g.apply_vec(&first_dir);
        let (lo, hi) = expand_run(tri, word, ext, k + n, side, end_pos);
        occurrences.push(Occurrence {
            pos: end_pos.clone(),
            vertex: ext[k + n].vertex(side),
            side,
            run_lo: lo,
            run_hi: hi,
            d_in,
            d_out,
        });
    }

    for i in 1..m - 1 {
        let node = nodes[i];
        let (rel, s) = node.portal.expect("interior funnel nodes are portal corners");
        let abs = k + 1 + rel;
        let d_in = &node.pos - &nodes[i - 1].pos;
        let d_out = &nodes[i + 1].pos - &node.pos;
        let (lo, hi) = expand_run(tri, word, ext, abs, s, &node.pos);
        occurrences.push(Occurrence {
            pos: node.pos.clone(),
            vertex: node.vertex.expect("interior nodes carry their vertex"),
            side: s,
            run_lo: lo,
            run_hi: hi,
            d_in,
            d_out,
        });
    }

    let chords_sq: Vec<Rat> = (0..m - 1)
        .map(|i| (&nodes[i + 1].pos - &nodes[i].pos).norm_sq())
        .collect();
    Cycle {
        occurrences,
        chords_sq,
        anchor_portal: k,
    }
}

/// Convenience: tighten and return only the flat length.
pub fn flat_length_of(
    tri: &Triangulation,
    curve: &CurveClass,
) -> Result<f64, TightenError> {
    Ok(Tightener::new(tri).tighten(curve)?.length)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{l_shape, torus};
    use crate::geom::triangulation::triangulate;

    /// Crossing word of the (p, q) line on the unit square torus, traced
    /// combinatorially: the base triangulation has squares split by the
    /// diagonal from (0,0) to (1,1); walk the line x(t) = t*(p, q) from the
    /// marked point and record crossings.
    fn torus_word(tri: &Triangulation, p: i64, q: i64) -> CurveClass {
        use crate::geom::trace::trace_line_closed;
        use crate::num::rat;
        // Start at (1/3, 1/5): lines in integer directions from there miss
        // the lattice vertices.
        let start = Vec2::new(rat(1, 3), rat(1, 5));
        let dir = Vec2::new(crate::num::rat_int(p), crate::num::rat_int(q));
        trace_line_closed(tri, 0, &start, &dir).expect("closed torus line")
    }

    #[test]
    fn torus_lengths_pythagorean() {
        let s = torus();
        let tri = triangulate(&s);
        let tn = Tightener::new(&tri);
        for (p, q) in [(1i64, 0i64), (0, 1), (1, 1), (3, 4), (2, 1)] {
            let w = torus_word(&tri, p, q);
            let rep = tn.tighten(&w).unwrap();
            let expect = ((p * p + q * q) as f64).sqrt();
            assert!(
                (rep.length - expect).abs() < 1e-9,
                "(p,q)=({p},{q}): got {} want {}",
                rep.length,
                expect
            );
            assert!(rep.is_cylinder_core, "(p,q)=({p},{q}) torus lines are cores");
        }
    }

    #[test]
    fn l_shape_horizontal_cylinders() {
        let s = l_shape();
        let tri = triangulate(&s);
        let tn = Tightener::new(&tri);
        use crate::geom::trace::trace_line_closed;
        use crate::num::rat;
        let east = Vec2::new(crate::num::rat_int(1), crate::num::rat_int(0));
        // Wide cylinder: horizontal line at y = 1/2 through both columns.
        let w = trace_line_closed(&tri, 0, &Vec2::new(rat(1, 3), rat(1, 2)), &east).unwrap();
        let rep = tn.tighten(&w).unwrap();
        assert!((rep.length - 2.0).abs() < 1e-12);
        assert!(rep.is_cylinder_core);
        // Narrow cylinder: horizontal line through the upper square (its own
        // chart is the unit square).
        let w2 = trace_line_closed(&tri, 2, &Vec2::new(rat(1, 3), rat(1, 2)), &east).unwrap();
        let rep2 = tn.tighten(&w2).unwrap();
        assert!((rep2.length - 1.0).abs() < 1e-12);
    }
}
