//! Thick-thin decomposition: short curves (by the flat proxy for hyperbolic
//! length), their maximal cylinders, and the complementary components with
//! exact mass bookkeeping.
//!
//! The decomposition is computed at triangle granularity: on the packaged
//! surfaces every cylinder boundary and every degenerate representative runs
//! along triangulation edges, so cylinders are unions of whole triangles and
//! the complement decomposes exactly.

use crate::geodesic::annulus::{expanding_annulus, AnnulusError};
use crate::geodesic::curve::CurveClass;
use crate::geodesic::cylinder::{detect_cylinder, Cylinder};
use crate::geodesic::intersect::intersection_of_reps;
use crate::geodesic::segments::rep_segments;
use crate::geodesic::tighten::{GeodesicRep, Tightener};
use crate::geom::triangulation::{next_he, tri_of, Triangulation};
use crate::num::{rat_to_f64, Rat};
use crate::geom::trace::trace_line_closed_from;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ThickThinError {
    #[error("geodesic machinery failed: {0}")]
    Engine(String),
    #[error("a cylinder region is not aligned with the triangulation")]
    NotTriangleAligned,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShortCurveData {
    pub flat_length: f64,
    pub proxy_hyp_length: f64,
    /// Exact cylinder mass (zero for a degenerate cylinder).
    pub mass: String,
    pub mass_f: f64,
    pub modulus_f: f64,
    pub degenerate: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentData {
    pub mass_f: f64,
    pub euler: i64,
    pub boundary_circles: usize,
    pub stable: bool,
}

#[derive(Clone, Debug)]
pub struct ThickThin {
    pub shorts: Vec<ShortCurveData>,
    pub short_masses: Vec<Rat>,
    pub component_masses: Vec<Rat>,
    pub components: Vec<ComponentData>,
    pub total_mass: Rat,
    /// Exact flat lengths squared of the short curves.
    pub short_len_sq: Vec<Rat>,
}

/// Which triangles a positive cylinder covers: those whose barycentric
/// probe line closes up with the cylinder's crossing word.
fn cylinder_triangles(
    tri: &Triangulation,
    rep: &GeodesicRep,
    cyl: &Cylinder,
) -> Result<Vec<usize>, ThickThinError> {
    let core_word = cyl
        .core_word
        .as_ref()
        .expect("positive cylinders carry a core word")
        .canonical_rotation();
    let c = &rep.holonomy.t;
    let mut covered = Vec::new();
    let third = Rat::new(1.into(), 3.into());
    for t in 0..tri.n_triangles() {
        let bary = (&(&tri.corner_pos(3 * t) + &tri.corner_pos(3 * t + 1))
            + &tri.corner_pos(3 * t + 2))
            .scale(&third);
        match trace_line_closed_from(tri, t, &bary, c) {
            Ok((w, _)) => {
                if w.canonical_rotation() == core_word {
                    covered.push(t);
                }
            }
            Err(_) => {}
        }
    }
    // Exactness check: the covered area must equal the cylinder mass.
    let two = Rat::from_integer(2.into());
    let area: Rat = covered
        .iter()
        .map(|&t| tri.vecs[3 * t].cross(&tri.vecs[3 * t + 1]) / &two)
        .sum();
    if area != cyl.mass {
        return Err(ThickThinError::NotTriangleAligned);
    }
    Ok(covered)
}

/// Halfedges a degenerate representative runs along (the cut locus).
fn cut_halfedges(tri: &Triangulation, rep: &GeodesicRep) -> Result<Vec<usize>, ThickThinError> {
    let mut cut = Vec::new();
    for seg in rep_segments(tri, rep) {
        let mut found = false;
        for k in 0..3 {
            let h = 3 * seg.tri + k;
            let a = tri.corner_pos(h);
            let va = &tri.vecs[h];
            let ra = &seg.a - &a;
            let rb = &seg.b - &a;
            if va.cross(&ra).is_zero() && va.cross(&rb).is_zero() {
                cut.push(h);
                cut.push(tri.twin[h]);
                found = true;
                break;
            }
        }
        if !found {
            return Err(ThickThinError::NotTriangleAligned);
        }
    }
    cut.sort_unstable();
    cut.dedup();
    Ok(cut)
}

pub struct ThickThinInput<'a> {
    pub tri: &'a Triangulation,
    /// Candidate short curves (typically the pants registry plus systole
    /// scale geodesics).
    pub candidates: &'a [CurveClass],
    pub epsilon: f64,
}

pub fn thick_thin(input: &ThickThinInput) -> Result<ThickThin, ThickThinError> {
    let tri = input.tri;
    let tn = Tightener::new(tri);
    let err = |e: &dyn std::fmt::Display| ThickThinError::Engine(e.to_string());

    // Evaluate candidates.
    struct Cand {
        rep: GeodesicRep,
        cyl: Cylinder,
        proxy: f64,
    }
    let mut cands: Vec<Cand> = Vec::new();
    for c in input.candidates {
        let rep = tn.tighten(c).map_err(|e| err(&e))?;
        let cyl = detect_cylinder(tri, &rep).map_err(|e| err(&e))?;
        let proxy = match expanding_annulus(tri, &rep, &cyl) {
            Ok(est) => est.proxy_hyp_length,
            Err(AnnulusError::DegenerateAnnulus) => {
                let m = rat_to_f64(&cyl.modulus());
                if m > 0.0 {
                    1.0 / m
                } else {
                    f64::INFINITY
                }
            }
        };
        cands.push(Cand { rep, cyl, proxy });
    }
    // Short = proxy below epsilon; keep a maximal pairwise-disjoint set,
    // shortest proxy first.
    cands.retain(|c| c.proxy < input.epsilon);
    cands.sort_by(|a, b| a.proxy.partial_cmp(&b.proxy).unwrap());
    let mut selected: Vec<Cand> = Vec::new();
    for c in cands {
        let mut disjoint = true;
        for s in &selected {
            let i = intersection_of_reps(tri, &c.rep, &s.rep).map_err(|e| err(&e))?;
            if i != 0 || reps_same_class(&c.rep, &s.rep) {
                disjoint = false;
                break;
            }
        }
        if disjoint {
            selected.push(c);
        }
    }

    // Region bookkeeping.
    let n_tri = tri.n_triangles();
    let mut owner: Vec<Option<usize>> = vec![None; n_tri];
    let mut cut_edges: Vec<bool> = vec![false; tri.n_halfedges()];
    let mut shorts = Vec::new();
    let mut short_masses = Vec::new();
    let mut short_len_sq = Vec::new();
    for (i, c) in selected.iter().enumerate() {
        if !c.cyl.is_degenerate() {
            for t in cylinder_triangles(tri, &c.rep, &c.cyl)? {
                if owner[t].is_some() {
                    return Err(ThickThinError::NotTriangleAligned);
                }
                owner[t] = Some(i);
            }
        } else {
            for h in cut_halfedges(tri, &c.rep)? {
                cut_edges[h] = true;
            }
        }
        shorts.push(ShortCurveData {
            flat_length: c.rep.length,
            proxy_hyp_length: c.proxy,
            mass: c.cyl.mass.to_string(),
            mass_f: rat_to_f64(&c.cyl.mass),
            modulus_f: rat_to_f64(&c.cyl.modulus()),
            degenerate: c.cyl.is_degenerate(),
        });
        short_masses.push(c.cyl.mass.clone());
        let len_sq: Rat = c.rep.chords_sq.iter().fold(Rat::zero(), |a, b| a + b);
        short_len_sq.push(len_sq);
    }

    // Complement components: union-find over uncovered triangles across
    // non-cut edges.
    let mut parent: Vec<usize> = (0..n_tri).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    for h in 0..tri.n_halfedges() {
        let t1 = tri_of(h);
        let t2 = tri_of(tri.twin[h]);
        if owner[t1].is_some() || owner[t2].is_some() || cut_edges[h] {
            continue;
        }
        let r1 = find(&mut parent, t1);
        let r2 = find(&mut parent, t2);
        if r1 != r2 {
            parent[r1] = r2;
        }
    }
    let mut comp_ids: Vec<usize> = Vec::new();
    let mut comp_of: Vec<Option<usize>> = vec![None; n_tri];
    for t in 0..n_tri {
        if owner[t].is_some() {
            continue;
        }
        let r = find(&mut parent, t);
        let id = match comp_ids.iter().position(|&x| x == r) {
            Some(i) => i,
            None => {
                comp_ids.push(r);
                comp_ids.len() - 1
            }
        };
        comp_of[t] = Some(id);
    }

    // Component data: mass, Euler characteristic, boundary circles.
    let two = Rat::from_integer(2.into());
    let mut component_masses = vec![Rat::zero(); comp_ids.len()];
    let mut faces = vec![0i64; comp_ids.len()];
    let mut edges = vec![0i64; comp_ids.len()];
    let mut boundary_hes: Vec<Vec<usize>> = vec![Vec::new(); comp_ids.len()];
    for t in 0..n_tri {
        let Some(cid) = comp_of[t] else { continue };
        component_masses[cid] += tri.vecs[3 * t].cross(&tri.vecs[3 * t + 1]) / &two;
        faces[cid] += 1;
        for k in 0..3 {
            let h = 3 * t + k;
            let tw = tri.twin[h];
            let interior = comp_of[tri_of(tw)] == Some(cid) && !cut_edges[h];
            if interior {
                if h < tw {
                    edges[cid] += 1;
                }
            } else {
                edges[cid] += 1;
                boundary_hes[cid].push(h);
            }
        }
    }
    // Vertices of the cut component: corner fans within the component.
    let mut verts = vec![0i64; comp_ids.len()];
    {
        let mut corner_seen = vec![false; tri.n_halfedges()];
        for h0 in 0..tri.n_halfedges() {
            if corner_seen[h0] {
                continue;
            }
            let Some(cid) = comp_of[tri_of(h0)] else {
                corner_seen[h0] = true;
                continue;
            };
            // Walk the corner fan around the vertex at start(h0) clockwise
            // to its end (or full circle), marking corners.
            // cw step from corner h: cross edge h; legal iff h is interior.
            let interior = |h: usize| -> bool {
                let tw = tri.twin[h];
                comp_of[tri_of(tw)] == Some(cid) && !cut_edges[h] && comp_of[tri_of(h)] == Some(cid)
            };
            // Rewind ccw to the fan start.
            let mut start = h0;
            for _ in 0..tri.n_halfedges() {
                // ccw step arrives from corner next(twin(prev ... inverse of
                // cw: previous corner = prev(twin(h))? cw: h -> next(twin(h)).
                let prev_corner = {
                    let p = crate::geom::triangulation::prev_he(start);
                    // corner q with next(twin(q)) == start  <=>  twin(q) ==
                    // prev(start) <=> q = twin(prev(start)).
                    tri.twin[p]
                };
                if !interior(crate::geom::triangulation::prev_he(start)) {
                    break;
                }
                if prev_corner == h0 {
                    break; // full circle
                }
                start = prev_corner;
            }
            // Walk cw collecting the fan.
            let mut h = start;
            for _ in 0..tri.n_halfedges() {
                corner_seen[h] = true;
                if !interior(h) {
                    break;
                }
                let nxt = next_he(tri.twin[h]);
                if nxt == start {
                    break;
                }
                h = nxt;
            }
            verts[cid] += 1;
        }
    }
    // Boundary circles: chain boundary halfedges around the cut.
    let mut components = Vec::new();
    for cid in 0..comp_ids.len() {
        let chi = verts[cid] - edges[cid] + faces[cid];
        let b = count_boundary_circles(tri, &boundary_hes[cid], &comp_of, cid, &cut_edges);
        let stable = !(chi == -1 && b == 3);
        components.push(ComponentData {
            mass_f: rat_to_f64(&component_masses[cid]),
            euler: chi,
            boundary_circles: b,
            stable,
        });
    }

    Ok(ThickThin {
        shorts,
        short_masses,
        component_masses,
        components,
        total_mass: tri.area.clone(),
        short_len_sq,
    })
}

fn reps_same_class(a: &GeodesicRep, b: &GeodesicRep) -> bool {
    a.word.canonical_rotation() == b.word.canonical_rotation()
}

/// Count boundary circles of a component by chaining its boundary halfedges:
/// from a boundary halfedge, walk to the next boundary halfedge around the
/// far corner staying inside the component.
fn count_boundary_circles(
    tri: &Triangulation,
    boundary: &[usize],
    comp_of: &[Option<usize>],
    cid: usize,
    cut_edges: &[bool],
) -> usize {
    use std::collections::BTreeSet;
    let mut remaining: BTreeSet<usize> = boundary.iter().cloned().collect();
    let interior = |h: usize| -> bool {
        comp_of[tri_of(tri.twin[h])] == Some(cid) && !cut_edges[h]
    };
    let mut circles = 0;
    while let Some(&start) = remaining.iter().next() {
        circles += 1;
        let mut h = start;
        loop {
            remaining.remove(&h);
            // Next boundary halfedge after h along the boundary: rotate cw
            // around the vertex at end(h) until a boundary halfedge appears.
            let mut e = next_he(h);
            for _ in 0..tri.n_halfedges() {
                if !interior(e) {
                    break;
                }
                e = next_he(tri.twin[e]);
            }
            h = e;
            if h == start {
                break;
            }
        }
    }
    circles
}
