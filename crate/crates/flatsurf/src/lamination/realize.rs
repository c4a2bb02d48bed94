//! Realization of Dehn-Thurston vectors as explicit multicurves, and the
//! family-independent operations built on top of it.
//!
//! Each packaged surface family supplies a `DtRealizer`: the canonical
//! transverse construction of the multicurve for an admissible vector
//! (strand polylines plus pure-twist parallel copies), a fast exact
//! piecewise-linear length for it, and a rigorous length lower bound.

use crate::geodesic::curve::CurveClass;
use crate::geodesic::tighten::{GeodesicRep, TightenError, Tightener};
use crate::geom::trace::{trace_polyline_closed, PolyStep, TraceError};
use crate::geom::triangulation::Triangulation;
use crate::lamination::dt::{DtError, DtVector, PantsStructure};
use crate::num::{rat_to_f64, Rat};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RealizeError {
    #[error("inadmissible vector: {0}")]
    Inadmissible(#[from] DtError),
    #[error("tracing a strand failed: {0}")]
    Trace(#[from] TraceError),
    #[error("tightening failed: {0}")]
    Tighten(#[from] TightenError),
}

/// Output of a family realizer for one vector.
pub struct Realized {
    /// Closed strand polylines, weight 1 each.
    pub strands: Vec<Vec<PolyStep>>,
    /// Pure parallel components: (curve index, weight).
    pub parallel: Vec<(usize, u64)>,
    /// Exact squared lengths of the PL pieces are summed into this upper
    /// bound for the flat length of the class.
    pub pl_length: f64,
    /// Rigorous lower bound for the flat length.
    pub lower_bound: f64,
}

pub trait DtRealizer: Sync {
    fn pants(&self) -> PantsStructure;
    fn tri(&self) -> &Triangulation;
    fn alpha_words(&self) -> &[CurveClass];
    /// Exact flat lengths of the pants curves.
    fn alpha_lengths(&self) -> Vec<Rat>;
    /// Certified per-crossing cost w_j (cylinder height, annulus width or
    /// the systole/2 fallback).
    fn crossing_weights(&self) -> Vec<Rat>;
    fn realize_dt(&self, dt: &DtVector) -> Realized;
    /// Fast certified bounds (lower, PL upper) on the flat length, without
    /// materializing the strand polylines.
    fn pl_bounds(&self, dt: &DtVector) -> (f64, f64) {
        let r = self.realize_dt(dt);
        (r.lower_bound, r.pl_length)
    }
    /// Surface genus.
    fn genus(&self) -> u32 {
        2
    }
    /// Total surface area, exact.
    fn area(&self) -> Rat;
}

/// An integral multicurve: weighted components, no two isotopic.
#[derive(Clone, Debug)]
pub struct IntegralMulticurve {
    pub components: Vec<(CurveClass, u64)>,
}

/// Realize a vector as an integral multicurve: trace the strands, tighten,
/// and merge isotopic components by weight.
pub fn realize(
    rz: &dyn DtRealizer,
    dt: &DtVector,
) -> Result<IntegralMulticurve, RealizeError> {
    rz.pants().check_admissible(dt)?;
    let built = rz.realize_dt(dt);
    let tri = rz.tri();
    let tn = Tightener::new(tri);
    // Canonical signature of a class: the tightened word's canonical
    // rotation (geodesic uniqueness makes this a class invariant).
    let mut comps: Vec<(CurveClass, u64, CurveClass)> = Vec::new();
    let mut add = |word: CurveClass, weight: u64| -> Result<(), RealizeError> {
        let rep = tn.tighten(&word)?;
        let sig = rep.word.canonical_rotation();
        for (_, w, s) in comps.iter_mut() {
            if *s == sig {
                *w += weight;
                return Ok(());
            }
        }
        comps.push((word, weight, sig));
        Ok(())
    };
    for steps in &built.strands {
        let word = trace_polyline_closed(tri, steps)?;
        add(word, 1)?;
    }
    for &(j, weight) in &built.parallel {
        add(rz.alpha_words()[j].clone(), weight)?;
    }
    Ok(IntegralMulticurve {
        components: comps.into_iter().map(|(c, w, _)| (c, w)).collect(),
    })
}

/// Flat length of the realized class: tighten every component.
pub fn flat_length_dt(rz: &dyn DtRealizer, dt: &DtVector) -> Result<f64, RealizeError> {
    let mc = realize(rz, dt)?;
    let tn = Tightener::new(rz.tri());
    let mut total = 0.0;
    for (c, w) in &mc.components {
        total += tn.tighten(c)?.length * *w as f64;
    }
    Ok(total)
}

/// Flat length of a multicurve given directly.
pub fn flat_length_mc(
    tri: &Triangulation,
    mc: &IntegralMulticurve,
) -> Result<f64, TightenError> {
    let tn = Tightener::new(tri);
    let mut total = 0.0;
    for (c, w) in &mc.components {
        total += tn.tighten(c)?.length * *w as f64;
    }
    Ok(total)
}

/// Tightened representatives of the components (for intersections).
pub fn tighten_components(
    tri: &Triangulation,
    mc: &IntegralMulticurve,
) -> Result<Vec<(GeodesicRep, u64)>, TightenError> {
    let tn = Tightener::new(tri);
    mc.components
        .iter()
        .map(|(c, w)| tn.tighten(c).map(|r| (r, *w)))
        .collect()
}

/// The n-part of the Dehn-Thurston coordinates: weighted geometric
/// intersections with the pants curves.
pub fn intersections_with_alphas(
    rz: &dyn DtRealizer,
    mc: &IntegralMulticurve,
) -> Result<Vec<u64>, crate::geodesic::intersect::IntersectError> {
    use crate::geodesic::intersect::intersection_of_reps;
    let tri = rz.tri();
    let tn = Tightener::new(tri);
    let alpha_reps: Vec<GeodesicRep> = rz
        .alpha_words()
        .iter()
        .map(|w| tn.tighten(w).expect("registry curves tighten"))
        .collect();
    let comp_reps = tighten_components(tri, mc).map_err(crate::geodesic::intersect::IntersectError::Tighten)?;
    let mut out = vec![0u64; alpha_reps.len()];
    for (j, ar) in alpha_reps.iter().enumerate() {
        for (cr, w) in &comp_reps {
            out[j] += w * intersection_of_reps(tri, cr, ar)?;
        }
    }
    Ok(out)
}

/// Shear functional: total horizontal displacement of the representative
/// inside cylinder `j`, used as the twist estimator. The triangle charts of
/// the base triangulation are axis-aligned with the cylinder charts, so the
/// displacement is a plain sum over segments.
pub fn shear_sum(
    rz: &dyn DtRealizer,
    cyl_polys: &dyn Fn(usize) -> Vec<usize>,
    rep: &GeodesicRep,
    j: usize,
) -> Rat {
    use crate::geodesic::segments::rep_segments;
    let tri = rz.tri();
    let polys = cyl_polys(j);
    let emb = tri
        .embedding
        .as_ref()
        .expect("base triangulation carries the embedding");
    let mut total = Rat::from_integer(0.into());
    for seg in rep_segments(tri, rep) {
        if polys.contains(&emb.tri_polygon[seg.tri]) {
            total += &seg.b.x - &seg.a.x;
        }
    }
    total
}

pub fn pl_upper(rz: &dyn DtRealizer, dt: &DtVector) -> f64 {
    rz.realize_dt(dt).pl_length
}

pub fn approx_sqrt(sq: &Rat) -> f64 {
    rat_to_f64(sq).sqrt()
}
