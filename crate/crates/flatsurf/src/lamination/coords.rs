//! Dehn-Thurston coordinates of a multicurve: intersection numbers from the
//! geodesic engine, twists from the cylinder shear functional verified by
//! exact class comparison.
//!
//! The shear sum of a representative through cylinder j changes by exactly
//! `l_j` per unit twist for the canonical realizations, but tightening can
//! move a bounded amount of shear between neighbouring cylinders, so the
//! rounded estimate is only a starting point: candidates around it are
//! verified by re-realizing and comparing classes exactly, which the
//! injectivity of the Dehn-Thurston parametrization makes decisive.

use crate::geodesic::tighten::Tightener;
use crate::lamination::dt::{DtError, DtVector};
use crate::lamination::realize::{
    intersections_with_alphas, realize, DtRealizer, IntegralMulticurve, RealizeError,
};
use crate::num::{rat_to_f64, Rat};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoordsError {
    #[error("components of the multicurve intersect")]
    NotSimple,
    #[error("realization failed: {0}")]
    Realize(#[from] RealizeError),
    #[error("intersection computation failed: {0}")]
    Intersect(#[from] crate::geodesic::intersect::IntersectError),
    #[error("twist search did not converge")]
    TwistSearch,
    #[error("inadmissible coordinates: {0}")]
    Inadmissible(#[from] DtError),
}

/// Canonical signature of a multicurve: sorted (canonical word, weight).
pub fn multicurve_signature(
    rz: &dyn DtRealizer,
    mc: &IntegralMulticurve,
) -> Result<Vec<(Vec<usize>, u64)>, RealizeError> {
    let tn = Tightener::new(rz.tri());
    let mut sig: Vec<(Vec<usize>, u64)> = Vec::new();
    for (c, w) in &mc.components {
        let rep = tn.tighten(c)?;
        let key = rep.word.canonical_rotation().word;
        match sig.iter_mut().find(|(k, _)| *k == key) {
            Some((_, tot)) => *tot += w,
            None => sig.push((key, *w)),
        }
    }
    sig.sort();
    Ok(sig)
}

/// Total shear of the multicurve through cylinder j.
fn shear_total(
    rz: &dyn DtRealizer,
    cyl_polys: &dyn Fn(usize) -> Vec<usize>,
    mc: &IntegralMulticurve,
    j: usize,
) -> Result<Rat, RealizeError> {
    use crate::lamination::realize::shear_sum;
    let tn = Tightener::new(rz.tri());
    let mut total = Rat::from_integer(0.into());
    for (c, w) in &mc.components {
        let rep = tn.tighten(c)?;
        let s = shear_sum(rz, cyl_polys, &rep, j);
        total += &s * &Rat::from_integer((*w).into());
    }
    Ok(total)
}

pub fn dt_coordinates(
    rz: &dyn DtRealizer,
    cyl_polys: &dyn Fn(usize) -> Vec<usize>,
    mc: &IntegralMulticurve,
) -> Result<DtVector, CoordsError> {
    let pants = rz.pants();
    let k = pants.n_curves;
    // Intersection numbers.
    let ns = intersections_with_alphas(rz, mc)?;
    let n_vec: Vec<u32> = ns.iter().map(|&x| x as u32).collect();

    // Zero-twist reference.
    let zero_dt = DtVector::new(n_vec.iter().map(|&n| (n, 0i64)).collect());
    pants.check_admissible(&zero_dt)?;
    let zero_mc = realize(rz, &zero_dt)?;

    // Twist estimates from the shear difference.
    let lengths = rz.alpha_lengths();
    let mut est = Vec::with_capacity(k);
    for j in 0..k {
        let s_mc = shear_total(rz, cyl_polys, mc, j)?;
        let s_zero = shear_total(rz, cyl_polys, &zero_mc, j)?;
        let u = rat_to_f64(&(&s_mc - &s_zero)) / rat_to_f64(&lengths[j]);
        let mut t = u.round() as i64;
        if n_vec[j] == 0 && t < 0 {
            t = 0;
        }
        est.push(t);
    }

    // Verified search around the estimate, by L1 distance.
    let target_sig = multicurve_signature(rz, mc)?;
    let radius = 3i64;
    let mut deltas: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::new();
        for d in &deltas {
            for v in -radius..=radius {
                let mut d2 = d.clone();
                d2.push(v);
                next.push(d2);
            }
        }
        deltas = next;
    }
    deltas.sort_by_key(|d| d.iter().map(|x| x.abs()).sum::<i64>());
    for d in &deltas {
        let cand = DtVector::new(
            (0..k)
                .map(|j| (n_vec[j], est[j] + d[j]))
                .collect(),
        );
        if pants.check_admissible(&cand).is_err() {
            continue;
        }
        let cand_mc = realize(rz, &cand)?;
        if multicurve_signature(rz, &cand_mc)? == target_sig {
            return Ok(cand);
        }
    }
    Err(CoordsError::TwistSearch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;
    use crate::strebel::ChainSurface;

    #[test]
    fn roundtrip_small_vectors() {
        let c = ChainSurface::new(
            [rat(1, 1), rat(1, 1), rat(1, 1)],
            [rat(1, 1), rat(1, 1), rat(1, 1)],
        )
        .unwrap();
        let polys = |j: usize| c.cylinder_polys(j);
        for pairs in [
            vec![(0u32, 1i64), (0, 0), (0, 0)],
            vec![(1, 0), (0, 0), (0, 0)],
            vec![(1, 2), (0, 0), (0, 0)],
            vec![(0, 0), (2, 0), (0, 0)],
            vec![(0, 0), (2, 1), (0, 0)],
            vec![(1, 0), (2, 0), (1, 0)],
            vec![(2, -1), (0, 2), (0, 0)],
        ] {
            let dt = DtVector::new(pairs.clone());
            let mc = realize(&c, &dt).unwrap();
            let back = dt_coordinates(&c, &polys, &mc).unwrap();
            assert_eq!(back, dt, "round trip failed for {pairs:?}");
        }
    }
}
