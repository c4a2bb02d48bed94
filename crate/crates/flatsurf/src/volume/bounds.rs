//! The two volume scales compared against the counting estimate: the
//! thick-thin lower-bound scale and the collar upper-bound scale with the
//! flat proxy standing in for hyperbolic length.

use crate::geodesic::annulus::{expanding_annulus, AnnulusError};
use crate::geodesic::curve::CurveClass;
use crate::geodesic::cylinder::detect_cylinder;
use crate::geodesic::tighten::Tightener;
use crate::geom::triangulation::Triangulation;
use crate::num::rat_to_f64;
use crate::volume::thickthin::ThickThin;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    /// 1 / (prod over stable components of m(Omega) * prod over short
    /// curves of (m(C_j) + l_q(alpha_j)^2)).
    pub lower_scale: f64,
    /// prod over pants curves of proxy_hyp_length / l_q^2.
    pub upper_scale: f64,
    /// Fitted constants relating the counting estimate to each scale.
    pub c_low: f64,
    pub c_up: f64,
}

pub fn bound_report(
    tri: &Triangulation,
    tt: &ThickThin,
    pants_curves: &[CurveClass],
    b_hat: f64,
) -> BoundReport {
    let mut denom = 1.0f64;
    for (comp, mass) in tt.components.iter().zip(tt.component_masses.iter()) {
        if comp.stable {
            denom *= rat_to_f64(mass);
        }
    }
    for (mass, len_sq) in tt.short_masses.iter().zip(tt.short_len_sq.iter()) {
        denom *= rat_to_f64(mass) + rat_to_f64(len_sq);
    }
    let lower_scale = if denom > 0.0 { 1.0 / denom } else { f64::INFINITY };

    let tn = Tightener::new(tri);
    let mut upper_scale = 1.0f64;
    for c in pants_curves {
        let rep = tn.tighten(c).expect("pants curves tighten");
        let cyl = detect_cylinder(tri, &rep).expect("cylinder detection");
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
        upper_scale *= proxy / (rep.length * rep.length);
    }

    BoundReport {
        lower_scale,
        upper_scale,
        c_low: b_hat / lower_scale,
        c_up: if b_hat > 0.0 {
            upper_scale / b_hat
        } else {
            f64::INFINITY
        },
    }
}
