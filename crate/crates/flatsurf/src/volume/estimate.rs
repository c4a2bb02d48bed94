//! Volume estimates from count data.

use crate::volume::count::CountResult;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EstimateError {
    #[error("need at least two cutoffs with positive counts")]
    InsufficientData,
}

#[derive(Clone, Debug, Serialize)]
pub struct VolumeEstimate {
    /// Last normalized count N(L) / L^{6g-6}.
    pub b_hat: f64,
    /// Relative change between the last two estimates.
    pub final_ratio: f64,
    /// Last two estimates differ by less than 25 percent.
    pub converged: bool,
}

pub fn volume_estimate(cr: &CountResult) -> Result<VolumeEstimate, EstimateError> {
    let positive: Vec<f64> = cr
        .counts
        .iter()
        .zip(cr.estimates.iter())
        .filter(|(&n, _)| n > 0)
        .map(|(_, &e)| e)
        .collect();
    if positive.len() < 2 {
        return Err(EstimateError::InsufficientData);
    }
    let last = positive[positive.len() - 1];
    let prev = positive[positive.len() - 2];
    let final_ratio = last / prev;
    Ok(VolumeEstimate {
        b_hat: last,
        final_ratio,
        converged: (final_ratio - 1.0).abs() < 0.25,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(counts: Vec<u64>, cutoffs: Vec<f64>) -> CountResult {
        let estimates: Vec<f64> = counts
            .iter()
            .zip(cutoffs.iter())
            .map(|(&n, &l)| n as f64 / l.powi(6))
            .collect();
        let ratios = estimates
            .windows(2)
            .map(|w| w[1] / w[0])
            .collect();
        CountResult {
            cutoffs,
            counts,
            estimates,
            ratios,
            genus: 2,
            visited: 0,
            pruned_skipped: 0,
            shell_tightens: 0,
            wall_ms: 0,
        }
    }

    #[test]
    fn exact_power_law_converges() {
        // N = 3 L^6 exactly.
        let cutoffs = vec![2.0, 4.0, 8.0];
        let counts = vec![3 * 64, 3 * 4096, 3 * 262144];
        let est = volume_estimate(&synthetic(counts, cutoffs)).unwrap();
        assert!((est.b_hat - 3.0).abs() < 1e-12);
        assert!(est.converged);
        assert!((est.final_ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn insufficient_data() {
        let r = volume_estimate(&synthetic(vec![0, 5], vec![1.0, 2.0]));
        assert_eq!(r.unwrap_err(), EstimateError::InsufficientData);
    }
}
