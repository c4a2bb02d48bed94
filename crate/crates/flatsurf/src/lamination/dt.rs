//! Dehn-Thurston coordinate vectors and their chart arithmetic.

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Integral Dehn-Thurston vector over a pants decomposition: one
/// (intersection, twist) pair per pants curve. Convention: `n_j = 0` forces
/// `t_j >= 0` (that many parallel copies of the curve); right twists are
/// positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DtVector {
    pub pairs: Vec<(u32, i64)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DtError {
    #[error("coordinate {0}: n = 0 requires t >= 0")]
    NormalizationViolation(usize),
    #[error("pants {0}: boundary intersections have odd sum")]
    ParityViolation(usize),
    #[error("twist signs disagree in coordinate {0}")]
    ChartMismatch(usize),
    #[error("wrong number of coordinates: got {got}, expected {want}")]
    WrongLength { got: usize, want: usize },
}

/// Combinatorial pants decomposition: each pants lists its three boundary
/// slots as curve indices (a curve bounding one pants on both sides appears
/// twice).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PantsStructure {
    pub n_curves: usize,
    pub pants: Vec<[usize; 3]>,
}

impl PantsStructure {
    /// Genus-2 chain: pants 0 = (a1, a1, a2), pants 1 = (a3, a3, a2).
    pub fn genus2_chain() -> Self {
        PantsStructure {
            n_curves: 3,
            pants: vec![[0, 0, 1], [2, 2, 1]],
        }
    }

    pub fn check_admissible(&self, dt: &DtVector) -> Result<(), DtError> {
        if dt.pairs.len() != self.n_curves {
            return Err(DtError::WrongLength {
                got: dt.pairs.len(),
                want: self.n_curves,
            });
        }
        for (j, &(n, t)) in dt.pairs.iter().enumerate() {
            if n == 0 && t < 0 {
                return Err(DtError::NormalizationViolation(j));
            }
        }
        for (pi, p) in self.pants.iter().enumerate() {
            let sum: u64 = p.iter().map(|&c| dt.pairs[c].0 as u64).sum();
            if sum % 2 != 0 {
                return Err(DtError::ParityViolation(pi));
            }
        }
        Ok(())
    }
}

impl DtVector {
    pub fn new(pairs: Vec<(u32, i64)>) -> Self {
        DtVector { pairs }
    }

    pub fn zero(n: usize) -> Self {
        DtVector {
            pairs: vec![(0, 0); n],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.pairs.iter().all(|&(n, t)| n == 0 && t == 0)
    }

    /// Componentwise carried sum on a common chart: twist signs must agree
    /// coordinatewise, and the sum must stay admissible.
    pub fn carried_sum(
        &self,
        other: &DtVector,
        pants: &PantsStructure,
    ) -> Result<DtVector, DtError> {
        if self.pairs.len() != other.pairs.len() {
            return Err(DtError::WrongLength {
                got: other.pairs.len(),
                want: self.pairs.len(),
            });
        }
        for (j, (&(_, ta), &(_, tb))) in
            self.pairs.iter().zip(other.pairs.iter()).enumerate()
        {
            if ta.signum() * tb.signum() < 0 {
                return Err(DtError::ChartMismatch(j));
            }
        }
        let sum = DtVector {
            pairs: self
                .pairs
                .iter()
                .zip(other.pairs.iter())
                .map(|(&(na, ta), &(nb, tb))| (na + nb, ta + tb))
                .collect(),
        };
        pants.check_admissible(&sum)?;
        Ok(sum)
    }

    pub fn scaled(&self, k: u32) -> DtVector {
        DtVector {
            pairs: self
                .pairs
                .iter()
                .map(|&(n, t)| (n * k, t * k as i64))
                .collect(),
        }
    }

    /// Twist shift `r = t mod n` in `[0, n)` and quotient `q` with
    /// `t = q n + r`, for the cylinder matching.
    pub fn twist_split(t: i64, n: u32) -> (i64, u32) {
        if n == 0 {
            return (0, 0);
        }
        let r = t.rem_euclid(n as i64);
        let q = (t - r) / n as i64;
        (q, r as u32)
    }
}

/// Euclid helper re-exported for window math.
pub fn gcd_u32(a: u32, b: u32) -> u32 {
    a.gcd(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_enforced() {
        let p = PantsStructure::genus2_chain();
        assert!(p
            .check_admissible(&DtVector::new(vec![(1, 0), (1, 0), (1, 0)]))
            .is_err());
        assert!(p
            .check_admissible(&DtVector::new(vec![(1, 0), (2, 0), (1, 0)]))
            .is_ok());
        assert!(p
            .check_admissible(&DtVector::new(vec![(0, -1), (0, 0), (0, 0)]))
            .is_err());
    }

    #[test]
    fn twist_split_euclid() {
        assert_eq!(DtVector::twist_split(7, 3), (2, 1));
        assert_eq!(DtVector::twist_split(-7, 3), (-3, 2));
        assert_eq!(DtVector::twist_split(0, 3), (0, 0));
    }

    #[test]
    fn carried_sum_chart() {
        let p = PantsStructure::genus2_chain();
        let a = DtVector::new(vec![(1, 2), (2, 0), (0, 1)]);
        let b = DtVector::new(vec![(1, 3), (0, 0), (0, 4)]);
        let s = a.carried_sum(&b, &p).unwrap();
        assert_eq!(s.pairs, vec![(2, 5), (2, 0), (0, 5)]);
        let c = DtVector::new(vec![(1, -1), (0, 0), (0, 0)]);
        assert_eq!(a.carried_sum(&c, &p), Err(DtError::ChartMismatch(0)));
    }
}
