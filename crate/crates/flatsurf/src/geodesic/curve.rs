//! Free homotopy classes as cyclic crossing words on a triangulation.
//!
//! A word lists the halfedges a transverse closed curve crosses, in order;
//! entry `h` means the curve passes into `tri_of(h)` through the edge
//! `{h, twin(h)}`. Between consecutive entries the curve stays inside one
//! triangle, so `tri_of(twin(word[i+1])) == tri_of(word[i])` cyclically.

use crate::geom::triangulation::{tri_of, Triangulation};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CurveClass {
    pub word: Vec<usize>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CurveError {
    #[error("crossing {0} out of range")]
    BadHalfedge(usize),
    #[error("entries {0} and {1} do not share a triangle")]
    NotConnected(usize, usize),
    #[error("word is empty")]
    Empty,
}

impl CurveClass {
    pub fn new(word: Vec<usize>) -> Self {
        CurveClass { word }
    }

    pub fn validate(&self, tri: &Triangulation) -> Result<(), CurveError> {
        if self.word.is_empty() {
            return Err(CurveError::Empty);
        }
        let n = self.word.len();
        for &h in &self.word {
            if h >= tri.n_halfedges() {
                return Err(CurveError::BadHalfedge(h));
            }
        }
        for i in 0..n {
            let cur = self.word[i];
            let nxt = self.word[(i + 1) % n];
            if tri_of(tri.twin[nxt]) != tri_of(cur) {
                return Err(CurveError::NotConnected(i, (i + 1) % n));
            }
        }
        Ok(())
    }

    /// Remove immediate backtracks (`h` followed by `twin(h)`) cyclically
    /// until none remain. May empty the word (null-homotopic input).
    pub fn reduced(&self, tri: &Triangulation) -> CurveClass {
        let mut w = self.word.clone();
        loop {
            let n = w.len();
            if n < 2 {
                // A single crossing cannot backtrack onto itself.
                break;
            }
            let mut removed = false;
            let mut i = 0;
            while i < w.len() && w.len() >= 2 {
                let n = w.len();
                let j = (i + 1) % n;
                if w[j] == tri.twin[w[i]] {
                    // Remove the later index first.
                    let (a, b) = if i < j { (i, j) } else { (j, i) };
                    w.remove(b);
                    w.remove(a);
                    removed = true;
                    i = 0;
                } else {
                    i += 1;
                }
            }
            if !removed {
                break;
            }
        }
        CurveClass { word: w }
    }

    /// Canonical rotation: lexicographically smallest cyclic shift. Used for
    /// comparing words for literal equality, not homotopy.
    pub fn canonical_rotation(&self) -> CurveClass {
        if self.word.is_empty() {
            return self.clone();
        }
        let n = self.word.len();
        let mut best = 0usize;
        for s in 1..n {
            for k in 0..n {
                let a = self.word[(s + k) % n];
                let b = self.word[(best + k) % n];
                if a != b {
                    if a < b {
                        best = s;
                    }
                    break;
                }
            }
        }
        let word = (0..n).map(|k| self.word[(best + k) % n]).collect();
        CurveClass { word }
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::torus;
    use crate::geom::triangulation::triangulate;

    #[test]
    fn reduction_removes_backtracks() {
        let t = triangulate(&torus());
        // Pick any halfedge and its twin: enter+exit immediately.
        let h = 0usize;
        let w = CurveClass::new(vec![h, t.twin[h]]);
        assert!(w.validate(&t).is_ok());
        let r = w.reduced(&t);
        assert!(r.is_empty());
    }

    #[test]
    fn canonical_rotation_minimal() {
        let c = CurveClass::new(vec![3, 1, 2]);
        assert_eq!(c.canonical_rotation().word, vec![1, 2, 3]);
    }
}
