//! Unfolding of the triangle strip of a crossing word into the plane, and
//! exact string-pulling (funnel) through the resulting portal sequence.

use crate::geodesic::curve::CurveClass;
use crate::geom::triangulation::{next_he, Triangulation};
use crate::geom::{HalfTranslation, Vec2};
use crate::num::Rat;
use num_traits::{Signed, Zero};

/// One crossed edge, developed into the base chart. `left` is the portal
/// endpoint on the travel-left of the curve (the start corner of the entered
/// halfedge), `right` the other.
#[derive(Clone, Debug)]
pub struct Portal {
    pub left: Vec2,
    pub right: Vec2,
    /// Index into the word of the crossing (mod word length).
    pub word_idx: usize,
    /// Vertex class ids of the endpoints.
    pub left_vertex: usize,
    pub right_vertex: usize,
}

impl Portal {
    pub fn endpoint(&self, side: Side) -> &Vec2 {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }
    pub fn vertex(&self, side: Side) -> usize {
        match side {
            Side::Left => self.left_vertex,
            Side::Right => self.right_vertex,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// The unfolded strip of a cyclic word: placements of each crossed triangle
/// in the chart of the first one, the closing holonomy, and the portal list
/// for one period (crossings `w_1 .. w_{n-1}` then the closing `w_0`).
pub struct Strip {
    pub word: Vec<usize>,
    pub placements: Vec<HalfTranslation>,
    pub holonomy: HalfTranslation,
    /// `n` portals; `portals[i]` is the crossing of `word[(i+1) % n]`.
    pub portals: Vec<Portal>,
}

impl Strip {
    pub fn unfold(tri: &Triangulation, curve: &CurveClass) -> Strip {
        let n = curve.word.len();
        assert!(n > 0, "cannot unfold an empty word");
        let mut placements = Vec::with_capacity(n);
        placements.push(HalfTranslation::identity());
        for i in 1..n {
            let g = tri.transition_into(tri.twin[curve.word[i]]);
            let phi = placements[i - 1].compose(&g);
            placements.push(phi);
        }
        let g_close = tri.transition_into(tri.twin[curve.word[0]]);
        let holonomy = placements[n - 1].compose(&g_close);

        let mut portals = Vec::with_capacity(n);
        for i in 1..=n {
            let (he, phi) = if i < n {
                (curve.word[i], &placements[i])
            } else {
                (curve.word[0], &holonomy)
            };
            let start = phi.apply(&tri.corner_pos(he));
            let end = phi.apply(&tri.corner_pos(next_he(he)));
            portals.push(Portal {
                left: start,
                right: end,
                word_idx: i % n,
                left_vertex: tri.vstart[he],
                right_vertex: tri.vstart[next_he(he)],
            });
        }
        Strip {
            word: curve.word.clone(),
            placements,
            holonomy,
            portals,
        }
    }

    /// Portals for up to two periods: `extended()[k]` for `k < n` is the
    /// first period, for `k >= n` the holonomy image of portal `k - n`.
    pub fn extended_portals(&self) -> Vec<Portal> {
        let n = self.portals.len();
        let mut out = Vec::with_capacity(2 * n);
        out.extend(self.portals.iter().cloned());
        for p in &self.portals {
            out.push(Portal {
                left: self.holonomy.apply(&p.left),
                right: self.holonomy.apply(&p.right),
                word_idx: p.word_idx,
                left_vertex: p.left_vertex,
                right_vertex: p.right_vertex,
            });
        }
        out
    }
}

/// A node of a pulled-taut path.
#[derive(Clone, Debug)]
pub struct PathNode {
    pub pos: Vec2,
    /// Portal endpoint identity within the processed portal slice, if the
    /// node is a portal corner (interior pivots always are).
    pub portal: Option<(usize, Side)>,
    pub vertex: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct TautPath {
    pub nodes: Vec<PathNode>,
    pub chords_sq: Vec<Rat>,
    pub length: f64,
}

fn area(a: &Vec2, b: &Vec2, c: &Vec2) -> Rat {
    (b - a).cross(&(c - a))
}

/// Shortest path from `start` to `end` through the portal slice, in order.
/// Portal endpoints lying exactly on the path are recorded as nodes.
pub fn funnel(start: &Vec2, portals: &[Portal], end: &Vec2) -> TautPath {
    let mut nodes: Vec<PathNode> = vec![PathNode {
        pos: start.clone(),
        portal: None,
        vertex: None,
    }];

    if !portals.is_empty() {
        let mut apex = start.clone();
        let mut left = portals[0].left.clone();
        let mut right = portals[0].right.clone();
        let mut left_idx = 0usize;
        let mut right_idx = 0usize;
        let mut i = 1usize;
        // One virtual closing portal at the end point.
        let m = portals.len();
        while i <= m {
            let (l, r) = if i < m {
                (portals[i].left.clone(), portals[i].right.clone())
            } else {
                (end.clone(), end.clone())
            };
            // Right leg.
            if area(&apex, &right, &r) >= Rat::zero() {
                if apex == right || area(&apex, &left, &r) <= Rat::zero() {
                    right = r.clone();
                    right_idx = i;
                } else {
                    // Corner around the left endpoint.
                    apex = left.clone();
                    nodes.push(PathNode {
                        pos: apex.clone(),
                        portal: Some((left_idx, Side::Left)),
                        vertex: Some(portals[left_idx].left_vertex),
                    });
                    i = left_idx + 1;
                    left_idx = i;
                    right_idx = i;
                    if i < m {
                        left = portals[i].left.clone();
                        right = portals[i].right.clone();
                    } else {
                        left = end.clone();
                        right = end.clone();
                    }
                    i += 1;
                    continue;
                }
            }
            // Left leg.
            if area(&apex, &left, &l) <= Rat::zero() {
                if apex == left || area(&apex, &right, &l) >= Rat::zero() {
                    left = l;
                    left_idx = i;
                } else {
                    apex = right.clone();
                    nodes.push(PathNode {
                        pos: apex.clone(),
                        portal: Some((right_idx, Side::Right)),
                        vertex: Some(portals[right_idx].right_vertex),
                    });
                    i = right_idx + 1;
                    left_idx = i;
                    right_idx = i;
                    if i < m {
                        left = portals[i].left.clone();
                        right = portals[i].right.clone();
                    } else {
                        left = end.clone();
                        right = end.clone();
                    }
                    i += 1;
                    continue;
                }
            }
            i += 1;
        }
    }

    nodes.push(PathNode {
        pos: end.clone(),
        portal: None,
        vertex: None,
    });

    // Record portal endpoints lying exactly on a chord as path nodes, so
    // straight runs through cone points are visible to callers.
    let mut full: Vec<PathNode> = Vec::with_capacity(nodes.len());
    for w in nodes.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        full.push(a.clone());
        let dir = &b.pos - &a.pos;
        if dir.is_zero() {
            continue;
        }
        // Which portals lie between these two nodes? Scan all and pick the
        // collinear ones strictly inside the chord, ordered along it.
        let mut on_chord: Vec<(Rat, PathNode)> = Vec::new();
        for (pi, p) in portals.iter().enumerate() {
            for side in [Side::Left, Side::Right] {
                let q = p.endpoint(side);
                if area(&a.pos, &b.pos, q).is_zero() {
                    let t = dir.dot(&(q - &a.pos));
                    if t.is_positive() && t < dir.norm_sq() {
                        on_chord.push((
                            t,
                            PathNode {
                                pos: q.clone(),
                                portal: Some((pi, side)),
                                vertex: Some(p.vertex(side)),
                            },
                        ));
                    }
                }
            }
        }
        on_chord.sort_by(|x, y| x.0.cmp(&y.0));
        on_chord.dedup_by(|x, y| x.1.pos == y.1.pos);
        full.extend(on_chord.into_iter().map(|(_, n)| n));
    }
    full.push(nodes.last().unwrap().clone());

    let chords_sq: Vec<Rat> = full
        .windows(2)
        .map(|w| (&w[1].pos - &w[0].pos).norm_sq())
        .collect();
    let length = chords_sq
        .iter()
        .map(|s| crate::num::rat_to_f64(s).sqrt())
        .sum();
    TautPath {
        nodes: full,
        chords_sq,
        length,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat_int;

    fn v(x: i64, y: i64) -> Vec2 {
        Vec2::new(rat_int(x), rat_int(y))
    }

    fn portal(lx: i64, ly: i64, rx: i64, ry: i64, i: usize) -> Portal {
        Portal {
            left: v(lx, ly),
            right: v(rx, ry),
            word_idx: i,
            left_vertex: 0,
            right_vertex: 0,
        }
    }

    #[test]
    fn straight_corridor() {
        // Portals all crossed by the straight segment (0,0) -> (4,0).
        let portals = vec![
            portal(1, 1, 1, -1, 0),
            portal(2, 1, 2, -1, 1),
            portal(3, 1, 3, -1, 2),
        ];
        let p = funnel(&v(0, 0), &portals, &v(4, 0));
        assert_eq!(p.nodes.len(), 2);
        assert_eq!(p.chords_sq, vec![rat_int(16)]);
    }

    #[test]
    fn bend_around_corner() {
        // Narrowing portals force the path around (2, 1).
        let portals = vec![
            portal(1, 1, 1, -3, 0),
            portal(2, 1, 2, -3, 1),
            portal(2, 1, 5, 1, 2), // forces passage below the point (2,1)...
        ];
        let p = funnel(&v(0, 0), &portals, &v(4, 4));
        // Path must bend at (2,1): total length = |(2,1)| + |(2,3)|.
        assert_eq!(p.nodes.len(), 3);
        assert_eq!(p.nodes[1].pos, v(2, 1));
        assert_eq!(p.chords_sq, vec![rat_int(5), rat_int(13)]);
    }

    #[test]
    fn straight_through_vertex_recorded() {
        // A portal endpoint lies exactly on the straight path.
        let portals = vec![portal(2, 0, 2, -2, 0), portal(3, 1, 3, -1, 1)];
        let p = funnel(&v(0, 0), &portals, &v(6, 0));
        // (2,0) is on the chord; it must appear as an intermediate node.
        assert!(p.nodes.iter().any(|n| n.pos == v(2, 0)));
        let total: f64 = p.length;
        assert!((total - 6.0).abs() < 1e-12);
    }

    #[test]
    fn zigzag_grazes_shared_corner() {
        // The shortest route through these portals grazes the right corner
        // (3,0) where the horizontal portal meets the vertical one.
        let portals = vec![
            portal(1, 0, 1, -2, 0),
            portal(1, 0, 3, 0, 1),
            portal(3, -2, 3, 0, 2),
        ];
        let p = funnel(&v(0, -1), &portals, &v(4, -1));
        assert_eq!(p.nodes.len(), 3);
        assert_eq!(p.nodes[1].pos, v(3, 0));
        assert_eq!(p.chords_sq, vec![rat_int(10), rat_int(2)]);
    }
}
